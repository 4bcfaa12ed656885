#include "groupsim/core.hpp"
#include "groupsim/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace groupsim;

namespace {

EventRecord valid_event() {
    EventRecord e;
    e.id = "e1";
    e.title = "title";
    e.content = "content";
    e.country = "CN";
    e.start_date = *parse_date("2024-06-01");
    e.ground_truth.views = {1, 2, 3, 4, 5, 6, 7};
    e.ground_truth.likes = {0, 0, 0, 0, 0, 0, 0};
    e.ground_truth.comments = {0, 0, 0, 0, 0, 0, 0};
    e.ground_truth.shares = {0, 0, 0, 0, 0, 0, 0};
    return e;
}

}  // namespace

TEST(Dates, RoundTripAndArithmetic) {
    const auto d = parse_date("2024-02-28");
    ASSERT_TRUE(d);
    EXPECT_EQ(format_date(*d), "2024-02-28");
    EXPECT_EQ(format_date(add_days(*d, 1)), "2024-02-29");
    EXPECT_EQ(format_date(add_days(*d, 2)), "2024-03-01");
    EXPECT_FALSE(parse_date("2024-13-01"));
    EXPECT_FALSE(parse_date("2023-02-29"));
    EXPECT_FALSE(parse_date("24-01-01"));
    EXPECT_FALSE(parse_date("2024/01/01"));
}

TEST(Enums, NamesRoundTrip) {
    for (auto d : kAllDomains) EXPECT_EQ(parse_domain(to_string(d)), d);
    for (auto a : kAllActions) EXPECT_EQ(parse_action(to_string(a)), a);
    for (auto c : {Characteristic::susceptible, Characteristic::ordinary, Characteristic::calm}) {
        EXPECT_EQ(parse_characteristic(to_string(c)), c);
    }
    for (auto p : {Platform::twitter, Platform::reddit, Platform::weibo}) {
        EXPECT_EQ(parse_platform(to_string(p)), p);
    }
    EXPECT_FALSE(parse_domain("astrology"));
}

TEST(CountryCode, TwoUpperCaseLetters) {
    EXPECT_TRUE(is_country_code("CN"));
    EXPECT_TRUE(is_country_code("US"));
    EXPECT_FALSE(is_country_code("cn"));
    EXPECT_FALSE(is_country_code("CHN"));
    EXPECT_FALSE(is_country_code(""));
}

TEST(ValidateEvent, AcceptsValidRecord) { EXPECT_EQ(validate_event(valid_event()), valid_event()); }

TEST(ValidateEvent, NamesOffendingField) {
    auto short_series = valid_event();
    short_series.ground_truth.likes.pop_back();
    try {
        validate_event(short_series);
        FAIL() << "expected MalformedEvent";
    } catch (const MalformedEvent& e) {
        EXPECT_EQ(e.field(), "likes");
    }

    auto negative = valid_event();
    negative.ground_truth.views[3] = -1;
    EXPECT_THROW(validate_event(negative), MalformedEvent);

    auto bad_country = valid_event();
    bad_country.country = "China";
    try {
        validate_event(bad_country);
        FAIL();
    } catch (const MalformedEvent& e) {
        EXPECT_EQ(e.field(), "country");
    }

    auto no_id = valid_event();
    no_id.id.clear();
    EXPECT_THROW(validate_event(no_id), MalformedEvent);
}

TEST(EmotionState, ClampKeepsUnitRange) {
    EmotionState e{1.5, -0.2, 0.5, 2.0, 0.0};
    EXPECT_FALSE(e.in_range());
    const auto c = e.clamped();
    EXPECT_TRUE(c.in_range());
    EXPECT_EQ(c, (EmotionState{1.0, 0.0, 0.5, 1.0, 0.0}));
    EXPECT_EQ(EmotionState::from_channels(c.channels()), c);
}

TEST(FadingConfig, NormalizesAlpha) {
    FadingConfig f;
    f.alpha = {2.0, 1.0, 1.0};
    const auto n = f.normalized();
    EXPECT_DOUBLE_EQ(n.alpha[0], 0.5);
    EXPECT_DOUBLE_EQ(n.alpha[1], 0.25);
    EXPECT_DOUBLE_EQ(n.alpha[2], 0.25);
}

TEST(FadingConfig, RejectsOutOfRange) {
    FadingConfig zero_alpha;
    zero_alpha.alpha = {0, 0, 0};
    EXPECT_THROW((void)zero_alpha.normalized(), ValidationError);

    FadingConfig p;
    p.forgetting_p = 1.5;
    EXPECT_THROW((void)p.normalized(), ValidationError);

    FadingConfig amp;
    amp.amplitude = {0.3, 0.6, 1.0};
    EXPECT_THROW((void)amp.normalized(), ValidationError);

    FadingConfig amp0;
    amp0.amplitude = {1.0, 0.5, 0.0};
    EXPECT_THROW((void)amp0.normalized(), ValidationError);

    FadingConfig rate;
    rate.fading_rate = {0.1, 1.1, 0.1};
    EXPECT_THROW((void)rate.normalized(), ValidationError);
}

TEST(Memory, FifoEvictsOldest) {
    Memory m(3);
    for (int d = 1; d <= 5; ++d) m.push({MemoryKind::perception, d, "p", 0.5, {}});
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.items().front().day, 3);
    EXPECT_EQ(m.items().back().day, 5);
    EXPECT_THROW(Memory(0), ValidationError);
}

TEST(PopulationWeights, SumToOne) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GroupAgent> agents(1 + gen() % 20);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            agents[i].id = "a" + std::to_string(i);
            agents[i].population = static_cast<std::int64_t>(gen() % 100000000);
        }
        agents[0].population += 1;
        const auto w = compute_population_weights(agents);
        double sum = 0.0;
        for (const auto& [id, v] : w) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(PopulationWeights, Examples) {
    std::vector<GroupAgent> two(2);
    two[0].id = "s";
    two[0].population = 58030769;
    two[1].id = "t";
    two[1].population = 3450000;
    const auto w = compute_population_weights(two);
    EXPECT_NEAR(w.at("s"), 58030769.0 / 61480769.0, 1e-15);

    std::vector<GroupAgent> zero(2);
    zero[0].id = "a";
    zero[1].id = "b";
    EXPECT_THROW(compute_population_weights(zero), EmptyPopulation);
    EXPECT_THROW(compute_population_weights(std::vector<GroupAgent>{}), EmptyPopulation);
}

TEST(ActionDecision, Plans) {
    ActionDecision d;
    d.plan = {ActionKind::view, ActionKind::comment};
    EXPECT_TRUE(d.plans(ActionKind::comment));
    EXPECT_FALSE(d.plans(ActionKind::share));
}
