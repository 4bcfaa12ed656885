#include "groupsim/errors.hpp"
#include "groupsim/json_io.hpp"

#include <gtest/gtest.h>

using namespace groupsim;

namespace {

Json event_json() {
    return Json::parse(R"({
        "id": "evt",
        "title": "Exam reform",
        "content": "The ministry announced a reform.",
        "domain": "education",
        "country": "CN",
        "platform": "weibo",
        "start_date": "2024-06-01",
        "ground_truth": {
            "views": [10, 20, 30, 40, 50, 60, 70],
            "likes": [1, 2, 3, 4, 5, 6, 7],
            "comments": [0, 0, 1, 1, 0, 0, 0],
            "shares": [0, 1, 0, 0, 0, 0, 0]
        }
    })");
}

std::string field_of(const Json& j) {
    try {
        event_from_json(j);
    } catch (const MalformedEvent& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(EventJson, RoundTrip) {
    const auto e = event_from_json(event_json());
    EXPECT_EQ(e.id, "evt");
    EXPECT_EQ(e.domain, Domain::education);
    EXPECT_EQ(e.platform, Platform::weibo);
    EXPECT_EQ(format_date(e.start_date), "2024-06-01");
    EXPECT_EQ(e.ground_truth.views[6], 70);
    EXPECT_EQ(event_from_json(event_to_json(e)), e);
}

TEST(EventJson, MissingFieldsAreNamed) {
    for (const char* key : {"id", "title", "content", "domain", "country", "platform", "start_date",
                            "ground_truth"}) {
        auto j = event_json();
        j.erase(key);
        EXPECT_EQ(field_of(j), key);
    }
    auto j = event_json();
    j["ground_truth"].erase("shares");
    EXPECT_EQ(field_of(j), "shares");
}

TEST(EventJson, MistypedFieldsAreRejected) {
    auto j = event_json();
    j["title"] = 5;
    EXPECT_EQ(field_of(j), "title");

    j = event_json();
    j["domain"] = "astrology";
    EXPECT_EQ(field_of(j), "domain");

    j = event_json();
    j["start_date"] = "2024-02-30";
    EXPECT_EQ(field_of(j), "start_date");

    j = event_json();
    j["ground_truth"]["views"][2] = 1.5;
    EXPECT_EQ(field_of(j), "views");

    j = event_json();
    j["ground_truth"]["views"].push_back(80);
    EXPECT_EQ(field_of(j), "views");
}

TEST(EmotionJson, RoundTrip) {
    const EmotionState e{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto j = emotions_to_json(e);
    EXPECT_DOUBLE_EQ(j.at("emotions").at("anger").get<double>(), 0.3);
    EXPECT_DOUBLE_EQ(j.at("attitudes").at("pessimism").get<double>(), 0.5);
    EXPECT_EQ(emotions_from_json(j), e);
}

TEST(FadingJson, OverlaysPresentKeys) {
    const auto j = Json::parse(R"({"forgetting_p": 0.5, "alpha": [1, 1, 2]})");
    const auto f = fading_from_json(j);
    EXPECT_DOUBLE_EQ(f.forgetting_p, 0.5);
    EXPECT_DOUBLE_EQ(f.alpha[2], 2.0);
    EXPECT_EQ(f.memory_capacity, FadingConfig{}.memory_capacity);
    const auto back = fading_from_json(fading_to_json(f));
    EXPECT_EQ(back.alpha, f.alpha);
    EXPECT_EQ(back.amplitude, f.amplitude);
    EXPECT_EQ(back.fading_rate, f.fading_rate);
}

TEST(AgentJson, IncludesMemoryOnRequest) {
    GroupAgent a;
    a.id = "x-agents";
    a.group = "x";
    a.population = 10;
    a.memory.push({MemoryKind::decision, 1, "view", 0.25, {}});
    EXPECT_FALSE(agent_to_json(a).contains("memory"));
    const auto j = agent_to_json(a, true);
    ASSERT_TRUE(j.contains("memory"));
    EXPECT_EQ(j.at("id"), "x-agents");
}
