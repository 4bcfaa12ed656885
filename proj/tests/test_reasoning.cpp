#include "groupsim/errors.hpp"
#include "groupsim/reasoning.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace groupsim;

namespace {

EventRecord event() {
    EventRecord e;
    e.id = "e";
    e.title = "University dismisses president over plagiarism";
    e.content = "A scandal.";
    e.country = "CN";
    e.start_date = *parse_date("2024-06-01");
    return e;
}

GroupAgent agent(Characteristic c, std::string id = "g-agents") {
    GroupAgent a;
    a.id = std::move(id);
    a.group = "g";
    a.country = "CN";
    a.population = 1000;
    a.characteristic = c;
    return a;
}

Memory memory_with(std::initializer_list<double> saliences, const EmotionState& snapshot) {
    Memory m(100);
    int day = 1;
    for (double s : saliences) m.push({MemoryKind::perception, day++, "p", s, snapshot});
    return m;
}

EmotionState random_emotions(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(gen), u(gen), u(gen), u(gen), u(gen)};
}

}  // namespace

TEST(HeatSchedule, SinglePeakShape) {
    const auto h = HeatSchedule::single_peak(2);
    EXPECT_DOUBLE_EQ(h.at(2), 1.0);
    EXPECT_DOUBLE_EQ(h.at(1), 0.4);
    EXPECT_DOUBLE_EQ(h.at(3), 0.55);
    for (int d = 3; d < 7; ++d) EXPECT_GT(h.at(d), h.at(d + 1));
}

TEST(HeatSchedule, DoublePeakHasTwoMaxima) {
    const auto h = HeatSchedule::double_peak();
    EXPECT_GT(h.at(2), h.at(1));
    EXPECT_GT(h.at(2), h.at(3));
    EXPECT_GT(h.at(5), h.at(4));
    EXPECT_GT(h.at(5), h.at(6));
    EXPECT_GT(h.at(2), h.at(5));
    EXPECT_EQ(HeatSchedule::archetype("double_peak"), h);
    EXPECT_DOUBLE_EQ(HeatSchedule::plateau(0.6).at(4), 0.6);
    EXPECT_THROW(HeatSchedule::archetype("zigzag"), ValidationError);
}

TEST(Perceive, DayOneSeesNothingPublished) {
    const PerceptionConfig cfg{HeatSchedule::single_peak(2), 0.1};
    const auto p = perceive(EventState{}, event(), 1, cfg);
    EXPECT_EQ(p.event_counters, EventCounters{});
    EXPECT_DOUBLE_EQ(p.heat, cfg.schedule.at(1));
    EXPECT_EQ(format_date(p.date), "2024-06-01");
    EXPECT_NE(p.event_summary.find("plagiarism"), std::string::npos);
    EXPECT_EQ(p.country, "CN");
}

TEST(Perceive, PassesPriorTotalsThrough) {
    EventState s;
    s.cumulative = {100, 10, 3, 2};
    s.history = {{100, 10, 3, 2}};
    s.day = 2;
    const PerceptionConfig cfg{HeatSchedule::single_peak(2), 0.0};
    const auto p = perceive(s, event(), 2, cfg, true);
    EXPECT_EQ(p.event_counters, (EventCounters{100, 10, 3, 2}));
    EXPECT_EQ(format_date(p.date), "2024-06-02");
    EXPECT_TRUE(p.heated);
    EXPECT_DOUBLE_EQ(p.heat, 1.0);
    EXPECT_THROW(perceive(s, event(), 0, cfg), ValidationError);
}

TEST(Perceive, GrowthFeedbackRaisesHeat) {
    EventState s;
    s.cumulative = {200, 0, 0, 0};
    s.history = {{100, 0, 0, 0}, {100, 0, 0, 0}};
    s.day = 3;
    const PerceptionConfig cfg{HeatSchedule::single_peak(2), 0.1};
    EXPECT_NEAR(perceive(s, event(), 3, cfg).heat, 0.55 + 0.1 * 0.5, 1e-12);
}

TEST(Amplitude, CalmScalesDelta) {
    FadingConfig cfg;
    EmotionState prev{};
    prev.anger = 0.2;
    EmotionState raw = prev;
    raw.anger = 0.7;
    const auto out = apply_amplitude(prev, raw, Characteristic::calm, cfg);
    EXPECT_NEAR(out.anger - prev.anger, 0.15, 1e-12);
    EXPECT_NEAR(apply_amplitude(prev, raw, Characteristic::susceptible, cfg).anger, 0.7, 1e-12);
    EXPECT_NEAR(apply_amplitude(prev, raw, Characteristic::ordinary, cfg).anger, 0.5, 1e-12);
}

TEST(Amplitude, OrderedByCharacteristic) {
    std::mt19937_64 gen(5);
    FadingConfig cfg;
    for (int i = 0; i < 500; ++i) {
        const auto prev = random_emotions(gen);
        const auto raw = random_emotions(gen);
        const auto s = apply_amplitude(prev, raw, Characteristic::susceptible, cfg).channels();
        const auto o = apply_amplitude(prev, raw, Characteristic::ordinary, cfg).channels();
        const auto c = apply_amplitude(prev, raw, Characteristic::calm, cfg).channels();
        const auto p = prev.channels();
        for (std::size_t k = 0; k < p.size(); ++k) {
            EXPECT_GE(std::abs(s[k] - p[k]) + 1e-15, std::abs(o[k] - p[k]));
            EXPECT_GE(std::abs(o[k] - p[k]) + 1e-15, std::abs(c[k] - p[k]));
        }
    }
}

TEST(UpdateEmotion, ZeroHeatKeepsEmotions) {
    auto gateway = make_stub_gateway();
    FadingConfig cfg;
    auto a = agent(Characteristic::susceptible);
    a.state.emotions = {0.3, 0.2, 0.6, 0.1, 0.4};
    Perception p = perceive(EventState{}, event(), 1, {HeatSchedule::plateau(0.0), 0.0});
    EXPECT_EQ(update_emotion(p, a, cfg, *gateway, 1), a.state.emotions);
}

TEST(UpdateEmotion, StaysInRange) {
    auto gateway = make_stub_gateway();
    FadingConfig cfg;
    std::mt19937_64 gen(8);
    for (int i = 0; i < 100; ++i) {
        auto a = agent(static_cast<Characteristic>(i % 3));
        a.state.emotions = random_emotions(gen);
        Perception p = perceive(EventState{}, event(), 1, {HeatSchedule::plateau(1.0), 0.0});
        EXPECT_TRUE(update_emotion(p, a, cfg, *gateway, i).in_range());
    }
}

TEST(Fading, Examples) {
    FadingConfig cfg;
    EmotionState e{0.8, 0.8, 0.8, 0.8, 0.8};
    EXPECT_NEAR(apply_fading(e, Characteristic::ordinary, cfg).anger, 0.6, 1e-15);
    cfg.fading_rate = {0.0, 0.0, 0.0};
    EXPECT_EQ(apply_fading(e, Characteristic::calm, cfg), e);
}

TEST(Fading, ConvergesMonotonically) {
    FadingConfig cfg;
    EmotionState e{0.9, 0.5, 1.0, 0.2, 0.7};
    for (int i = 0; i < 200; ++i) {
        const auto next = apply_fading(e, Characteristic::calm, cfg);
        const auto a = e.channels();
        const auto b = next.channels();
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE(b[k], a[k]);
        e = next;
    }
    for (double v : e.channels()) EXPECT_LT(v, 1e-12);
}

TEST(Transition, DegenerateWeights) {
    AgentState prev;
    prev.emotions = {0.1, 0.2, 0.3, 0.4, 0.5};
    const EmotionState fresh{0.9, 0.8, 0.7, 0.6, 0.5};
    const auto mem = memory_with({1.0}, {0.5, 0.5, 0.5, 0.5, 0.5});
    FadingConfig cfg;
    cfg.alpha = {1, 0, 0};
    auto out = transition_state(prev, fresh, mem, cfg);
    EXPECT_EQ(out.emotions, prev.emotions);
    EXPECT_EQ(out.day, prev.day + 1);
    cfg.alpha = {0, 1, 0};
    EXPECT_EQ(transition_state(prev, fresh, mem, cfg).emotions, fresh);
}

TEST(Transition, WorkedExample) {
    AgentState prev;
    prev.emotions.anger = 0.4;
    EmotionState fresh;
    fresh.anger = 0.8;
    EmotionState snap;
    snap.anger = 0.2;
    const auto mem = memory_with({0.3, 0.9}, snap);
    EXPECT_NEAR(memory_influence(mem).anger, 0.2, 1e-15);
    const auto out = transition_state(prev, fresh, mem, FadingConfig{});
    EXPECT_NEAR(out.emotions.anger, 0.51, 1e-12);
}

TEST(Transition, ConvexCombinationNeedsNoClamp) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        FadingConfig raw;
        raw.alpha = {u(gen), u(gen), u(gen) + 1e-6};
        const auto cfg = raw.normalized();
        AgentState prev;
        prev.emotions = random_emotions(gen);
        const auto fresh = random_emotions(gen);
        const auto snap = random_emotions(gen);
        const auto mem = memory_with({u(gen), u(gen)}, snap);
        const auto m = memory_influence(mem).channels();
        const auto out = transition_state(prev, fresh, mem, cfg).emotions.channels();
        const auto p = prev.emotions.channels();
        const auto f = fresh.channels();
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double unclamped = cfg.alpha[0] * p[k] + cfg.alpha[1] * f[k] + cfg.alpha[2] * m[k];
            EXPECT_GE(unclamped, 0.0);
            EXPECT_LE(unclamped, 1.0 + 1e-12);
            EXPECT_NEAR(out[k], unclamped, 1e-15);
        }
    }
}

TEST(MemoryInfluence, EmptyIsZero) { EXPECT_EQ(memory_influence(Memory(4)), EmotionState{}); }

TEST(DecideAction, StubRules) {
    auto gateway = make_stub_gateway();
    FadingConfig cfg;
    const std::vector<ActionKind> all{ActionKind::view, ActionKind::like, ActionKind::comment,
                                      ActionKind::share};
    auto a = agent(Characteristic::ordinary);
    const auto p = perceive(EventState{}, event(), 1, {HeatSchedule::single_peak(2), 0.1});

    AgentState calm_state;
    const auto d1 = decide_action(a, calm_state, p, *gateway, all, {}, cfg, 1);
    EXPECT_EQ(d1.action, ActionKind::view);

    AgentState angry;
    angry.emotions.anger = 0.65;
    const auto d2 = decide_action(a, angry, p, *gateway, all, {}, cfg, 1);
    EXPECT_TRUE(d2.plans(ActionKind::comment));

    const auto d3 = decide_action(a, angry, p, *gateway, {ActionKind::predict}, {"A", "B"}, cfg, 1);
    EXPECT_EQ(d3.action, ActionKind::predict);
    ASSERT_TRUE(d3.prediction);

    EXPECT_THROW(decide_action(a, angry, p, *gateway, {}, {}, cfg, 1), ValidationError);
}

TEST(UpdateMemory, Examples) {
    const auto p = perceive(EventState{}, event(), 1, {HeatSchedule::single_peak(2), 0.1});
    ActionDecision d;
    auto stream = rng::stream(1, "a", 1);

    FadingConfig keep;
    keep.forgetting_p = 0.0;
    Memory m(100);
    for (int i = 0; i < 5; ++i) m.push({MemoryKind::perception, 0, "old", 0.5, {}});
    const auto kept = update_memory(m, d, p, {}, keep, stream);
    EXPECT_EQ(kept.size(), 7u);
    EXPECT_EQ(kept.items()[5].kind, MemoryKind::perception);
    EXPECT_EQ(kept.items()[6].kind, MemoryKind::decision);

    FadingConfig forget;
    forget.forgetting_p = 1.0;
    const auto fresh = update_memory(m, d, p, {}, forget, stream);
    ASSERT_EQ(fresh.size(), 2u);
    EXPECT_EQ(fresh.items()[0].day, 1);

    Memory small(3);
    for (int i = 1; i <= 3; ++i) small.push({MemoryKind::perception, i, "old", 0.5, {}});
    const auto evicted = update_memory(small, d, p, {}, keep, stream);
    ASSERT_EQ(evicted.size(), 3u);
    EXPECT_EQ(evicted.items()[0].day, 3);
}

TEST(UpdateMemory, SnapshotAndSalience) {
    const auto p = perceive(EventState{}, event(), 1, {HeatSchedule::plateau(0.7), 0.0});
    ActionDecision d;
    d.action = ActionKind::comment;
    const EmotionState snap{0.1, 0.2, 0.3, 0.4, 0.5};
    auto stream = rng::stream(1, "a", 1);
    const auto m = update_memory(Memory(4), d, p, snap, FadingConfig{}, stream);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_DOUBLE_EQ(m.items()[0].salience, 0.7);
    EXPECT_DOUBLE_EQ(m.items()[1].salience, 0.75);
    EXPECT_EQ(m.items()[1].snapshot, snap);
}

TEST(UpdateMemory, SurvivorsMatchBinomialMean) {
    const auto p = perceive(EventState{}, event(), 1, {HeatSchedule::single_peak(2), 0.1});
    FadingConfig cfg;
    cfg.forgetting_p = 0.35;
    const int n = 12;
    const int trials = 20000;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        Memory m(64);
        for (int i = 0; i < n; ++i) m.push({MemoryKind::perception, 0, "x", 0.5, {}});
        auto stream = rng::stream(static_cast<std::uint64_t>(t), "mc", 3);
        sum += static_cast<double>(update_memory(m, {}, p, {}, cfg, stream).size() - 2);
    }
    const double mean = sum / trials;
    const double sigma = std::sqrt(n * cfg.forgetting_p * (1 - cfg.forgetting_p) / trials);
    EXPECT_NEAR(mean, n * (1 - cfg.forgetting_p), 3 * sigma);
}

TEST(AgentView, CarriesTemplateSlotsAndStubKeys) {
    auto a = agent(Characteristic::calm, "Teachers-agents");
    a.population = 3450000;
    const auto p = perceive(EventState{}, event(), 1, {HeatSchedule::single_peak(2), 0.1});
    const auto ctx = agent_view(a, p, a.state.emotions, FadingConfig{}, 9);
    for (const char* key : {"agent_name", "agent_description", "world_description", "day_n",
                            "event_state", "memory", "previous_state", "emotions", "attitudes",
                            "emotion_fading", "forgetting_probability", "heat", "seed", "day"}) {
        EXPECT_TRUE(ctx.contains(key)) << key;
    }
    EXPECT_EQ(ctx.at("agent_name"), "Teachers-agents");
    EXPECT_EQ(ctx.at("seed"), "9");
}
