#include "groupsim/reasoning.hpp"

#include "groupsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace groupsim {

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string counters_text(const EventCounters& c) {
    return "views " + std::to_string(c.views) + ", likes " + std::to_string(c.likes) +
           ", comments " + std::to_string(c.comments) + ", shares " + std::to_string(c.shares);
}

double decision_salience(ActionKind a) {
    switch (a) {
        case ActionKind::view: return 0.25;
        case ActionKind::like: return 0.5;
        case ActionKind::comment: return 0.75;
        case ActionKind::share: return 0.75;
        case ActionKind::predict: return 0.5;
    }
    return 0.25;
}

}  // namespace

EventCounters counters_of(const DailyEngagement& e) {
    return {e.views, e.likes, e.comments, e.shares};
}

double HeatSchedule::at(int day) const {
    double h = baseline;
    for (const auto& imp : impulses) {
        const int gap = day - imp.day;
        h += imp.magnitude * (gap < 0 ? std::pow(lead, -gap) : std::pow(decay, gap));
    }
    return std::max(0.0, h);
}

HeatSchedule HeatSchedule::single_peak(int day, double magnitude) {
    HeatSchedule s;
    s.impulses.push_back({day, magnitude});
    return s;
}

HeatSchedule HeatSchedule::double_peak() {
    HeatSchedule s;
    s.impulses = {{2, 1.0}, {5, 0.7}};
    return s;
}

HeatSchedule HeatSchedule::plateau(double level) {
    HeatSchedule s;
    s.baseline = level;
    return s;
}

HeatSchedule HeatSchedule::archetype(std::string_view name) {
    if (name == "single_peak_day2") return single_peak(2);
    if (name == "single_peak_day3") return single_peak(3);
    if (name == "double_peak") return double_peak();
    if (name == "plateau") return plateau();
    throw ValidationError("unknown heat archetype: " + std::string(name));
}

Perception perceive(const EventState& state, const EventRecord& event, int day,
                    const PerceptionConfig& config, bool heated) {
    if (day < 1) throw ValidationError("perception day must be >= 1");
    Perception p;
    p.day = day;
    p.date = add_days(event.start_date, day - 1);
    p.event_summary = event.content.empty() ? event.title : event.title + ". " + event.content;
    p.domain = event.domain;
    p.country = event.country;
    p.event_counters = state.cumulative;
    p.heated = heated;
    double growth = 0.0;
    if (!state.history.empty() && state.cumulative.views > 0) {
        growth = static_cast<double>(state.history.back().views) /
                 static_cast<double>(state.cumulative.views);
    }
    p.heat = config.schedule.at(day) + config.feedback_gain * growth;
    return p;
}

EmotionState apply_amplitude(const EmotionState& prev, const EmotionState& raw,
                             Characteristic characteristic, const FadingConfig& config) {
    const double amp = config.amp(characteristic);
    const auto p = prev.channels();
    auto r = raw.channels();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = p[i] + amp * (r[i] - p[i]);
    return EmotionState::from_channels(r).clamped();
}

OracleContext agent_view(const GroupAgent& agent, const Perception& perception,
                         const EmotionState& current, const FadingConfig& config,
                         std::uint64_t seed) {
    OracleContext ctx;
    ctx["agent_name"] = agent.id;
    ctx["agent_description"] = "representing " + std::to_string(agent.population) + " " +
                               agent.country + " " + agent.group + ", a " +
                               std::string(to_string(agent.characteristic)) + " population";
    ctx["world_description"] =
        "an online social network where groups view, like, comment on and share posts about "
        "current events";
    ctx["day_n"] = "Day " + std::to_string(perception.day) +
                   (perception.date.ok() ? " (" + format_date(perception.date) + ")" : "");
    ctx["event_state"] = perception.event_summary + " | cumulative " +
                         counters_text(perception.event_counters) + " | heat " +
                         fixed3(perception.heat);
    std::string memory;
    for (const auto& item : agent.memory.items()) {
        if (!memory.empty()) memory += "; ";
        memory += "[day " + std::to_string(item.day) + " " + std::string(to_string(item.kind)) +
                  "] " + item.payload;
    }
    ctx["memory"] = memory.empty() ? "none" : memory;
    ctx["previous_state"] = "emotions " + format_emotions_slot(agent.state.emotions) +
                            ", attitudes " + format_attitudes_slot(agent.state.emotions);
    ctx["emotions"] = format_emotions_slot(current);
    ctx["attitudes"] = format_attitudes_slot(current);
    ctx["emotion_fading"] = format_number(config.fading(agent.characteristic));
    ctx["forgetting_probability"] = format_number(config.forgetting_p);

    const auto c = current.channels();
    for (std::size_t i = 0; i < c.size(); ++i) {
        ctx["state." + std::string(EmotionState::kNames[i])] = format_number(c[i]);
    }
    ctx["heat"] = format_number(perception.heat);
    ctx["day"] = std::to_string(perception.day);
    ctx["seed"] = std::to_string(seed);
    ctx["event_summary"] = perception.event_summary;
    ctx["population"] = std::to_string(agent.population);
    ctx["heated"] = perception.heated ? "1" : "0";
    if (perception.date.ok()) ctx["date"] = format_date(perception.date);
    return ctx;
}

EmotionState update_emotion(const Perception& perception, const GroupAgent& agent,
                            const FadingConfig& config, OracleGateway& oracle, std::uint64_t seed) {
    const auto& prev = agent.state.emotions;
    const auto ctx = agent_view(agent, perception, prev, config, seed);
    const auto raw = oracle.query_emotion_update(ctx, agent.id, perception.day);
    return apply_amplitude(prev, raw, agent.characteristic, config);
}

EmotionState apply_fading(const EmotionState& emotions, Characteristic characteristic,
                          const FadingConfig& config) {
    const double keep = 1.0 - config.fading(characteristic);
    auto c = emotions.channels();
    for (auto& v : c) v *= keep;
    return EmotionState::from_channels(c).clamped();
}

EmotionState memory_influence(const Memory& memory) {
    std::array<double, EmotionState::kChannels> sum{};
    double weight = 0.0;
    for (const auto& item : memory.items()) {
        const auto s = item.snapshot.channels();
        for (std::size_t i = 0; i < s.size(); ++i) sum[i] += item.salience * s[i];
        weight += item.salience;
    }
    if (weight <= 0.0) return {};
    for (auto& v : sum) v /= weight;
    return EmotionState::from_channels(sum);
}

AgentState transition_state(const AgentState& prev, const EmotionState& fresh, const Memory& memory,
                            const FadingConfig& config) {
    const auto& a = config.alpha;
    const auto p = prev.emotions.channels();
    const auto f = fresh.channels();
    const auto m = memory_influence(memory).channels();
    std::array<double, EmotionState::kChannels> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[0] * p[i] + a[1] * f[i] + a[2] * m[i];
    AgentState next = prev;
    next.emotions = EmotionState::from_channels(out).clamped();
    next.day = prev.day + 1;
    return next;
}

ActionDecision decide_action(const GroupAgent& agent, const AgentState& state,
                             const Perception& perception, OracleGateway& oracle,
                             const std::vector<ActionKind>& available,
                             const std::vector<std::string>& options, const FadingConfig& config,
                             std::uint64_t seed) {
    if (available.empty()) throw ValidationError("no available actions");
    const auto ctx = agent_view(agent, perception, state.emotions, config, seed);
    auto decision = oracle.query_decision(ctx, agent.id, perception.day, available, options);
    if (std::find(available.begin(), available.end(), decision.action) == available.end()) {
        throw IllegalAction(std::string(to_string(decision.action)));
    }
    return decision;
}

Memory update_memory(Memory memory, const ActionDecision& decision, const Perception& perception,
                     const EmotionState& snapshot, const FadingConfig& config,
                     rng::SplitMix64& rng) {
    const double p = config.forgetting_p;
    memory.erase_if([&](const MemoryItem&) { return rng.bernoulli(p); });

    memory.push({MemoryKind::perception, perception.day,
                 "cumulative " + counters_text(perception.event_counters) + ", heat " +
                     fixed3(perception.heat),
                 std::clamp(perception.heat, 0.0, 1.0), snapshot});
    std::string payload = std::string(to_string(decision.action));
    if (decision.prediction) payload += " " + decision.prediction->option;
    if (!decision.reason.empty()) payload += ": " + decision.reason;
    memory.push({MemoryKind::decision, perception.day, std::move(payload),
                 decision_salience(decision.action), snapshot});
    return memory;
}

}  // namespace groupsim
