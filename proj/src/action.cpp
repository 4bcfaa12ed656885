#include "groupsim/action.hpp"

#include "groupsim/errors.hpp"
#include "groupsim/reasoning.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace groupsim {

namespace {

void check_lengths(std::span<const GroupAgent> agents, std::span<const ActionDecision> decisions) {
    if (agents.size() != decisions.size()) {
        throw LengthMismatch(agents.size(), decisions.size());
    }
}

void check_option(const std::vector<std::string>& options, const std::string& option) {
    if (std::find(options.begin(), options.end(), option) == options.end()) {
        throw ValidationError("prediction '" + option + "' is not one of the options");
    }
}

}  // namespace

LawCheck enforce_engagement_laws(DailyEngagement e, bool heated) {
    const auto before = e;
    e.views = std::max<std::int64_t>(e.views, 0);
    e.likes = std::clamp<std::int64_t>(e.likes, 0, e.views / 10);
    e.comments = std::max<std::int64_t>(e.comments, 0);
    e.shares = std::max<std::int64_t>(e.shares, 0);
    if (!heated) {
        e.comments = std::min(e.comments, e.likes);
        e.shares = std::min(e.shares, e.likes);
    }
    return {e, !(e == before)};
}

bool satisfies_engagement_laws(const DailyEngagement& e, bool heated) {
    if (e.views < 0 || e.likes < 0 || e.comments < 0 || e.shares < 0) return false;
    if (e.views < 10 * e.likes) return false;
    if (!heated && (e.likes < e.comments || e.likes < e.shares)) return false;
    return true;
}

DailyEngagement generate_engagement(const GroupAgent& agent, const AgentState& state,
                                    const Perception& perception, const ActionDecision& decision,
                                    double weight, OracleGateway& oracle,
                                    const FadingConfig& config, std::uint64_t seed) {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw ValidationError("population weight outside [0,1] for " + agent.id);
    }
    DailyEngagement out;
    out.day = perception.day;
    out.date = perception.date;
    if (agent.population == 0) return out;

    auto ctx = agent_view(agent, perception, state.emotions, config, seed);
    std::string plan = std::string(to_string(decision.action));
    for (auto a : decision.plan) plan += ", " + std::string(to_string(a));
    ctx["plan"] = plan;
    ctx["population_weight"] = format_number(weight);

    auto reply = oracle.query_engagement(ctx, agent.id, perception.day);
    reply.day = perception.day;
    reply.date = perception.date;
    if (reply.views > agent.population) {
        spdlog::warn("{} day {}: {} views exceed population {}; clamping", agent.id,
                     perception.day, reply.views, agent.population);
        reply.views = agent.population;
    }
    auto checked = enforce_engagement_laws(reply, perception.heated);
    if (checked.repaired) {
        spdlog::info("{} day {}: engagement repaired to satisfy ordering laws", agent.id,
                     perception.day);
    }
    return checked.engagement;
}

EventState aggregate_event_state(const EventState& prev,
                                 std::span<const DailyEngagement> engagements) {
    EventState next = prev;
    next.day = prev.day + 1;
    if (engagements.empty()) return next;
    const auto& first = engagements.front();
    EventCounters delta;
    for (const auto& e : engagements) {
        if (e.day != first.day || e.date != first.date) throw MixedDates();
        delta += counters_of(e);
    }
    next.cumulative += delta;
    next.history.push_back(delta);
    return next;
}

PredictionTally predict_outcome(std::span<const GroupAgent> agents,
                                std::span<const ActionDecision> decisions,
                                const std::vector<std::string>& options,
                                const std::map<std::string, double>& weights) {
    if (options.empty()) throw NoOptions();
    check_lengths(agents, decisions);
    PredictionTally tally;
    for (const auto& o : options) tally.support[o] = 0.0;

    double total = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& pred = decisions[i].prediction;
        if (!pred) continue;
        check_option(options, pred->option);
        auto w = weights.find(agents[i].id);
        if (w == weights.end()) throw ValidationError("no weight for " + agents[i].id);
        if (w->second < 0.0) throw ValidationError("negative weight for " + agents[i].id);
        const double s = w->second * pred->confidence;
        tally.support[pred->option] += s;
        total += s;
    }
    if (total > 0.0) {
        for (auto& [option, s] : tally.support) s /= total;
    }
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    double best = -1.0;
    for (const auto& [option, s] : tally.support) {
        if (s > best) {
            best = s;
            tally.winner = option;
        }
    }
    return tally;
}

std::map<std::string, int> electoral_tally(std::span<const GroupAgent> agents,
                                           std::span<const ActionDecision> decisions,
                                           const std::vector<std::string>& options,
                                           const std::map<std::string, int>& votes) {
    if (options.empty()) throw NoOptions();
    check_lengths(agents, decisions);
    std::map<std::string, int> out;
    for (const auto& o : options) out[o] = 0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& pred = decisions[i].prediction;
        if (!pred) continue;
        check_option(options, pred->option);
        auto v = votes.find(agents[i].id);
        if (v == votes.end()) throw ValidationError("no vote count for " + agents[i].id);
        out[pred->option] += v->second;
    }
    return out;
}

}  // namespace groupsim
