#pragma once

#include "groupsim/action.hpp"
#include "groupsim/core.hpp"
#include "groupsim/event_state.hpp"
#include "groupsim/hierarchy.hpp"
#include "groupsim/json_io.hpp"
#include "groupsim/metrics.hpp"
#include "groupsim/oracle.hpp"
#include "groupsim/reasoning.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace groupsim {

struct Scenario {
    EventRecord event;
    int layer = 3;
    int horizon_days = 7;
    /// Non-empty turns the final day into a prediction round.
    std::vector<std::string> options;
    bool heated = false;
    HeatSchedule heat = HeatSchedule::single_peak(2);

    /// Throws ValidationError.
    void validate() const;
};

struct SimConfig {
    FadingConfig fading;
    double feedback_gain = 0.1;
    /// Worker threads for the per-agent phase; results do not depend on it.
    unsigned threads = 1;
    /// Ask the oracle for the event's domain and country before the run.
    bool classify = false;
};

/// One agent's day.
struct AgentDay {
    std::string agent_id;
    AgentState state;
    ActionDecision decision;
    DailyEngagement engagement;

    friend bool operator==(const AgentDay&, const AgentDay&) = default;
};

struct DayRecord {
    int day = 1;
    Date date{};
    double heat = 0.0;
    EventCounters totals;
    std::vector<AgentDay> agents;

    friend bool operator==(const DayRecord&, const DayRecord&) = default;
};

struct SimulationTrace {
    std::string scenario_id;
    std::uint64_t seed = 0;
    int layer = 0;
    int horizon_days = 0;
    std::vector<GroupAgent> agents;
    std::vector<DayRecord> days;
    EventState final_state;
    std::optional<PredictionTally> prediction;
    bool complete = true;
    std::string error;

    std::vector<double> daily_views() const;
    std::size_t engagement_rows() const;
};

struct StepResult {
    std::vector<GroupAgent> agents;
    EventState event_state;
    DayRecord record;
};

/// Advances every agent by one day and folds the engagements into the event
/// state. Agents run in their given order; with threads > 1 they are
/// processed concurrently and merged back by index.
StepResult step_day(const std::vector<GroupAgent>& agents, const EventState& event_state, int day,
                    const Scenario& scenario, const SimConfig& config,
                    const std::map<std::string, double>& weights, OracleGateway& oracle,
                    std::uint64_t seed);

/// Makes sure the graph holds a tree for (country, domain): built-in document
/// first, then the oracle. Throws MissingEntry when neither has one.
const KnowledgeGraph::Entry& ensure_entry(KnowledgeGraph& graph, const std::string& country,
                                          Domain domain, OracleGateway& oracle);

/// Full run. Oracle failures mid-run stop the loop and mark the trace
/// incomplete instead of throwing.
SimulationTrace run_simulation(const Scenario& scenario, const SimConfig& config,
                               KnowledgeGraph& graph, OracleGateway& oracle, std::uint64_t seed);

struct ReplicationSet {
    std::vector<SimulationTrace> traces;
    std::vector<double> total_views;
    std::optional<ZReport> z;
    bool partial = false;
};

/// One run per seed. Seeds must be distinct (DuplicateSeed) and at least two.
ReplicationSet run_replications(const Scenario& scenario, const SimConfig& config,
                                KnowledgeGraph& graph, OracleGateway& oracle,
                                const std::vector<std::uint64_t>& seeds);

inline constexpr int kTraceSchemaVersion = 1;

Json trace_to_json(const SimulationTrace& trace, const Scenario& scenario);

/// Simulated daily views read back from a trace document.
std::vector<double> daily_views_from_json(const Json& trace);

}  // namespace groupsim
