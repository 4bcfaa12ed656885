#pragma once

#include "groupsim/core.hpp"
#include "groupsim/event_state.hpp"
#include "groupsim/oracle.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace groupsim {

struct LawCheck {
    DailyEngagement engagement;
    bool repaired = false;
};

/// Clamps likes to at most a tenth of views and, unless heated, comments and
/// shares to at most likes. Counts only move down.
LawCheck enforce_engagement_laws(DailyEngagement e, bool heated);

/// True when views >= 10 * likes and, unless heated, likes >= comments and
/// likes >= shares.
bool satisfies_engagement_laws(const DailyEngagement& e, bool heated);

/// One day of engagement for one group. Views above the group's population
/// are clamped with a warning; the ordering laws are then enforced.
DailyEngagement generate_engagement(const GroupAgent& agent, const AgentState& state,
                                    const Perception& perception, const ActionDecision& decision,
                                    double weight, OracleGateway& oracle,
                                    const FadingConfig& config, std::uint64_t seed);

/// Adds one day's engagements to the shared counters. All engagements must
/// carry the same day. Throws MixedDates.
EventState aggregate_event_state(const EventState& prev,
                                 std::span<const DailyEngagement> engagements);

struct PredictionTally {
    std::map<std::string, double> support;
    std::string winner;
};

/// Weighted, confidence-scaled vote over the options. Agents whose decision
/// has no prediction abstain. Ties go to the lexicographically smallest
/// option. Throws NoOptions.
PredictionTally predict_outcome(std::span<const GroupAgent> agents,
                                std::span<const ActionDecision> decisions,
                                const std::vector<std::string>& options,
                                const std::map<std::string, double>& weights);

/// Winner-take-all per agent: each agent hands all its votes to the option it
/// predicted.
std::map<std::string, int> electoral_tally(std::span<const GroupAgent> agents,
                                           std::span<const ActionDecision> decisions,
                                           const std::vector<std::string>& options,
                                           const std::map<std::string, int>& votes);

}  // namespace groupsim
