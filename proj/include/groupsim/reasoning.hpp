#pragma once

#include "groupsim/core.hpp"
#include "groupsim/event_state.hpp"
#include "groupsim/oracle.hpp"
#include "groupsim/rng.hpp"

#include <string_view>
#include <vector>

namespace groupsim {

/// A burst of attention centred on `day`.
struct HeatImpulse {
    int day = 1;
    double magnitude = 1.0;

    friend bool operator==(const HeatImpulse&, const HeatImpulse&) = default;
};

/// Exogenous event salience per day. Each impulse ramps up geometrically
/// before its day and decays geometrically after it; contributions add.
struct HeatSchedule {
    std::vector<HeatImpulse> impulses;
    double baseline = 0.0;
    double lead = 0.4;
    double decay = 0.55;

    double at(int day) const;

    static HeatSchedule single_peak(int day, double magnitude = 1.0);
    static HeatSchedule double_peak();
    static HeatSchedule plateau(double level = 0.6);
    /// single_peak_day2, single_peak_day3, double_peak or plateau.
    static HeatSchedule archetype(std::string_view name);

    friend bool operator==(const HeatSchedule&, const HeatSchedule&) = default;
};

struct PerceptionConfig {
    HeatSchedule schedule = HeatSchedule::single_peak(2);
    /// Weight of yesterday's view growth on top of the schedule.
    double feedback_gain = 0.1;
};

/// Builds the day's perception from the state left by the previous day.
/// On day 1 nothing has been published and heat is schedule.at(1).
Perception perceive(const EventState& state, const EventRecord& event, int day,
                    const PerceptionConfig& config, bool heated = false);

/// Scales each channel's change from `prev` by the characteristic's amplitude
/// and clamps the result to [0,1].
EmotionState apply_amplitude(const EmotionState& prev, const EmotionState& raw,
                             Characteristic characteristic, const FadingConfig& config);

/// Slots and stub keys describing one agent on one day.
OracleContext agent_view(const GroupAgent& agent, const Perception& perception,
                         const EmotionState& current, const FadingConfig& config,
                         std::uint64_t seed);

/// Oracle response to the perception, amplitude-limited by characteristic.
EmotionState update_emotion(const Perception& perception, const GroupAgent& agent,
                            const FadingConfig& config, OracleGateway& oracle, std::uint64_t seed);

/// e * (1 - fading_rate), clamped.
EmotionState apply_fading(const EmotionState& emotions, Characteristic characteristic,
                          const FadingConfig& config);

/// Salience-weighted mean of the stored emotion snapshots; zero when empty.
EmotionState memory_influence(const Memory& memory);

/// alpha1 * prev + alpha2 * fresh + alpha3 * memory influence; day + 1.
AgentState transition_state(const AgentState& prev, const EmotionState& fresh, const Memory& memory,
                            const FadingConfig& config);

ActionDecision decide_action(const GroupAgent& agent, const AgentState& state,
                             const Perception& perception, OracleGateway& oracle,
                             const std::vector<ActionKind>& available,
                             const std::vector<std::string>& options, const FadingConfig& config,
                             std::uint64_t seed);

/// Independent forgetting with probability forgetting_p, then the day's
/// perception and decision are appended with `snapshot` attached.
Memory update_memory(Memory memory, const ActionDecision& decision, const Perception& perception,
                     const EmotionState& snapshot, const FadingConfig& config,
                     rng::SplitMix64& rng);

}  // namespace groupsim
