#pragma once

#include "groupsim/core.hpp"

#include <json.hpp>

namespace groupsim {

using Json = nlohmann::ordered_json;

/// Strict decoding: any missing or mistyped field raises MalformedEvent.
/// The result is passed through validate_event.
EventRecord event_from_json(const Json& j);
Json event_to_json(const EventRecord& e);

Json emotions_to_json(const EmotionState& e);
EmotionState emotions_from_json(const Json& j);

Json engagement_to_json(const DailyEngagement& e);

Json agent_to_json(const GroupAgent& a, bool with_memory = false);
Json memory_to_json(const Memory& m);
Json decision_to_json(const ActionDecision& d);

Json fading_to_json(const FadingConfig& f);
/// Overlays the keys present in `j` on top of `base`.
FadingConfig fading_from_json(const Json& j, FadingConfig base = {});

}  // namespace groupsim
