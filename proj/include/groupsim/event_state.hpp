#pragma once

#include "groupsim/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace groupsim {

struct EventCounters {
    std::int64_t views = 0;
    std::int64_t likes = 0;
    std::int64_t comments = 0;
    std::int64_t shares = 0;

    EventCounters& operator+=(const EventCounters& o) {
        views += o.views;
        likes += o.likes;
        comments += o.comments;
        shares += o.shares;
        return *this;
    }
    friend EventCounters operator+(EventCounters a, const EventCounters& b) { return a += b; }
    friend bool operator==(const EventCounters&, const EventCounters&) = default;
};

EventCounters counters_of(const DailyEngagement& e);

/// Shared engagement counters every agent perceives on the following day.
/// `day` is the day about to be simulated; it starts at 1.
struct EventState {
    EventCounters cumulative;
    std::vector<EventCounters> history;
    int day = 1;

    friend bool operator==(const EventState&, const EventState&) = default;
};

/// What a group sees of the event at the start of a day. Identical for every
/// agent on the same day.
struct Perception {
    int day = 1;
    Date date{};
    std::string event_summary;
    Domain domain = Domain::education;
    std::string country;
    /// Cumulative totals at the end of the previous day.
    EventCounters event_counters;
    double heat = 0.0;
    /// Comments and shares may exceed likes.
    bool heated = false;

    friend bool operator==(const Perception&, const Perception&) = default;
};

}  // namespace groupsim
