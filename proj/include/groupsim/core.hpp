#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace groupsim {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);
Date add_days(const Date& date, int days);

enum class Domain {
    education,
    politics,
    business,
    technology,
    culture,
    sports,
    health,
    entertainment,
    environment,
    economy,
};

enum class Platform { twitter, reddit, weibo };

enum class Characteristic { susceptible, ordinary, calm };

enum class ActionKind { view, like, comment, share, predict };

inline constexpr std::array<Domain, 10> kAllDomains = {
    Domain::education, Domain::politics,      Domain::business,    Domain::technology,
    Domain::culture,   Domain::sports,        Domain::health,      Domain::entertainment,
    Domain::environment, Domain::economy,
};

inline constexpr std::array<ActionKind, 5> kAllActions = {
    ActionKind::view, ActionKind::like, ActionKind::comment, ActionKind::share,
    ActionKind::predict,
};

std::string_view to_string(Domain d);
std::string_view to_string(Platform p);
std::string_view to_string(Characteristic c);
std::string_view to_string(ActionKind a);

std::optional<Domain> parse_domain(std::string_view s);
std::optional<Platform> parse_platform(std::string_view s);
std::optional<Characteristic> parse_characteristic(std::string_view s);
std::optional<ActionKind> parse_action(std::string_view s);

/// True for a two-letter upper-case code. Membership in ISO-3166 is not checked.
bool is_country_code(std::string_view s);

/// Emotions and the two attitude channels. Every component lives in [0,1].
struct EmotionState {
    double happiness = 0.0;
    double sadness = 0.0;
    double anger = 0.0;
    double optimism = 0.0;
    double pessimism = 0.0;

    static constexpr std::size_t kChannels = 5;
    static constexpr std::array<std::string_view, kChannels> kNames = {
        "happiness", "sadness", "anger", "optimism", "pessimism"};

    std::array<double, kChannels> channels() const {
        return {happiness, sadness, anger, optimism, pessimism};
    }
    static EmotionState from_channels(const std::array<double, kChannels>& c) {
        return {c[0], c[1], c[2], c[3], c[4]};
    }

    EmotionState clamped() const;
    bool in_range() const;

    friend bool operator==(const EmotionState&, const EmotionState&) = default;
};

/// Seven daily counts per action kind; the lengths are validated, not typed,
/// so that malformed files can be reported precisely.
struct GroundTruth {
    std::vector<std::int64_t> views;
    std::vector<std::int64_t> likes;
    std::vector<std::int64_t> comments;
    std::vector<std::int64_t> shares;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

inline constexpr std::size_t kGroundTruthDays = 7;

struct EventRecord {
    std::string id;
    std::string title;
    std::string content;
    Domain domain = Domain::education;
    std::string country;
    Platform platform = Platform::weibo;
    Date start_date{};
    GroundTruth ground_truth;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Returns the record unchanged, or throws MalformedEvent naming the first
/// offending field.
EventRecord validate_event(EventRecord record);

struct GroupSpec {
    std::string name;
    std::int64_t population = 0;
    std::optional<Characteristic> characteristic;
    int layer = 1;
    std::optional<std::string> parent;

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct FadingConfig {
    std::array<double, 3> alpha = {0.5, 0.35, 0.15};
    /// Indexed by Characteristic.
    std::array<double, 3> fading_rate = {0.35, 0.25, 0.15};
    double forgetting_p = 0.2;
    std::size_t memory_capacity = 16;
    /// Indexed by Characteristic.
    std::array<double, 3> amplitude = {1.0, 0.6, 0.3};

    double fading(Characteristic c) const { return fading_rate[static_cast<int>(c)]; }
    double amp(Characteristic c) const { return amplitude[static_cast<int>(c)]; }

    /// Checks ranges and ordering, and rescales alpha to sum to one.
    /// Throws ValidationError.
    FadingConfig normalized() const;
};

enum class MemoryKind { perception, decision, action };

std::string_view to_string(MemoryKind k);
std::optional<MemoryKind> parse_memory_kind(std::string_view s);

struct MemoryItem {
    MemoryKind kind = MemoryKind::perception;
    int day = 0;
    std::string payload;
    double salience = 0.0;
    /// Emotions of the agent when the item was stored.
    EmotionState snapshot;

    friend bool operator==(const MemoryItem&, const MemoryItem&) = default;
};

/// Bounded FIFO. Pushing past capacity evicts from the front.
class Memory {
public:
    explicit Memory(std::size_t capacity = 16);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::deque<MemoryItem>& items() const noexcept { return items_; }

    void push(MemoryItem item);

    template <class Pred>
    void erase_if(Pred&& pred) {
        std::erase_if(items_, std::forward<Pred>(pred));
    }

    friend bool operator==(const Memory&, const Memory&) = default;

private:
    std::size_t capacity_;
    std::deque<MemoryItem> items_;
};

struct AgentState {
    EmotionState emotions;
    int day = 0;
    std::optional<ActionKind> last_action;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct GroupAgent {
    std::string id;
    std::string group;
    std::string country;
    std::int64_t population = 0;
    Characteristic characteristic = Characteristic::ordinary;
    AgentState state;
    Memory memory;

    friend bool operator==(const GroupAgent&, const GroupAgent&) = default;
};

std::string agent_id_for(std::string_view group_name);

/// population_i / total, keyed by agent id.
std::map<std::string, double> compute_population_weights(std::span<const GroupAgent> agents);

struct Prediction {
    std::string option;
    double confidence = 0.0;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct ActionDecision {
    ActionKind action = ActionKind::view;
    std::string reason;
    std::vector<ActionKind> plan;
    std::optional<Prediction> prediction;

    bool plans(ActionKind a) const;

    friend bool operator==(const ActionDecision&, const ActionDecision&) = default;
};

struct DailyEngagement {
    int day = 0;
    Date date{};
    std::int64_t views = 0;
    std::int64_t likes = 0;
    std::int64_t comments = 0;
    std::int64_t shares = 0;

    friend bool operator==(const DailyEngagement&, const DailyEngagement&) = default;
};

}  // namespace groupsim
