#include "groupsim/core.hpp"

#include "groupsim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace groupsim {

namespace {

template <class Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view s,
                           const std::array<std::pair<Enum, std::string_view>, N>& table) {
    for (const auto& [value, name] : table) {
        if (name == s) return value;
    }
    return std::nullopt;
}

template <class Enum, std::size_t N>
std::string_view name_of(Enum e, const std::array<std::pair<Enum, std::string_view>, N>& table) {
    for (const auto& [value, name] : table) {
        if (value == e) return name;
    }
    return "?";
}

constexpr std::array<std::pair<Domain, std::string_view>, 10> kDomainNames = {{
    {Domain::education, "education"},
    {Domain::politics, "politics"},
    {Domain::business, "business"},
    {Domain::technology, "technology"},
    {Domain::culture, "culture"},
    {Domain::sports, "sports"},
    {Domain::health, "health"},
    {Domain::entertainment, "entertainment"},
    {Domain::environment, "environment"},
    {Domain::economy, "economy"},
}};

constexpr std::array<std::pair<Platform, std::string_view>, 3> kPlatformNames = {{
    {Platform::twitter, "twitter"},
    {Platform::reddit, "reddit"},
    {Platform::weibo, "weibo"},
}};

constexpr std::array<std::pair<Characteristic, std::string_view>, 3> kCharacteristicNames = {{
    {Characteristic::susceptible, "susceptible"},
    {Characteristic::ordinary, "ordinary"},
    {Characteristic::calm, "calm"},
}};

constexpr std::array<std::pair<ActionKind, std::string_view>, 5> kActionNames = {{
    {ActionKind::view, "view"},
    {ActionKind::like, "like"},
    {ActionKind::comment, "comment"},
    {ActionKind::share, "share"},
    {ActionKind::predict, "predict"},
}};

constexpr std::array<std::pair<MemoryKind, std::string_view>, 3> kMemoryKindNames = {{
    {MemoryKind::perception, "perception"},
    {MemoryKind::decision, "decision"},
    {MemoryKind::action, "action"},
}};

void check_series(const std::vector<std::int64_t>& series, const std::string& name) {
    if (series.size() != kGroundTruthDays) {
        throw MalformedEvent(name, "length " + std::to_string(series.size()) + " \xE2\x89\xA0 " +
                                       std::to_string(kGroundTruthDays));
    }
    if (std::any_of(series.begin(), series.end(), [](auto v) { return v < 0; })) {
        throw MalformedEvent(name, "negative");
    }
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto parse = [](std::string_view part, auto& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc{} && ptr == part.data() + part.size();
    };
    if (!parse(text.substr(0, 4), y) || !parse(text.substr(5, 2), m) ||
        !parse(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Date add_days(const Date& date, int days) {
    return Date{std::chrono::sys_days{date} + std::chrono::days{days}};
}

std::string_view to_string(Domain d) { return name_of(d, kDomainNames); }
std::string_view to_string(Platform p) { return name_of(p, kPlatformNames); }
std::string_view to_string(Characteristic c) { return name_of(c, kCharacteristicNames); }
std::string_view to_string(ActionKind a) { return name_of(a, kActionNames); }
std::string_view to_string(MemoryKind k) { return name_of(k, kMemoryKindNames); }

std::optional<Domain> parse_domain(std::string_view s) { return lookup(s, kDomainNames); }
std::optional<Platform> parse_platform(std::string_view s) { return lookup(s, kPlatformNames); }
std::optional<Characteristic> parse_characteristic(std::string_view s) {
    return lookup(s, kCharacteristicNames);
}
std::optional<ActionKind> parse_action(std::string_view s) { return lookup(s, kActionNames); }
std::optional<MemoryKind> parse_memory_kind(std::string_view s) {
    return lookup(s, kMemoryKindNames);
}

bool is_country_code(std::string_view s) {
    return s.size() == 2 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

EmotionState EmotionState::clamped() const {
    auto c = channels();
    for (auto& v : c) v = std::clamp(v, 0.0, 1.0);
    return from_channels(c);
}

bool EmotionState::in_range() const {
    const auto c = channels();
    return std::all_of(c.begin(), c.end(), in_unit);
}

EventRecord validate_event(EventRecord record) {
    if (record.id.empty()) throw MalformedEvent("id", "missing");
    if (record.title.empty()) throw MalformedEvent("title", "missing");
    if (record.country.empty()) throw MalformedEvent("country", "missing");
    if (!is_country_code(record.country)) {
        throw MalformedEvent("country", "not an alpha-2 code: " + record.country);
    }
    if (!record.start_date.ok()) throw MalformedEvent("start_date", "invalid date");
    check_series(record.ground_truth.views, "views");
    check_series(record.ground_truth.likes, "likes");
    check_series(record.ground_truth.comments, "comments");
    check_series(record.ground_truth.shares, "shares");
    return record;
}

FadingConfig FadingConfig::normalized() const {
    FadingConfig out = *this;
    if (std::any_of(alpha.begin(), alpha.end(), [](double a) { return !(a >= 0.0); })) {
        throw ValidationError("alpha components must be non-negative");
    }
    const double sum = alpha[0] + alpha[1] + alpha[2];
    if (!(sum > 0.0)) throw ValidationError("alpha components sum to zero");
    for (auto& a : out.alpha) a /= sum;

    if (!std::all_of(fading_rate.begin(), fading_rate.end(), in_unit)) {
        throw ValidationError("fading rates must lie in [0,1]");
    }
    if (!in_unit(forgetting_p)) throw ValidationError("forgetting probability must lie in [0,1]");
    if (memory_capacity < 1) throw ValidationError("memory capacity must be at least 1");
    for (double a : amplitude) {
        if (!(a > 0.0 && a <= 1.0)) throw ValidationError("amplitudes must lie in (0,1]");
    }
    if (!(amplitude[0] >= amplitude[1] && amplitude[1] >= amplitude[2])) {
        throw ValidationError("amplitudes must order susceptible >= ordinary >= calm");
    }
    return out;
}

Memory::Memory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw ValidationError("memory capacity must be at least 1");
}

void Memory::push(MemoryItem item) {
    items_.push_back(std::move(item));
    while (items_.size() > capacity_) items_.pop_front();
}

std::string agent_id_for(std::string_view group_name) {
    return std::string(group_name) + "-agents";
}

std::map<std::string, double> compute_population_weights(std::span<const GroupAgent> agents) {
    if (agents.empty()) throw EmptyPopulation();
    // Integer total keeps the divisor exact for realistic populations.
    std::int64_t total = 0;
    for (const auto& a : agents) {
        if (a.population < 0) throw ValidationError("negative population for " + a.id);
        total += a.population;
    }
    if (total == 0) throw EmptyPopulation();
    std::map<std::string, double> weights;
    for (const auto& a : agents) {
        weights[a.id] = static_cast<double>(a.population) / static_cast<double>(total);
    }
    return weights;
}

bool ActionDecision::plans(ActionKind a) const {
    return action == a || std::find(plan.begin(), plan.end(), a) != plan.end();
}

}  // namespace groupsim
