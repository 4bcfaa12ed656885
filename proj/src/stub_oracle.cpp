#include "groupsim/errors.hpp"
#include "groupsim/hierarchy.hpp"
#include "groupsim/oracle.hpp"
#include "groupsim/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace groupsim {

namespace {

constexpr std::array<std::string_view, 34> kNegativeStems = {
    "spoil",   "scandal", "dishonest", "fraud",    "fail",    "forfeit", "dismiss",
    "death",   "dead",    "crisis",    "protest",  "corrupt", "abuse",   "cheat",
    "violen",  "accident", "outrage",  "ban",      "layoff",  "collapse", "shoot",
    "poison",  "contamin", "strike",   "fire",     "loss",    "plagiar", "rotten",
    "injur",   "kill",    "arrest",    "lawsuit",  "leak",    "riot",
};

constexpr std::array<std::string_view, 18> kPositiveStems = {
    "win",    "won",     "success", "award",  "celebrat", "breakthrough",
    "record", "growth",  "launch",  "victor", "improv",   "reform",
    "hope",   "honor",   "champion", "rescue", "gift",    "festival",
};

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

template <std::size_t N>
bool matches_any(const std::string& word, const std::array<std::string_view, N>& stems) {
    return std::any_of(stems.begin(), stems.end(),
                       [&](std::string_view s) { return word.rfind(s, 0) == 0; });
}

EmotionState state_from_context(const OracleContext& ctx) {
    EmotionState e;
    e.happiness = context_number(ctx, "state.happiness");
    e.sadness = context_number(ctx, "state.sadness");
    e.anger = context_number(ctx, "state.anger");
    e.optimism = context_number(ctx, "state.optimism");
    e.pessimism = context_number(ctx, "state.pessimism");
    return e;
}

std::vector<ActionKind> actions_from_text(std::string_view text) {
    std::vector<ActionKind> out;
    for (const auto& w : words(text)) {
        if (auto a = parse_action(w)) out.push_back(*a);
    }
    return out;
}

std::vector<std::string> split_options(const OracleContext& ctx) {
    std::vector<std::string> out;
    auto it = ctx.find("options");
    if (it == ctx.end() || it->second.empty()) return out;
    std::string_view s = it->second;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find('|', start);
        if (end == std::string_view::npos) end = s.size();
        if (end > start) out.emplace_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::uint64_t jitter_key(std::uint64_t seed, std::string_view agent_id, int day,
                         std::string_view purpose, std::size_t channel) {
    auto k = rng::combine(seed, rng::fnv1a(agent_id));
    k = rng::combine(k, static_cast<std::uint64_t>(day));
    k = rng::combine(k, rng::fnv1a(purpose));
    return rng::combine(k, channel);
}

std::uint64_t context_seed(const OracleContext& ctx) {
    auto it = ctx.find("seed");
    if (it == ctx.end()) throw UnparseableReply("context lacks seed");
    std::uint64_t v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UnparseableReply("bad seed: " + s);
    return v;
}

bool contains(const std::vector<ActionKind>& v, ActionKind a) {
    return std::find(v.begin(), v.end(), a) != v.end();
}

}  // namespace

double event_valence(std::string_view text) {
    int pos = 0;
    int neg = 0;
    for (const auto& w : words(text)) {
        if (matches_any(w, kNegativeStems)) ++neg;
        else if (matches_any(w, kPositiveStems)) ++pos;
    }
    return static_cast<double>(pos - neg) / static_cast<double>(pos + neg + 1);
}

EmotionState valence_target(double valence) {
    const double pos = std::max(0.0, valence);
    const double neg = std::max(0.0, -valence);
    const double neutral = 1.0 - std::abs(valence);
    return EmotionState{
        0.1 + 0.6 * pos,
        0.1 + 0.6 * neg,
        0.1 + 0.8 * neg,
        0.2 + 0.6 * pos + 0.1 * neutral,
        0.1 + 0.7 * neg,
    }
        .clamped();
}

StubOracle::StubOracle(StubConfig config) : config_(config) {
    if (!(config_.jitter_bound >= 0.0 && config_.jitter_bound < 1.0)) {
        throw ValidationError("stub jitter bound must lie in [0,1)");
    }
}

std::string StubOracle::complete(const OracleRequest& request, const std::string& /*prompt*/) {
    const auto& ctx = request.context;
    const std::string agent = request.agent_id.value_or("");
    switch (request.tmpl) {
        case PromptTemplate::emotion_update: return emotion_reply(ctx, agent);
        case PromptTemplate::decision: return decision_reply(ctx);
        case PromptTemplate::engagement_predict: return engagement_reply(ctx, agent);
        case PromptTemplate::classify: return classify_reply(ctx);
        case PromptTemplate::group_find: return group_find_reply(ctx);
        case PromptTemplate::group_generate: return group_generate_reply(ctx);
    }
    throw UnparseableReply("stub: unknown template");
}

// Drift toward the valence target with strength heat * exp(-decay * (day-1)).
// Zero heat leaves the previous emotions untouched, jitter included.
std::string StubOracle::emotion_reply(const OracleContext& ctx, std::string_view agent_id) const {
    const auto prev = state_from_context(ctx);
    const double heat = context_number(ctx, "heat");
    const int day = static_cast<int>(context_number(ctx, "day"));
    const auto seed = context_seed(ctx);
    auto summary = ctx.find("event_summary");
    const double valence = event_valence(summary == ctx.end() ? "" : summary->second);

    const double strength =
        std::clamp(heat * std::exp(-config_.day_decay * static_cast<double>(day - 1)), 0.0, 1.0);
    const auto target = valence_target(valence).channels();
    auto c = prev.channels();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double jitter =
            config_.jitter_bound * rng::signed_unit(jitter_key(seed, agent_id, day, "emotion", i));
        c[i] = std::clamp(c[i] + strength * (target[i] - c[i]) + strength * jitter, 0.0, 1.0);
    }
    return format_emotion_reply(EmotionState::from_channels(c));
}

std::string StubOracle::decision_reply(const OracleContext& ctx) const {
    const auto e = state_from_context(ctx);
    const int day = static_cast<int>(context_number(ctx, "day"));
    const double heat = context_number(ctx, "heat");
    auto avail_it = ctx.find("available_actions");
    const auto available = actions_from_text(avail_it == ctx.end() ? "" : avail_it->second);
    if (available.empty()) throw UnparseableReply("stub: no available actions");
    const auto options = split_options(ctx);

    std::vector<ActionKind> plan{ActionKind::view};
    if (std::max(e.happiness, e.optimism) >= 0.3) plan.push_back(ActionKind::like);
    if (e.anger >= 0.6) plan.push_back(ActionKind::comment);
    if (std::max({e.sadness, e.pessimism, e.anger}) >= 0.5 && heat >= 0.5) {
        plan.push_back(ActionKind::share);
    }
    if (!options.empty()) plan.push_back(ActionKind::predict);

    ActionKind action = ActionKind::view;
    std::string reason = "keeping up with the event";
    if (day <= 1) {
        reason = "first exposure to the event";
    } else if (e.anger >= 0.6) {
        action = ActionKind::comment;
        reason = "strong anger about the event";
    } else if (e.happiness >= 0.5 || e.optimism >= 0.6) {
        action = ActionKind::like;
        reason = "positive feelings about the event";
    } else if (contains(plan, ActionKind::share)) {
        action = ActionKind::share;
        reason = "wants others to know about the event";
    }
    if (!contains(available, action)) {
        auto it = std::find_if(plan.begin(), plan.end(),
                               [&](ActionKind a) { return contains(available, a); });
        action = it != plan.end() ? *it : available.front();
        reason = "choosing among the available actions";
    }

    std::string out = "Action: " + std::string(to_string(action)) + "\n";
    out += "Reason: " + reason + "\n";
    out += "Updated plan:";
    int n = 0;
    for (auto a : plan) {
        if (a == action || !contains(available, a)) continue;
        out += " " + std::to_string(++n) + ". " + std::string(to_string(a));
    }
    out += "\n";

    if (action == ActionKind::predict) {
        if (options.empty()) throw UnparseableReply("stub: predict without options");
        // Net attitude maps onto the option list: positive picks the first.
        const double net = std::clamp(e.optimism - e.pessimism, -1.0, 1.0);
        const auto n_opt = options.size();
        auto idx = static_cast<std::size_t>((1.0 - (net + 1.0) / 2.0) * static_cast<double>(n_opt));
        idx = std::min(idx, n_opt - 1);
        out += "Prediction: " + options[idx] + "\n";
        out += "Confidence: " + format_number(0.5 + 0.5 * std::abs(net)) + "\n";
    }
    return out;
}

std::string StubOracle::engagement_reply(const OracleContext& ctx, std::string_view agent_id) const {
    const auto population = static_cast<std::int64_t>(context_number(ctx, "population"));
    DailyEngagement out;
    if (auto it = ctx.find("date"); it != ctx.end()) {
        if (auto d = parse_date(it->second)) out.date = *d;
    }
    if (population <= 0) return format_engagement_reply(out);

    const auto e = state_from_context(ctx);
    const double heat = std::max(0.0, context_number(ctx, "heat"));
    const int day = static_cast<int>(context_number(ctx, "day"));
    const double forget = std::clamp(context_number(ctx, "forgetting_probability"), 0.0, 1.0);
    const auto seed = context_seed(ctx);
    const bool heated = context_number(ctx, "heated") != 0.0;
    auto plan_it = ctx.find("plan");
    const auto plan = actions_from_text(plan_it == ctx.end() ? "" : plan_it->second);

    const double retention = std::pow(1.0 - forget, static_cast<double>(day - 1));
    const double arousal = (e.happiness + e.sadness + e.anger) / 3.0;
    const double jitter =
        config_.jitter_bound * rng::signed_unit(jitter_key(seed, agent_id, day, "views", 0));
    const double reach = std::clamp(config_.base_reach * heat * retention *
                                        (1.0 + config_.arousal_gain * arousal) * (1.0 + jitter),
                                    0.0, 1.0);
    out.views = static_cast<std::int64_t>(std::floor(static_cast<double>(population) * reach));

    // Rates keep likes below a tenth of views and at or above the other two.
    const double like_rate = 0.03 + 0.05 * std::max(e.happiness, e.optimism);
    double comment_rate = 0.008 + 0.02 * e.anger;
    double share_rate = 0.005 + 0.015 * std::max(e.sadness, e.pessimism);
    if (contains(plan, ActionKind::comment)) comment_rate *= 1.25;
    if (contains(plan, ActionKind::share)) share_rate *= 1.25;
    if (heated) {
        comment_rate *= 3.0;
        share_rate *= 3.0;
    }
    const auto v = static_cast<double>(out.views);
    out.likes = static_cast<std::int64_t>(std::floor(v * like_rate));
    out.comments = static_cast<std::int64_t>(std::floor(v * comment_rate));
    out.shares = static_cast<std::int64_t>(std::floor(v * share_rate));
    if (!heated) {
        out.comments = std::min(out.comments, out.likes);
        out.shares = std::min(out.shares, out.likes);
    }
    return format_engagement_reply(out);
}

std::string StubOracle::classify_reply(const OracleContext& ctx) const {
    auto domain = ctx.find("meta.domain");
    auto country = ctx.find("meta.country");
    if (domain == ctx.end() || country == ctx.end()) {
        throw UnparseableReply("stub: classify needs event metadata");
    }
    return "Domain: " + domain->second + "\nCountry: " + country->second + "\n";
}

std::string StubOracle::group_find_reply(const OracleContext& ctx) const {
    auto country = ctx.find("country");
    auto domain = ctx.find("domain");
    if (country == ctx.end() || domain == ctx.end()) {
        throw UnparseableReply("stub: group_find needs country and domain");
    }
    auto d = parse_domain(domain->second);
    const char* doc = d ? builtin_group_document(country->second, *d) : nullptr;
    if (doc == nullptr) {
        return "No population data is available for " + country->second + " / " + domain->second +
               ".\n";
    }
    return std::string("Here is the hierarchy:\n\n") + doc;
}

std::string StubOracle::group_generate_reply(const OracleContext& ctx) const {
    auto doc = ctx.find("document");
    auto country = ctx.find("country");
    if (doc == ctx.end() || country == ctx.end()) {
        throw UnparseableReply("stub: group_generate needs document and country");
    }
    std::string out;
    int n = 0;
    std::string_view s = doc->second;
    std::size_t start = 0;
    while (start < s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string_view::npos) end = s.size();
        auto line = s.substr(start, end - start);
        start = end + 1;
        if (line.rfind("- ", 0) != 0) continue;
        line.remove_prefix(2);
        auto colon = line.rfind(':');
        if (colon == std::string_view::npos) continue;
        const std::string group(line.substr(0, colon));
        const std::string number(line.substr(colon + 1));
        out += "agent " + std::to_string(++n) + ":\n";
        out += "id: " + agent_id_for(group) + "\n";
        out += "description: Representing" + number + " " + country->second + " " + group +
               ", reflecting their emotions, attitudes, and possible actions in response to the "
               "news.\n";
        out += "characteristic: " + std::string(to_string(characteristic_by_keyword(group))) +
               " population\n";
    }
    return out;
}

}  // namespace groupsim
