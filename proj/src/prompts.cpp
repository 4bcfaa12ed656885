#include "groupsim/errors.hpp"
#include "groupsim/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace groupsim {

namespace {

// Placeholders are {name}; literal braces the model should see are doubled.

constexpr std::string_view kGroupFind =
    "Instructions:\n"
    "You are an AI assistant specializing in generating hierarchical population group "
    "structures based on the provided country and domain. Use the given context to create a "
    "detailed tree-structured hierarchy that includes group names and corresponding numbers at "
    "each level.\n"
    "Domain: {domain}      Country: {country}\n"
    "Your task is to generate a multi-level hierarchy for population groups, adjusting the "
    "structure based on the country and domain. Use the following format:\n"
    "  \xE2\x80\xA2 First Layer (Domain-level Groups, denoted by ##):\n"
    "    Broad categories representing the major population groups of the domain in the given "
    "field.\n"
    "  \xE2\x80\xA2 Second Layer (Subgroups, denoted by 1. ** **):\n"
    "    Specific subdivisions of each first-layer group.\n"
    "  \xE2\x80\xA2 Third Layer (Detailed Breakdown, denoted by -):\n"
    "    Granular breakdowns within each subgroup.\n"
    "Example:\n"
    "For Country: CN (China) and Field: Education, a branch of the tree structure should be "
    "like this:\n"
    "## Students: 58,030,769\n"
    "  1. **Postgraduates: 3,653,613**\n"
    "    - Doctor: 556,065\n"
    "    - Master: 3,097,548\n"
    "  2. **Undergraduates: 19,656,436**\n"
    "    - Bachelor: 19,656,436\n"
    "  3. **Vocational Undergraduate: 34,720,720**\n"
    "    - Normal: 8,926,980\n"
    "    - Short-cycle: 25,794,740\n";

constexpr std::string_view kGroupGenerate =
    "Instructions:\n"
    "You are an AI assistant tasked with generating group agents and your process is as "
    "follows:\n"
    "1. Identify and list all groups mentioned in the document.\n"
    "2. Based on the identified groups and their associated templates, generate an agent for "
    "each group, ensuring no duplicates and that all groups are generative.\n"
    "Answer Format:\n"
    "  agent {{n}}: (nth agent)\n"
    "  id: {{group}}-agents\n"
    "  description: Representing {{number}} {{country}} {{group}}, reflecting their emotions, "
    "attitudes, and possible actions in response to the news.\n"
    "  characteristic: {{susceptible/ordinary/calm}} population\n"
    "3. Follow the template below strictly, filling in the {{group}}, {{number}}, and "
    "{{country}} fields based on the contextual input.\n"
    "Country: {country}\n"
    "Document:\n"
    "{document}\n";

constexpr std::string_view kAgentHeader =
    "System:\n"
    "You are {agent_name}, {agent_description}.\n"
    "You are in the social network world: {world_description}.\n"
    "perception:\n"
    "  \xE2\x80\xA2 Time: {day_n}\n"
    "  \xE2\x80\xA2 Event State: {event_state}\n"
    "Your State:\n"
    "  \xE2\x80\xA2 Previous Memory: {memory}\n"
    "  \xE2\x80\xA2 Previous State: {previous_state}\n";

constexpr std::string_view kDecisionBody =
    "  \xE2\x80\xA2 Current Emotion: {emotions}\n"
    "  \xE2\x80\xA2 Current Attitude: {attitudes}\n"
    "Action Options:\n"
    "You can choose from the following available actions: {available_actions}\n"
    "Instructions:\n"
    "1. Use decision-making reasoning to choose your actions based on factors such as "
    "perception and your status. This action must be one of the available actions based on "
    "the previous context. Also, explain why.\n"
    "2. Answers must follow the following format:\n"
    "  Action: {{Action name}}\n"
    "  Reason: {{reason}}\n"
    "  Updated plan: {{List available actions with serial numbers}}\n";

constexpr std::string_view kEmotionBody =
    "  \xE2\x80\xA2 Emotion Fading: {emotion_fading}\n"
    "Instructions:\n"
    "1. Update your emotions and attitudes: Update your emotions and attitudes based on your "
    "perception and status, taking into account the current time and emotion fading.\n"
    "2. Event cycle pattern: In a typical event cycle, emotions will initially surge, then "
    "quickly decline, and eventually stabilize. Some explosive events may have a second "
    "emotional peak. Attitudes tend to follow a similar pattern.\n"
    "3. Response Template:\n"
    "  emotions: {{ 'happiness': (), 'sadness': (), 'anger': () }}\n"
    "  attitudes: {{ 'optimism': (), 'pessimism': () }}\n";

constexpr std::string_view kEngagementBody =
    "  \xE2\x80\xA2 Forgetting Probability: {forgetting_probability}\n"
    "  \xE2\x80\xA2 Current Emotion: {emotions}\n"
    "  \xE2\x80\xA2 Current Attitude: {attitudes}\n"
    "Instructions:\n"
    "Task: Predict daily engagement metrics\n"
    "1. Daily reading forecast:\n"
    "  \xE2\x80\xA2 Based on your perception and status, consider the popularity of the event, "
    "the current date, and the forgetting probability, and estimate how many people in your "
    "group have viewed the event.\n"
    "2. General engagement pattern:\n"
    "  \xE2\x80\xA2 Views:\n"
    "    \xE2\x80\xA2 Must be at least one order of magnitude higher than likes.\n"
    "    \xE2\x80\xA2 Due to the forgetfulness effect, views gradually diminish over time, and "
    "explosive events may have a second peak of views, but less than the first peak of "
    "views.\n"
    "  \xE2\x80\xA2 Likes, comments, and shares:\n"
    "    \xE2\x80\xA2 Likes usually exceed comments and shares.\n"
    "    \xE2\x80\xA2 For news that sparks heated discussions, comments or shares may exceed "
    "likes.\n"
    "3. Forecast format:\n"
    "  Date: YYYY-MM-DD\n"
    "  Views: {{predicted_views}}\n"
    "  Likes: {{predicted_likes}}\n"
    "  Comments: {{predicted_comments}}\n"
    "  Shares: {{predicted_shares}}\n";

constexpr std::string_view kClassify =
    "Instructions:\n"
    "Identify the domain and the country of the following online event.\n"
    "Title: {title}\n"
    "Content: {content}\n"
    "The domain must be one of: {domains}.\n"
    "The country must be an ISO-3166 alpha-2 code.\n"
    "Answer format:\n"
    "  Domain: {{domain}}\n"
    "  Country: {{country}}\n";

const std::string kDecision = std::string(kAgentHeader) + std::string(kDecisionBody);
const std::string kEmotion = std::string(kAgentHeader) + std::string(kEmotionBody);
const std::string kEngagement = std::string(kAgentHeader) + std::string(kEngagementBody);

bool is_slot_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

/// Walks a template, calling on_text for literal runs and on_slot for names.
template <class OnText, class OnSlot>
void walk_template(std::string_view t, OnText&& on_text, OnSlot&& on_slot) {
    std::size_t i = 0;
    while (i < t.size()) {
        const char c = t[i];
        if ((c == '{' || c == '}') && i + 1 < t.size() && t[i + 1] == c) {
            on_text(std::string_view(&t[i], 1));
            i += 2;
            continue;
        }
        if (c == '{') {
            std::size_t j = i + 1;
            while (j < t.size() && is_slot_char(t[j])) ++j;
            if (j < t.size() && t[j] == '}' && j > i + 1) {
                on_slot(std::string(t.substr(i + 1, j - i - 1)));
                i = j + 1;
                continue;
            }
        }
        on_text(std::string_view(&t[i], 1));
        ++i;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        lines.push_back(trim(text.substr(start, end - start)));
        start = end + 1;
    }
    return lines;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Removes markdown bold markers a model may wrap around labels.
std::string strip_bold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
            ++i;
            continue;
        }
        out.push_back(s[i]);
    }
    return out;
}

/// Value of the first line "label: value" (case-insensitive label).
std::optional<std::string> labelled(const std::vector<std::string>& lines, std::string_view label) {
    const std::string want = lower(label) + ":";
    for (const auto& line : lines) {
        if (lower(line.substr(0, want.size())) == want) {
            return std::string(trim(std::string_view(line).substr(want.size())));
        }
    }
    return std::nullopt;
}

std::vector<std::string> normalized_lines(std::string_view text) {
    std::vector<std::string> out;
    for (auto line : split_lines(text)) out.push_back(std::string(trim(strip_bold(line))));
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Integer with optional "," / "_" thousands separators and optional sign.
std::optional<std::int64_t> parse_count(std::string_view s) {
    s = trim(s);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) return std::nullopt;
    std::int64_t v = 0;
    for (char c : s) {
        if (c == ',' || c == '_') continue;
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        if (v > (INT64_MAX - 9) / 10) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return negative ? -v : v;
}

/// Parses "{ 'a': 0.1, 'b': 0.2 }" requiring exactly the given keys.
template <std::size_t N>
std::array<double, N> parse_dict(std::string_view body, const std::array<std::string_view, N>& keys,
                                 std::string_view what) {
    body = trim(body);
    if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
        throw UnparseableReply(std::string(what) + ": expected { ... }");
    }
    body = body.substr(1, body.size() - 2);
    std::array<double, N> values{};
    std::array<bool, N> seen{};
    std::size_t start = 0;
    std::size_t count = 0;
    while (start <= body.size()) {
        auto end = body.find(',', start);
        if (end == std::string_view::npos) end = body.size();
        auto entry = trim(body.substr(start, end - start));
        start = end + 1;
        if (entry.empty()) {
            if (end == body.size()) break;
            throw UnparseableReply(std::string(what) + ": empty entry");
        }
        auto colon = entry.find(':');
        if (colon == std::string_view::npos) {
            throw UnparseableReply(std::string(what) + ": entry without colon");
        }
        auto key = trim(entry.substr(0, colon));
        if (key.size() >= 2 && (key.front() == '\'' || key.front() == '"') && key.back() == key.front()) {
            key = key.substr(1, key.size() - 2);
        }
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) throw UnparseableReply(std::string(what) + ": unknown key " + std::string(key));
        const auto idx = static_cast<std::size_t>(it - keys.begin());
        if (seen[idx]) throw UnparseableReply(std::string(what) + ": duplicate key " + std::string(key));
        auto v = parse_double(entry.substr(colon + 1));
        if (!v) throw UnparseableReply(std::string(what) + ": non-numeric value for " + std::string(key));
        if (*v < 0.0 || *v > 1.0) {
            throw UnparseableReply(std::string(what) + ": " + std::string(key) + " out of [0,1]");
        }
        values[idx] = *v;
        seen[idx] = true;
        ++count;
    }
    if (count != N) throw UnparseableReply(std::string(what) + ": missing keys");
    return values;
}

}  // namespace

std::string_view to_string(PromptTemplate t) {
    switch (t) {
        case PromptTemplate::group_find: return "group_find";
        case PromptTemplate::group_generate: return "group_generate";
        case PromptTemplate::decision: return "decision";
        case PromptTemplate::emotion_update: return "emotion_update";
        case PromptTemplate::engagement_predict: return "engagement_predict";
        case PromptTemplate::classify: return "classify";
    }
    return "?";
}

std::string_view template_text(PromptTemplate t) {
    switch (t) {
        case PromptTemplate::group_find: return kGroupFind;
        case PromptTemplate::group_generate: return kGroupGenerate;
        case PromptTemplate::decision: return kDecision;
        case PromptTemplate::emotion_update: return kEmotion;
        case PromptTemplate::engagement_predict: return kEngagement;
        case PromptTemplate::classify: return kClassify;
    }
    return {};
}

std::vector<std::string> template_slots(PromptTemplate t) {
    std::vector<std::string> slots;
    walk_template(template_text(t), [](std::string_view) {},
                  [&](std::string name) {
                      if (std::find(slots.begin(), slots.end(), name) == slots.end()) {
                          slots.push_back(std::move(name));
                      }
                  });
    return slots;
}

std::string render_prompt(const OracleRequest& request) {
    const auto text = template_text(request.tmpl);
    std::string out;
    out.reserve(text.size() + 256);
    walk_template(text, [&](std::string_view lit) { out.append(lit); },
                  [&](const std::string& name) {
                      auto it = request.context.find(name);
                      if (it == request.context.end()) throw MissingSlot(name);
                      out.append(it->second);
                  });
    return out;
}

EmotionState parse_emotion_reply(std::string_view text) {
    const auto lines = normalized_lines(text);
    auto emotions = labelled(lines, "emotions");
    auto attitudes = labelled(lines, "attitudes");
    if (!emotions) throw UnparseableReply("emotion reply: no 'emotions:' line");
    if (!attitudes) throw UnparseableReply("emotion reply: no 'attitudes:' line");
    constexpr std::array<std::string_view, 3> ekeys = {"happiness", "sadness", "anger"};
    constexpr std::array<std::string_view, 2> akeys = {"optimism", "pessimism"};
    const auto e = parse_dict(*emotions, ekeys, "emotions");
    const auto a = parse_dict(*attitudes, akeys, "attitudes");
    return EmotionState{e[0], e[1], e[2], a[0], a[1]};
}

ActionDecision parse_decision_reply(std::string_view text, const std::vector<ActionKind>& available,
                                    const std::vector<std::string>& options) {
    const auto lines = normalized_lines(text);
    auto action_text = labelled(lines, "action");
    if (!action_text) throw UnparseableReply("decision reply: no 'Action:' line");

    auto to_action = [&](std::string_view raw) {
        std::string name = lower(trim(raw));
        while (!name.empty() && (name.back() == '.' || name.back() == ',')) name.pop_back();
        auto a = parse_action(name);
        if (!a || std::find(available.begin(), available.end(), *a) == available.end()) {
            throw IllegalAction(std::string(trim(raw)));
        }
        return *a;
    };

    ActionDecision d;
    d.action = to_action(*action_text);

    auto reason = labelled(lines, "reason");
    if (!reason) throw UnparseableReply("decision reply: no 'Reason:' line");
    d.reason = *reason;

    if (auto plan = labelled(lines, "updated plan")) {
        // "1. like 2. share" -> [like, share]
        std::string_view rest = *plan;
        while (!(rest = trim(rest)).empty()) {
            std::size_t i = 0;
            while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
            if (i == 0 || i >= rest.size() || (rest[i] != '.' && rest[i] != ')')) {
                throw UnparseableReply("decision reply: plan entries must be numbered");
            }
            rest.remove_prefix(i + 1);
            rest = trim(rest);
            std::size_t j = 0;
            while (j < rest.size() && std::isalpha(static_cast<unsigned char>(rest[j]))) ++j;
            if (j == 0) throw UnparseableReply("decision reply: empty plan entry");
            d.plan.push_back(to_action(rest.substr(0, j)));
            rest.remove_prefix(j);
            rest = trim(rest);
            if (!rest.empty() && rest.front() == ',') rest.remove_prefix(1);
        }
    }

    if (d.action == ActionKind::predict) {
        auto option = labelled(lines, "prediction");
        auto confidence = labelled(lines, "confidence");
        if (!option || !confidence) {
            throw UnparseableReply("decision reply: predict needs 'Prediction:' and 'Confidence:'");
        }
        if (!options.empty() && std::find(options.begin(), options.end(), *option) == options.end()) {
            throw UnparseableReply("decision reply: unknown option " + *option);
        }
        auto c = parse_double(*confidence);
        if (!c || *c < 0.0 || *c > 1.0) throw UnparseableReply("decision reply: bad confidence");
        d.prediction = Prediction{*option, *c};
    }
    return d;
}

DailyEngagement parse_engagement_reply(std::string_view text) {
    const auto lines = normalized_lines(text);
    DailyEngagement e;
    auto field = [&](std::string_view label) {
        auto v = labelled(lines, label);
        if (!v) throw UnparseableReply("engagement reply: no '" + std::string(label) + ":' line");
        auto n = parse_count(*v);
        if (!n) throw UnparseableReply("engagement reply: bad count for " + std::string(label));
        if (*n < 0) throw NegativeCount(std::string(label));
        return *n;
    };
    e.views = field("Views");
    e.likes = field("Likes");
    e.comments = field("Comments");
    e.shares = field("Shares");
    if (auto date = labelled(lines, "Date")) {
        if (auto d = parse_date(*date)) e.date = *d;
    }
    return e;
}

std::pair<Domain, std::string> parse_classify_reply(std::string_view text) {
    const auto lines = normalized_lines(text);
    auto domain = labelled(lines, "domain");
    auto country = labelled(lines, "country");
    if (!domain) throw UnparseableReply("classify reply: no 'Domain:' line");
    auto d = parse_domain(lower(*domain));
    if (!d) throw UnparseableReply("classify reply: unknown domain " + *domain);
    if (!country) throw UnparseableReply("classify reply: no 'Country:' line");
    if (!is_country_code(*country)) throw UnparseableReply("classify reply: bad country " + *country);
    return {*d, *country};
}

std::vector<std::pair<std::string, Characteristic>> parse_group_generate_reply(std::string_view text) {
    std::vector<std::pair<std::string, Characteristic>> out;
    std::optional<std::string> pending_id;
    for (const auto& line : normalized_lines(text)) {
        const auto l = lower(line);
        if (l.rfind("id:", 0) == 0) {
            if (pending_id) throw UnparseableReply("group reply: id without characteristic");
            pending_id = std::string(trim(std::string_view(line).substr(3)));
            if (pending_id->empty()) throw UnparseableReply("group reply: empty id");
        } else if (l.rfind("characteristic:", 0) == 0) {
            if (!pending_id) throw UnparseableReply("group reply: characteristic without id");
            auto value = trim(std::string_view(l).substr(15));
            auto word = value.substr(0, value.find(' '));
            auto c = parse_characteristic(word);
            if (!c) throw UnparseableReply("group reply: unknown characteristic " + std::string(word));
            out.emplace_back(std::move(*pending_id), *c);
            pending_id.reset();
        }
    }
    if (pending_id) throw UnparseableReply("group reply: id without characteristic");
    if (out.empty()) throw UnparseableReply("group reply: no agents");
    return out;
}

std::string extract_outline_block(std::string_view text) {
    const auto lines = split_lines(text);
    auto is_outline = [](std::string_view l) {
        if (l.rfind("##", 0) == 0 || l.rfind("- ", 0) == 0) return true;
        std::size_t i = 0;
        while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
        return i > 0 && l.substr(i, 4) == ". **";
    };
    std::size_t first = lines.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (first == lines.size() && lines[i].rfind("##", 0) == 0) first = i;
        if (first != lines.size() && is_outline(lines[i])) last = i;
    }
    if (first == lines.size()) throw UnparseableReply("group document reply: no '##' line");
    std::string out;
    for (std::size_t i = first; i <= last; ++i) {
        out.append(lines[i]);
        out.push_back('\n');
    }
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_emotions_slot(const EmotionState& e) {
    return "{ 'happiness': " + format_number(e.happiness) + ", 'sadness': " +
           format_number(e.sadness) + ", 'anger': " + format_number(e.anger) + " }";
}

std::string format_attitudes_slot(const EmotionState& e) {
    return "{ 'optimism': " + format_number(e.optimism) + ", 'pessimism': " +
           format_number(e.pessimism) + " }";
}

std::string format_actions_slot(const std::vector<ActionKind>& actions) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += ", ";
        out += to_string(actions[i]);
    }
    return out;
}

std::string format_emotion_reply(const EmotionState& e) {
    return "emotions: " + format_emotions_slot(e) + "\nattitudes: " + format_attitudes_slot(e) + "\n";
}

std::string format_engagement_reply(const DailyEngagement& e) {
    std::string out;
    if (e.date.ok()) out += "Date: " + format_date(e.date) + "\n";
    out += "Views: " + std::to_string(e.views) + "\n";
    out += "Likes: " + std::to_string(e.likes) + "\n";
    out += "Comments: " + std::to_string(e.comments) + "\n";
    out += "Shares: " + std::to_string(e.shares) + "\n";
    return out;
}

double context_number(const OracleContext& ctx, const std::string& key) {
    auto it = ctx.find(key);
    if (it == ctx.end()) throw UnparseableReply("context lacks numeric slot " + key);
    auto v = parse_double(it->second);
    if (!v) throw UnparseableReply("context slot " + key + " is not numeric");
    return *v;
}

}  // namespace groupsim
