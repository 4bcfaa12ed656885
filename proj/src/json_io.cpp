#include "groupsim/json_io.hpp"

#include "groupsim/errors.hpp"

namespace groupsim {

namespace {

const Json& require(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw MalformedEvent(field, "missing");
    return *it;
}

std::string require_string(const Json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_string()) throw MalformedEvent(field, "expected string");
    return v.get<std::string>();
}

std::vector<std::int64_t> require_series(const Json& gt, const char* field) {
    const auto& v = require(gt, field);
    if (!v.is_array()) throw MalformedEvent(field, "expected array");
    std::vector<std::int64_t> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number_integer()) throw MalformedEvent(field, "expected integer counts");
        out.push_back(x.get<std::int64_t>());
    }
    return out;
}

}  // namespace

EventRecord event_from_json(const Json& j) {
    if (!j.is_object()) throw MalformedEvent("event", "expected JSON object");
    EventRecord e;
    e.id = require_string(j, "id");
    e.title = require_string(j, "title");
    e.content = require_string(j, "content");

    const auto domain = require_string(j, "domain");
    if (domain.empty()) throw MalformedEvent("domain", "missing");
    auto d = parse_domain(domain);
    if (!d) throw MalformedEvent("domain", "unknown domain: " + domain);
    e.domain = *d;

    e.country = require_string(j, "country");

    const auto platform = require_string(j, "platform");
    auto p = parse_platform(platform);
    if (!p) throw MalformedEvent("platform", "unknown platform: " + platform);
    e.platform = *p;

    const auto date = require_string(j, "start_date");
    auto sd = parse_date(date);
    if (!sd) throw MalformedEvent("start_date", "not an ISO-8601 date: " + date);
    e.start_date = *sd;

    const auto& gt = require(j, "ground_truth");
    if (!gt.is_object()) throw MalformedEvent("ground_truth", "expected object");
    e.ground_truth.views = require_series(gt, "views");
    e.ground_truth.likes = require_series(gt, "likes");
    e.ground_truth.comments = require_series(gt, "comments");
    e.ground_truth.shares = require_series(gt, "shares");
    return validate_event(std::move(e));
}

Json event_to_json(const EventRecord& e) {
    Json j;
    j["id"] = e.id;
    j["title"] = e.title;
    j["content"] = e.content;
    j["domain"] = to_string(e.domain);
    j["country"] = e.country;
    j["platform"] = to_string(e.platform);
    j["start_date"] = format_date(e.start_date);
    j["ground_truth"] = {
        {"views", e.ground_truth.views},
        {"likes", e.ground_truth.likes},
        {"comments", e.ground_truth.comments},
        {"shares", e.ground_truth.shares},
    };
    return j;
}

Json emotions_to_json(const EmotionState& e) {
    return Json{
        {"emotions", {{"happiness", e.happiness}, {"sadness", e.sadness}, {"anger", e.anger}}},
        {"attitudes", {{"optimism", e.optimism}, {"pessimism", e.pessimism}}},
    };
}

EmotionState emotions_from_json(const Json& j) {
    EmotionState e;
    e.happiness = j.at("emotions").at("happiness").get<double>();
    e.sadness = j.at("emotions").at("sadness").get<double>();
    e.anger = j.at("emotions").at("anger").get<double>();
    e.optimism = j.at("attitudes").at("optimism").get<double>();
    e.pessimism = j.at("attitudes").at("pessimism").get<double>();
    return e;
}

Json engagement_to_json(const DailyEngagement& e) {
    return Json{{"day", e.day},           {"date", format_date(e.date)},
                {"views", e.views},       {"likes", e.likes},
                {"comments", e.comments}, {"shares", e.shares}};
}

Json memory_to_json(const Memory& m) {
    Json items = Json::array();
    for (const auto& item : m.items()) {
        items.push_back({{"kind", to_string(item.kind)},
                         {"day", item.day},
                         {"payload", item.payload},
                         {"salience", item.salience},
                         {"snapshot", emotions_to_json(item.snapshot)}});
    }
    return Json{{"capacity", m.capacity()}, {"items", std::move(items)}};
}

Json agent_to_json(const GroupAgent& a, bool with_memory) {
    Json j{{"id", a.id},
           {"group", a.group},
           {"country", a.country},
           {"population", a.population},
           {"characteristic", to_string(a.characteristic)},
           {"state",
            {{"day", a.state.day},
             {"last_action", a.state.last_action ? Json(to_string(*a.state.last_action))
                                                 : Json(nullptr)}}}};
    j["state"].update(emotions_to_json(a.state.emotions));
    if (with_memory) j["memory"] = memory_to_json(a.memory);
    return j;
}

Json decision_to_json(const ActionDecision& d) {
    Json plan = Json::array();
    for (auto a : d.plan) plan.push_back(to_string(a));
    Json j{{"action", to_string(d.action)}, {"reason", d.reason}, {"plan", std::move(plan)}};
    if (d.prediction) {
        j["prediction"] = {{"option", d.prediction->option},
                           {"confidence", d.prediction->confidence}};
    }
    return j;
}

Json fading_to_json(const FadingConfig& f) {
    return Json{
        {"alpha", f.alpha},
        {"fading_rate",
         {{"susceptible", f.fading_rate[0]}, {"ordinary", f.fading_rate[1]}, {"calm", f.fading_rate[2]}}},
        {"forgetting_p", f.forgetting_p},
        {"memory_capacity", f.memory_capacity},
        {"amplitude",
         {{"susceptible", f.amplitude[0]}, {"ordinary", f.amplitude[1]}, {"calm", f.amplitude[2]}}},
    };
}

FadingConfig fading_from_json(const Json& j, FadingConfig base) {
    auto per_character = [](const Json& obj, std::array<double, 3>& out) {
        for (auto c : {Characteristic::susceptible, Characteristic::ordinary, Characteristic::calm}) {
            auto it = obj.find(std::string(to_string(c)));
            if (it != obj.end()) out[static_cast<int>(c)] = it->get<double>();
        }
    };
    if (j.contains("alpha")) {
        const auto& a = j.at("alpha");
        if (!a.is_array() || a.size() != 3) throw ValidationError("alpha must be a 3-element array");
        for (std::size_t i = 0; i < 3; ++i) base.alpha[i] = a[i].get<double>();
    }
    if (j.contains("fading_rate")) per_character(j.at("fading_rate"), base.fading_rate);
    if (j.contains("forgetting_p")) base.forgetting_p = j.at("forgetting_p").get<double>();
    if (j.contains("memory_capacity")) {
        base.memory_capacity = j.at("memory_capacity").get<std::size_t>();
    }
    if (j.contains("amplitude")) per_character(j.at("amplitude"), base.amplitude);
    return base;
}

}  // namespace groupsim
