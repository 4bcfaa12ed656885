#include "groupsim/runtime.hpp"

#include "groupsim/errors.hpp"

#include <spdlog/spdlog.h>

#include <exception>
#include <set>
#include <thread>

namespace groupsim {

namespace {

Json counters_to_json(const EventCounters& c) {
    return Json{{"views", c.views}, {"likes", c.likes}, {"comments", c.comments},
                {"shares", c.shares}};
}

struct AgentOutcome {
    GroupAgent agent;
    AgentDay day;
};

AgentOutcome advance_agent(const GroupAgent& agent, const Perception& perception,
                           const std::vector<ActionKind>& available, const Scenario& scenario,
                           const FadingConfig& fading, double weight, OracleGateway& oracle,
                           std::uint64_t seed) {
    const auto fresh = update_emotion(perception, agent, fading, oracle, seed);
    auto state = transition_state(agent.state, fresh, agent.memory, fading);
    state.emotions = apply_fading(state.emotions, agent.characteristic, fading);

    const auto decision = decide_action(agent, state, perception, oracle, available,
                                        scenario.options, fading, seed);
    state.last_action = decision.action;
    const auto engagement =
        generate_engagement(agent, state, perception, decision, weight, oracle, fading, seed);

    auto stream = rng::stream(seed, agent.id, perception.day);
    GroupAgent next = agent;
    next.state = state;
    next.memory = update_memory(agent.memory, decision, perception, state.emotions, fading, stream);
    return {std::move(next), AgentDay{agent.id, state, decision, engagement}};
}

}  // namespace

void Scenario::validate() const {
    validate_event(event);
    if (horizon_days < 1) throw ValidationError("horizon_days must be >= 1");
    if (layer < 1) throw ValidationError("layer must be >= 1");
    std::set<std::string> seen;
    for (const auto& o : options) {
        if (o.empty()) throw ValidationError("empty prediction option");
        if (o.find('|') != std::string::npos) throw ValidationError("option contains '|': " + o);
        if (!seen.insert(o).second) throw ValidationError("duplicate option: " + o);
    }
}

std::vector<double> SimulationTrace::daily_views() const {
    std::vector<double> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(static_cast<double>(d.totals.views));
    return out;
}

std::size_t SimulationTrace::engagement_rows() const {
    std::size_t n = 0;
    for (const auto& d : days) n += d.agents.size();
    return n;
}

StepResult step_day(const std::vector<GroupAgent>& agents, const EventState& event_state, int day,
                    const Scenario& scenario, const SimConfig& config,
                    const std::map<std::string, double>& weights, OracleGateway& oracle,
                    std::uint64_t seed) {
    if (day < 1) throw ValidationError("day must be >= 1");
    const auto fading = config.fading.normalized();
    const PerceptionConfig pcfg{scenario.heat, config.feedback_gain};
    const auto perception = perceive(event_state, scenario.event, day, pcfg, scenario.heated);

    std::vector<ActionKind> available{ActionKind::view, ActionKind::like, ActionKind::comment,
                                      ActionKind::share};
    if (!scenario.options.empty() && day == scenario.horizon_days) available = {ActionKind::predict};

    const auto n = agents.size();
    std::vector<std::optional<AgentOutcome>> outcomes(n);
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t i) {
        try {
            const auto w = weights.find(agents[i].id);
            const double weight = w == weights.end() ? 0.0 : w->second;
            outcomes[i] = advance_agent(agents[i], perception, available, scenario, fading, weight,
                                        oracle, seed);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const auto threads = std::min<std::size_t>(std::max(1u, config.threads), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) work(i);
            });
        }
    }
    // The lowest-index failure wins so the reported error does not depend on timing.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    StepResult result;
    result.record.day = day;
    result.record.date = perception.date;
    result.record.heat = perception.heat;
    std::vector<DailyEngagement> engagements;
    engagements.reserve(n);
    for (auto& o : outcomes) {
        engagements.push_back(o->day.engagement);
        result.record.agents.push_back(std::move(o->day));
        result.agents.push_back(std::move(o->agent));
    }
    result.event_state = aggregate_event_state(event_state, engagements);
    if (!engagements.empty()) result.record.totals = result.event_state.history.back();
    return result;
}

const KnowledgeGraph::Entry& ensure_entry(KnowledgeGraph& graph, const std::string& country,
                                          Domain domain, OracleGateway& oracle) {
    if (const auto* e = graph.find(country, domain)) return *e;
    std::string document;
    if (const char* builtin = builtin_group_document(country, domain)) {
        document = builtin;
    } else {
        try {
            document = oracle.query_group_document(country, domain);
        } catch (const UnparseableReply&) {
            throw MissingEntry(country, std::string(to_string(domain)));
        }
    }
    auto tree = parse_group_tree(document, country, domain);
    for (const auto& m : population_mismatches(tree)) {
        spdlog::warn("group {} declares {} but its children sum to {}", m.parent, m.declared,
                     m.children_sum);
    }
    graph.insert(std::move(tree), std::move(document));
    return *graph.find(country, domain);
}

SimulationTrace run_simulation(const Scenario& input, const SimConfig& config,
                               KnowledgeGraph& graph, OracleGateway& oracle, std::uint64_t seed) {
    input.validate();
    Scenario scenario = input;
    if (config.classify) {
        auto [domain, country] = oracle.classify_event(scenario.event);
        scenario.event.domain = domain;
        scenario.event.country = country;
    }
    const auto fading = config.fading.normalized();
    const auto& entry = ensure_entry(graph, scenario.event.country, scenario.event.domain, oracle);
    const auto specs = bfs_layer(entry.tree, scenario.layer);

    SimulationTrace trace;
    trace.scenario_id = scenario.event.id;
    trace.seed = seed;
    trace.layer = scenario.layer;
    trace.horizon_days = scenario.horizon_days;

    auto agents = instantiate_agents(specs, scenario.event.country, seed, oracle,
                                     fading.memory_capacity);
    const auto weights = compute_population_weights(agents);
    EventState state;
    for (int day = 1; day <= scenario.horizon_days; ++day) {
        try {
            auto step = step_day(agents, state, day, scenario, config, weights, oracle, seed);
            agents = std::move(step.agents);
            state = std::move(step.event_state);
            trace.days.push_back(std::move(step.record));
        } catch (const OracleError& e) {
            spdlog::error("day {} aborted: {}", day, e.what());
            trace.complete = false;
            trace.error = e.what();
            break;
        }
    }
    trace.agents = std::move(agents);
    trace.final_state = std::move(state);

    if (trace.complete && !scenario.options.empty() && !trace.days.empty()) {
        std::vector<ActionDecision> decisions;
        for (const auto& a : trace.days.back().agents) decisions.push_back(a.decision);
        trace.prediction = predict_outcome(trace.agents, decisions, scenario.options, weights);
    }
    return trace;
}

ReplicationSet run_replications(const Scenario& scenario, const SimConfig& config,
                                KnowledgeGraph& graph, OracleGateway& oracle,
                                const std::vector<std::uint64_t>& seeds) {
    std::set<std::uint64_t> seen;
    for (auto s : seeds) {
        if (!seen.insert(s).second) throw DuplicateSeed(s);
    }
    if (seeds.size() < 2) throw TooFewReplicates();

    ReplicationSet set;
    std::vector<double> complete_totals;
    for (auto s : seeds) {
        auto trace = run_simulation(scenario, config, graph, oracle, s);
        const double total = static_cast<double>(trace.final_state.cumulative.views);
        set.total_views.push_back(total);
        if (trace.complete) {
            complete_totals.push_back(total);
        } else {
            set.partial = true;
        }
        set.traces.push_back(std::move(trace));
    }
    if (complete_totals.size() >= 2) set.z = reproducibility_z(complete_totals);
    return set;
}

Json trace_to_json(const SimulationTrace& trace, const Scenario& scenario) {
    Json impulses = Json::array();
    for (const auto& i : scenario.heat.impulses) {
        impulses.push_back({{"day", i.day}, {"magnitude", i.magnitude}});
    }
    Json j;
    j["schema_version"] = kTraceSchemaVersion;
    j["scenario"] = {
        {"id", trace.scenario_id},
        {"title", scenario.event.title},
        {"domain", to_string(scenario.event.domain)},
        {"country", scenario.event.country},
        {"start_date", format_date(scenario.event.start_date)},
        {"layer", trace.layer},
        {"horizon_days", trace.horizon_days},
        {"heated", scenario.heated},
        {"options", scenario.options},
        {"heat",
         {{"baseline", scenario.heat.baseline},
          {"lead", scenario.heat.lead},
          {"decay", scenario.heat.decay},
          {"impulses", std::move(impulses)}}},
    };
    j["seed"] = trace.seed;
    j["complete"] = trace.complete;
    if (!trace.complete) j["error"] = trace.error;

    Json agents = Json::array();
    for (const auto& a : trace.agents) agents.push_back(agent_to_json(a, true));
    j["agents"] = std::move(agents);

    Json days = Json::array();
    Json totals{{"views", Json::array()}, {"likes", Json::array()}, {"comments", Json::array()},
                {"shares", Json::array()}};
    for (const auto& d : trace.days) {
        Json rows = Json::array();
        for (const auto& a : d.agents) {
            Json state{{"day", a.state.day},
                       {"last_action", a.state.last_action
                                           ? Json(to_string(*a.state.last_action))
                                           : Json(nullptr)}};
            state.update(emotions_to_json(a.state.emotions));
            rows.push_back({{"agent_id", a.agent_id},
                            {"state", std::move(state)},
                            {"decision", decision_to_json(a.decision)},
                            {"engagement", engagement_to_json(a.engagement)}});
        }
        days.push_back({{"day", d.day},
                        {"date", format_date(d.date)},
                        {"heat", d.heat},
                        {"totals", counters_to_json(d.totals)},
                        {"agents", std::move(rows)}});
        totals["views"].push_back(d.totals.views);
        totals["likes"].push_back(d.totals.likes);
        totals["comments"].push_back(d.totals.comments);
        totals["shares"].push_back(d.totals.shares);
    }
    j["days"] = std::move(days);
    j["daily_totals"] = std::move(totals);

    Json history = Json::array();
    for (const auto& h : trace.final_state.history) history.push_back(counters_to_json(h));
    j["final_state"] = {{"day", trace.final_state.day},
                        {"cumulative", counters_to_json(trace.final_state.cumulative)},
                        {"history", std::move(history)}};
    if (trace.prediction) {
        j["prediction"] = {{"support", trace.prediction->support},
                           {"winner", trace.prediction->winner}};
    }
    return j;
}

std::vector<double> daily_views_from_json(const Json& trace) {
    try {
        if (trace.at("schema_version").get<int>() != kTraceSchemaVersion) {
            throw ValidationError("unsupported trace schema_version");
        }
        return trace.at("daily_totals").at("views").get<std::vector<double>>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed trace: ") + e.what());
    }
}

}  // namespace groupsim
