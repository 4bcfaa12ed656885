#include "groupsim/errors.hpp"
#include "groupsim/harness.hpp"
#include "groupsim/hierarchy.hpp"
#include "groupsim/runtime.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <map>

using namespace groupsim;

namespace {

struct Common {
    std::string config_path;
    std::string oracle;
    std::string log_level;
    bool verbose = false;
};

RunConfig effective_config(const Common& common) {
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_run_config(common.config_path);
    if (!common.oracle.empty()) cfg.oracle.kind = common.oracle;
    if (common.verbose) {
        cfg.oracle.gateway.verbose = true;
        cfg.verbosity = "debug";
    }
    if (!common.log_level.empty()) cfg.verbosity = common.log_level;
    auto level = spdlog::level::from_str(cfg.verbosity);
    if (level == spdlog::level::off && cfg.verbosity != "off") {
        throw ValidationError("unknown verbosity: " + cfg.verbosity);
    }
    spdlog::set_level(level);
    return cfg;
}

KnowledgeGraph load_graph(const RunConfig& cfg) {
    return cfg.graph_dir ? KnowledgeGraph::load(*cfg.graph_dir) : KnowledgeGraph{};
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const auto item = text.substr(start, end - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("bad seed: '" + item + "'");
        }
        start = end + 1;
    }
    return out;
}

int run_generate_agents(const Common& common, const std::string& country,
                        const std::string& domain_text, int layer, std::uint64_t seed,
                        const std::string& out_path, const std::string& save_graph) {
    auto cfg = effective_config(common);
    auto domain = parse_domain(domain_text);
    if (!domain) throw ValidationError("unknown domain: " + domain_text);
    if (!is_country_code(country)) throw ValidationError("country must be an alpha-2 code");
    auto gateway = make_gateway(cfg.oracle);
    auto graph = load_graph(cfg);
    const auto& entry = ensure_entry(graph, country, *domain, *gateway);
    const auto specs = bfs_layer(entry.tree, layer);
    const auto agents = instantiate_agents(specs, country, seed, *gateway, cfg.fading.memory_capacity);

    Json j{{"schema_version", 1},
           {"country", country},
           {"domain", to_string(*domain)},
           {"layer", layer},
           {"depth", entry.tree.depth},
           {"agents", Json::array()}};
    for (const auto& a : agents) j["agents"].push_back(agent_to_json(a));
    const auto text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
    if (!save_graph.empty()) graph.save(save_graph);
    return 0;
}

int run_simulate(const Common& common, const std::string& event_path,
                 const std::vector<std::uint64_t>& seeds, std::optional<int> layer,
                 std::optional<unsigned> threads, const std::string& heat,
                 const std::string& outdir) {
    auto cfg = effective_config(common);
    if (layer) cfg.layer = *layer;
    if (threads) cfg.threads = *threads;
    if (!heat.empty()) cfg.heat = heat;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!outdir.empty()) cfg.output_dir = outdir;
    cfg.validate();

    const auto event = load_event(event_path);
    const auto scenario = make_scenario(event, cfg);
    auto gateway = make_gateway(cfg.oracle);
    auto graph = load_graph(cfg);
    const auto sim = sim_config(cfg);

    ReplicationSet set;
    if (cfg.seeds.size() == 1) {
        set.traces.push_back(run_simulation(scenario, sim, graph, *gateway, cfg.seeds.front()));
        set.total_views.push_back(
            static_cast<double>(set.traces.front().final_state.cumulative.views));
        set.partial = !set.traces.front().complete;
    } else {
        set = run_replications(scenario, sim, graph, *gateway, cfg.seeds);
    }
    const SimulationTrace* failed = nullptr;
    bool any_complete = false;
    for (const auto& t : set.traces) {
        if (t.complete) {
            any_complete = true;
        } else if (!failed) {
            failed = &t;
        }
    }
    if (!any_complete) throw OracleUnavailable("seed " + std::to_string(failed->seed) + ": " + failed->error);
    emit_report(set, event, scenario, cfg, cfg.output_dir, std::cout);
    if (failed) {
        spdlog::error("seed {} stopped early: {}", failed->seed, failed->error);
        return 3;
    }
    return 0;
}

int run_evaluate(const Common& common, const std::vector<std::string>& traces,
                 const std::vector<std::string>& events, const std::string& out_path) {
    auto cfg = effective_config(common);
    if (traces.size() != events.size()) {
        throw ValidationError("each --trace needs a matching --event");
    }
    // Traces of the same event are treated as replicates of one another.
    std::map<std::string, std::pair<EventRecord, std::vector<std::vector<double>>>> by_event;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        auto event = load_event(events[i]);
        auto trace = read_json(traces[i]);
        if (trace.contains("complete") && !trace["complete"].get<bool>()) {
            spdlog::warn("{} is incomplete; skipped", traces[i]);
            continue;
        }
        auto views = daily_views_from_json(trace);
        auto [it, inserted] = by_event.try_emplace(event.id, event, std::vector<std::vector<double>>{});
        if (inserted) order.push_back(event.id);
        it->second.second.push_back(std::move(views));
    }
    if (order.empty()) throw ValidationError("no complete trace to evaluate");

    std::vector<MetricReport> reports;
    std::vector<TableRow> rows;
    Json per_event = Json::array();
    for (const auto& id : order) {
        const auto& [event, views] = by_event.at(id);
        reports.push_back(evaluate_event(event, views, cfg.eval));
        rows.push_back(table_row(reports.back()));
        per_event.push_back(metric_report_to_json(reports.back(), cfg.eval));
    }
    const auto aggregate = aggregate_reports(reports);
    rows.push_back(table_row(aggregate));
    std::cout << render_table(rows);
    if (aggregate.t_per_event_total) {
        std::cout << "t-test over per-event totals: "
                  << (aggregate.t_per_event_total->diverged ? std::string("diverged")
                                                            : std::to_string(aggregate.t_per_event_total->t))
                  << "\n";
    }
    if (!out_path.empty()) {
        Json j{{"schema_version", 1}, {"events", std::move(per_event)},
               {"aggregate", aggregate_to_json(aggregate)}};
        write_text(out_path, j.dump(2) + "\n");
    }
    return 0;
}

int run_fixtures(const std::string& outdir, int count, std::int64_t scale, std::uint64_t seed) {
    if (count < 1) throw ValidationError("--count must be >= 1");
    const Archetype order[] = {Archetype::single_peak_day2, Archetype::double_peak,
                               Archetype::single_peak_day3};
    int n = 0;
    for (int k = 0; k < count; ++k) {
        for (auto a : order) {
            auto event = make_fixture(a, scale, seed + static_cast<std::uint64_t>(k));
            char name[32];
            std::snprintf(name, sizeof name, "event_%02d.json", ++n);
            save_event(event, std::filesystem::path(outdir) / name);
            std::cout << name << " " << to_string(a) << " " << event.id << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("groupsim"));

    CLI::App app{"Group-agent social network simulator"};
    app.require_subcommand(1);
    Common common;
    app.add_option("-c,--config", common.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--oracle", common.oracle, "Oracle backend: stub or remote")
        ->check(CLI::IsMember({"stub", "remote"}));
    app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off");
    app.add_flag("-v,--verbose", common.verbose, "Log prompts and replies (secrets redacted)");

    auto* gen = app.add_subcommand("generate-agents", "Instantiate group agents for a layer");
    std::string country = "CN";
    std::string domain = "education";
    int gen_layer = 3;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    std::string save_graph;
    gen->add_option("--country", country, "ISO alpha-2 country code");
    gen->add_option("--domain", domain, "Event domain");
    gen->add_option("--layer", gen_layer, "Tree layer to instantiate");
    gen->add_option("--seed", gen_seed, "Seed passed to the oracle");
    gen->add_option("-o,--out", gen_out, "Write the agent list here instead of stdout");
    gen->add_option("--save-graph", save_graph, "Persist the knowledge graph to this directory");

    auto* sim = app.add_subcommand("simulate", "Run one scenario and report against ground truth");
    auto* rep = app.add_subcommand("replicate", "Run a scenario under several seeds");
    std::string event_path;
    std::optional<int> layer;
    std::optional<unsigned> threads;
    std::string heat;
    std::string outdir;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    std::string seeds_text;
    int k = 0;
    std::uint64_t base_seed = 1;
    for (auto* sub : {sim, rep}) {
        sub->add_option("-e,--event", event_path, "Event JSON file")->required();
        sub->add_option("--layer", layer, "Tree layer to instantiate");
        sub->add_option("--threads", threads, "Worker threads per day");
        sub->add_option("--heat", heat, "single_peak_day2, single_peak_day3, double_peak, plateau or auto");
        sub->add_option("-o,--out", outdir, "Output directory");
    }
    sim->add_option("--seed", sim_seed, "Run seed")->each([&](const std::string&) { sim_seed_set = true; });
    rep->add_option("--seeds", seeds_text, "Comma-separated seeds");
    rep->add_option("-k,--replicates", k, "Number of consecutive seeds starting at --base-seed");
    rep->add_option("--base-seed", base_seed, "First seed when -k is used");

    auto* eval = app.add_subcommand("evaluate", "Score traces against event ground truth");
    std::vector<std::string> trace_paths;
    std::vector<std::string> event_paths;
    std::string eval_out;
    eval->add_option("-t,--trace", trace_paths, "trace.json (repeatable)")->required();
    eval->add_option("-e,--event", event_paths, "Event JSON paired with each --trace")->required();
    eval->add_option("-o,--out", eval_out, "Write metrics JSON here");

    auto* fix = app.add_subcommand("fixtures", "Write synthetic archetype events");
    std::string fix_out = "data/events";
    int count = 1;
    std::int64_t scale = 200;
    std::uint64_t fix_seed = 1;
    fix->add_option("-o,--out", fix_out, "Output directory");
    fix->add_option("--count", count, "Events per archetype");
    fix->add_option("--scale", scale, "Peak views in units of 10,000");
    fix->add_option("--seed", fix_seed, "First fixture seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            return run_generate_agents(common, country, domain, gen_layer, gen_seed, gen_out,
                                       save_graph);
        }
        if (*sim) {
            std::vector<std::uint64_t> seeds;
            if (sim_seed_set) seeds.push_back(sim_seed);
            return run_simulate(common, event_path, seeds, layer, threads, heat, outdir);
        }
        if (*rep) {
            std::vector<std::uint64_t> seeds;
            if (!seeds_text.empty()) seeds = parse_seeds(seeds_text);
            if (k > 0) {
                if (!seeds.empty()) throw ValidationError("use either --seeds or -k, not both");
                for (int i = 0; i < k; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
            }
            if (seeds.empty()) {
                seeds = common.config_path.empty() ? std::vector<std::uint64_t>{1, 2, 3, 4, 5}
                                                   : load_run_config(common.config_path).seeds;
            }
            if (seeds.size() < 2) throw TooFewReplicates();
            return run_simulate(common, event_path, seeds, layer, threads, heat, outdir);
        }
        if (*eval) return run_evaluate(common, trace_paths, event_paths, eval_out);
        if (*fix) return run_fixtures(fix_out, count, scale, fix_seed);
    } catch (const ValidationError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const OracleError& e) {
        spdlog::error("{}", e.what());
        return 3;
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return 4;
    } catch (const Json::exception& e) {
        spdlog::error("malformed input: {}", e.what());
        return 2;
    }
    return 0;
}
