#include "groupsim/harness.hpp"

#include "groupsim/errors.hpp"
#include "groupsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace groupsim {

namespace {

template <class T>
void take(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->template get<T>();
        } catch (const Json::exception&) {
            throw ValidationError(std::string("config: bad value for '") + key + "'");
        }
    }
}

void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
    if (!j.is_object()) throw ValidationError("config: " + std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError("config: unknown key '" + key + "' in " + std::string(where));
        }
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct FixtureText {
    const char* title;
    const char* content;
};

FixtureText fixture_text(Archetype a) {
    switch (a) {
        case Archetype::single_peak_day2:
            return {"University dismisses professor over thesis plagiarism scandal",
                    "A professor was dismissed after investigators confirmed plagiarism in "
                    "several theses. Students question academic integrity oversight."};
        case Archetype::single_peak_day3:
            return {"Ministry announces national entrance exam reform",
                    "The reform promises improved fairness and new growth opportunities for "
                    "vocational students, with hope for broader access."};
        case Archetype::double_peak:
            return {"Exam paper leak sparks protest, retest scandal follows",
                    "An exam paper leak led to protest from parents; days later a second "
                    "scandal over the retest caused fresh outrage."};
    }
    return {"", ""};
}

}  // namespace

void RunConfig::validate() const {
    if (oracle.kind != "stub" && oracle.kind != "remote") {
        throw ValidationError("oracle.kind must be 'stub' or 'remote'");
    }
    fading.normalized();
    if (layer < 1) throw ValidationError("layer must be >= 1");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (seeds.empty()) throw ValidationError("at least one seed is required");
    std::set<std::uint64_t> seen;
    for (auto s : seeds) {
        if (!seen.insert(s).second) throw DuplicateSeed(s);
    }
    if (threads < 1) throw ValidationError("threads must be >= 1");
    if (heat != "auto") HeatSchedule::archetype(heat);
    if (graph_dir && !std::filesystem::is_directory(*graph_dir)) {
        throw IoError("graph directory does not exist: " + graph_dir->string());
    }
}

RunConfig run_config_from_json(const Json& j) {
    reject_unknown(j,
                   {"oracle", "reasoning", "layer", "horizon", "seeds", "output_dir", "verbosity",
                    "threads", "feedback_gain", "scenario", "graph_dir", "eval"},
                   "config");
    RunConfig c;
    if (auto it = j.find("oracle"); it != j.end()) {
        const auto& o = *it;
        reject_unknown(o,
                       {"kind", "endpoint", "model", "temperature", "timeout_s", "max_inflight",
                        "retries", "backoff_ms", "verbose", "stub"},
                       "oracle");
        take(o, "kind", c.oracle.kind);
        take(o, "endpoint", c.oracle.remote.endpoint);
        take(o, "model", c.oracle.remote.model);
        take(o, "temperature", c.oracle.remote.temperature);
        int timeout = static_cast<int>(c.oracle.remote.timeout.count());
        take(o, "timeout_s", timeout);
        c.oracle.remote.timeout = std::chrono::seconds(timeout);
        take(o, "max_inflight", c.oracle.gateway.max_inflight);
        take(o, "retries", c.oracle.gateway.retries);
        int backoff = static_cast<int>(c.oracle.gateway.backoff.count());
        take(o, "backoff_ms", backoff);
        c.oracle.gateway.backoff = std::chrono::milliseconds(backoff);
        take(o, "verbose", c.oracle.gateway.verbose);
        if (auto s = o.find("stub"); s != o.end()) {
            reject_unknown(*s, {"jitter_bound", "day_decay", "base_reach", "arousal_gain"},
                           "oracle.stub");
            take(*s, "jitter_bound", c.oracle.stub.jitter_bound);
            take(*s, "day_decay", c.oracle.stub.day_decay);
            take(*s, "base_reach", c.oracle.stub.base_reach);
            take(*s, "arousal_gain", c.oracle.stub.arousal_gain);
        }
    }
    if (auto it = j.find("reasoning"); it != j.end()) {
        reject_unknown(*it,
                       {"alpha", "fading_rate", "forgetting_p", "memory_capacity", "amplitude"},
                       "reasoning");
        try {
            c.fading = fading_from_json(*it, c.fading);
        } catch (const Json::exception& e) {
            throw ValidationError(std::string("config: reasoning: ") + e.what());
        }
    }
    take(j, "layer", c.layer);
    take(j, "horizon", c.horizon);
    take(j, "seeds", c.seeds);
    std::string outdir = c.output_dir.string();
    take(j, "output_dir", outdir);
    c.output_dir = outdir;
    take(j, "verbosity", c.verbosity);
    take(j, "threads", c.threads);
    take(j, "feedback_gain", c.feedback_gain);
    if (auto it = j.find("scenario"); it != j.end()) {
        reject_unknown(*it, {"heat", "heated", "options"}, "scenario");
        take(*it, "heat", c.heat);
        take(*it, "heated", c.heated);
        take(*it, "options", c.options);
    }
    if (auto it = j.find("graph_dir"); it != j.end() && !it->is_null()) {
        std::string dir;
        take(j, "graph_dir", dir);
        c.graph_dir = dir;
    }
    if (auto it = j.find("eval"); it != j.end()) {
        reject_unknown(*it, {"metric", "mode"}, "eval");
        std::string metric(to_string(c.eval.metric));
        std::string mode(to_string(c.eval.mode));
        take(*it, "metric", metric);
        take(*it, "mode", mode);
        auto m = parse_distance_metric(metric);
        auto a = parse_align_mode(mode);
        if (!m) throw ValidationError("eval.metric must be abs or squared");
        if (!a) throw ValidationError("eval.mode must be aligned or warped");
        c.eval = {*m, *a};
    }
    c.validate();
    return c;
}

Json run_config_to_json(const RunConfig& c) {
    return Json{
        {"oracle",
         {{"kind", c.oracle.kind},
          {"endpoint", c.oracle.remote.endpoint},
          {"model", c.oracle.remote.model},
          {"temperature", c.oracle.remote.temperature},
          {"timeout_s", c.oracle.remote.timeout.count()},
          {"max_inflight", c.oracle.gateway.max_inflight},
          {"retries", c.oracle.gateway.retries},
          {"backoff_ms", c.oracle.gateway.backoff.count()},
          {"verbose", c.oracle.gateway.verbose},
          {"stub",
           {{"jitter_bound", c.oracle.stub.jitter_bound},
            {"day_decay", c.oracle.stub.day_decay},
            {"base_reach", c.oracle.stub.base_reach},
            {"arousal_gain", c.oracle.stub.arousal_gain}}}}},
        {"reasoning", fading_to_json(c.fading)},
        {"layer", c.layer},
        {"horizon", c.horizon},
        {"seeds", c.seeds},
        {"output_dir", c.output_dir.string()},
        {"verbosity", c.verbosity},
        {"threads", c.threads},
        {"feedback_gain", c.feedback_gain},
        {"scenario", {{"heat", c.heat}, {"heated", c.heated}, {"options", c.options}}},
        {"graph_dir", c.graph_dir ? Json(c.graph_dir->string()) : Json(nullptr)},
        {"eval", {{"metric", to_string(c.eval.metric)}, {"mode", to_string(c.eval.mode)}}},
    };
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(read_json(path));
}

std::unique_ptr<OracleGateway> make_gateway(const OracleSettings& settings) {
    if (settings.kind == "stub") return make_stub_gateway(settings.stub, settings.gateway);
    if (settings.kind == "remote") {
        auto remote = RemoteConfig::from_env(settings.remote);
        return std::make_unique<OracleGateway>(std::make_unique<RemoteOracle>(remote),
                                               settings.gateway);
    }
    throw ValidationError("unknown oracle kind: " + settings.kind);
}

SimConfig sim_config(const RunConfig& c) {
    return SimConfig{c.fading, c.feedback_gain, c.threads, c.oracle.kind == "remote"};
}

Scenario make_scenario(const EventRecord& event, const RunConfig& c) {
    Scenario s;
    s.event = event;
    s.layer = c.layer;
    s.horizon_days = c.horizon;
    s.options = c.options;
    s.heated = c.heated;
    std::string heat = c.heat;
    if (heat == "auto") {
        heat = "single_peak_day2";
        for (auto a : {Archetype::single_peak_day2, Archetype::single_peak_day3,
                       Archetype::double_peak}) {
            if (event.id.rfind(to_string(a), 0) == 0) heat = std::string(to_string(a));
        }
    }
    s.heat = HeatSchedule::archetype(heat);
    return s;
}

EventRecord load_event(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read event file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw MalformedEvent("json", e.what());
    }
    return event_from_json(j);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
}

void save_event(const EventRecord& event, const std::filesystem::path& path) {
    write_text(path, event_to_json(event).dump(2) + "\n");
}

std::string_view to_string(Archetype a) {
    switch (a) {
        case Archetype::single_peak_day2: return "single_peak_day2";
        case Archetype::single_peak_day3: return "single_peak_day3";
        case Archetype::double_peak: return "double_peak";
    }
    return "?";
}

std::optional<Archetype> parse_archetype(std::string_view s) {
    for (auto a : {Archetype::single_peak_day2, Archetype::single_peak_day3, Archetype::double_peak}) {
        if (to_string(a) == s) return a;
    }
    return std::nullopt;
}

std::vector<double> archetype_shape(Archetype a) {
    switch (a) {
        case Archetype::single_peak_day2: return {0.45, 1.0, 0.55, 0.32, 0.2, 0.13, 0.09};
        case Archetype::single_peak_day3: return {0.2, 0.5, 1.0, 0.6, 0.35, 0.2, 0.12};
        case Archetype::double_peak: return {0.4, 1.0, 0.5, 0.3, 0.6, 0.35, 0.2};
    }
    return {};
}

EventRecord make_fixture(Archetype archetype, std::int64_t scale, std::uint64_t seed) {
    if (scale <= 0) throw ValidationError("fixture scale must be positive");
    rng::SplitMix64 gen(rng::combine(seed, rng::fnv1a(to_string(archetype))));
    auto noise = [&] { return 1.0 + 0.05 * (2.0 * gen.uniform() - 1.0); };

    const auto text = fixture_text(archetype);
    EventRecord e;
    e.id = std::string(to_string(archetype)) + "-" + std::to_string(seed);
    e.title = text.title;
    e.content = text.content;
    e.domain = Domain::education;
    e.country = "CN";
    e.platform = Platform::weibo;
    e.start_date = add_days(Date{std::chrono::year{2024}, std::chrono::month{6}, std::chrono::day{1}},
                            static_cast<int>(seed % 30));
    const double peak = static_cast<double>(scale) * 10000.0;
    for (double s : archetype_shape(archetype)) {
        const auto views = static_cast<std::int64_t>(std::llround(peak * s * noise()));
        const auto v = static_cast<double>(views);
        e.ground_truth.views.push_back(views);
        e.ground_truth.likes.push_back(static_cast<std::int64_t>(std::floor(v * 0.05 * noise())));
        e.ground_truth.comments.push_back(static_cast<std::int64_t>(std::floor(v * 0.012 * noise())));
        e.ground_truth.shares.push_back(static_cast<std::int64_t>(std::floor(v * 0.008 * noise())));
    }
    return validate_event(std::move(e));
}

std::vector<std::size_t> local_maxima(std::span<const double> v) {
    std::vector<std::size_t> out;
    const auto n = v.size();
    if (n < 2) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i == 0 || v[i] > v[i - 1];
        const bool right = i == n - 1 || v[i] > v[i + 1];
        if (left && right) out.push_back(i);
    }
    return out;
}

Json metric_report_to_json(const MetricReport& r, const EvalOptions& options) {
    Json j{{"schema_version", 1},
           {"event_id", r.event_id},
           {"metric", to_string(options.metric)},
           {"mode", to_string(options.mode)},
           {"t_statistic", r.t.diverged ? Json(nullptr) : Json(r.t.t)},
           {"t_diverged", r.t.diverged},
           {"mape_percent", r.mape_percent},
           {"dtw_distances", r.dtw_distances},
           {"dtw_mean", r.dtw_mean},
           {"dtw_std", r.dtw_std},
           {"simulated_views", r.simulated_views},
           {"actual_views", r.actual_views}};
    if (r.z) {
        j["z_scores"] = r.z->z;
        j["z_reference"] = r.z->reference;
        j["z_of_mean"] = r.z->z_of_mean;
        j["z_max_abs"] = r.z->max_abs;
        j["z_mean_abs"] = r.z->mean_abs;
        j["z_zero_variance"] = r.z->zero_variance;
        j["z_label"] = to_string(r.z->label);
    } else {
        j["z_scores"] = Json::array();
    }
    return j;
}

Json aggregate_to_json(const AggregateReport& a) {
    auto t_json = [](const TTest& t) {
        return Json{{"t_statistic", t.diverged ? Json(nullptr) : Json(t.t)}, {"diverged", t.diverged}};
    };
    Json j{{"events", a.events},
           {"t_per_day", t_json(a.t_per_day)},
           {"t_per_event_total", a.t_per_event_total ? t_json(*a.t_per_event_total) : Json(nullptr)},
           {"mape_percent", a.mape_percent},
           {"dtw_mean", a.dtw_mean},
           {"dtw_std", a.dtw_std},
           {"z_max_abs", a.z_max_abs ? Json(*a.z_max_abs) : Json(nullptr)}};
    if (a.z_max_abs) j["z_label"] = to_string(z_label(*a.z_max_abs));
    return j;
}

MetricReport emit_report(const ReplicationSet& set, const EventRecord& event,
                         const Scenario& scenario, const RunConfig& config,
                         const std::filesystem::path& outdir, std::ostream& out) {
    std::vector<const SimulationTrace*> complete;
    for (const auto& t : set.traces) {
        if (t.complete) complete.push_back(&t);
    }
    if (complete.empty()) throw ValidationError("no complete trace to report on");

    const auto& first = set.traces.front();
    write_text(outdir / "trace.json", trace_to_json(first, scenario).dump(2) + "\n");

    std::string totals = "seed,day,date,views,likes,comments,shares\n";
    for (const auto& t : set.traces) {
        for (const auto& d : t.days) {
            totals += std::to_string(t.seed) + "," + std::to_string(d.day) + "," +
                      format_date(d.date) + "," + std::to_string(d.totals.views) + "," +
                      std::to_string(d.totals.likes) + "," + std::to_string(d.totals.comments) +
                      "," + std::to_string(d.totals.shares) + "\n";
        }
    }
    write_text(outdir / "daily_totals.csv", totals);

    auto engagement_csv = [&](const SimulationTrace& t) {
        std::string csv = "event_id,day,agent_id,views,likes,comments,shares\n";
        for (const auto& d : t.days) {
            for (const auto& a : d.agents) {
                const auto& e = a.engagement;
                csv += csv_field(event.id) + "," + std::to_string(d.day) + "," +
                       csv_field(a.agent_id) + "," + std::to_string(e.views) + "," +
                       std::to_string(e.likes) + "," + std::to_string(e.comments) + "," +
                       std::to_string(e.shares) + "\n";
            }
        }
        return csv;
    };
    write_text(outdir / "engagements.csv", engagement_csv(first));
    if (set.traces.size() > 1) {
        for (const auto& t : set.traces) {
            const auto dir = outdir / "replicates" / ("seed_" + std::to_string(t.seed));
            write_text(dir / "trace.json", trace_to_json(t, scenario).dump(2) + "\n");
            write_text(dir / "engagements.csv", engagement_csv(t));
        }
    }

    std::vector<std::vector<double>> views;
    for (const auto* t : complete) {
        if (static_cast<std::size_t>(t->horizon_days) != event.ground_truth.views.size()) {
            throw LengthMismatch(static_cast<std::size_t>(t->horizon_days),
                                 event.ground_truth.views.size());
        }
        views.push_back(t->daily_views());
    }
    auto report = evaluate_event(event, views, config.eval);
    auto metrics = metric_report_to_json(report, config.eval);
    metrics["traces"] = set.traces.size();
    metrics["complete_traces"] = complete.size();
    metrics["partial"] = set.partial;
    write_text(outdir / "metrics.json", metrics.dump(2) + "\n");
    write_text(outdir / "config.json", run_config_to_json(config).dump(2) + "\n");

    const std::vector<TableRow> rows{table_row(report)};
    out << render_table(rows);
    return report;
}

}  // namespace groupsim
