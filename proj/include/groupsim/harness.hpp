#pragma once

#include "groupsim/core.hpp"
#include "groupsim/json_io.hpp"
#include "groupsim/metrics.hpp"
#include "groupsim/oracle.hpp"
#include "groupsim/runtime.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace groupsim {

struct OracleSettings {
    /// "stub" or "remote".
    std::string kind = "stub";
    RemoteConfig remote;
    StubConfig stub;
    GatewayConfig gateway;
};

struct RunConfig {
    OracleSettings oracle;
    FadingConfig fading;
    int layer = 3;
    int horizon = 7;
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path output_dir = "out";
    std::string verbosity = "info";
    unsigned threads = 1;
    double feedback_gain = 0.1;
    /// Heat archetype name, or "auto" to take it from the event id prefix
    /// (falling back to single_peak_day2).
    std::string heat = "auto";
    bool heated = false;
    std::vector<std::string> options;
    std::optional<std::filesystem::path> graph_dir;
    EvalOptions eval;

    /// Checks ranges, distinct seeds and referenced paths. Throws
    /// ValidationError or IoError.
    void validate() const;
};

/// Keys absent from `j` keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const Json& j);
/// The effective configuration. Secrets are never written.
Json run_config_to_json(const RunConfig& c);
/// Throws IoError when unreadable, ValidationError when malformed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Remote settings are overlaid with ORACLE_ENDPOINT, ORACLE_API_KEY and
/// ORACLE_MODEL.
std::unique_ptr<OracleGateway> make_gateway(const OracleSettings& settings);

SimConfig sim_config(const RunConfig& c);
Scenario make_scenario(const EventRecord& event, const RunConfig& c);

/// Throws IoError when the file cannot be read, MalformedEvent when it does
/// not hold a valid event.
EventRecord load_event(const std::filesystem::path& path);
void save_event(const EventRecord& event, const std::filesystem::path& path);

enum class Archetype { single_peak_day2, single_peak_day3, double_peak };

std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view s);

/// Normalised daily view profile (peak 1.0) for an archetype.
std::vector<double> archetype_shape(Archetype a);

/// Synthetic seven-day event. `scale` is the peak in units of 10,000 views;
/// each day carries up to 5% seeded noise.
EventRecord make_fixture(Archetype archetype, std::int64_t scale, std::uint64_t seed);

/// Days whose value exceeds both neighbours (edges compare one side).
std::vector<std::size_t> local_maxima(std::span<const double> v);

/// Writes trace.json, daily_totals.csv, engagements.csv, metrics.json and
/// config.json into `outdir`, prints the metric table to `out` and returns
/// the report. Needs at least one complete trace.
MetricReport emit_report(const ReplicationSet& set, const EventRecord& event,
                         const Scenario& scenario, const RunConfig& config,
                         const std::filesystem::path& outdir, std::ostream& out);

Json metric_report_to_json(const MetricReport& r, const EvalOptions& options);
Json aggregate_to_json(const AggregateReport& a);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);
Json read_json(const std::filesystem::path& path);

}  // namespace groupsim
