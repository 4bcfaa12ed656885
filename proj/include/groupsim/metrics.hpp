#pragma once

#include "groupsim/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace groupsim {

inline constexpr double kZnormEpsilon = 1e-8;

/// (x - mean) / (population std + 1e-8).
std::vector<double> znormalize(std::span<const double> x);

enum class DistanceMetric { abs, squared };
enum class AlignMode { aligned, warped };

std::string_view to_string(DistanceMetric m);
std::string_view to_string(AlignMode m);
std::optional<DistanceMetric> parse_distance_metric(std::string_view s);
std::optional<AlignMode> parse_align_mode(std::string_view s);

/// Both inputs are z-normalized first. Aligned mode sums day-by-day
/// distances and needs equal lengths (LengthMismatch); warped mode is the
/// dynamic-programming minimum over monotone alignments.
double series_distance(std::span<const double> a, std::span<const double> b,
                       DistanceMetric metric = DistanceMetric::abs,
                       AlignMode mode = AlignMode::aligned);

struct Dispersion {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and population standard deviation (divisor k). Throws EmptyList.
Dispersion dtw_dispersion(std::span<const double> distances);

/// Mean absolute percentage error over days with a non-zero actual value.
/// Throws LengthMismatch or AllZeroActual.
double mape(std::span<const double> pred, std::span<const double> actual);

struct TTest {
    double t = 0.0;
    /// Differences are constant and non-zero; `t` holds a signed infinity.
    bool diverged = false;
};

/// Paired t on pred - actual with the sample standard deviation.
/// Throws LengthMismatch or TooFewPairs.
TTest paired_t(std::span<const double> pred, std::span<const double> actual);

enum class ZLabel { excellent, acceptable, poor };

std::string_view to_string(ZLabel l);
/// |z| < 1 excellent, |z| < 3 acceptable, otherwise poor.
ZLabel z_label(double z);

struct ZReport {
    std::vector<double> z;
    double z_of_mean = 0.0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double reference = 0.0;
    bool zero_variance = false;
    ZLabel label = ZLabel::excellent;
};

/// z_i = (x_i - reference) / sample std of the replicates. All zero, with the
/// flag set, when the replicates do not vary. Throws TooFewReplicates.
ZReport reproducibility_z(std::span<const double> replicate_totals, double reference);

/// Reference is the replicate mean.
ZReport reproducibility_z(std::span<const double> replicate_totals);

struct MetricReport {
    std::string event_id;
    TTest t;
    double mape_percent = 0.0;
    std::vector<double> dtw_distances;
    double dtw_mean = 0.0;
    double dtw_std = 0.0;
    std::optional<ZReport> z;
    /// Mean simulated daily views across the traces.
    std::vector<double> simulated_views;
    std::vector<double> actual_views;
};

struct EvalOptions {
    DistanceMetric metric = DistanceMetric::abs;
    AlignMode mode = AlignMode::aligned;
};

/// Scores simulated daily views (one series per replicate) against the
/// event's ground truth. Replicate z-scores use 7-day view totals.
MetricReport evaluate_event(const EventRecord& event,
                            const std::vector<std::vector<double>>& simulated_views,
                            const EvalOptions& options = {});

struct AggregateReport {
    std::size_t events = 0;
    /// Paired over every (event, day) view count.
    TTest t_per_day;
    /// Paired over per-event 7-day totals.
    std::optional<TTest> t_per_event_total;
    double mape_percent = 0.0;
    /// One distance per event.
    double dtw_mean = 0.0;
    double dtw_std = 0.0;
    std::optional<double> z_max_abs;
};

AggregateReport aggregate_reports(std::span<const MetricReport> reports);

struct TableRow {
    std::string label;
    TTest t;
    double mape_percent = 0.0;
    double dtw_mean = 0.0;
    double dtw_std = 0.0;
    std::optional<double> z;
};

TableRow table_row(const MetricReport& r);
TableRow table_row(const AggregateReport& r, std::string label = "aggregate");

/// Fixed-width table with columns t-test, MAPE, DTW Mean, DTW Std, Z-score.
std::string render_table(std::span<const TableRow> rows);

}  // namespace groupsim
