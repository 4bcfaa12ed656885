#include "groupsim/metrics.hpp"

#include "groupsim/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace groupsim {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double point_distance(double a, double b, DistanceMetric m) {
    const double d = a - b;
    return m == DistanceMetric::abs ? std::abs(d) : d * d;
}

void require_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw ValidationError("series contains a non-finite value");
    }
}

std::vector<double> to_double(const std::vector<std::int64_t>& v) {
    return {v.begin(), v.end()};
}

std::string cell(double v, const char* fmt) {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string t_cell(const TTest& t) {
    if (t.diverged) return t.t > 0 ? "+inf" : "-inf";
    return cell(t.t, "%.3f");
}

}  // namespace

std::vector<double> znormalize(std::span<const double> x) {
    if (x.empty()) return {};
    require_finite(x);
    const double mu = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    const double sigma = std::sqrt(ss / static_cast<double>(x.size()));
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) out.push_back((v - mu) / (sigma + kZnormEpsilon));
    return out;
}

std::string_view to_string(DistanceMetric m) {
    return m == DistanceMetric::abs ? "abs" : "squared";
}

std::string_view to_string(AlignMode m) {
    return m == AlignMode::aligned ? "aligned" : "warped";
}

std::optional<DistanceMetric> parse_distance_metric(std::string_view s) {
    if (s == "abs") return DistanceMetric::abs;
    if (s == "squared") return DistanceMetric::squared;
    return std::nullopt;
}

std::optional<AlignMode> parse_align_mode(std::string_view s) {
    if (s == "aligned") return AlignMode::aligned;
    if (s == "warped") return AlignMode::warped;
    return std::nullopt;
}

double series_distance(std::span<const double> a, std::span<const double> b,
                       DistanceMetric metric, AlignMode mode) {
    if (a.empty() || b.empty()) throw EmptyList();
    if (mode == AlignMode::aligned && a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
    const auto za = znormalize(a);
    const auto zb = znormalize(b);

    if (mode == AlignMode::aligned) {
        double sum = 0.0;
        for (std::size_t i = 0; i < za.size(); ++i) sum += point_distance(za[i], zb[i], metric);
        return sum;
    }

    const auto n = za.size();
    const auto m = zb.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf);
    std::vector<double> cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            cur[j] = point_distance(za[i - 1], zb[j - 1], metric) +
                     std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

Dispersion dtw_dispersion(std::span<const double> distances) {
    if (distances.empty()) throw EmptyList();
    require_finite(distances);
    const double mu = mean_of(distances);
    double ss = 0.0;
    for (double d : distances) ss += (d - mu) * (d - mu);
    return {mu, std::sqrt(ss / static_cast<double>(distances.size()))};
}

double mape(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size()) throw LengthMismatch(pred.size(), actual.size());
    require_finite(pred);
    require_finite(actual);
    double sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0) continue;
        sum += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
        ++valid;
    }
    if (valid == 0) throw AllZeroActual();
    if (valid < pred.size()) {
        spdlog::warn("MAPE skipped {} day(s) with zero actual value", pred.size() - valid);
    }
    return 100.0 * sum / static_cast<double>(valid);
}

TTest paired_t(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size()) throw LengthMismatch(pred.size(), actual.size());
    if (pred.size() < 2) throw TooFewPairs();
    require_finite(pred);
    require_finite(actual);
    std::vector<double> d(pred.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = pred[i] - actual[i];
    const double mu = mean_of(d);
    const double s = sample_std(d, mu);
    if (s == 0.0) {
        if (mu == 0.0) return {0.0, false};
        return {std::copysign(std::numeric_limits<double>::infinity(), mu), true};
    }
    return {mu / (s / std::sqrt(static_cast<double>(d.size()))), false};
}

std::string_view to_string(ZLabel l) {
    switch (l) {
        case ZLabel::excellent: return "excellent";
        case ZLabel::acceptable: return "acceptable";
        case ZLabel::poor: return "poor";
    }
    return "?";
}

ZLabel z_label(double z) {
    const double a = std::abs(z);
    if (a < 1.0) return ZLabel::excellent;
    if (a < 3.0) return ZLabel::acceptable;
    return ZLabel::poor;
}

ZReport reproducibility_z(std::span<const double> replicate_totals, double reference) {
    if (replicate_totals.size() < 2) throw TooFewReplicates();
    require_finite(replicate_totals);
    ZReport r;
    r.reference = reference;
    const double mu = mean_of(replicate_totals);
    const double s = sample_std(replicate_totals, mu);
    r.z.assign(replicate_totals.size(), 0.0);
    if (s == 0.0) {
        r.zero_variance = true;
        return r;
    }
    for (std::size_t i = 0; i < r.z.size(); ++i) r.z[i] = (replicate_totals[i] - reference) / s;
    r.z_of_mean = (mu - reference) / s;
    for (double z : r.z) {
        r.max_abs = std::max(r.max_abs, std::abs(z));
        r.mean_abs += std::abs(z);
    }
    r.mean_abs /= static_cast<double>(r.z.size());
    r.label = z_label(r.max_abs);
    return r;
}

ZReport reproducibility_z(std::span<const double> replicate_totals) {
    if (replicate_totals.size() < 2) throw TooFewReplicates();
    return reproducibility_z(replicate_totals, mean_of(replicate_totals));
}

MetricReport evaluate_event(const EventRecord& event,
                            const std::vector<std::vector<double>>& simulated_views,
                            const EvalOptions& options) {
    if (simulated_views.empty()) throw EmptyList();
    MetricReport r;
    r.event_id = event.id;
    r.actual_views = to_double(event.ground_truth.views);
    const auto days = r.actual_views.size();

    r.simulated_views.assign(days, 0.0);
    std::vector<double> totals;
    for (const auto& series : simulated_views) {
        if (series.size() != days) throw LengthMismatch(series.size(), days);
        for (std::size_t i = 0; i < days; ++i) r.simulated_views[i] += series[i];
        r.dtw_distances.push_back(
            series_distance(series, r.actual_views, options.metric, options.mode));
        totals.push_back(std::accumulate(series.begin(), series.end(), 0.0));
    }
    for (auto& v : r.simulated_views) v /= static_cast<double>(simulated_views.size());

    r.t = paired_t(r.simulated_views, r.actual_views);
    r.mape_percent = mape(r.simulated_views, r.actual_views);
    const auto disp = dtw_dispersion(r.dtw_distances);
    r.dtw_mean = disp.mean;
    r.dtw_std = disp.std;
    if (totals.size() >= 2) r.z = reproducibility_z(totals);
    return r;
}

AggregateReport aggregate_reports(std::span<const MetricReport> reports) {
    if (reports.empty()) throw EmptyList();
    AggregateReport a;
    a.events = reports.size();
    std::vector<double> pred_days;
    std::vector<double> actual_days;
    std::vector<double> pred_totals;
    std::vector<double> actual_totals;
    std::vector<double> dtw;
    double mape_sum = 0.0;
    for (const auto& r : reports) {
        pred_days.insert(pred_days.end(), r.simulated_views.begin(), r.simulated_views.end());
        actual_days.insert(actual_days.end(), r.actual_views.begin(), r.actual_views.end());
        pred_totals.push_back(std::accumulate(r.simulated_views.begin(), r.simulated_views.end(), 0.0));
        actual_totals.push_back(std::accumulate(r.actual_views.begin(), r.actual_views.end(), 0.0));
        dtw.push_back(r.dtw_mean);
        mape_sum += r.mape_percent;
        if (r.z) a.z_max_abs = std::max(a.z_max_abs.value_or(0.0), r.z->max_abs);
    }
    a.t_per_day = paired_t(pred_days, actual_days);
    if (reports.size() >= 2) a.t_per_event_total = paired_t(pred_totals, actual_totals);
    a.mape_percent = mape_sum / static_cast<double>(reports.size());
    const auto disp = dtw_dispersion(dtw);
    a.dtw_mean = disp.mean;
    a.dtw_std = disp.std;
    return a;
}

TableRow table_row(const MetricReport& r) {
    return {r.event_id, r.t, r.mape_percent, r.dtw_mean, r.dtw_std,
            r.z ? std::optional<double>(r.z->max_abs) : std::nullopt};
}

TableRow table_row(const AggregateReport& r, std::string label) {
    return {std::move(label), r.t_per_day, r.mape_percent, r.dtw_mean, r.dtw_std, r.z_max_abs};
}

std::string render_table(std::span<const TableRow> rows) {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    auto left = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::string out = left("Event", width) + " | " + pad("t-test", 8) + " | " + pad("MAPE", 9) +
                      " | " + pad("DTW Mean", 9) + " | " + pad("DTW Std", 8) + " | " +
                      pad("Z-score", 7) + "\n";
    out += std::string(width, '-') + "-+-" + std::string(8, '-') + "-+-" + std::string(9, '-') +
           "-+-" + std::string(9, '-') + "-+-" + std::string(8, '-') + "-+-" +
           std::string(7, '-') + "\n";
    for (const auto& r : rows) {
        out += left(r.label, width) + " | " + pad(t_cell(r.t), 8) + " | " +
               pad(cell(r.mape_percent, "%.2f%%"), 9) + " | " + pad(cell(r.dtw_mean, "%.4f"), 9) +
               " | " + pad(cell(r.dtw_std, "%.4f"), 8) + " | " +
               pad(r.z ? cell(*r.z, "%.2f") : std::string("-"), 7) + "\n";
    }
    return out;
}

}  // namespace groupsim
