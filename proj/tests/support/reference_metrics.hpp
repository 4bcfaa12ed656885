#pragma once

// Straightforward re-derivations of the evaluation metrics, used as test
// oracles. They favour obviousness over speed: long double accumulation,
// explicit two-pass moments and a memoised recursion for the warped distance.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace reference {

inline long double mean(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += v;
    return s / static_cast<long double>(x.size());
}

inline std::vector<double> znormalize(const std::vector<double>& x) {
    const long double m = mean(x);
    long double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    const long double sd = std::sqrt(ss / static_cast<long double>(x.size()));
    std::vector<double> out;
    for (double v : x) out.push_back(static_cast<double>((v - m) / (sd + 1e-8L)));
    return out;
}

inline double aligned_distance(const std::vector<double>& a, const std::vector<double>& b,
                               bool squared) {
    const auto za = znormalize(a);
    const auto zb = znormalize(b);
    long double s = 0;
    for (std::size_t i = 0; i < za.size(); ++i) {
        const long double d = static_cast<long double>(za[i]) - zb[i];
        s += squared ? d * d : std::fabs(d);
    }
    return static_cast<double>(s);
}

inline double warped_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const auto za = znormalize(a);
    const auto zb = znormalize(b);
    std::map<std::pair<std::size_t, std::size_t>, long double> memo;
    std::function<long double(std::size_t, std::size_t)> cost = [&](std::size_t i,
                                                                    std::size_t j) -> long double {
        const long double here = std::fabs(static_cast<long double>(za[i]) - zb[j]);
        if (i == 0 && j == 0) return here;
        if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
        long double best = std::numeric_limits<long double>::infinity();
        if (i > 0) best = std::min(best, cost(i - 1, j));
        if (j > 0) best = std::min(best, cost(i, j - 1));
        if (i > 0 && j > 0) best = std::min(best, cost(i - 1, j - 1));
        return memo[{i, j}] = here + best;
    };
    return static_cast<double>(cost(za.size() - 1, zb.size() - 1));
}

inline std::pair<double, double> dispersion(const std::vector<double>& d) {
    const long double m = mean(d);
    long double ss = 0;
    for (double v : d) ss += (v - m) * (v - m);
    return {static_cast<double>(m),
            static_cast<double>(std::sqrt(ss / static_cast<long double>(d.size())))};
}

inline double mape(const std::vector<double>& pred, const std::vector<double>& actual) {
    long double s = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0) continue;
        s += std::fabs((static_cast<long double>(pred[i]) - actual[i]) / actual[i]);
        ++n;
    }
    return static_cast<double>(100.0L * s / static_cast<long double>(n));
}

inline double paired_t(const std::vector<double>& pred, const std::vector<double>& actual) {
    std::vector<double> d;
    for (std::size_t i = 0; i < pred.size(); ++i) d.push_back(pred[i] - actual[i]);
    const long double m = mean(d);
    long double ss = 0;
    for (double v : d) ss += (v - m) * (v - m);
    const long double sd = std::sqrt(ss / static_cast<long double>(d.size() - 1));
    return static_cast<double>(m / (sd / std::sqrt(static_cast<long double>(d.size()))));
}

inline std::vector<double> zscores(const std::vector<double>& x, double ref) {
    const long double m = mean(x);
    long double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    const long double sd = std::sqrt(ss / static_cast<long double>(x.size() - 1));
    std::vector<double> out;
    for (double v : x) out.push_back(static_cast<double>((v - ref) / sd));
    return out;
}

}  // namespace reference
