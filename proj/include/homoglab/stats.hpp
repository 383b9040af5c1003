#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "homoglab/errors.hpp"

namespace homoglab {

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw validation_error("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw validation_error("mean: empty sample");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Jackknife standard error of the mean (leave-one-out).
inline double jackknife_se(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) throw validation_error("jackknife: need >= 2 samples");
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

// Least-squares slope of log(y) against log(x).  Shared by the study
// summaries and the plot annotations so they agree exactly.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("slope fit: need >= 2 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw validation_error("slope fit: log-log requires positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw validation_error("slope fit: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace homoglab
