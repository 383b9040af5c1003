#include "homoglab/heat.hpp"

#include <algorithm>
#include <cmath>

#include "homoglab/errors.hpp"

namespace homoglab {

double heat_kernel(double x, double t) {
    if (t <= 0) throw validation_error("heat kernel: t must be > 0");
    constexpr double kPi = 3.14159265358979323846;
    return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(kPi * t));
}

GridFunction heat_semigroup_apply(const GridFunction& f, double t) {
    if (t <= 0) throw validation_error("heat semigroup: t must be > 0");
    f.validate();
    const std::size_t n = f.size();
    const double h = f.h;

    // Tail cut where p_t < 1e-14: x^2 > 4t * log(p_t(0) / 1e-14).
    constexpr double kPi = 3.14159265358979323846;
    const double p0 = 1.0 / (2.0 * std::sqrt(kPi * t));
    const double cutoff = std::sqrt(4.0 * t * std::log(std::max(p0, 1e-13) / 1e-14));
    auto m = static_cast<std::size_t>(std::ceil(cutoff / h));
    if (f.boundary == Boundary::periodic) m = std::min(m, n / 2);

    std::vector<double> kern(m + 1);
    double mass = 0.0;
    for (std::size_t d = 0; d <= m; ++d) {
        kern[d] = heat_kernel(static_cast<double>(d) * h, t) * h;
        mass += d == 0 ? kern[d] : 2.0 * kern[d];
    }
    // Normalize to unit discrete mass so constants are preserved exactly;
    // the correction is at the level of the Gaussian tail / aliasing error.
    for (double& k : kern) k /= mass;

    GridFunction out = f;
    if (f.boundary == Boundary::periodic) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = kern[0] * f.values[i];
            for (std::size_t d = 1; d <= m; ++d) {
                const std::size_t ip = (i + d) % n;
                const std::size_t im = (i + n - d % n) % n;
                acc += kern[d] * (f.values[ip] + f.values[im]);
            }
            out.values[i] = acc;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = kern[0] * f.values[i];
            for (std::size_t d = 1; d <= m; ++d) {
                const double right = i + d < n ? f.values[i + d] : f.values[n - 1];
                const double left = i >= d ? f.values[i - d] : f.values[0];
                acc += kern[d] * (right + left);
            }
            out.values[i] = acc;
        }
    }
    return out;
}

std::vector<SmoothingRow> smoothing_exponent_check(const GridFunction& f, double alpha,
                                                   double beta, const Weight& w,
                                                   const std::vector<double>& t_grid) {
    if (beta < alpha) throw validation_error("smoothing check: beta must be >= alpha");
    std::vector<SmoothingRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        if (t <= 0 || t > 1)
            throw validation_error("smoothing check: t grid must lie in (0, 1]");
        SmoothingRow row;
        row.t = t;
        row.norm = weighted_holder_norm(heat_semigroup_apply(f, t), HolderOrder::of(beta), w);
        row.scaled = row.norm * std::pow(t, 0.5 * (beta - alpha));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace homoglab
