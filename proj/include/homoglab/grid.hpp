#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "homoglab/errors.hpp"

namespace homoglab {

enum class Boundary { periodic, decay_padded };

// Real function sampled on a uniform grid over [-L, L].
// Periodic grids carry 2L/h points (x = -L .. L-h); padded grids carry
// 2L/h + 1 points (x = -L .. L).
struct GridFunction {
    std::vector<double> values;
    double h = 0.0;
    double L = 0.0;
    Boundary boundary = Boundary::periodic;

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return -L + static_cast<double>(i) * h; }

    static std::size_t expected_size(double L, double h, Boundary b) {
        const double n = 2.0 * L / h;
        const auto m = static_cast<std::size_t>(std::llround(n));
        if (std::abs(n - static_cast<double>(m)) > 1e-9 * n)
            throw validation_error("grid: 2L/h is not an integer");
        return b == Boundary::periodic ? m : m + 1;
    }

    void validate() const {
        if (h <= 0 || L <= 0) throw validation_error("grid: h, L must be > 0");
        if (values.size() != expected_size(L, h, boundary))
            throw validation_error("grid: value count does not match domain");
        for (double v : values)
            if (!std::isfinite(v)) throw validation_error("grid: non-finite value");
    }

    // Linear interpolation; periodic grids wrap, padded grids clamp.
    double at(double xq) const {
        const double n = static_cast<double>(values.size());
        double s = (xq + L) / h;
        if (boundary == Boundary::periodic) {
            s = std::fmod(s, n);
            if (s < 0) s += n;
            const auto i0 = static_cast<std::size_t>(s);
            const double w = s - static_cast<double>(i0);
            const std::size_t i1 = (i0 + 1) % values.size();
            return (1.0 - w) * values[i0] + w * values[i1];
        }
        if (s <= 0) return values.front();
        if (s >= n - 1) return values.back();
        const auto i0 = static_cast<std::size_t>(s);
        const double w = s - static_cast<double>(i0);
        return (1.0 - w) * values[i0] + w * values[i0 + 1];
    }
};

inline GridFunction make_grid(double L, double h, Boundary b = Boundary::periodic) {
    GridFunction g;
    g.h = h;
    g.L = L;
    g.boundary = b;
    g.values.assign(GridFunction::expected_size(L, h, b), 0.0);
    return g;
}

template <typename F>
GridFunction sample_on_grid(double L, double h, F&& f, Boundary b = Boundary::periodic) {
    GridFunction g = make_grid(L, h, b);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = f(g.x(i));
    return g;
}

// Uniform space-time grid [x0,x1] x [t0,t1]; nodes at both ends.
struct FieldGrid {
    double x0 = 0, x1 = 0, hx = 0;
    double t0 = 0, t1 = 0, ht = 0;

    std::size_t nx() const { return count(x1 - x0, hx); }
    std::size_t nt() const { return count(t1 - t0, ht); }
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * hx; }
    double t(std::size_t j) const { return t0 + static_cast<double>(j) * ht; }

    void validate() const {
        if (hx <= 0 || ht <= 0 || x1 <= x0 || t1 < t0)
            throw validation_error("field grid: degenerate extents");
    }

  private:
    static std::size_t count(double len, double step) {
        const double n = len / step;
        const auto m = static_cast<std::size_t>(std::llround(n));
        if (std::abs(n - static_cast<double>(m)) > 1e-9 * (n + 1.0))
            throw validation_error("field grid: extent not a multiple of spacing");
        return m + 1;
    }
};

}  // namespace homoglab
