#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

namespace homoglab {

struct QuadOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_intervals = 20000;
    // Optional interior points where the integrand changes character
    // (kinks, scale transitions); the interval is pre-split there.
    std::vector<double> breakpoints{};
};

// Adaptive Gauss-Kronrod (G7/K15) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// \int_a^\infty f, via the rational substitution t = a + s*u/(1-u) with
// scale s matched to the integrand's decay scale.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double scale, const QuadOptions& opt = {});

}  // namespace homoglab
