#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "homoglab/grid.hpp"

namespace homoglab {

enum class Scheme { cn_strang, mild_duhamel };

struct SolverConfig {
    Scheme scheme = Scheme::cn_strang;
    double h = 0.01;
    double dt = 0.01;
    double L = 10.0;
    Boundary boundary = Boundary::periodic;
    // For decay-padded runs: width of the zero buffer between the region of
    // interest and the domain edge; must be >= 8 sqrt(horizon).
    double padding = 0.0;
    std::size_t store_stride = 1;
    int picard_max_iters = 60;
    double picard_tol = 1e-10;

    void validate(double horizon) const;
};

// dt u = dxx u + F dx u + G u + S with u(0) = u0 on [-L, L].
// Coefficients are functions of (x, t); null means identically zero.
struct ParabolicProblem {
    GridFunction u0;
    std::function<double(double, double)> drift;      // F
    std::function<double(double, double)> potential;  // G
    std::function<double(double, double)> source;     // S
    double horizon = 1.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> slices;

    const GridFunction& back() const { return slices.back(); }
    std::size_t size() const { return slices.size(); }
    // Slice nearest to t (times are stored exactly as stepped).
    const GridFunction& at_time(double t) const;
};

// Crank-Nicolson diffusion/drift with exact pointwise reaction half-steps
// (Strang).  Stable for arbitrarily stiff potentials.
Trajectory solve_drift_potential(const ParabolicProblem& problem, const SolverConfig& config);

// Same equation with F constrained to zero.
Trajectory solve_potential(const ParabolicProblem& problem, const SolverConfig& config);

struct OrderResult {
    double rate = 0.0;
    bool saturated = false;  // all errors at rounding level; rate undefined
};

// Log-log regression of max error against h over a refinement ladder.
OrderResult order_of_accuracy(const std::vector<double>& hs,
                              const std::vector<double>& errors);

}  // namespace homoglab
