#pragma once

#include <vector>

#include "homoglab/grid.hpp"
#include "homoglab/holder.hpp"
#include "homoglab/weights.hpp"

namespace homoglab {

// Gaussian heat kernel p_t(x) = exp(-x^2 / 4t) / (2 sqrt(pi t)), t > 0.
double heat_kernel(double x, double t);

// (P_t f)(x) = (p_t * f)(x) by discrete convolution, kernel tail cut where
// p_t < 1e-14 and the kernel weights normalized to unit mass.  Periodic
// grids convolve circularly; padded grids require padding >= 8 sqrt(t)
// beyond the region of interest (the caller's responsibility) and clamp at
// the edges.
GridFunction heat_semigroup_apply(const GridFunction& f, double t);

struct SmoothingRow {
    double t = 0;
    double norm = 0;      // ||P_t f||_{beta, w}
    double scaled = 0;    // norm * t^{(beta - alpha)/2}
};

// Tabulates ||P_t f||_{beta,w} t^{(beta-alpha)/2} over t_grid in (0, 1];
// boundedness of the column is the regularising property under test.
std::vector<SmoothingRow> smoothing_exponent_check(const GridFunction& f, double alpha,
                                                   double beta, const Weight& w,
                                                   const std::vector<double>& t_grid);

}  // namespace homoglab
