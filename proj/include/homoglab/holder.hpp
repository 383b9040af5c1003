#pragma once

#include "homoglab/grid.hpp"
#include "homoglab/weights.hpp"

namespace homoglab {

// Holder order alpha in (-1, inf) with the branch that defines its norm:
//   negative   (-1 < a < 0): increments of the antiderivative,
//   sup        (a = 0):      weighted sup norm,
//   fractional (0 < a < 1):  sup norm + Holder quotient,
//   recursive  (a >= 1):     ||f||_w + ||f'||_{a-1,w}.
struct HolderOrder {
    enum class Branch { negative, sup, fractional, recursive };
    double alpha = 0.0;
    Branch branch = Branch::sup;

    static HolderOrder of(double alpha);
};

// Discrete weighted Holder norm; pair suprema range over grid pairs with
// h <= |x - y| <= 1, so sub-grid oscillation is invisible by construction.
double weighted_holder_norm(const GridFunction& f, const HolderOrder& order,
                            const Weight& w);

inline double weighted_holder_norm(const GridFunction& f, double alpha, const Weight& w) {
    return weighted_holder_norm(f, HolderOrder::of(alpha), w);
}

// ||f1 f2||_{a, w1 w2} / (||f1||_{a1,w1} ||f2||_{a2,w2}) with a = min(a1,a2)
// when both orders are positive, a = a1 in the mixed case a1 < 0 < a2,
// a2 > |a1|.  Zero denominator is an error.
double product_bound_ratio(const GridFunction& f1, const GridFunction& f2, double alpha1,
                           double alpha2, const Weight& w1, const Weight& w2);

// Centered second-order derivative (one-sided at padded edges).
GridFunction grid_derivative(const GridFunction& f);

}  // namespace homoglab
