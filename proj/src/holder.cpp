#include "homoglab/holder.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "homoglab/errors.hpp"

namespace homoglab {

HolderOrder HolderOrder::of(double alpha) {
    if (!(alpha > -1.0) || !std::isfinite(alpha))
        throw validation_error("holder order: alpha must be finite and > -1");
    HolderOrder o;
    o.alpha = alpha;
    if (alpha < 0)
        o.branch = Branch::negative;
    else if (alpha == 0)
        o.branch = Branch::sup;
    else if (alpha < 1)
        o.branch = Branch::fractional;
    else
        o.branch = Branch::recursive;
    return o;
}

GridFunction grid_derivative(const GridFunction& f) {
    f.validate();
    GridFunction d = f;
    const std::size_t n = f.size();
    const double h = f.h;
    if (f.boundary == Boundary::periodic) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n;
            const std::size_t im = (i + n - 1) % n;
            d.values[i] = (f.values[ip] - f.values[im]) / (2.0 * h);
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i)
            d.values[i] = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
        // second-order one-sided at the padded edges
        d.values[0] =
            (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) / (2.0 * h);
        d.values[n - 1] =
            (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) / (2.0 * h);
    }
    return d;
}

namespace {

double weighted_sup(const GridFunction& f, const Weight& w) {
    double sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sup = std::max(sup, std::abs(f.values[i]) / w(f.x(i)));
    return sup;
}

// sup over pairs h <= |x-y| <= 1 of |g(x) - g(y)| / (w * |x-y|^expo), with
// the weight taken at whichever endpoint maximizes the quotient.
double pair_sup(const std::vector<double>& g, const GridFunction& f, const Weight& w,
                double expo) {
    const std::size_t n = g.size();
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(1.0 / f.h + 1e-9)));
    double sup = 0.0;
    std::vector<double> wv(n);
    for (std::size_t i = 0; i < n; ++i) wv[i] = w(f.x(i));
    for (std::size_t d = 1; d <= stride; ++d) {
        const double dist = static_cast<double>(d) * f.h;
        if (dist > 1.0 + 1e-12) break;
        const double denom = std::pow(dist, expo);
        for (std::size_t i = 0; i + d < n; ++i) {
            const double diff = std::abs(g[i + d] - g[i]);
            sup = std::max(sup, diff / (std::min(wv[i], wv[i + d]) * denom));
        }
    }
    return sup;
}

}  // namespace

double weighted_holder_norm(const GridFunction& f, const HolderOrder& order,
                            const Weight& w) {
    f.validate();
    switch (order.branch) {
        case HolderOrder::Branch::sup:
            return weighted_sup(f, w);
        case HolderOrder::Branch::fractional:
            return weighted_sup(f, w) + pair_sup(f.values, f, w, order.alpha);
        case HolderOrder::Branch::negative: {
            // Increments of the antiderivative only; the anchor cancels.
            std::vector<double> anti(f.size(), 0.0);
            for (std::size_t i = 1; i < f.size(); ++i)
                anti[i] = anti[i - 1] + 0.5 * f.h * (f.values[i - 1] + f.values[i]);
            return pair_sup(anti, f, w, order.alpha + 1.0);
        }
        case HolderOrder::Branch::recursive:
            return weighted_sup(f, w) +
                   weighted_holder_norm(grid_derivative(f),
                                        HolderOrder::of(order.alpha - 1.0), w);
    }
    return 0.0;
}

double product_bound_ratio(const GridFunction& f1, const GridFunction& f2, double alpha1,
                           double alpha2, const Weight& w1, const Weight& w2) {
    f1.validate();
    f2.validate();
    if (f1.size() != f2.size() || f1.h != f2.h || f1.L != f2.L ||
        f1.boundary != f2.boundary)
        throw validation_error("product bound: factor grids differ");
    double alpha;
    if (alpha1 > 0 && alpha2 > 0) {
        alpha = std::min(alpha1, alpha2);
    } else if (alpha1 < 0 && alpha2 > 0 && alpha2 > -alpha1) {
        alpha = alpha1;
    } else {
        throw validation_error(
            "product bound: need both orders positive, or a1 < 0 < a2 with a2 > |a1|");
    }
    const double n1 = weighted_holder_norm(f1, HolderOrder::of(alpha1), w1);
    const double n2 = weighted_holder_norm(f2, HolderOrder::of(alpha2), w2);
    if (n1 == 0.0 || n2 == 0.0)
        throw validation_error("product bound: zero factor norm, ratio undefined");
    GridFunction prod = f1;
    for (std::size_t i = 0; i < prod.size(); ++i) prod.values[i] *= f2.values[i];
    const double num =
        weighted_holder_norm(prod, HolderOrder::of(alpha), Weight::product(w1, w2));
    return num / (n1 * n2);
}

}  // namespace homoglab
