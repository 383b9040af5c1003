#include "homoglab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "homoglab/errors.hpp"

namespace homoglab {

Weight Weight::exponential(double ell) {
    Weight w;
    w.kind_ = Kind::exp;
    w.param_ = ell;
    w.c_ = std::exp(std::abs(ell));
    return w;
}

Weight Weight::polynomial(double kappa) {
    if (kappa <= 0) throw validation_error("weight: polynomial exponent must be > 0");
    Weight w;
    w.kind_ = Kind::poly;
    w.param_ = kappa;
    w.c_ = std::pow(2.0, std::max(kappa, 1.0));
    return w;
}

Weight Weight::product(const Weight& a, const Weight& b) {
    Weight w;
    w.kind_ = Kind::prod;
    w.c_ = a.c_ * b.c_;
    w.left_ = std::make_shared<Weight>(a);
    w.right_ = std::make_shared<Weight>(b);
    return w;
}

Weight Weight::unit() { return exponential(0.0); }

double Weight::operator()(double x) const {
    switch (kind_) {
        case Kind::exp:
            return std::exp(-param_ * std::abs(x));
        case Kind::poly:
            return 1.0 + std::pow(std::abs(x), param_);
        case Kind::prod:
            return (*left_)(x) * (*right_)(x);
    }
    return 1.0;
}

std::string Weight::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::exp:
            os << "exp(" << param_ << ")";
            break;
        case Kind::poly:
            os << "poly(" << param_ << ")";
            break;
        case Kind::prod:
            os << left_->describe() << "*" << right_->describe();
            break;
    }
    return os.str();
}

double Weight::max_unit_ratio(double span, double h) const {
    if (span <= 0 || h <= 0 || h > 1.0)
        throw validation_error("weight: span > 0 and 0 < h <= 1 required");
    const auto n = static_cast<std::size_t>(std::floor(2.0 * span / h)) + 1;
    const auto stride = static_cast<std::size_t>(std::floor(1.0 / h));
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (*this)(-span + static_cast<double>(i) * h);
    double best = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 1; d <= stride && i + d < n; ++d)
            best = std::max(best, std::max(w[i] / w[i + d], w[i + d] / w[i]));
    return best;
}

double weight_eval(const Weight& w, double x) { return w(x); }

double weight_envelope_check(double kappa, double ell) {
    if (kappa <= 0 || kappa > 1 || ell <= 0 || ell > 1)
        throw validation_error("weight envelope: parameters must lie in (0,1]");
    // Maximizer of (1 + x^k) e^{-l x} sits at x <= k/l; sweep past it.
    const double xmax = 4.0 * std::max(1.0, kappa / ell);
    double sup = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = xmax * static_cast<double>(i) / n;
        sup = std::max(sup, (1.0 + std::pow(x, kappa)) * std::exp(-ell * x));
    }
    return sup * std::pow(ell, kappa);
}

}  // namespace homoglab
