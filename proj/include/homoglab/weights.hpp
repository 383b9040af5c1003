#pragma once

#include <memory>
#include <string>

namespace homoglab {

// Admissible weight on R: w > 0 with C^{-1} <= w(x)/w(y) <= C whenever
// |x - y| <= 1.  Exponential e_l(x) = exp(-l |x|) is admissible with
// C = e^{|l|}; polynomial p_k(x) = 1 + |x|^k with C = 2^{max(k,1)};
// products multiply their constants.
class Weight {
  public:
    static Weight exponential(double ell);        // e_l
    static Weight polynomial(double kappa);       // p_k, kappa > 0
    static Weight product(const Weight& a, const Weight& b);
    static Weight unit();                         // e_0

    double operator()(double x) const;
    double admissibility_constant() const { return c_; }
    std::string describe() const;

    // Largest observed ratio w(x)/w(y) over grid pairs with |x-y| <= 1 on
    // [-span, span]; admissibility holds when this stays <= the constant.
    double max_unit_ratio(double span, double h) const;

  private:
    enum class Kind { exp, poly, prod };
    Kind kind_ = Kind::exp;
    double param_ = 0.0;
    double c_ = 1.0;
    std::shared_ptr<const Weight> left_, right_;
    Weight() = default;
};

double weight_eval(const Weight& w, double x);

// sup_x p_kappa(x) e_ell(x) * ell^kappa over a grid covering the analytic
// maximizer; kappa, ell must lie in (0, 1].
double weight_envelope_check(double kappa, double ell);

}  // namespace homoglab
