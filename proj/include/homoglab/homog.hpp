#pragma once

#include <cstdint>
#include <functional>

#include "homoglab/covariance.hpp"
#include "homoglab/fields.hpp"
#include "homoglab/grid.hpp"
#include "homoglab/solver.hpp"

namespace homoglab {

// The amplitude exponent beta that balances the rescaled potential
// eps^{-beta} V(x/eps, t/eps^alpha): beta = 1/2 + alpha/4 below the
// diffusive scaling alpha = 2, and alpha/2 at or above it.
struct ScalingRegime {
    enum class Tag { slow, diffusive, fast };
    double alpha = 1.0;
    double beta = 0.75;
    Tag tag = Tag::slow;

    static ScalingRegime of(double alpha);
};

// V_eps(x,t) = eps^{-beta} V(x/eps, t/eps^alpha), bilinear on the base
// realization.  eps >= 1 is allowed (identity tests) but flagged as
// outside the asymptotic regime.
class RescaledPotential {
  public:
    RescaledPotential(FieldRealization base, double eps, ScalingRegime regime);

    // Throws when the base field's window cannot cover the solver window
    // [-L, L] x [0, horizon] after rescaling.
    void check_coverage(double L, double horizon) const;

    double operator()(double x, double t) const {
        return amplitude_ * base_.at(x / eps_, t / eps_alpha_);
    }
    double amplitude() const { return amplitude_; }
    bool outside_asymptotic() const { return eps_ >= 1.0; }

  private:
    FieldRealization base_;
    double eps_, eps_alpha_, amplitude_;
};

// Homogenized constants in the three regimes.
double vbar_slow(const CovarianceModel& model);       // (1/2 sqrt(pi)) \int Phibar(t)/sqrt(t)
double vbar_diffusive(const CovarianceModel& model);  // \int\int p_t(x) Phi(x,t)
double vbar_fast(const CovarianceModel& model);       // \int Phi(0,t)

// Correctors with flat zero initial data:
//   dt Y = dxx Y + V_eps,
//   dt Z = dxx Z + |dx Y|^2 - vbar_curve(t).
Trajectory corrector_Y(const std::function<double(double, double)>& v_eps, double horizon,
                       const SolverConfig& config);
Trajectory corrector_Z(const Trajectory& y, const std::function<double(double)>& vbar_curve,
                       const SolverConfig& config);

// vbar_eps(t) = E |dx Y^eps(0, t)|^2.
//
// Quadrature path (separable analytic models): the 4-fold space-time
// integral collapses, via the kernel identity
// \int p'_s(y) p'_r(z) dz = -p''_{s+r}(y - z + z) in the stationary lag and
// the change of variables (s, r) -> (m = (t-s)+(t-r), d = s-r), to
//   vbar_eps(t) = \int_0^{2t} I(m) U(min(m, 2t - m)) dm,
// with I(m) = -\int p''_m(u) S(u/eps) du in closed form per spatial profile
// and U(a) the cumulative temporal mass at amplitude eps^{alpha - 2 beta}.
double vbar_eps_quadrature(const CovarianceModel& model, double eps, double alpha,
                           double t, double rel_tol = 1e-4);

struct VbarEpsEstimate {
    double value = 0;
    double std_error = 0;
};

// Monte Carlo path: N independent realizations, each solved for Y on a
// micro-aligned grid; reports mean and jackknife error of |dx Y(0,t)|^2.
VbarEpsEstimate vbar_eps_mc(const CovarianceModel& model, double eps, double alpha,
                            double t, std::size_t n_realizations, std::uint64_t seed,
                            double L = 4.0);

// Exponential tilt v = u exp(-(Y+Z)) and its inverse; trajectories must
// share grids and stored times.
Trajectory transform_v(const Trajectory& u, const Trajectory& y, const Trajectory& z);
Trajectory transform_u(const Trajectory& v, const Trajectory& y, const Trajectory& z);

// exp(vbar t) P_t u0 (u0 itself at t = 0).
GridFunction homogenized_solution(const GridFunction& u0, double vbar, double t);

// Grid design for one eps: the solver grid is the microscopic grid scaled
// by exactly (eps, eps^alpha), so the rescaled potential is sampled at grid
// nodes with no interpolation error and the scaling relation stays exact.
struct EpsExperiment {
    FieldGrid micro_grid;  // window for the base field V
    SolverConfig solver;   // periodic solver on [-L, L], horizon-aligned dt
    double eps = 1;
    ScalingRegime regime;
    double horizon = 1;
};

EpsExperiment design_experiment(const CovarianceModel& model, double eps, double alpha,
                                double L, double horizon, double points_per_corr = 8.0,
                                std::size_t store_stride = 1);

}  // namespace homoglab
