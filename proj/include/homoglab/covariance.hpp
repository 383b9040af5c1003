#pragma once

#include <memory>
#include <string>
#include <vector>

#include "homoglab/grid.hpp"

namespace homoglab {

// Stationary space-time covariance Phi(x,t) = E V(0,0) V(x,t).
class CovarianceModel {
  public:
    virtual ~CovarianceModel() = default;

    virtual double phi(double x, double t) const = 0;
    double phi0() const { return phi(0.0, 0.0); }

    // Decay scales (used for grid padding and quadrature ranges).
    virtual double corr_length() const = 0;
    virtual double corr_time() const = 0;
    // |x| (resp. |t|) beyond which Phi is negligible at working precision.
    virtual double spatial_range() const = 0;
    virtual double temporal_range() const = 0;

    // Integrability declared by the model (decay metadata).
    virtual bool spatially_integrable() const = 0;
    virtual bool temporally_integrable() const = 0;

    // Whether a field with this covariance is sampled as Gaussian (enables
    // the Wick fourth-moment identity).
    virtual bool gaussian_field() const { return true; }

    virtual std::string describe() const = 0;
};

enum class SpatialKind { gaussian, indicator, heat_kernel, constant };
enum class TemporalKind { exp_decay, constant };

// Phi(x,t) = amplitude * S(x) * T(t) with closed-form factors.  This is the
// "analytic" model family: every derived quantity (integrals, second
// derivatives, cumulative temporal mass) is available in closed form, which
// the homogenized-constant quadratures rely on.
class SeparableModel final : public CovarianceModel {
  public:
    // spatial_scale: gaussian -> S(x) = exp(-(x/scale)^2)
    //                indicator -> S(x) = 1_{|x| <= scale}
    //                heat_kernel -> S(x) = p_scale(x) (heat kernel at time scale)
    //                constant -> S(x) = 1
    // temporal_scale: exp_decay -> T(t) = exp(-|t|/scale); constant -> T = 1.
    SeparableModel(double amplitude, SpatialKind sk, double spatial_scale,
                   TemporalKind tk, double temporal_scale);

    double phi(double x, double t) const override { return amp_ * spatial(x) * temporal(t); }
    double corr_length() const override;
    double corr_time() const override;
    double spatial_range() const override;
    double temporal_range() const override;
    bool spatially_integrable() const override { return sk_ != SpatialKind::constant; }
    bool temporally_integrable() const override { return tk_ != TemporalKind::constant; }
    std::string describe() const override;

    double amplitude() const { return amp_; }
    SpatialKind spatial_kind() const { return sk_; }
    TemporalKind temporal_kind() const { return tk_; }
    double spatial_scale() const { return sx_; }
    double temporal_scale() const { return st_; }

    double spatial(double x) const;
    double spatial_d2(double x) const;     // S'' (gaussian / heat_kernel only)
    double spatial_integral() const;       // \int S
    double temporal(double t) const;
    double temporal_cumulative(double a) const;  // \int_0^a T

    // Phi_delta(x,t) = delta^{-1} Phi(x/delta, t): concentrates the spatial
    // profile while preserving its integral.
    SeparableModel spatially_concentrated(double delta) const;
    // Phi(delta * x, t): flattens the spatial profile.
    SeparableModel spatially_flattened(double delta) const;

  private:
    double amp_;
    SpatialKind sk_;
    double sx_;
    TemporalKind tk_;
    double st_;
};

// Covariance given by a table over [x0,x1] x [t0,t1], interpolated
// bilinearly.  Queries outside the table return 0 only when the declared
// decay metadata says the tail is negligible; otherwise they are an error.
class TabulatedModel final : public CovarianceModel {
  public:
    TabulatedModel(FieldGrid grid, std::vector<double> values, bool zero_outside,
                   bool spatially_integrable, bool temporally_integrable);

    double phi(double x, double t) const override;
    double corr_length() const override;
    double corr_time() const override;
    double spatial_range() const override;
    double temporal_range() const override;
    bool spatially_integrable() const override { return x_integrable_; }
    bool temporally_integrable() const override { return t_integrable_; }
    std::string describe() const override;

  private:
    FieldGrid grid_;
    std::vector<double> values_;
    bool zero_outside_;
    bool x_integrable_;
    bool t_integrable_;
};

// Shot-noise kernel: a finite mixture of separable polynomial bumps
//   psi(m, y, s) = A_m B(y / ry_m) B(s / rs_m),  B(u) = (1 - u^2)^2 on |u|<=1,
// summed over a Poisson cloud with per-mark intensity weight nu_m.
struct ShotNoiseSpec {
    struct Component {
        double weight;     // intensity nu_m (> 0)
        double amplitude;  // A_m (any sign; signs must mix so the field centres)
        double ry;         // spatial half-width
        double rs;         // temporal half-width
    };
    std::vector<Component> components;

    double support_radius_x() const;
    double support_radius_t() const;
    // \int\int\int psi dnu dy ds, by quadrature.
    double centering_integral() const;
    // Campbell variance \int\int\int psi^2 dnu dy ds, by quadrature.
    double campbell_variance() const;
    // Throws if the centering condition fails beyond tol.
    void validate(double tol = 1e-8) const;
};

class ShotNoiseModel final : public CovarianceModel {
  public:
    explicit ShotNoiseModel(ShotNoiseSpec spec);

    // Campbell formula: Phi(x,t) = sum_m nu_m \int\int psi_m(y,s) psi_m(y+x,s+t).
    double phi(double x, double t) const override;
    double corr_length() const override { return spec_.support_radius_x(); }
    double corr_time() const override { return spec_.support_radius_t(); }
    double spatial_range() const override { return 2.0 * spec_.support_radius_x(); }
    double temporal_range() const override { return 2.0 * spec_.support_radius_t(); }
    bool spatially_integrable() const override { return true; }
    bool temporally_integrable() const override { return true; }
    bool gaussian_field() const override { return false; }
    std::string describe() const override;

    const ShotNoiseSpec& spec() const { return spec_; }

  private:
    ShotNoiseSpec spec_;
};

// --- fields-module operations on covariances ---

double phi_eval(const CovarianceModel& model, double x, double t);

// \bar Phi(t) = \int_R Phi(x,t) dx by adaptive quadrature (rel tol 1e-8).
double phi_bar(const CovarianceModel& model, double t, double rel_tol = 1e-8);

}  // namespace homoglab
