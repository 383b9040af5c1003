#include "homoglab/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "homoglab/errors.hpp"
#include "homoglab/heat.hpp"
#include "homoglab/holder.hpp"
#include "homoglab/quadrature.hpp"
#include "homoglab/rng.hpp"
#include "homoglab/stats.hpp"

namespace homoglab {
namespace {

constexpr double kPi = 3.14159265358979323846;

double pm(double x, double m) {  // heat kernel, no argument checks
    return std::exp(-x * x / (4.0 * m)) / (2.0 * std::sqrt(kPi * m));
}

// Phibar(t) = \int Phi(x,t) dx, closed form for separable models.
std::function<double(double)> phibar_function(const CovarianceModel& model) {
    if (const auto* sep = dynamic_cast<const SeparableModel*>(&model)) {
        const double mass = sep->amplitude() * sep->spatial_integral();
        return [sep, mass](double t) { return mass * sep->temporal(t); };
    }
    return [&model](double t) { return phi_bar(model, t, 1e-10); };
}

void require_temporal_decay(const CovarianceModel& model, const char* what) {
    if (!model.temporally_integrable()) {
        std::ostringstream os;
        os << what << ": declared temporal decay is not integrable";
        throw non_integrable_error(os.str());
    }
}

}  // namespace

ScalingRegime ScalingRegime::of(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha))
        throw validation_error("scaling regime: alpha must be finite and > 0");
    ScalingRegime r;
    r.alpha = alpha;
    if (alpha < 2) {
        r.tag = Tag::slow;
        r.beta = 0.5 + 0.25 * alpha;
    } else {
        r.tag = alpha == 2 ? Tag::diffusive : Tag::fast;
        r.beta = 0.5 * alpha;
    }
    return r;
}

RescaledPotential::RescaledPotential(FieldRealization base, double eps,
                                     ScalingRegime regime)
    : base_(std::move(base)), eps_(eps) {
    if (eps <= 0) throw validation_error("rescaled potential: eps must be > 0");
    eps_alpha_ = std::pow(eps, regime.alpha);
    amplitude_ = std::pow(eps, -regime.beta);
    base_.validate();
}

void RescaledPotential::check_coverage(double L, double horizon) const {
    const FieldGrid& g = base_.grid;
    const double tol = 1e-9;
    if (g.x0 > -L / eps_ + tol || g.x1 < L / eps_ - tol || g.t0 > tol ||
        g.t1 < horizon / eps_alpha_ - tol) {
        std::ostringstream os;
        os << "rescaled potential: base field window [" << g.x0 << "," << g.x1 << "]x["
           << g.t0 << "," << g.t1 << "] does not cover [" << -L / eps_ << ","
           << L / eps_ << "]x[0," << horizon / eps_alpha_ << "]";
        throw validation_error(os.str());
    }
}

double vbar_slow(const CovarianceModel& model) {
    require_temporal_decay(model, "vbar (slow)");
    const auto phibar = phibar_function(model);
    // t = tau^2 removes the endpoint singularity of t^{-1/2}.
    const double scale = std::sqrt(std::max(model.corr_time(), 1e-12));
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    const double integral =
        integrate_to_inf([&](double tau) { return phibar(tau * tau); }, 0.0, scale, opt);
    return integral / std::sqrt(kPi);
}

double vbar_diffusive(const CovarianceModel& model) {
    require_temporal_decay(model, "vbar (diffusive)");
    if (!model.spatially_integrable())
        throw non_integrable_error("vbar (diffusive): spatial decay not integrable");
    // Inner integral in the similarity variable y = x / sqrt(t): the unit
    // kernel p_1 cuts it off at |y| ~ 16 regardless of t.
    QuadOptions inner_opt;
    inner_opt.rel_tol = 1e-7;
    auto inner = [&](double t) {
        if (t == 0.0) return model.phi0();
        const double rt = std::sqrt(t);
        return integrate([&](double y) { return pm(y, 1.0) * model.phi(rt * y, t); },
                         -16.0, 16.0, inner_opt);
    };
    QuadOptions outer_opt;
    outer_opt.rel_tol = 1e-6;
    const double scale = std::sqrt(std::max(model.corr_time(), 1e-12));
    return integrate_to_inf([&](double tau) { return 2.0 * tau * inner(tau * tau); }, 0.0,
                            scale, outer_opt);
}

double vbar_fast(const CovarianceModel& model) {
    require_temporal_decay(model, "vbar (fast)");
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    return integrate_to_inf([&](double t) { return model.phi(0.0, t); }, 0.0,
                            std::max(model.corr_time(), 1e-12), opt);
}

Trajectory corrector_Y(const std::function<double(double, double)>& v_eps, double horizon,
                       const SolverConfig& config) {
    ParabolicProblem p;
    p.u0 = make_grid(config.L, config.h, config.boundary);
    p.source = v_eps;
    p.horizon = horizon;
    return solve_potential(p, config);
}

Trajectory corrector_Z(const Trajectory& y, const std::function<double(double)>& vbar_curve,
                       const SolverConfig& config) {
    if (y.slices.empty()) throw validation_error("corrector Z: empty Y trajectory");
    // |dx Y|^2 slices, linearly interpolated in time when the solver asks
    // between stored Y times.
    auto dsq = std::make_shared<std::vector<GridFunction>>();
    dsq->reserve(y.slices.size());
    for (const auto& slice : y.slices) {
        GridFunction d = grid_derivative(slice);
        for (double& v : d.values) v = v * v;
        dsq->push_back(std::move(d));
    }
    auto times = std::make_shared<std::vector<double>>(y.times);
    // The solver sweeps all x at a fixed t, so cache the time bracket; a
    // single solve is sequential, so the cache needs no locking.
    struct Bracket {
        double t = std::numeric_limits<double>::quiet_NaN();
        std::size_t k = 0;
        double w = 0;
    };
    auto cache = std::make_shared<Bracket>();
    const GridFunction& shape = y.slices.front();
    const double gl = shape.L, gh = shape.h;
    auto source = [dsq, times, vbar_curve, cache, gl, gh](double x, double t) {
        const auto& ts = *times;
        if (!(t == cache->t)) {
            cache->t = t;
            if (t <= ts.front()) {
                cache->k = 0;
                cache->w = 0;
            } else if (t >= ts.back()) {
                cache->k = ts.size() - 1;
                cache->w = 0;
            } else {
                const auto it = std::upper_bound(ts.begin(), ts.end(), t);
                cache->k = static_cast<std::size_t>(it - ts.begin()) - 1;
                cache->w = (t - ts[cache->k]) / (ts[cache->k + 1] - ts[cache->k]);
            }
        }
        const auto& lo = (*dsq)[cache->k];
        const auto& hi = (*dsq)[std::min(cache->k + 1, dsq->size() - 1)];
        // fast path when x is a grid node of the shared solver grid
        const double s = (x + gl) / gh;
        const auto i = static_cast<std::size_t>(std::llround(s));
        double g;
        if (i < lo.size() && std::abs(s - static_cast<double>(i)) < 1e-9) {
            g = (1.0 - cache->w) * lo.values[i] + cache->w * hi.values[i];
        } else {
            g = (1.0 - cache->w) * lo.at(x) + cache->w * hi.at(x);
        }
        return g - vbar_curve(t);
    };

    ParabolicProblem p;
    p.u0 = make_grid(config.L, config.h, config.boundary);
    p.source = source;
    p.horizon = y.times.back();
    return solve_potential(p, config);
}

double vbar_eps_quadrature(const CovarianceModel& model, double eps, double alpha,
                           double t, double rel_tol) {
    const auto* sep = dynamic_cast<const SeparableModel*>(&model);
    if (!sep)
        throw validation_error(
            "vbar_eps quadrature: requires a separable analytic covariance");
    if (eps <= 0 || t < 0) throw validation_error("vbar_eps: eps > 0, t >= 0 required");
    if (t == 0) return 0.0;
    const ScalingRegime regime = ScalingRegime::of(alpha);
    const double eps_alpha = std::pow(eps, alpha);
    const double amp_u = sep->amplitude() * std::pow(eps, alpha - 2.0 * regime.beta);

    // I(m) = -\int p''_m(u) S(u/eps) du, closed form per spatial profile.
    std::function<double(double)> I;
    double corner = eps * sep->spatial_scale();  // scale where I(m) turns over
    switch (sep->spatial_kind()) {
        case SpatialKind::gaussian: {
            const double c = eps * sep->spatial_scale();
            I = [c](double m) {
                const double q = c * c + 4.0 * m;
                return 2.0 * c / (q * std::sqrt(q));
            };
            corner = c * c;
            break;
        }
        case SpatialKind::indicator: {
            const double a = eps * sep->spatial_scale();
            I = [a](double m) { return (a / m) * pm(a, m); };
            corner = a * a;
            break;
        }
        case SpatialKind::heat_kernel: {
            const double c = eps * eps * sep->spatial_scale();
            const double e = eps;
            I = [c, e](double m) { return e * pm(0.0, m + c) / (2.0 * (m + c)); };
            corner = c;
            break;
        }
        case SpatialKind::constant:
            throw non_integrable_error("vbar_eps: constant spatial profile");
    }
    auto U = [&](double a) { return amp_u * sep->temporal_cumulative(a / eps_alpha); };

    // vbar_eps(t) = \int_0^{2t} I(m) U(min(m, 2t-m)) dm; m = xi^2 tames the
    // m^{-1/2} behaviour of I * U near 0.
    const double top = std::sqrt(2.0 * t);
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.breakpoints = {std::sqrt(std::max(corner, 1e-300)), std::sqrt(eps_alpha),
                       std::sqrt(t)};
    return integrate(
        [&](double xi) {
            const double m = xi * xi;
            return 2.0 * xi * I(m) * U(std::min(m, 2.0 * t - m));
        },
        0.0, top, opt);
}

EpsExperiment design_experiment(const CovarianceModel& model, double eps, double alpha,
                                double L, double horizon, double points_per_corr,
                                std::size_t store_stride) {
    if (L <= 0 || horizon <= 0 || points_per_corr < 2)
        throw validation_error("experiment design: bad window or resolution");
    EpsExperiment ex;
    ex.eps = eps;
    ex.regime = ScalingRegime::of(alpha);
    ex.horizon = horizon;
    const double eps_alpha = std::pow(eps, alpha);

    // Solver h is an even divisor of 2L so x = 0 is a grid node, and maps to
    // the micro grid by exactly 1/eps.
    const double h_target = eps * model.corr_length() / points_per_corr;
    const auto half = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(L / h_target)));
    const std::size_t n_x = 2 * half;
    const double h = 2.0 * L / static_cast<double>(n_x);

    const double dt_target = eps_alpha * model.corr_time() / points_per_corr;
    const auto n_t = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(horizon / dt_target)));
    const double dt = horizon / static_cast<double>(n_t);

    // Exponential scheme: the potential/source carries energy at k ~ 1/eps
    // where k^2 dt >> 1, and only a stiff-accurate step tracks the
    // quasi-static response of those modes at fixed points-per-correlation.
    ex.solver.scheme = Scheme::mild_duhamel;
    ex.solver.h = h;
    ex.solver.dt = dt;
    ex.solver.L = L;
    ex.solver.boundary = Boundary::periodic;
    ex.solver.store_stride = store_stride;

    ex.micro_grid.x0 = -L / eps;
    ex.micro_grid.x1 = L / eps;
    ex.micro_grid.hx = h / eps;
    ex.micro_grid.t0 = 0.0;
    ex.micro_grid.t1 = horizon / eps_alpha;
    ex.micro_grid.ht = dt / eps_alpha;
    ex.micro_grid.validate();
    return ex;
}

VbarEpsEstimate vbar_eps_mc(const CovarianceModel& model, double eps, double alpha,
                            double t, std::size_t n_realizations, std::uint64_t seed,
                            double L) {
    if (n_realizations < 2) throw validation_error("vbar_eps MC: need >= 2 realizations");
    EpsExperiment ex = design_experiment(model, eps, alpha, L, t);
    const auto steps = static_cast<std::size_t>(std::llround(t / ex.solver.dt));
    ex.solver.store_stride = steps;  // endpoints only

    GaussianFieldSampler sampler(model, ex.micro_grid);
    const std::size_t n_x = ex.solver.h > 0
                                ? static_cast<std::size_t>(std::llround(2.0 * L / ex.solver.h))
                                : 0;
    const std::size_t i0 = n_x / 2;  // x = 0

    std::vector<double> samples(n_realizations);
    for (std::size_t r = 0; r < n_realizations; ++r) {
        FieldRealization base = sampler.sample(derive_seed(seed, 0, r));
        RescaledPotential pot(std::move(base), eps, ex.regime);
        pot.check_coverage(L, t);
        Trajectory y = corrector_Y([&pot](double x, double s) { return pot(x, s); }, t,
                                   ex.solver);
        const GridFunction& last = y.back();
        const std::size_t n = last.size();
        const double d =
            (last.values[(i0 + 1) % n] - last.values[(i0 + n - 1) % n]) /
            (2.0 * last.h);
        samples[r] = d * d;
    }
    return {mean(samples), jackknife_se(samples)};
}

namespace {
Trajectory tilt(const Trajectory& a, const Trajectory& y, const Trajectory& z,
                double sign) {
    if (a.size() != y.size() || a.size() != z.size())
        throw validation_error("transform: trajectories store different time sets");
    Trajectory out = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.slices[k].size() != y.slices[k].size() ||
            a.slices[k].size() != z.slices[k].size())
            throw validation_error("transform: grid mismatch");
        for (std::size_t i = 0; i < a.slices[k].size(); ++i)
            out.slices[k].values[i] =
                a.slices[k].values[i] *
                std::exp(sign * (y.slices[k].values[i] + z.slices[k].values[i]));
    }
    return out;
}
}  // namespace

Trajectory transform_v(const Trajectory& u, const Trajectory& y, const Trajectory& z) {
    return tilt(u, y, z, -1.0);
}

Trajectory transform_u(const Trajectory& v, const Trajectory& y, const Trajectory& z) {
    return tilt(v, y, z, +1.0);
}

GridFunction homogenized_solution(const GridFunction& u0, double vbar, double t) {
    if (t < 0) throw validation_error("homogenized solution: t >= 0 required");
    if (t == 0) return u0;
    GridFunction out = heat_semigroup_apply(u0, t);
    const double factor = std::exp(vbar * t);
    for (double& v : out.values) v *= factor;
    return out;
}

}  // namespace homoglab
