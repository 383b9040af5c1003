#include "homoglab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "homoglab/errors.hpp"
#include "homoglab/quadrature.hpp"

namespace homoglab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double heat_kernel_value(double x, double t) {
    return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(kPi * t));
}
}  // namespace

SeparableModel::SeparableModel(double amplitude, SpatialKind sk, double spatial_scale,
                               TemporalKind tk, double temporal_scale)
    : amp_(amplitude), sk_(sk), sx_(spatial_scale), tk_(tk), st_(temporal_scale) {
    if (sk_ != SpatialKind::constant && sx_ <= 0)
        throw validation_error("covariance: spatial scale must be > 0");
    if (tk_ != TemporalKind::constant && st_ <= 0)
        throw validation_error("covariance: temporal scale must be > 0");
}

double SeparableModel::spatial(double x) const {
    switch (sk_) {
        case SpatialKind::gaussian: {
            const double u = x / sx_;
            return std::exp(-u * u);
        }
        case SpatialKind::indicator:
            return std::abs(x) <= sx_ ? 1.0 : 0.0;
        case SpatialKind::heat_kernel:
            return heat_kernel_value(x, sx_);
        case SpatialKind::constant:
            return 1.0;
    }
    return 0.0;
}

double SeparableModel::spatial_d2(double x) const {
    switch (sk_) {
        case SpatialKind::gaussian: {
            const double u = x / sx_;
            return (4.0 * u * u - 2.0) / (sx_ * sx_) * std::exp(-u * u);
        }
        case SpatialKind::heat_kernel: {
            const double t = sx_;
            return heat_kernel_value(x, t) * (x * x / (4.0 * t * t) - 1.0 / (2.0 * t));
        }
        default:
            throw validation_error("covariance: spatial profile is not twice differentiable");
    }
}

double SeparableModel::spatial_integral() const {
    switch (sk_) {
        case SpatialKind::gaussian:
            return sx_ * std::sqrt(kPi);
        case SpatialKind::indicator:
            return 2.0 * sx_;
        case SpatialKind::heat_kernel:
            return 1.0;
        case SpatialKind::constant:
            throw non_integrable_error("covariance: constant spatial profile is not integrable");
    }
    return 0.0;
}

double SeparableModel::temporal(double t) const {
    switch (tk_) {
        case TemporalKind::exp_decay:
            return std::exp(-std::abs(t) / st_);
        case TemporalKind::constant:
            return 1.0;
    }
    return 0.0;
}

double SeparableModel::temporal_cumulative(double a) const {
    switch (tk_) {
        case TemporalKind::exp_decay:
            return st_ * (1.0 - std::exp(-a / st_));
        case TemporalKind::constant:
            return a;
    }
    return 0.0;
}

double SeparableModel::corr_length() const {
    return sk_ == SpatialKind::constant
               ? 1.0
               : (sk_ == SpatialKind::heat_kernel ? std::sqrt(2.0 * sx_) : sx_);
}

double SeparableModel::corr_time() const {
    return tk_ == TemporalKind::constant ? 1.0 : st_;
}

double SeparableModel::spatial_range() const {
    switch (sk_) {
        case SpatialKind::gaussian:
            return 9.0 * sx_;
        case SpatialKind::indicator:
            return sx_;
        case SpatialKind::heat_kernel:
            return 18.0 * std::sqrt(sx_);
        case SpatialKind::constant:
            return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double SeparableModel::temporal_range() const {
    return tk_ == TemporalKind::constant ? std::numeric_limits<double>::infinity()
                                         : 45.0 * st_;
}

std::string SeparableModel::describe() const {
    static const char* sk[] = {"gaussian", "indicator", "heat_kernel", "constant"};
    static const char* tk[] = {"exp_decay", "constant"};
    std::ostringstream os;
    os << "separable(amp=" << amp_ << ",spatial=" << sk[static_cast<int>(sk_)]
       << ":" << sx_ << ",temporal=" << tk[static_cast<int>(tk_)] << ":" << st_ << ")";
    return os.str();
}

SeparableModel SeparableModel::spatially_concentrated(double delta) const {
    if (delta <= 0) throw validation_error("covariance: delta must be > 0");
    SeparableModel m = *this;
    switch (sk_) {
        case SpatialKind::gaussian:
        case SpatialKind::indicator:
            m.sx_ = sx_ * delta;
            m.amp_ = amp_ / delta;
            break;
        case SpatialKind::heat_kernel:
            m.sx_ = sx_ * delta * delta;  // delta^{-1} p_s(x/delta) = p_{s delta^2}(x)
            break;
        case SpatialKind::constant:
            throw validation_error("covariance: cannot concentrate a constant profile");
    }
    return m;
}

SeparableModel SeparableModel::spatially_flattened(double delta) const {
    if (delta <= 0) throw validation_error("covariance: delta must be > 0");
    SeparableModel m = *this;
    switch (sk_) {
        case SpatialKind::gaussian:
        case SpatialKind::indicator:
            m.sx_ = sx_ / delta;
            break;
        case SpatialKind::heat_kernel:
            m.sx_ = sx_ / (delta * delta);  // p_s(delta x) = delta^{-1} p_{s/delta^2}(x)
            m.amp_ = amp_ / delta;
            break;
        case SpatialKind::constant:
            break;
    }
    return m;
}

TabulatedModel::TabulatedModel(FieldGrid grid, std::vector<double> values,
                               bool zero_outside, bool spatially_integrable,
                               bool temporally_integrable)
    : grid_(grid),
      values_(std::move(values)),
      zero_outside_(zero_outside),
      x_integrable_(spatially_integrable),
      t_integrable_(temporally_integrable) {
    grid_.validate();
    if (values_.size() != grid_.nx() * grid_.nt())
        throw validation_error("tabulated covariance: table size mismatch");
}

double TabulatedModel::phi(double x, double t) const {
    // Phi(-x,-t) = Phi(x,t): fold queries into the tabulated half-plane
    // when the direct point is missing.
    auto inside = [&](double xx, double tt) {
        return xx >= grid_.x0 - 1e-12 && xx <= grid_.x1 + 1e-12 &&
               tt >= grid_.t0 - 1e-12 && tt <= grid_.t1 + 1e-12;
    };
    double xx = x, tt = t;
    if (!inside(xx, tt) && inside(-xx, -tt)) {
        xx = -xx;
        tt = -tt;
    }
    if (!inside(xx, tt)) {
        if (zero_outside_) return 0.0;
        throw validation_error("tabulated covariance: query outside table");
    }
    const std::size_t nx = grid_.nx(), nt = grid_.nt();
    double sx = std::clamp((xx - grid_.x0) / grid_.hx, 0.0, static_cast<double>(nx - 1));
    double st = std::clamp((tt - grid_.t0) / grid_.ht, 0.0, static_cast<double>(nt - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(sx), nx - 2);
    const std::size_t j = std::min(static_cast<std::size_t>(st), nt - 2);
    const double wx = sx - static_cast<double>(i);
    const double wt = st - static_cast<double>(j);
    auto v = [&](std::size_t ii, std::size_t jj) { return values_[jj * nx + ii]; };
    return (1 - wx) * (1 - wt) * v(i, j) + wx * (1 - wt) * v(i + 1, j) +
           (1 - wx) * wt * v(i, j + 1) + wx * wt * v(i + 1, j + 1);
}

double TabulatedModel::corr_length() const { return 0.25 * (grid_.x1 - grid_.x0); }
double TabulatedModel::corr_time() const { return 0.25 * (grid_.t1 - grid_.t0); }
double TabulatedModel::spatial_range() const {
    return std::max(std::abs(grid_.x0), std::abs(grid_.x1));
}
double TabulatedModel::temporal_range() const {
    return std::max(std::abs(grid_.t0), std::abs(grid_.t1));
}
std::string TabulatedModel::describe() const {
    std::ostringstream os;
    os << "tabulated(nx=" << grid_.nx() << ",nt=" << grid_.nt() << ")";
    return os.str();
}

namespace {
// B(u) = (1-u^2)^2 on |u| <= 1.
double bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return w * w;
}

// rho_B(d) = \int B(u) B(u+d) du, by quadrature.
double bump_correlation(double d, double rel_tol) {
    d = std::abs(d);
    if (d >= 2.0) return 0.0;
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    return integrate([d](double u) { return bump(u) * bump(u + d); }, -1.0, 1.0 - d, opt);
}
}  // namespace

double ShotNoiseSpec::support_radius_x() const {
    double r = 0;
    for (const auto& c : components) r = std::max(r, c.ry);
    return r;
}

double ShotNoiseSpec::support_radius_t() const {
    double r = 0;
    for (const auto& c : components) r = std::max(r, c.rs);
    return r;
}

double ShotNoiseSpec::centering_integral() const {
    QuadOptions opt;
    double total = 0;
    for (const auto& c : components) {
        const double by = integrate([](double u) { return bump(u); }, -1.0, 1.0, opt);
        const double bs = by;
        total += c.weight * c.amplitude * c.ry * c.rs * by * bs;
    }
    return total;
}

double ShotNoiseSpec::campbell_variance() const {
    QuadOptions opt;
    double total = 0;
    for (const auto& c : components) {
        const double b2 = integrate([](double u) { return bump(u) * bump(u); }, -1.0, 1.0, opt);
        total += c.weight * c.amplitude * c.amplitude * c.ry * c.rs * b2 * b2;
    }
    return total;
}

void ShotNoiseSpec::validate(double tol) const {
    if (components.empty()) throw validation_error("shot noise: no components");
    for (const auto& c : components)
        if (c.weight <= 0 || c.ry <= 0 || c.rs <= 0)
            throw validation_error("shot noise: weights and widths must be > 0");
    const double scale = std::abs(campbell_variance()) + 1.0;
    if (std::abs(centering_integral()) > tol * scale)
        throw validation_error("shot noise: centering condition violated");
}

ShotNoiseModel::ShotNoiseModel(ShotNoiseSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

double ShotNoiseModel::phi(double x, double t) const {
    double total = 0;
    for (const auto& c : spec_.components) {
        const double rx = bump_correlation(x / c.ry, 1e-10);
        const double rt = bump_correlation(t / c.rs, 1e-10);
        total += c.weight * c.amplitude * c.amplitude * c.ry * c.rs * rx * rt;
    }
    return total;
}

std::string ShotNoiseModel::describe() const {
    std::ostringstream os;
    os << "shot_noise(" << spec_.components.size() << " components,var="
       << spec_.campbell_variance() << ")";
    return os.str();
}

double phi_eval(const CovarianceModel& model, double x, double t) {
    return model.phi(x, t);
}

double phi_bar(const CovarianceModel& model, double t, double rel_tol) {
    if (!model.spatially_integrable())
        throw non_integrable_error("phi_bar: declared spatial decay is not integrable");
    const double R = model.spatial_range();
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.breakpoints = {-model.corr_length(), 0.0, model.corr_length()};
    return integrate([&](double x) { return model.phi(x, t); }, -R, R, opt);
}

}  // namespace homoglab
