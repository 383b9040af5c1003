#include "homoglab/solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <vector>

#include "homoglab/errors.hpp"
#include "homoglab/fftw_lock.hpp"
#include "homoglab/stats.hpp"

namespace homoglab {
namespace {

constexpr double kPi = 3.14159265358979323846;

double eval_or_zero(const std::function<double(double, double)>& f, double x, double t) {
    return f ? f(x, t) : 0.0;
}

// phi1(z) = (e^z - 1) / z, stable near z = 0.
double phi1(double z) {
    if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

// phi2(z) = (e^z - 1 - z) / z^2, stable near z = 0.
double phi2(double z) {
    if (std::abs(z) < 1e-4) return 0.5 + z / 6.0;
    return (std::expm1(z) - z) / (z * z);
}

void check_finite(const std::vector<double>& u, std::size_t step, double t) {
    for (double v : u)
        if (!std::isfinite(v) || std::abs(v) > 1e120) {
            std::ostringstream os;
            os << "solver unstable: first bad value at step " << step << " (t = " << t
               << ")";
            throw instability_error(os.str());
        }
}

// Thomas algorithm for a tridiagonal system; diagonals passed by value since
// they are overwritten.
std::vector<double> solve_tridiag(std::vector<double> a, std::vector<double> b,
                                  std::vector<double> c, std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

// Cyclic tridiagonal via Sherman-Morrison: corners (alpha = A[0][n-1],
// beta = A[n-1][0]) are folded into a rank-one update.
std::vector<double> solve_cyclic_tridiag(const std::vector<double>& a,
                                         std::vector<double> b,
                                         const std::vector<double>& c,
                                         const std::vector<double>& d, double alpha,
                                         double beta) {
    const std::size_t n = b.size();
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> y = solve_tridiag(a, bb, c, d);
    const std::vector<double> z = solve_tridiag(a, bb, c, u);
    const double vy = y[0] + (beta / gamma) * y[n - 1];
    const double vz = z[0] + (beta / gamma) * z[n - 1];
    const double factor = vy / (1.0 + vz);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
    return x;
}

struct Storage {
    const SolverConfig* cfg;
    Trajectory traj;
    void push(double t, const GridFunction& u, std::size_t step, std::size_t last_step) {
        if (step % cfg->store_stride == 0 || step == last_step || step == 0) {
            traj.times.push_back(t);
            traj.slices.push_back(u);
        }
    }
};

Trajectory solve_cn_strang(const ParabolicProblem& problem, const SolverConfig& cfg) {
    GridFunction u = problem.u0;
    const std::size_t n = u.size();
    const double h = u.h, dt = cfg.dt;
    const auto steps = static_cast<std::size_t>(std::llround(problem.horizon / dt));
    if (std::abs(static_cast<double>(steps) * dt - problem.horizon) > 1e-9 * problem.horizon)
        throw validation_error("solver: horizon not a multiple of dt");

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = u.x(i);

    Storage out{&cfg, {}};
    out.push(0.0, u, 0, steps);

    auto reaction_half = [&](std::vector<double>& v, double t, std::size_t step) {
        const double tau = 0.5 * dt;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = eval_or_zero(problem.potential, xs[i], t);
            const double s = eval_or_zero(problem.source, xs[i], t);
            v[i] = std::exp(g * tau) * v[i] + s * tau * phi1(g * tau);
        }
        check_finite(v, step, t);
    };

    std::vector<double> lo(n), di(n), up(n), rhs(n), lo2(n), di2(n), up2(n);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t0 = static_cast<double>(step) * dt;
        const double t1 = t0 + dt;
        const double tm = t0 + 0.5 * dt;

        reaction_half(u.values, t0, step);

        // CN for dxx + F(x, tm) dx.  Row i of A: (1/h^2 - F/2h, -2/h^2, 1/h^2 + F/2h).
        const double r = dt / (2.0 * h * h);
        for (std::size_t i = 0; i < n; ++i) {
            const double fh = eval_or_zero(problem.drift, xs[i], tm) * dt / (4.0 * h);
            lo[i] = -(r - fh);
            di[i] = 1.0 + 2.0 * r;
            up[i] = -(r + fh);
            lo2[i] = r - fh;
            di2[i] = 1.0 - 2.0 * r;
            up2[i] = r + fh;
        }
        if (u.boundary == Boundary::periodic) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
                rhs[i] = lo2[i] * u.values[im] + di2[i] * u.values[i] + up2[i] * u.values[ip];
            }
            u.values = solve_cyclic_tridiag(lo, di, up, rhs, up[n - 1], lo[0]);
        } else {
            // zero beyond the padded edges
            for (std::size_t i = 0; i < n; ++i) {
                const double um = i > 0 ? u.values[i - 1] : 0.0;
                const double up_v = i + 1 < n ? u.values[i + 1] : 0.0;
                rhs[i] = lo2[i] * um + di2[i] * u.values[i] + up2[i] * up_v;
            }
            u.values = solve_tridiag(lo, di, up, rhs);
        }
        check_finite(u.values, step, tm);

        reaction_half(u.values, t1, step);
        out.push(t1, u, step + 1, steps);
    }
    return std::move(out.traj);
}

// Per-mode exponential weights for one Duhamel step of length dt:
// u_{n+1} = E u_n + dt (phi1 - phi2)(L dt) N(u_n, t0) + dt phi2(L dt) N(u_{n+1}, t1),
// with L = dxx. Exact for the stiff linear part, so quasi-static high-k
// responses u_hat ~ N_hat / k^2 come out right even when k^2 dt >> 1.
class ExpDuhamel {
  public:
    ExpDuhamel(std::size_t n, double L, double dt) : n_(n) {
        const std::size_t nm = n / 2 + 1;
        decay_.resize(nm);
        w0_.resize(nm);
        w1_.resize(nm);
        const double norm = 1.0 / static_cast<double>(n);
        for (std::size_t m = 0; m < nm; ++m) {
            const double k = kPi * static_cast<double>(m) / L;
            const double z = -k * k * dt;
            decay_[m] = std::exp(z) * norm;
            const double p2 = phi2(z);
            w0_[m] = dt * (phi1(z) - p2) * norm;
            w1_[m] = dt * p2 * norm;
        }
        real_ = static_cast<double*>(fftw_malloc(n * sizeof(double)));
        spec_ = static_cast<fftw_complex*>(fftw_malloc(nm * sizeof(fftw_complex)));
        base_ = static_cast<fftw_complex*>(fftw_malloc(nm * sizeof(fftw_complex)));
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE);
    }
    ~ExpDuhamel() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
        fftw_free(base_);
    }
    ExpDuhamel(const ExpDuhamel&) = delete;
    ExpDuhamel& operator=(const ExpDuhamel&) = delete;

    // base_hat = E u_hat + w0 N0_hat; kept until the next begin().
    void begin(const std::vector<double>& u, const std::vector<double>& n0) {
        forward(u);
        for (std::size_t m = 0; m < n_ / 2 + 1; ++m) {
            base_[m][0] = decay_[m] * spec_[m][0];
            base_[m][1] = decay_[m] * spec_[m][1];
        }
        forward(n0);
        for (std::size_t m = 0; m < n_ / 2 + 1; ++m) {
            base_[m][0] += w0_[m] * spec_[m][0];
            base_[m][1] += w0_[m] * spec_[m][1];
        }
    }

    // out = IFFT(base_hat + w1 N1_hat)
    void combine(const std::vector<double>& n1, std::vector<double>& out) {
        forward(n1);
        for (std::size_t m = 0; m < n_ / 2 + 1; ++m) {
            spec_[m][0] = base_[m][0] + w1_[m] * spec_[m][0];
            spec_[m][1] = base_[m][1] + w1_[m] * spec_[m][1];
        }
        fftw_execute(bwd_);
        out.assign(real_, real_ + n_);
    }

  private:
    void forward(const std::vector<double>& v) {
        std::copy(v.begin(), v.end(), real_);
        fftw_execute(fwd_);
    }
    std::size_t n_;
    std::vector<double> decay_, w0_, w1_;
    double* real_;
    fftw_complex* spec_;
    fftw_complex* base_;
    fftw_plan fwd_, bwd_;
};

Trajectory solve_mild(const ParabolicProblem& problem, const SolverConfig& cfg) {
    if (problem.u0.boundary != Boundary::periodic)
        throw validation_error("mild scheme: periodic boundary required");
    GridFunction u = problem.u0;
    const std::size_t n = u.size();
    const double h = u.h, dt = cfg.dt;
    const auto steps = static_cast<std::size_t>(std::llround(problem.horizon / dt));
    if (std::abs(static_cast<double>(steps) * dt - problem.horizon) > 1e-9 * problem.horizon)
        throw validation_error("solver: horizon not a multiple of dt");

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = u.x(i);
    ExpDuhamel stepper(n, u.L, dt);

    // N(v, t) = F dx v + G v + S with centered differences.
    auto nonlinearity = [&](const std::vector<double>& v, double t, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
            const double dv = (v[ip] - v[im]) / (2.0 * h);
            out[i] = eval_or_zero(problem.drift, xs[i], t) * dv +
                     eval_or_zero(problem.potential, xs[i], t) * v[i] +
                     eval_or_zero(problem.source, xs[i], t);
        }
    };
    // Source-only problems have u-independent N: one combine, no iteration.
    const bool n_depends_on_u = static_cast<bool>(problem.drift) ||
                                static_cast<bool>(problem.potential);

    Storage out{&cfg, {}};
    out.push(0.0, u, 0, steps);

    std::vector<double> nl(n), iter(n), next(n);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t0 = static_cast<double>(step) * dt;
        const double t1 = t0 + dt;

        nonlinearity(u.values, t0, nl);
        stepper.begin(u.values, nl);

        // Picard on the implicit endpoint term, seeded with N(u, t1).
        nonlinearity(u.values, t1, nl);
        stepper.combine(nl, iter);
        bool converged = !n_depends_on_u;
        for (int k = 0; !converged && k < cfg.picard_max_iters; ++k) {
            nonlinearity(iter, t1, nl);
            stepper.combine(nl, next);
            double diff = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                diff = std::max(diff, std::abs(next[i] - iter[i]));
            iter.swap(next);
            if (diff < cfg.picard_tol) converged = true;
        }
        if (!converged)
            throw convergence_error(
                "mild scheme: Picard iteration did not contract; reduce dt (smaller "
                "time slab)");
        u.values = iter;
        check_finite(u.values, step, t1);
        out.push(t1, u, step + 1, steps);
    }
    return std::move(out.traj);
}

}  // namespace

void SolverConfig::validate(double horizon) const {
    if (h <= 0 || dt <= 0 || L <= 0 || horizon <= 0)
        throw validation_error("solver config: h, dt, L, horizon must be > 0");
    if (store_stride == 0) throw validation_error("solver config: store stride >= 1");
    const double n = horizon / dt;
    if (std::abs(n - std::llround(n)) > 1e-9 * n)
        throw validation_error("solver config: horizon not a multiple of dt");
    if (boundary == Boundary::decay_padded && padding < 8.0 * std::sqrt(horizon))
        throw validation_error("solver config: decay padding must be >= 8 sqrt(T)");
}

const GridFunction& Trajectory::at_time(double t) const {
    if (slices.empty()) throw validation_error("trajectory: empty");
    std::size_t best = 0;
    double gap = std::abs(times[0] - t);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < gap) {
            gap = std::abs(times[i] - t);
            best = i;
        }
    return slices[best];
}

Trajectory solve_drift_potential(const ParabolicProblem& problem,
                                 const SolverConfig& config) {
    config.validate(problem.horizon);
    problem.u0.validate();
    if (problem.u0.boundary != config.boundary)
        throw validation_error("solver: initial condition boundary tag mismatch");
    switch (config.scheme) {
        case Scheme::cn_strang:
            return solve_cn_strang(problem, config);
        case Scheme::mild_duhamel:
            return solve_mild(problem, config);
    }
    throw validation_error("solver: unknown scheme");
}

Trajectory solve_potential(const ParabolicProblem& problem, const SolverConfig& config) {
    ParabolicProblem p = problem;
    p.drift = nullptr;
    return solve_drift_potential(p, config);
}

OrderResult order_of_accuracy(const std::vector<double>& hs,
                              const std::vector<double>& errors) {
    if (hs.size() != errors.size() || hs.size() < 2)
        throw validation_error("order fit: need >= 2 ladder points");
    double emax = 0.0;
    for (double e : errors) {
        if (e < 0 || !std::isfinite(e)) throw validation_error("order fit: bad error value");
        emax = std::max(emax, e);
    }
    if (emax < 1e-13) return {0.0, true};
    return {fit_loglog_slope(hs, errors), false};
}

}  // namespace homoglab
