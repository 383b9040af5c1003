#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "homoglab/errors.hpp"
#include "homoglab/heat.hpp"
#include "homoglab/solver.hpp"

using namespace homoglab;

namespace {

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

SolverConfig base_config(Scheme scheme, double h = 1.0 / 128.0, double dt = 1.0 / 256.0) {
    SolverConfig c;
    c.scheme = scheme;
    c.h = h;
    c.dt = dt;
    c.L = 8.0;
    return c;
}

}  // namespace

TEST_CASE("pure diffusion spreads a heat kernel exactly") {
    for (Scheme scheme : {Scheme::cn_strang, Scheme::mild_duhamel}) {
        CAPTURE(static_cast<int>(scheme));
        SolverConfig c = base_config(scheme);
        ParabolicProblem p;
        p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 1.0); });
        p.horizon = 1.0;
        const Trajectory traj = solve_potential(p, c);
        const GridFunction& u = traj.back();
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (std::abs(u.x(i)) <= 4.0)
                worst = std::max(worst, std::abs(u.values[i] - heat_kernel(u.x(i), 2.0)));
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("fourier mode with constant potential has an exact exponential rate") {
    // dt u = dxx u + c0 u with u0 = cos(kx): u(t) = e^{(c0 - k^2) t} cos(kx).
    const double k = 2.0 * M_PI / 8.0, c0 = 0.7, T = 1.0;
    for (Scheme scheme : {Scheme::cn_strang, Scheme::mild_duhamel}) {
        CAPTURE(static_cast<int>(scheme));
        SolverConfig c = base_config(scheme);
        ParabolicProblem p;
        p.u0 = sample_on_grid(c.L, c.h, [k](double x) { return std::cos(k * x); });
        p.potential = [c0](double, double) { return c0; };
        p.horizon = T;
        const GridFunction u = solve_potential(p, c).back();
        const double factor = std::exp((c0 - k * k) * T);
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, std::abs(u.values[i] - factor * std::cos(k * u.x(i))));
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("constant drift translates a slow profile") {
    // dt u = dxx u + a dx u: the profile drifts left by a*t on top of the
    // diffusion; compare against the exactly advected-diffused heat kernel.
    const double a = 0.5, T = 0.5;
    SolverConfig c = base_config(Scheme::cn_strang);
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 1.0); });
    p.drift = [a](double, double) { return a; };
    p.horizon = T;
    const GridFunction u = solve_drift_potential(p, c).back();
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u.x(i)) <= 4.0)
            worst = std::max(worst, std::abs(u.values[i] - heat_kernel(u.x(i) + a * T, 1.0 + T)));
    CHECK(worst < 1e-4);
}

TEST_CASE("source term accumulates correctly") {
    // dt u = dxx u + 1 with u0 = 0: u(t) = t for all x.
    for (Scheme scheme : {Scheme::cn_strang, Scheme::mild_duhamel}) {
        CAPTURE(static_cast<int>(scheme));
        SolverConfig c = base_config(scheme);
        ParabolicProblem p;
        p.u0 = make_grid(c.L, c.h);
        p.source = [](double, double) { return 1.0; };
        p.horizon = 1.0;
        const GridFunction u = solve_potential(p, c).back();
        for (double v : u.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("schemes agree on a smooth oscillating potential") {
    ParabolicProblem p;
    SolverConfig c1 = base_config(Scheme::cn_strang);
    SolverConfig c2 = base_config(Scheme::mild_duhamel);
    p.u0 = sample_on_grid(c1.L, c1.h, [](double x) { return heat_kernel(x, 1.0); });
    p.potential = [](double x, double t) { return std::sin(3.0 * x) * std::cos(2.0 * t); };
    p.horizon = 0.5;
    const GridFunction a = solve_potential(p, c1).back();
    const GridFunction b = solve_potential(p, c2).back();
    CHECK(max_abs_diff(a, b) < 1e-4);
}

TEST_CASE("temporal order of accuracy is at least 1.8 for both schemes") {
    // Smooth data, low wavenumber; errors measured against a fine reference.
    ParabolicProblem p;
    const double h = 1.0 / 64.0;
    p.horizon = 0.25;
    p.potential = [](double x, double t) {
        return 0.8 * std::sin(2.0 * M_PI * x / 8.0) * std::cos(t);
    };
    for (Scheme scheme : {Scheme::cn_strang, Scheme::mild_duhamel}) {
        CAPTURE(static_cast<int>(scheme));
        SolverConfig cfg = base_config(scheme, h, 1.0 / 4096.0);
        p.u0 = sample_on_grid(cfg.L, cfg.h,
                              [](double x) { return std::exp(-x * x / 2.0); });
        const GridFunction ref = solve_potential(p, cfg).back();
        std::vector<double> dts, errs;
        for (double dt : {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0}) {
            cfg.dt = dt;
            dts.push_back(dt);
            errs.push_back(max_abs_diff(solve_potential(p, cfg).back(), ref));
        }
        const OrderResult order = order_of_accuracy(dts, errs);
        CHECK_FALSE(order.saturated);
        CHECK(order.rate >= 1.8);
    }
}

TEST_CASE("saturated refinement is flagged instead of fitted") {
    const std::vector<double> hs = {0.1, 0.05, 0.025};
    const std::vector<double> errs = {1e-15, 2e-15, 1.5e-15};
    const OrderResult order = order_of_accuracy(hs, errs);
    CHECK(order.saturated);
}

TEST_CASE("solution stays positive for positive data") {
    SolverConfig c = base_config(Scheme::cn_strang);
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 0.5); });
    p.potential = [](double x, double t) { return 2.0 * std::sin(5.0 * x + t); };
    p.horizon = 1.0;
    const GridFunction u = solve_potential(p, c).back();
    for (double v : u.values) CHECK(v > 0.0);
}

TEST_CASE("linearity in the initial data") {
    for (Scheme scheme : {Scheme::cn_strang, Scheme::mild_duhamel}) {
        CAPTURE(static_cast<int>(scheme));
        SolverConfig c = base_config(scheme);
        ParabolicProblem p;
        p.potential = [](double x, double t) { return std::cos(x + 2.0 * t); };
        p.horizon = 0.5;
        p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 1.0); });
        const GridFunction a = solve_potential(p, c).back();
        p.u0 = sample_on_grid(c.L, c.h, [](double x) { return std::cos(M_PI * x / 8.0); });
        const GridFunction b = solve_potential(p, c).back();
        ParabolicProblem ps = p;
        ps.u0 = sample_on_grid(c.L, c.h, [](double x) {
            return heat_kernel(x, 1.0) + std::cos(M_PI * x / 8.0);
        });
        const GridFunction s = solve_potential(ps, c).back();
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            worst = std::max(worst, std::abs(s.values[i] - a.values[i] - b.values[i]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("mass conservation for pure diffusion on the torus") {
    SolverConfig c = base_config(Scheme::cn_strang);
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return 1.0 + 0.5 * std::sin(M_PI * x / 4.0); });
    p.horizon = 1.0;
    const GridFunction u = solve_potential(p, c).back();
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        m0 += p.u0.values[i];
        m1 += u.values[i];
    }
    CHECK(m1 * c.h == doctest::Approx(m0 * c.h).epsilon(1e-12));
}

TEST_CASE("trajectory storage honours the stride") {
    SolverConfig c = base_config(Scheme::cn_strang, 1.0 / 32.0, 1.0 / 64.0);
    c.store_stride = 16;
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 1.0); });
    p.horizon = 1.0;
    const Trajectory traj = solve_potential(p, c);
    REQUIRE(traj.size() == 5);  // steps 0, 16, 32, 48, 64
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(1.0));
    CHECK(&traj.at_time(0.51) == &traj.slices[2]);
}

TEST_CASE("configuration validation") {
    SolverConfig c = base_config(Scheme::cn_strang);
    CHECK_NOTHROW(c.validate(1.0));
    SolverConfig bad = c;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(1.0), validation_error);
    bad = c;
    bad.dt = 0.3;  // horizon not a multiple of dt
    CHECK_THROWS_AS(bad.validate(1.0), validation_error);
    bad = c;
    bad.boundary = Boundary::decay_padded;
    bad.padding = 0.1;  // insufficient buffer for the horizon
    CHECK_THROWS_AS(bad.validate(1.0), validation_error);
}

TEST_CASE("mild scheme rejects stiff potentials it cannot iterate") {
    SolverConfig c = base_config(Scheme::mild_duhamel, 1.0 / 32.0, 0.25);
    c.picard_max_iters = 3;
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 1.0); });
    p.potential = [](double, double) { return 400.0; };  // contraction fails
    p.horizon = 1.0;
    CHECK_THROWS_AS(solve_potential(p, c), convergence_error);
}

TEST_CASE("padded boundary approximates the whole line") {
    SolverConfig c = base_config(Scheme::cn_strang);
    c.boundary = Boundary::decay_padded;
    c.padding = 8.0;  // L = 8 leaves x in [-8, 8]; compare inside [-2, 2]
    ParabolicProblem p;
    p.u0 = sample_on_grid(c.L, c.h, [](double x) { return heat_kernel(x, 0.5); },
                          Boundary::decay_padded);
    p.horizon = 0.5;
    const GridFunction u = solve_potential(p, c).back();
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u.x(i)) <= 2.0)
            worst = std::max(worst, std::abs(u.values[i] - heat_kernel(u.x(i), 1.0)));
    CHECK(worst < 1e-5);
}
