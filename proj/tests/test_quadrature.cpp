#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homoglab/quadrature.hpp"

using namespace homoglab;

TEST_CASE("gaussian integral over a wide interval") {
    const double v = integrate([](double x) { return std::exp(-x * x); }, -12.0, 12.0);
    CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("smooth reference values") {
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return 1.0 / (1.0 + x * x); }, -1.0, 1.0) ==
          doctest::Approx(M_PI / 2.0).epsilon(1e-13));
}

TEST_CASE("semi-infinite integrals via rational substitution") {
    const double g = integrate_to_inf([](double t) { return std::exp(-t); }, 0.0, 1.0);
    CHECK(g == doctest::Approx(1.0).epsilon(1e-10));

    // Gamma(1/2) integrand with an integrable endpoint singularity.
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    const double gh = integrate_to_inf(
        [](double t) { return std::exp(-t) / std::sqrt(t); }, 1e-14, 1.0, opt);
    CHECK(gh == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));

    // Heavy-ish tail with a mismatched scale hint still converges.
    const double p = integrate_to_inf(
        [](double t) { return 1.0 / ((1.0 + t) * (1.0 + t)); }, 0.0, 10.0);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("breakpoints resolve a kink exactly") {
    auto f = [](double x) { return std::abs(x - 0.3); };
    QuadOptions opt;
    opt.breakpoints = {0.3};
    const double v = integrate(f, 0.0, 1.0, opt);
    // \int_0^1 |x - 0.3| dx = (0.3^2 + 0.7^2) / 2.
    CHECK(v == doctest::Approx(0.29).epsilon(1e-13));
}

TEST_CASE("breakpoints outside the interval are ignored") {
    QuadOptions opt;
    opt.breakpoints = {-5.0, 0.5, 7.0};
    const double v = integrate([](double x) { return x * x; }, 0.0, 1.0, opt);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("zero-length interval") {
    CHECK(integrate([](double x) { return std::exp(x); }, 2.0, 2.0) == 0.0);
}

TEST_CASE("narrow spike far from the endpoints") {
    // Needs adaptivity: a Gaussian of width 1e-3 centred at 0.71.
    const double w = 1e-3;
    auto f = [w](double x) {
        const double u = (x - 0.71) / w;
        return std::exp(-u * u);
    };
    QuadOptions opt;
    opt.breakpoints = {0.71};
    const double v = integrate(f, 0.0, 1.0, opt);
    CHECK(v == doctest::Approx(w * std::sqrt(M_PI)).epsilon(1e-10));
}
