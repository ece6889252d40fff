#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pulsq/quadrature.hpp"

using namespace pulsq;

namespace {

// Composite Simpson rule: the independent cross-check for adaptive results.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("finite-interval adaptive quadrature on analytic integrals") {
    auto r1 = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r1.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r1.abs_error_estimate < 1e-9);

    auto r2 = integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, 30.0, 1e-12);
    CHECK(r2.value == doctest::Approx(1.0 - std::exp(-30.0)).epsilon(1e-11));

    // zero-length interval is exactly zero with no panels refined
    auto r3 = integrate_adaptive([](double x) { return std::cos(x); }, 1.0, 1.0);
    CHECK(r3.value == 0.0);
}

TEST_CASE("adaptive quadrature resolves a sharp interior peak") {
    // Lorentzian of width 1e-4 at x = 0.3: uniform panels would miss it.
    const double w = 1e-4, c = 0.3;
    auto f = [=](double x) { return w / (w * w + (x - c) * (x - c)); };
    const double exact = std::atan((1.0 - c) / w) + std::atan(c / w);
    auto r = integrate_adaptive(f, 0.0, 1.0, 1e-10);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
    CHECK(r.panel_count > 8);  // refinement actually happened
}

TEST_CASE("oscillatory integrand against the Simpson oracle") {
    // positive integrand: a pure relative target is meaningful here (a fully
    // cancelling oscillation would demand accuracy below the rounding floor
    // of the panel sums)
    auto f = [](double x) { return (2.0 + std::cos(10.0 * x)) * std::exp(-x * x); };
    const double oracle = simpson(f, -3.0, 3.0, 200000);
    auto r = integrate_adaptive(f, -3.0, 3.0, 1e-12);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("semi-infinite: pure exponential has a closed form") {
    // int_{-inf}^0 e^{2 tau} d tau = 1/2
    DecayEnvelope env{2.0, 1.0, 0.0};
    auto r = integrate_semi_infinite([](double t) { return std::exp(2.0 * t); }, env, 1e-12);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(r.truncation_point < 0.0);
    CHECK(r.abs_error_estimate < 1e-10);
}

TEST_CASE("semi-infinite: modulated kernel against frozen and live Simpson oracles") {
    // int_{-inf}^0 e^{2 tau} e^{0.9 sin(2 tau)} d tau, the shape of the photon
    // memory kernel at beta = 0.9, Delta = 2.
    auto f = [](double t) { return std::exp(2.0 * t + 0.9 * std::sin(2.0 * t)); };
    DecayEnvelope env{2.0, std::exp(0.9), std::numbers::pi};
    auto r = integrate_semi_infinite(f, env, 1e-12);

    // frozen value computed once with an independent implementation
    CHECK(r.value == doctest::Approx(0.34114289462617825).epsilon(1e-11));

    // live cross-check: Simpson on a deep truncation of the same integrand
    const double live = simpson(f, -40.0, 0.0, 400000);
    CHECK(r.value == doctest::Approx(live).epsilon(1e-11));
}

TEST_CASE("truncation point deepens monotonically with tighter tolerance") {
    auto f = [](double t) { return std::exp(1.5 * t) * (1.0 + 0.3 * std::cos(3.0 * t)); };
    DecayEnvelope env{1.5, 1.3, 2.0 * std::numbers::pi / 3.0};
    double prev = 0.0;
    for (double tol : {1e-4, 1e-7, 1e-10, 1e-13}) {
        auto r = integrate_semi_infinite(f, env, tol);
        CHECK(r.truncation_point < prev);
        prev = r.truncation_point;
    }
}

TEST_CASE("semi-infinite result is insensitive to a loose amplitude bound") {
    // Overstating the bound may deepen the window but must not change the value.
    auto f = [](double t) { return std::exp(2.0 * t) * std::cos(5.0 * t); };
    auto tight = integrate_semi_infinite(f, DecayEnvelope{2.0, 1.0, 1.0}, 1e-11);
    auto loose = integrate_semi_infinite(f, DecayEnvelope{2.0, 1e6, 1.0}, 1e-11);
    CHECK(tight.value == doctest::Approx(loose.value).epsilon(1e-9));
    // exact: int_{-inf}^0 e^{2t} cos(5t) dt = 2/(4+25)
    CHECK(tight.value == doctest::Approx(2.0 / 29.0).epsilon(1e-10));
}

TEST_CASE("invalid envelopes and tolerances are rejected") {
    auto f = [](double t) { return std::exp(t); };
    CHECK_THROWS_AS(integrate_semi_infinite(f, DecayEnvelope{0.0, 1.0, 0.0}, 1e-9),
                    InvalidEnvelopeError);
    CHECK_THROWS_AS(integrate_semi_infinite(f, DecayEnvelope{-1.0, 1.0, 0.0}, 1e-9),
                    InvalidEnvelopeError);
    CHECK_THROWS_AS(integrate_semi_infinite(f, DecayEnvelope{1.0, 0.0, 0.0}, 1e-9),
                    InvalidEnvelopeError);
    CHECK_THROWS_AS(integrate_semi_infinite(f, DecayEnvelope{1.0, 1.0, 0.0}, 1e-15), ConfigError);
    CHECK_THROWS_AS(integrate_semi_infinite(f, DecayEnvelope{1.0, 1.0, 0.0}, 1e-2), ConfigError);
    CHECK_NOTHROW(integrate_semi_infinite(f, DecayEnvelope{1.0, 1.0, 0.0}, 1e-9));
}

TEST_CASE("evaluation budget exhaustion raises NonConvergentError") {
    // Decay so slow and oscillation so fast that the window cannot be
    // resolved within the evaluation budget.
    auto f = [](double t) { return std::exp(1e-6 * t) * std::cos(1e4 * t); };
    DecayEnvelope env{1e-6, 1.0, 2.0 * std::numbers::pi / 1e4};
    CHECK_THROWS_AS(integrate_semi_infinite(f, env, 1e-12), NonConvergentError);
}

TEST_CASE("oscillation-aware seeding keeps fast kernels accurate") {
    // Period shorter than the decay time: initial panels must track the
    // oscillation, not the decay scale. Kept at moderate cancellation
    // (int |f| / |int f| ~ 250) so the relative target stays reachable.
    const double om = 20.0;
    auto f = [=](double t) { return std::exp(t) * std::cos(om * t); };
    DecayEnvelope env{1.0, 1.0, 2.0 * std::numbers::pi / om};
    auto r = integrate_semi_infinite(f, env, 1e-10);
    // exact: 1/(1+om^2)
    CHECK(r.value == doctest::Approx(1.0 / (1.0 + om * om)).epsilon(1e-8));
}

TEST_CASE("error estimate brackets the true error on analytic cases") {
    auto f = [](double t) { return std::exp(3.0 * t) * std::sin(7.0 * t); };
    // exact: int_{-inf}^0 e^{3t} sin(7t) dt = -7/(9+49)
    const double exact = -7.0 / 58.0;
    for (double tol : {1e-6, 1e-9, 1e-12}) {
        auto r = integrate_semi_infinite(f, DecayEnvelope{3.0, 1.0, 2 * std::numbers::pi / 7}, tol);
        CHECK(std::abs(r.value - exact) <= std::max(r.abs_error_estimate * 10.0, 1e-13));
        CHECK(std::abs(r.value - exact) <= tol * std::abs(exact) * 100.0);
    }
}
