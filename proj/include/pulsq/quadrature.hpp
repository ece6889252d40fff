#pragma once

// Adaptive Gauss-Kronrod quadrature for the semi-infinite memory integrals:
// integrands on tau <= 0 that decay like C*exp(rate*tau) under a bounded
// oscillatory modulation. Truncation is chosen from the envelope so the
// discarded tail stays below a fixed fraction of the requested tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "pulsq/errors.hpp"

namespace pulsq {

// |w(tau)| <= amplitude_bound * exp(rate * tau) for tau <= 0.
// oscillation_period > 0 additionally asks the initial panels to resolve
// that scale (the integrands mix an exponential and a sinusoidal scale).
struct DecayEnvelope {
    double rate = 0.0;
    double amplitude_bound = 1.0;
    double oscillation_period = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    double truncation_point = 0.0;
    long panel_count = 0;
};

inline constexpr long kQuadratureEvalBudget = 1'000'000;
inline constexpr double kQuadratureRelTolMin = 1e-14;
inline constexpr double kQuadratureRelTolMax = 1e-3;
inline constexpr double kQuadratureDefaultRelTol = 1e-9;

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct PanelEstimate {
    double integral = 0.0;
    double error = 0.0;
};

// One Gauss-Kronrod 7/15 panel with QUADPACK's rescaled error estimate.
template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    double resk = 0.0, resg = 0.0;
    const double fc = f(center);
    fv[14] = fc;
    resk += kGK15WeightsK[7] * fc;
    resg += kGK15WeightsG[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGK15Nodes[i];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        resk += kGK15WeightsK[i] * (f1 + f2);
        if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * (f1 + f2);
    }

    double resabs = kGK15WeightsK[7] * std::abs(fc);
    for (int i = 0; i < 7; ++i)
        resabs += kGK15WeightsK[i] * (std::abs(fv[2 * i]) + std::abs(fv[2 * i + 1]));

    const double reskh = 0.5 * resk;
    double resasc = kGK15WeightsK[7] * std::abs(fc - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kGK15WeightsK[i] *
                  (std::abs(fv[2 * i] - reskh) + std::abs(fv[2 * i + 1] - reskh));

    PanelEstimate out;
    out.integral = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(eps50 * resabs, err);
    out.error = err;
    return out;
}

struct Panel {
    double a = 0.0, b = 0.0;
    double integral = 0.0;
    double error = 0.0;
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error; // top() = largest error
        return x.a > y.a;                                 // deterministic tie-break
    }
};

// Global-heap adaptive refinement on [a, b]. Splits the worst panel until
// the summed error estimate meets the target or the shared budget runs out.
template <class F>
PanelEstimate adaptive_on_interval(F&& f, double a, double b, double rel_tol,
                                   double initial_width, long& evals_left,
                                   std::vector<Panel>& final_panels) {
    const double width = b - a;
    long count = 1;
    if (initial_width > 0.0 && width > initial_width)
        count = std::min<long>(2048, (long)std::ceil(width / initial_width));

    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
    double total = 0.0, err_sum = 0.0;
    for (long i = 0; i < count; ++i) {
        const double pa = a + width * double(i) / double(count);
        const double pb = (i + 1 == count) ? b : a + width * double(i + 1) / double(count);
        evals_left -= 15;
        if (evals_left < 0)
            throw NonConvergentError("quadrature evaluation budget exhausted while seeding " +
                                     std::to_string(count) + " panels on [" + std::to_string(a) +
                                     ", " + std::to_string(b) + "]");
        const PanelEstimate e = gk15_panel(f, pa, pb);
        heap.push(Panel{pa, pb, e.integral, e.error});
        total += e.integral;
        err_sum += e.error;
    }

    const double abs_floor = 1e-31;
    while (!heap.empty() && err_sum > std::max(rel_tol * std::abs(total), abs_floor)) {
        if (evals_left < 30)
            throw NonConvergentError(
                "quadrature evaluation budget exhausted at error estimate " +
                std::to_string(err_sum) + " (target " +
                std::to_string(std::max(rel_tol * std::abs(total), abs_floor)) + ")");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval narrowed to machine resolution; accept its estimate.
            final_panels.push_back(worst);
            err_sum -= worst.error;
            continue;
        }
        evals_left -= 30;
        const PanelEstimate left = gk15_panel(f, worst.a, mid);
        const PanelEstimate right = gk15_panel(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        err_sum += left.error + right.error - worst.error;
        heap.push(Panel{worst.a, mid, left.integral, left.error});
        heap.push(Panel{mid, worst.b, right.integral, right.error});
    }

    while (!heap.empty()) {
        final_panels.push_back(heap.top());
        heap.pop();
    }
    // Deterministic, position-ordered summation of the final panel set.
    std::sort(final_panels.begin(), final_panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double sum = 0.0, comp = 0.0, errs = 0.0;
    for (const Panel& p : final_panels) {
        const double y = p.integral - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        errs += p.error;
    }
    return PanelEstimate{sum, errs};
}

} // namespace detail

// Adaptive integration of f over the finite interval [a, b].
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    double rel_tol = kQuadratureDefaultRelTol,
                                    double initial_width = 0.0) {
    if (!(b >= a)) throw ConfigError("integrate_adaptive: need b >= a");
    if (a == b) return QuadratureResult{0.0, 0.0, a, 0};
    long evals_left = kQuadratureEvalBudget;
    std::vector<detail::Panel> panels;
    const detail::PanelEstimate e =
        detail::adaptive_on_interval(f, a, b, rel_tol, initial_width, evals_left, panels);
    return QuadratureResult{e.integral, e.error, a, (long)panels.size()};
}

// Integral of w over (-inf, 0]. The envelope picks the truncation point so
// the discarded tail C*exp(rate*tau_min)/rate is at most a tenth of the
// requested tolerance times the value estimate.
template <class F>
QuadratureResult integrate_semi_infinite(F&& w, const DecayEnvelope& envelope, double rel_tol) {
    if (!(std::isfinite(envelope.rate)) || envelope.rate <= 0.0)
        throw InvalidEnvelopeError("envelope decay rate must be > 0, got " +
                                   std::to_string(envelope.rate) +
                                   " (zero mean damping makes the memory integral diverge)");
    if (!(std::isfinite(envelope.amplitude_bound)) || envelope.amplitude_bound <= 0.0)
        throw InvalidEnvelopeError("envelope amplitude bound must be > 0");
    if (!(rel_tol >= kQuadratureRelTolMin && rel_tol <= kQuadratureRelTolMax))
        throw ConfigError("quadrature rel_tol must lie in [1e-14, 1e-3], got " +
                          std::to_string(rel_tol));

    const double r = envelope.rate;
    const double C = envelope.amplitude_bound;
    const double w0 = (envelope.oscillation_period > 0.0)
                          ? std::min(1.0 / r, envelope.oscillation_period / 8.0)
                          : 1.0 / r;

    long evals_left = kQuadratureEvalBudget;

    // Pilot pass over the bulk of the envelope mass to scale the tail bound.
    const double pilot_left = -8.0 / r;
    std::vector<detail::Panel> pilot_panels;
    const detail::PanelEstimate pilot =
        detail::adaptive_on_interval(w, pilot_left, 0.0, 1e-3, w0, evals_left, pilot_panels);
    double scale = std::max(std::abs(pilot.integral), 1e-300);

    double value = 0.0, err = 0.0;
    long panel_count = 0;
    double tau_min = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
        const double target_tail = 0.1 * rel_tol * scale;
        double want = std::log(target_tail * r / C) / r;
        if (!(want < pilot_left)) want = pilot_left;
        tau_min = want;

        std::vector<detail::Panel> panels;
        const detail::PanelEstimate full =
            detail::adaptive_on_interval(w, tau_min, 0.0, rel_tol, w0, evals_left, panels);
        value = full.integral;
        err = full.error;
        panel_count = (long)panels.size();

        const double tail = C * std::exp(r * tau_min) / r;
        if (tail <= 0.1 * rel_tol * std::abs(value) || std::abs(value) >= scale) {
            err += tail;
            break;
        }
        // Value came out smaller than the pilot suggested; push the
        // truncation further left and redo.
        scale = std::max(std::abs(value), 1e-300);
        if (pass == 3) err += tail;
    }

    return QuadratureResult{value, err, tau_min, panel_count};
}

} // namespace pulsq
