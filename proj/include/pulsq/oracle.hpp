#pragma once

// Independent cross-check path: the memory integrals are the unique periodic
// attractors of small linear ODEs, integrated here with an embedded
// Runge-Kutta scheme. Shares no numerics with the quadrature module.
//
//   d g/dt = -2 (F(t) - 1) g + 2 eps          with g = 1/n
//   d V/dt = -2 (1 + F(t) + M(t)) V + 1 + 2 n(t)

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "pulsq/errors.hpp"
#include "pulsq/model.hpp"

namespace pulsq {

enum class OdeKind { Generic, InversePhotonNumber, Variance, Coupled };

struct OdeProblem {
    std::function<void(double, const Eigen::ArrayXd&, Eigen::ArrayXd&)> rhs;
    Eigen::ArrayXd y0;
    double t0 = 0.0;
    OdeKind kind = OdeKind::Generic;
};

// One period of the attractor, sampled at phases j*T/N, plus how hard the
// transient had to be pushed to die out.
struct PeriodicSteadyState {
    Eigen::ArrayXd times;          // N phase points in [0, T)
    Eigen::ArrayXXd period_samples; // N x dim
    double period = 0.0;
    double residual = 0.0;         // relative sup-norm change over the last period
    long periods_elapsed = 0;

    // Trigonometric interpolation of one state component across the period.
    double value_at(double t, Eigen::Index dim = 0) const {
        TabulatedProfile p(period_samples.col(dim), 2.0 * std::numbers::pi / period);
        return p.value(t);
    }
};

struct OdeTrace {
    Eigen::ArrayXd times;
    Eigen::ArrayXXd values;
};

inline constexpr double kOdeOverflowGuard = 1e300;
inline constexpr long kMaxAttractorPeriods = 100'000;
inline constexpr int kAttractorSamples = 256;

namespace detail {

// Dormand-Prince 5(4) with FSAL and PI step-size control.
class Dopri5 {
  public:
    Dopri5(std::function<void(double, const Eigen::ArrayXd&, Eigen::ArrayXd&)> rhs,
           Eigen::Index dim, double rtol, double atol)
        : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {
        for (auto& k : k_) k.resize(dim);
        ytmp_.resize(dim);
        ynext_.resize(dim);
        yerr_.resize(dim);
    }

    // Advances y from t to exactly t_end. The step size persists across calls.
    void advance(double& t, Eigen::ArrayXd& y, double t_end) {
        if (t_end <= t) return;
        if (!have_k1_) {
            rhs_(t, y, k_[0]);
            have_k1_ = true;
        }
        if (h_ <= 0.0) h_ = (t_end - t) / 16.0;
        while (t < t_end) {
            double h = std::min(h_, t_end - t);
            bool hit_end = (h >= t_end - t);
            for (;;) {
                const double err = try_step(t, y, h);
                if (err <= 1.0) {
                    const double fac11 = std::pow(err, 0.2);
                    double fac = fac11 / std::pow(errold_, 0.08);
                    fac = std::max(0.2, std::min(10.0, fac / 0.9));
                    h_ = h / fac;
                    errold_ = std::max(err, 1e-4);
                    t = hit_end ? t_end : t + h;
                    y.swap(ynext_);
                    k_[0].swap(k_[6]); // FSAL
                    if (!y.isFinite().all() || y.abs().maxCoeff() > kOdeOverflowGuard)
                        throw OverflowError("state exceeded " + std::to_string(kOdeOverflowGuard) +
                                            " at t = " + std::to_string(t));
                    break;
                }
                const double fac11 = std::pow(err, 0.2);
                h /= std::min(5.0, fac11 / 0.9);
                hit_end = false;
                if (!(h > 16.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(t))))
                    throw NoConvergenceError("step size underflow at t = " + std::to_string(t));
            }
        }
    }

    // Forces re-evaluation of the first stage (after a time-coordinate jump).
    void reset() { have_k1_ = false; }

  private:
    double try_step(double t, const Eigen::ArrayXd& y, double h) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                                a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        ytmp_ = y + h * a21 * k_[0];
        rhs_(t + c2 * h, ytmp_, k_[1]);
        ytmp_ = y + h * (a31 * k_[0] + a32 * k_[1]);
        rhs_(t + c3 * h, ytmp_, k_[2]);
        ytmp_ = y + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
        rhs_(t + c4 * h, ytmp_, k_[3]);
        ytmp_ = y + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
        rhs_(t + c5 * h, ytmp_, k_[4]);
        ytmp_ = y + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
        rhs_(t + h, ytmp_, k_[5]);
        ynext_ = y + h * (a71 * k_[0] + a73 * k_[2] + a74 * k_[3] + a75 * k_[4] + a76 * k_[5]);
        rhs_(t + h, ynext_, k_[6]);
        yerr_ = h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);

        double sum = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(ynext_[i]));
            const double q = yerr_[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / double(y.size()));
    }

    std::function<void(double, const Eigen::ArrayXd&, Eigen::ArrayXd&)> rhs_;
    double rtol_, atol_;
    double h_ = 0.0;
    double errold_ = 1e-4;
    bool have_k1_ = false;
    Eigen::ArrayXd k_[7], ytmp_, ynext_, yerr_;
};

} // namespace detail

// Uniformly sampled transient from t0: n_samples points spanning [t0, t_end].
inline OdeTrace transient_trace(const OdeProblem& problem, double t_end, int n_samples,
                                double step_rtol = 1e-11, double step_atol = 1e-14) {
    if (n_samples < 2) throw ConfigError("transient_trace: need at least 2 samples");
    if (!(t_end > problem.t0)) throw ConfigError("transient_trace: need t_end > t0");
    OdeTrace out;
    out.times.resize(n_samples);
    out.values.resize(n_samples, problem.y0.size());

    detail::Dopri5 stepper(problem.rhs, problem.y0.size(), step_rtol, step_atol);
    Eigen::ArrayXd y = problem.y0;
    double t = problem.t0;
    for (int j = 0; j < n_samples; ++j) {
        const double tj =
            problem.t0 + (t_end - problem.t0) * double(j) / double(n_samples - 1);
        stepper.advance(t, y, tj);
        out.times[j] = tj;
        out.values.row(j) = y.transpose();
    }
    return out;
}

// Integrates period by period until the sampled state repeats to within
// tol (sup norm, relative to the state's own sup magnitude). The rhs must be
// periodic with the given period; the integration clock is wrapped back to 0
// after each period so sample phases align exactly across periods.
inline PeriodicSteadyState solve_to_periodic(const OdeProblem& problem, double period,
                                             double tol = 1e-9,
                                             long max_periods = kMaxAttractorPeriods,
                                             int samples_per_period = kAttractorSamples) {
    if (!(period > 0.0)) throw ConfigError("solve_to_periodic: need period > 0");
    if (!(tol >= 1e-12 && tol <= 1e-4))
        throw ConfigError("solve_to_periodic: tol must lie in [1e-12, 1e-4]");
    const int n = samples_per_period;
    if (n < kAttractorSamples)
        throw ConfigError("solve_to_periodic: need at least 256 samples per period");

    const Eigen::Index dim = problem.y0.size();
    // Local truncation control two orders below the attractor tolerance.
    detail::Dopri5 stepper(problem.rhs, dim, tol / 100.0, 1e-14);

    PeriodicSteadyState out;
    out.period = period;
    out.times.resize(n);
    for (int j = 0; j < n; ++j) out.times[j] = period * double(j) / double(n);
    out.period_samples.resize(n, dim);

    Eigen::ArrayXXd prev(n, dim);
    Eigen::ArrayXd y = problem.y0;
    // t0 only shifts where on the attractor we start; fold it into the phase.
    double t = reduce_to_period(problem.t0, period);
    if (t > 0.0) {
        stepper.advance(t, y, period);
        t = 0.0;
        stepper.reset();
    }

    for (long m = 1; m <= max_periods; ++m) {
        for (int j = 0; j < n; ++j) {
            stepper.advance(t, y, out.times[j]);
            out.period_samples.row(j) = y.transpose();
        }
        stepper.advance(t, y, period);
        t = 0.0;
        stepper.reset();

        if (m > 1) {
            const double diff = (out.period_samples - prev).abs().maxCoeff();
            const double scale = std::max(out.period_samples.abs().maxCoeff(), 1e-300);
            out.residual = diff / scale;
            out.periods_elapsed = m;
            if (out.residual < tol) return out;
        }
        prev = out.period_samples;
    }
    throw NoConvergenceError(
        "no periodic steady state after " + std::to_string(max_periods) +
        " periods (last residual " + std::to_string(out.residual) +
        "); near-zero mean damping leaves the transient undamped");
}

// g = 1/n obeys dg/dt = -2 (F(t) - 1) g + 2 eps; linear, so the attractor is
// reached from any positive g0.
inline OdeProblem make_photon_problem(const DimensionlessModel& model, double g0 = 1.0) {
    OdeProblem p;
    p.kind = OdeKind::InversePhotonNumber;
    p.y0 = Eigen::ArrayXd::Constant(1, g0);
    p.rhs = [model](double t, const Eigen::ArrayXd& y, Eigen::ArrayXd& dydt) {
        dydt[0] = -2.0 * (drive_value(model, t) - 1.0) * y[0] + 2.0 * model.epsilon;
    };
    return p;
}

// Cross-mode variance problem: n(t) comes from a caller-supplied provider
// (empty provider means n identically 0).
inline OdeProblem make_variance_problem(const DimensionlessModel& model,
                                        std::function<double(double)> n_of = {},
                                        std::function<double(double)> extra_damping = {},
                                        double v0 = 0.5) {
    OdeProblem p;
    p.kind = OdeKind::Variance;
    p.y0 = Eigen::ArrayXd::Constant(1, v0);
    p.rhs = [model, n_of = std::move(n_of), extra_damping = std::move(extra_damping)](
                double t, const Eigen::ArrayXd& y, Eigen::ArrayXd& dydt) {
        const double m = extra_damping ? extra_damping(t) : 0.0;
        const double source = n_of ? 1.0 + 2.0 * n_of(t) : 1.0;
        dydt[0] = -2.0 * (1.0 + drive_value(model, t) + m) * y[0] + source;
    };
    return p;
}

// Default coupled system [g, V]: the variance is sourced by the live photon
// number 1/g, so no externally tabulated n(t) enters this path at all.
inline OdeProblem make_coupled_problem(const DimensionlessModel& model,
                                       bool vacuum_source = false,
                                       std::function<double(double)> extra_damping = {},
                                       double g0 = 1.0, double v0 = 0.5) {
    OdeProblem p;
    p.kind = OdeKind::Coupled;
    p.y0.resize(2);
    p.y0 << g0, v0;
    p.rhs = [model, vacuum_source, extra_damping = std::move(extra_damping)](
                double t, const Eigen::ArrayXd& y, Eigen::ArrayXd& dydt) {
        const double f = drive_value(model, t);
        const double m = extra_damping ? extra_damping(t) : 0.0;
        dydt[0] = -2.0 * (f - 1.0) * y[0] + 2.0 * model.epsilon;
        const double source = vacuum_source ? 1.0 : 1.0 + 2.0 / y[0];
        dydt[1] = -2.0 * (1.0 + f + m) * y[1] + source;
    };
    return p;
}

} // namespace pulsq
