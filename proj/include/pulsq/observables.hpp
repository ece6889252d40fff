#pragma once

// The two central observables of the modulated-pump OPO model, evaluated in
// dimensionless form as memory-kernel integrals over the drive history:
//
//   n^{-1}(t) = 2 eps Int_{-inf}^0 exp(2 tau (F0-1))
//                  * exp((2 F1/Delta)[sin(Delta(t+tau)+Phi) - sin(Delta t+Phi)]) dtau
//   V(t)      = Int_{-inf}^0 exp(-2 Int_tau^0 (1 + F(t'+t) + M(t'+t)) dt')
//                  * S(tau + t) dtau,   S = 1 + 2 n  (Literal)  or  1 (VacuumSource)
//
// Both are the t -> infinity periodic attractors; t is interpreted modulo the
// drive period. The inner exponent of the harmonic drive is closed-form; only
// a caller-supplied extra damping M(t) falls back to nested integration.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pulsq/errors.hpp"
#include "pulsq/model.hpp"
#include "pulsq/quadrature.hpp"

namespace pulsq {

enum class SourceMode { Literal, VacuumSource };

inline const char* to_string(SourceMode m) {
    return m == SourceMode::Literal ? "literal" : "vacuum";
}

enum class Quantity { PhotonNumber, Variance };

inline const char* to_string(Quantity q) {
    return q == Quantity::PhotonNumber ? "photon_number" : "variance";
}

inline constexpr double kVacuumVariance = 0.5;
// Stationary-drive floor: V >= 0.25, with equality exactly at threshold.
inline constexpr double kStationaryVarianceFloor = 0.25;

// Closed forms for the unmodulated drive, used as references in tests and
// for the F1 = 0 fast paths of the sweep module.
inline double stationary_photon_number(double drive_mean, double epsilon) {
    return (drive_mean - 1.0) / epsilon;
}

inline double stationary_variance(double drive, double extra_damping = 0.0) {
    return 1.0 / (2.0 * (1.0 + drive + extra_damping));
}

struct PhotonNumberSpec {
    DimensionlessModel model;
    Regime regime; // normally classify(model); explicit so callers own the gate
    double rel_tol = kQuadratureDefaultRelTol;
};

inline PhotonNumberSpec make_photon_spec(const DimensionlessModel& model,
                                         double rel_tol = kQuadratureDefaultRelTol) {
    model.validate();
    return PhotonNumberSpec{model, classify(model), rel_tol};
}

struct VarianceSpec {
    DimensionlessModel model;
    SourceMode source_mode = SourceMode::Literal;
    std::function<double(double)> extra_damping; // empty means identically zero
    double rel_tol = kQuadratureDefaultRelTol;
};

// ---------------------------------------------------------------------------
// Photon number

// Memory integral g(t) = 1/n(t). Always evaluated by quadrature; the F1 = 0
// closed form is kept only as an external reference.
inline QuadratureResult photon_memory_integral(const PhotonNumberSpec& spec, double t) {
    const DimensionlessModel& m = spec.model;
    m.validate();
    if (spec.regime.kind != RegimeKind::Above)
        throw BelowThresholdError(
            "photon number is defined only above threshold (period-averaged drive ratio " +
            std::to_string(spec.regime.fbar_over_fth) + "); below it n = 0");

    const double rate = 2.0 * (m.drive_mean - 1.0);
    if (!(rate > 0.0))
        throw DivergentIntegralError(
            "photon memory integral diverges: mean gain margin F0 - 1 = " +
            std::to_string(m.drive_mean - 1.0) + " is not positive");

    if (!m.is_modulated()) {
        auto w = [&](double tau) { return 2.0 * m.epsilon * std::exp(rate * tau); };
        return integrate_semi_infinite(w, DecayEnvelope{rate, 2.0 * m.epsilon}, spec.rel_tol);
    }

    const double T = m.period();
    const double t_r = reduce_to_period(t, T);
    const double beta = 2.0 * m.drive_mod / m.mod_freq;
    const double s0 = std::sin(m.mod_freq * t_r + m.mod_phase);
    auto w = [&, t_r, beta, s0](double tau) {
        const double osc = std::sin(m.mod_freq * (t_r + tau) + m.mod_phase) - s0;
        return 2.0 * m.epsilon * std::exp(rate * tau + beta * osc);
    };
    const DecayEnvelope env{rate, 2.0 * m.epsilon * std::exp(2.0 * beta), T};
    return integrate_semi_infinite(w, env, spec.rel_tol);
}

inline double photon_number(const PhotonNumberSpec& spec, double t) {
    return 1.0 / photon_memory_integral(spec, t).value;
}

namespace detail {

// Real trigonometric interpolation built from uniform period samples; modes
// are dropped once their amplitude falls below drop_tol relative to the
// largest one (the sampled quantities are smooth, so the spectrum decays
// geometrically and a short series reproduces the samples to machine level).
class FourierSeries {
  public:
    FourierSeries() = default;

    FourierSeries(const Eigen::ArrayXd& samples, double period, double drop_tol = 1e-13)
        : period_(period) {
        const Eigen::Index n = samples.size();
        a0_ = samples.mean();
        const double theta = 2.0 * std::numbers::pi / double(n);
        double amp_max = std::abs(a0_);
        int low_run = 0;
        for (Eigen::Index k = 1; k <= n / 2; ++k) {
            // Angle-addition recurrence over the sample index.
            const double step = theta * double(k);
            const double cs = std::cos(step), sn = std::sin(step);
            double c = 1.0, s = 0.0, sum_c = 0.0, sum_s = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                sum_c += samples[j] * c;
                sum_s += samples[j] * s;
                const double cn = c * cs - s * sn;
                s = s * cs + c * sn;
                c = cn;
            }
            const double ak = 2.0 * sum_c / double(n);
            const double bk = 2.0 * sum_s / double(n);
            ak_.push_back(ak);
            bk_.push_back(bk);
            const double amp = std::hypot(ak, bk);
            amp_max = std::max(amp_max, amp);
            low_run = (amp < drop_tol * amp_max) ? low_run + 1 : 0;
            if (low_run >= 8) break;
        }
        while (!ak_.empty() &&
               std::hypot(ak_.back(), bk_.back()) < drop_tol * amp_max) {
            ak_.pop_back();
            bk_.pop_back();
        }
    }

    double value(double t) const {
        const double theta = 2.0 * std::numbers::pi * t / period_;
        const double cs = std::cos(theta), sn = std::sin(theta);
        double c = cs, s = sn, acc = a0_;
        for (std::size_t k = 0; k < ak_.size(); ++k) {
            acc += ak_[k] * c + bk_[k] * s;
            const double cn = c * cs - s * sn;
            s = s * cs + c * sn;
            c = cn;
        }
        return acc;
    }

    double mean() const { return a0_; }
    std::size_t modes() const { return ak_.size(); }

  private:
    double period_ = 1.0;
    double a0_ = 0.0;
    std::vector<double> ak_, bk_;
};

} // namespace detail

// Photon-number provider for the variance integrand. n is periodic, so by
// default it is tabulated once per period and interpolated; the exact mode
// re-evaluates the quadrature per call (slow, used for oracle comparisons).
class PhotonProvider {
  public:
    explicit PhotonProvider(const PhotonNumberSpec& spec, bool memoize = true,
                            int samples_per_period = 4096)
        : spec_(spec), memoized_(memoize && spec.model.is_modulated()) {
        if (!spec_.model.is_modulated()) {
            constant_ = photon_number(spec_, 0.0);
            max_ = constant_;
            return;
        }
        if (!memoized_) {
            // Period max is still needed for integration envelopes.
            double mx = 0.0;
            const double T = spec_.model.period();
            for (int j = 0; j < 64; ++j)
                mx = std::max(mx, photon_number(spec_, T * double(j) / 64.0));
            max_ = 1.05 * mx;
            return;
        }
        const double T = spec_.model.period();
        Eigen::ArrayXd log_n(samples_per_period);
        double log_max = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < samples_per_period; ++j) {
            log_n[j] = std::log(photon_number(spec_, T * double(j) / double(samples_per_period)));
            log_max = std::max(log_max, log_n[j]);
        }
        // Interpolating log n keeps the relative error flat even when n
        // swings over several e-folds within a period.
        series_ = detail::FourierSeries(log_n, T);
        max_ = 1.05 * std::exp(log_max);
    }

    double operator()(double t) const {
        if (!spec_.model.is_modulated()) return constant_;
        if (memoized_) return std::exp(series_.value(reduce_to_period(t, spec_.model.period())));
        return photon_number(spec_, t);
    }

    bool memoized() const { return memoized_; }
    double max_over_period() const { return max_; }

  private:
    PhotonNumberSpec spec_;
    bool memoized_ = false;
    double constant_ = 0.0;
    double max_ = 0.0;
    detail::FourierSeries series_;
};

// ---------------------------------------------------------------------------
// Variance

class VarianceEvaluator {
  public:
    // n_of may be empty, meaning n identically 0 (the at/below-threshold
    // prescription). It is ignored entirely for VacuumSource.
    VarianceEvaluator(VarianceSpec spec, std::function<double(double)> n_of = {})
        : spec_(std::move(spec)), n_of_(std::move(n_of)) {
        const DimensionlessModel& m = spec_.model;
        m.validate();

        if (spec_.extra_damping) {
            if (m.is_modulated()) {
                const double T = m.period();
                for (double x : {0.13 * T, 0.57 * T}) {
                    const double d = std::abs(spec_.extra_damping(x + T) - spec_.extra_damping(x));
                    const double sc = std::max(1.0, std::abs(spec_.extra_damping(x)));
                    if (d > 1e-8 * sc)
                        throw ConfigError("extra damping must be periodic with the drive period");
                }
                damping_mean_ =
                    integrate_adaptive(spec_.extra_damping, 0.0, T, 1e-10).value / T;
                double dev = 0.0;
                for (int j = 0; j < 128; ++j)
                    dev = std::max(dev,
                                   std::abs(spec_.extra_damping(T * double(j) / 128.0) - damping_mean_));
                damping_wander_ = T * dev; // bounds |Int (M - mean)| over any window
            } else {
                const double m0 = spec_.extra_damping(0.0);
                for (double x : {0.7, 1.3}) {
                    if (std::abs(spec_.extra_damping(x) - m0) > 1e-8 * std::max(1.0, std::abs(m0)))
                        throw ConfigError(
                            "extra damping must be constant when the drive is unmodulated");
                }
                damping_mean_ = m0;
            }
        }

        rate_ = 2.0 * (1.0 + m.drive_mean + damping_mean_);
        if (!(rate_ > 0.0))
            throw NegativeDecayError(
                "variance memory integral diverges: period-mean damping 1 + F0 + mean(M) = " +
                std::to_string(1.0 + m.drive_mean + damping_mean_) + " is not positive");

        double n_max = 0.0;
        if (spec_.source_mode == SourceMode::Literal && n_of_) {
            if (m.is_modulated()) {
                const double T = m.period();
                for (int j = 0; j < 128; ++j)
                    n_max = std::max(n_max, n_of_(T * double(j) / 128.0));
                n_max *= 1.10;
            } else {
                n_max = n_of_(0.0);
            }
        }
        source_max_ = 1.0 + 2.0 * n_max;
    }

    double operator()(double t) const { return memory_integral(t).value; }

    QuadratureResult memory_integral(double t) const {
        const DimensionlessModel& m = spec_.model;
        const bool mod = m.is_modulated();
        const double T = mod ? m.period() : 0.0;
        const double t_r = mod ? reduce_to_period(t, T) : 0.0;
        const double beta = mod ? 2.0 * m.drive_mod / m.mod_freq : 0.0;
        const double s0 = mod ? std::sin(m.mod_freq * t_r + m.mod_phase) : 0.0;

        const bool literal = spec_.source_mode == SourceMode::Literal && bool(n_of_);
        auto w = [&, t_r, beta, s0, literal](double tau) {
            double expo = rate_ * tau - 2.0 * damping_mean_ * tau;
            if (mod)
                expo += beta * (std::sin(m.mod_freq * (t_r + tau) + m.mod_phase) - s0);
            if (spec_.extra_damping)
                expo -= 2.0 * integrate_adaptive(
                                   [&](double u) { return spec_.extra_damping(u + t_r); }, tau,
                                   0.0, 1e-10)
                                  .value;
            const double s = literal ? 1.0 + 2.0 * n_of_(t_r + tau) : 1.0;
            return std::exp(expo) * s;
        };

        const double bound =
            source_max_ * std::exp(2.0 * beta + 2.0 * damping_wander_);
        return integrate_semi_infinite(w, DecayEnvelope{rate_, bound, T}, spec_.rel_tol);
    }

    const VarianceSpec& spec() const { return spec_; }

  private:
    VarianceSpec spec_;
    std::function<double(double)> n_of_;
    double damping_mean_ = 0.0;
    double damping_wander_ = 0.0;
    double source_max_ = 1.0;
    double rate_ = 2.0;
};

inline double variance(const VarianceSpec& spec, const std::function<double(double)>& n_of,
                       double t) {
    return VarianceEvaluator(spec, n_of)(t);
}

// ---------------------------------------------------------------------------
// Traces

struct TimeTrace {
    Eigen::ArrayXd times;
    Eigen::ArrayXd values;
    Quantity quantity = Quantity::PhotonNumber;

    void validate() const {
        if (times.size() != values.size())
            throw ConfigError("trace times and values differ in length");
        if (times.size() == 0) throw ConfigError("trace is empty");
        for (Eigen::Index i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw ConfigError("trace times must be strictly increasing");
        for (Eigen::Index i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i]) || values[i] < 0.0)
                throw ConfigError("trace values must be finite and non-negative");
    }
};

inline Eigen::ArrayXd uniform_grid(double t_start, double t_end, int samples) {
    if (samples < 2) throw ConfigError("need at least 2 samples");
    if (!(t_end > t_start)) throw ConfigError("need t_end > t_start");
    Eigen::ArrayXd g(samples);
    for (int j = 0; j < samples; ++j)
        g[j] = t_start + (t_end - t_start) * double(j) / double(samples - 1);
    return g;
}

namespace detail {

inline void check_grid(const Eigen::ArrayXd& t_grid) {
    if (t_grid.size() == 0) throw ConfigError("time grid is empty");
    for (Eigen::Index i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ConfigError("time grid must be strictly increasing");
}

} // namespace detail

inline TimeTrace trace(const PhotonNumberSpec& spec, const Eigen::ArrayXd& t_grid) {
    detail::check_grid(t_grid);
    TimeTrace out;
    out.quantity = Quantity::PhotonNumber;
    out.times = t_grid;
    out.values.resize(t_grid.size());
    const PhotonProvider n_of(spec);
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) out.values[i] = n_of(t_grid[i]);
    out.validate();
    return out;
}

inline TimeTrace trace(const VarianceSpec& spec, const std::function<double(double)>& n_of,
                       const Eigen::ArrayXd& t_grid) {
    detail::check_grid(t_grid);
    TimeTrace out;
    out.quantity = Quantity::Variance;
    out.times = t_grid;
    out.values.resize(t_grid.size());
    const VarianceEvaluator v(spec, n_of);
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) out.values[i] = v(t_grid[i]);
    out.validate();
    return out;
}

// Builds the photon provider the source term needs: memoized above threshold
// for the Literal mode, identically zero otherwise (n = 0 prescription).
inline TimeTrace trace(const VarianceSpec& spec, const Eigen::ArrayXd& t_grid) {
    spec.model.validate();
    std::function<double(double)> n_of;
    if (spec.source_mode == SourceMode::Literal &&
        classify(spec.model).kind == RegimeKind::Above)
        n_of = PhotonProvider(make_photon_spec(spec.model, spec.rel_tol));
    return trace(spec, n_of, t_grid);
}

} // namespace pulsq
