#pragma once

// Physical parameters of the parametric oscillator, the harmonic pump
// profile, and the dimensionless reduction all evaluators work in.
// Units: rates in inverse time, drive amplitudes in units of the threshold
// amplitude gamma*gamma_pump/coupling, time in units of 1/gamma.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pulsq/errors.hpp"

namespace pulsq {

// Relative half-width of the at-threshold band; keeps floating-point
// classification deterministic at the boundary.
inline constexpr double kThresholdTol = 1e-9;

// Above this the perturbative fluctuation analysis loses accuracy.
inline constexpr double kEpsilonValidityBound = 1e-2;

struct ModelParams {
    double gamma = 1.0;      // subharmonic-mode decay rate
    double gamma_pump = 1.0; // pump-mode decay rate
    double coupling = 1.0;   // down-conversion coupling

    double epsilon() const { return coupling * coupling / (gamma * gamma_pump); }

    void validate() const {
        if (!(std::isfinite(gamma) && gamma > 0.0))
            throw ConfigError("gamma must be finite and > 0, got " + std::to_string(gamma));
        if (!(std::isfinite(gamma_pump) && gamma_pump > 0.0))
            throw ConfigError("gamma_pump must be finite and > 0, got " + std::to_string(gamma_pump));
        if (!(std::isfinite(coupling) && coupling > 0.0))
            throw ConfigError("coupling must be finite and > 0, got " + std::to_string(coupling));
        if (!(epsilon() < 1.0))
            throw ConfigError("epsilon = coupling^2/(gamma*gamma_pump) must be < 1, got " +
                              std::to_string(epsilon()));
    }

    std::vector<std::string> validity_warnings() const {
        std::vector<std::string> w;
        if (epsilon() >= kEpsilonValidityBound)
            w.push_back("epsilon = " + std::to_string(epsilon()) +
                        " >= 1e-2: fluctuation results are perturbative in epsilon and lose "
                        "accuracy here");
        return w;
    }
};

// Harmonic pump amplitude f(t) = mean + modulation*cos(frequency*t + phase).
struct DriveProfile {
    double mean = 0.0;
    double modulation = 0.0;
    double frequency = 0.0; // irrelevant when modulation == 0
    double phase = 0.0;

    bool is_modulated() const { return modulation > 0.0; }

    void validate() const {
        if (!(std::isfinite(mean) && mean >= 0.0))
            throw ConfigError("drive mean must be finite and >= 0, got " + std::to_string(mean));
        if (!(std::isfinite(modulation) && modulation >= 0.0))
            throw ConfigError("drive modulation must be finite and >= 0, got " +
                              std::to_string(modulation));
        if (!std::isfinite(phase))
            throw ConfigError("drive phase must be finite");
        if (is_modulated() && !(std::isfinite(frequency) && frequency > 0.0))
            throw ConfigError("drive frequency must be > 0 when modulation > 0, got " +
                              std::to_string(frequency));
    }
};

// Pump amplitude above which the zero-amplitude solution destabilizes.
inline double threshold(const ModelParams& params) {
    params.validate();
    return params.gamma * params.gamma_pump / params.coupling;
}

// Mean of the harmonic profile over one period; the cosine integrates to
// zero over a full period, so this is exact.
inline double period_average(const DriveProfile& drive) {
    drive.validate();
    return drive.mean;
}

enum class RegimeKind { Below, AtThreshold, Above };

inline const char* to_string(RegimeKind k) {
    switch (k) {
        case RegimeKind::Below: return "below";
        case RegimeKind::AtThreshold: return "at-threshold";
        case RegimeKind::Above: return "above";
    }
    return "?";
}

struct Regime {
    RegimeKind kind = RegimeKind::Below;
    double fbar_over_fth = 0.0;
};

inline Regime classify_ratio(double fbar_over_fth) {
    Regime r;
    r.fbar_over_fth = fbar_over_fth;
    if (fbar_over_fth < 1.0 - kThresholdTol)
        r.kind = RegimeKind::Below;
    else if (fbar_over_fth > 1.0 + kThresholdTol)
        r.kind = RegimeKind::Above;
    else
        r.kind = RegimeKind::AtThreshold;
    return r;
}

inline Regime classify(const ModelParams& params, const DriveProfile& drive) {
    return classify_ratio(period_average(drive) / threshold(params));
}

// Maps t into [0, period). std::remainder is exact, so times differing by an
// exact multiple of the period reduce to bit-identical results.
inline double reduce_to_period(double t, double period) {
    double r = std::remainder(t, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0; // r == period after rounding of the += above
    return r;
}

// Drive, rates, and time measured in threshold / gamma units.
struct DimensionlessModel {
    double drive_mean = 0.0; // f0 / f_th
    double drive_mod = 0.0;  // f1 / f_th
    double mod_freq = 0.0;   // delta / gamma
    double mod_phase = 0.0;
    double epsilon = 0.0; // coupling^2 / (gamma * gamma_pump)

    bool is_modulated() const { return drive_mod > 0.0; }
    double period() const { return 2.0 * std::numbers::pi / mod_freq; }

    void validate() const {
        if (!(std::isfinite(drive_mean) && drive_mean >= 0.0))
            throw ConfigError("drive_mean must be finite and >= 0");
        if (!(std::isfinite(drive_mod) && drive_mod >= 0.0))
            throw ConfigError("drive_mod must be finite and >= 0");
        if (!std::isfinite(mod_phase))
            throw ConfigError("mod_phase must be finite");
        if (is_modulated() && !(std::isfinite(mod_freq) && mod_freq > 0.0))
            throw ConfigError("mod_freq must be > 0 when drive_mod > 0");
        if (!(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < 1.0))
            throw ConfigError("epsilon must be in [0, 1)");
    }

    std::vector<std::string> validity_warnings() const {
        std::vector<std::string> w;
        if (epsilon >= kEpsilonValidityBound)
            w.push_back("epsilon = " + std::to_string(epsilon) +
                        " >= 1e-2: fluctuation results are perturbative in epsilon and lose "
                        "accuracy here");
        return w;
    }
};

inline DimensionlessModel nondimensionalize(const ModelParams& params, const DriveProfile& drive) {
    drive.validate();
    const double fth = threshold(params);
    DimensionlessModel m;
    m.drive_mean = drive.mean / fth;
    m.drive_mod = drive.modulation / fth;
    m.mod_freq = drive.frequency / params.gamma;
    m.mod_phase = drive.phase;
    m.epsilon = params.epsilon();
    return m;
}

inline Regime classify(const DimensionlessModel& model) {
    // The period-averaged dimensionless drive is drive_mean.
    return classify_ratio(model.drive_mean);
}

// F(t) = F0 + F1*cos(Delta*t + Phi), evaluated after time-domain phase
// reduction so that exact period shifts evaluate identically.
inline double drive_value(const DimensionlessModel& model, double t) {
    if (!model.is_modulated()) return model.drive_mean;
    const double tr = reduce_to_period(t, model.period());
    return model.drive_mean + model.drive_mod * std::cos(model.mod_freq * tr + model.mod_phase);
}

// One period of an arbitrary periodic profile, held as uniform samples with
// trigonometric interpolation. Extension point beyond the harmonic drive;
// only period_average-style use is needed by the rest of the code.
class TabulatedProfile {
public:
    TabulatedProfile(Eigen::ArrayXd samples, double frequency)
        : samples_(std::move(samples)), frequency_(frequency) {
        if (samples_.size() < 2) throw ConfigError("tabulated profile needs >= 2 samples");
        if (!(std::isfinite(frequency_) && frequency_ > 0.0))
            throw ConfigError("tabulated profile frequency must be > 0");
    }

    double period() const { return 2.0 * std::numbers::pi / frequency_; }
    const Eigen::ArrayXd& samples() const { return samples_; }

    // Spectrally accurate for smooth profiles: the uniform-grid mean equals
    // the trapezoid rule on a periodic function.
    double mean() const { return samples_.mean(); }

    // Barycentric trigonometric interpolation on the uniform grid.
    double value(double t) const {
        const long n = samples_.size();
        const double theta = 2.0 * std::numbers::pi * reduce_to_period(t, period()) / period();
        const bool even = (n % 2 == 0);
        double num = 0.0, den = 0.0;
        double sign = 1.0;
        for (long j = 0; j < n; ++j, sign = -sign) {
            const double half = 0.5 * (theta - 2.0 * std::numbers::pi * double(j) / double(n));
            const double s = std::sin(half);
            if (std::abs(s) < 1e-15) return samples_[j]; // on a node
            const double w = even ? sign * std::cos(half) / s : sign / s;
            num += w * samples_[j];
            den += w;
        }
        return num / den;
    }

private:
    Eigen::ArrayXd samples_;
    double frequency_;
};

inline double period_average(const TabulatedProfile& profile) { return profile.mean(); }

} // namespace pulsq
