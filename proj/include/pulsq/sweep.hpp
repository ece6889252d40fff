#pragma once

// Synchronized variance minima and the parameter sweeps built on them: the
// minima-vs-drive table across modulation depths and the modulation-frequency
// scan probing the fast/slow asymptotics.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pulsq/errors.hpp"
#include "pulsq/model.hpp"
#include "pulsq/observables.hpp"
#include "pulsq/oracle.hpp"

namespace pulsq {

struct MinimaResult {
    double v_min = 0.0;
    double t0 = 0.0;            // phase of the minimum within [0, T)
    long achieved_at_samples = 0; // coarse-scan resolution used
};

// Coarse scan picks the global basin (V over one period can be multimodal
// under strong modulation); golden-section polishes within it.
template <class F>
MinimaResult minimize_periodic(F&& f, double period, long coarse_samples = 1024,
                               double phase_tol_rel = 1e-6) {
    if (!(period > 0.0)) throw ConfigError("minimize_periodic: need period > 0");
    if (coarse_samples < 8) throw ConfigError("minimize_periodic: need >= 8 coarse samples");

    long best = 0;
    double vbest = std::numeric_limits<double>::infinity();
    for (long j = 0; j < coarse_samples; ++j) {
        const double v = f(period * double(j) / double(coarse_samples));
        if (v < vbest) {
            vbest = v;
            best = j;
        }
    }

    // Bracket one coarse step to each side; periodicity makes negative or
    // past-period arguments valid.
    double a = period * double(best - 1) / double(coarse_samples);
    double b = period * double(best + 1) / double(coarse_samples);
    static const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    const double tol = phase_tol_rel * period;
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    double tm = 0.5 * (a + b);
    double vm = f(tm);
    if (fc < vm) {
        vm = fc;
        tm = c;
    }
    if (fd < vm) {
        vm = fd;
        tm = d;
    }
    if (vbest < vm) {
        vm = vbest;
        tm = period * double(best) / double(coarse_samples);
    }
    return MinimaResult{vm, reduce_to_period(tm, period), coarse_samples};
}

// Global minimum of V over one period; by periodicity it recurs at every
// t0 + m*T. The unmodulated case is stationary, reported with t0 = 0.
inline MinimaResult find_minimum(const VarianceSpec& spec,
                                 const std::function<double(double)>& n_of = {},
                                 long coarse_samples = 1024) {
    const VarianceEvaluator v(spec, n_of);
    if (!spec.model.is_modulated()) return MinimaResult{v(0.0), 0.0, 1};
    return minimize_periodic([&](double t) { return v(t); }, spec.model.period(),
                             coarse_samples);
}

// Same minimum through the ODE path: drive the coupled (or vacuum-sourced)
// system to its attractor, then search its interpolant.
inline MinimaResult find_minimum_oracle(const DimensionlessModel& model, SourceMode mode,
                                        const std::function<double(double)>& extra_damping = {},
                                        double tol = 1e-9) {
    model.validate();
    const bool literal_n =
        mode == SourceMode::Literal && classify(model).kind == RegimeKind::Above;
    OdeProblem problem = literal_n ? make_coupled_problem(model, false, extra_damping)
                                   : make_variance_problem(model, {}, extra_damping);
    const Eigen::Index vdim = literal_n ? 1 : 0;
    const double period = model.is_modulated() ? model.period() : 1.0;
    const PeriodicSteadyState state = solve_to_periodic(problem, period, tol);
    if (!model.is_modulated())
        return MinimaResult{state.period_samples(0, vdim), 0.0, 1};
    return minimize_periodic([&](double t) { return state.value_at(t, vdim); }, period);
}

struct MinimaRow {
    double fbar_over_fth = 0.0;
    double f1_over_fbar = 0.0;
    double Delta = 0.0;
    double epsilon = 0.0;
    SourceMode source_mode = SourceMode::Literal;
    double v_min = std::numeric_limits<double>::quiet_NaN();
    double t0 = std::numeric_limits<double>::quiet_NaN();
    long achieved_at_samples = 0;
    std::string status = "ok"; // or the error kind marking a gap row
};

struct MinimaTable {
    std::vector<MinimaRow> rows;
};

inline const std::vector<double>& default_fbar_grid() {
    // The exact stationary-threshold point is excluded: its photon-number
    // integral is the known divergent configuration.
    static const std::vector<double> g = {0.5, 0.6, 0.7, 0.8, 0.9, 1.1, 1.2, 1.3, 1.4, 1.5};
    return g;
}

inline const std::vector<double>& default_f1_levels() {
    static const std::vector<double> g = {0.0, 0.75, 1.5};
    return g;
}

namespace detail {

inline int sweep_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PULSED_SQUEEZE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Index-addressed parallel loop: results land in caller-owned slots, so the
// output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t nthreads =
        std::min<std::size_t>(std::size_t(std::max(threads, 1)), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// One row per (fbar, f1 level) pair and source mode, ordered by parameter
// tuple. Rows whose evaluation fails are kept as gap markers carrying the
// error kind instead of aborting the table.
inline MinimaTable minima_table(const std::vector<double>& fbar_grid,
                                const std::vector<double>& f1_levels, double Delta,
                                double epsilon,
                                const std::vector<SourceMode>& modes = {SourceMode::Literal,
                                                                        SourceMode::VacuumSource},
                                double rel_tol = kQuadratureDefaultRelTol, double m0 = 0.0,
                                int threads = 0) {
    if (fbar_grid.empty() || f1_levels.empty() || modes.empty())
        throw ConfigError("minima table: grids must be nonempty");
    std::set<std::tuple<double, double, int>> seen;
    for (double fbar : fbar_grid)
        for (double level : f1_levels)
            for (SourceMode mode : modes)
                if (!seen.insert({fbar, level, int(mode)}).second)
                    throw ConfigError("minima table: duplicate parameter tuple");

    MinimaTable table;
    for (double fbar : fbar_grid)
        for (double level : f1_levels)
            for (SourceMode mode : modes) {
                MinimaRow row;
                row.fbar_over_fth = fbar;
                row.f1_over_fbar = level;
                row.Delta = Delta;
                row.epsilon = epsilon;
                row.source_mode = mode;
                table.rows.push_back(row);
            }

    std::function<double(double)> extra_damping;
    if (m0 != 0.0) extra_damping = [m0](double) { return m0; };

    detail::parallel_for(table.rows.size(), detail::sweep_threads(threads), [&](std::size_t i) {
        MinimaRow& row = table.rows[i];
        try {
            DimensionlessModel model;
            model.drive_mean = row.fbar_over_fth;
            model.drive_mod = row.f1_over_fbar * row.fbar_over_fth;
            model.mod_freq = Delta;
            model.epsilon = epsilon;
            model.validate();

            std::function<double(double)> n_of;
            if (row.source_mode == SourceMode::Literal &&
                classify(model).kind == RegimeKind::Above)
                n_of = PhotonProvider(make_photon_spec(model, rel_tol));

            const VarianceSpec spec{model, row.source_mode, extra_damping, rel_tol};
            const MinimaResult r = find_minimum(spec, n_of);
            row.v_min = r.v_min;
            row.t0 = r.t0;
            row.achieved_at_samples = r.achieved_at_samples;
        } catch (const Error& e) {
            row.status = e.kind();
        }
    });
    return table;
}

struct DeltaScanRow {
    double Delta = 0.0;
    double v_min = std::numeric_limits<double>::quiet_NaN();
    double t0 = std::numeric_limits<double>::quiet_NaN();
    long achieved_at_samples = 0;
    std::string status = "ok";
};

inline std::vector<double> default_delta_grid() {
    // Eight points per decade, 0.1 through 1000.
    std::vector<double> g;
    for (int k = 0; k <= 32; ++k) g.push_back(std::pow(10.0, -1.0 + double(k) / 8.0));
    return g;
}

// v_min as a function of modulation frequency at fixed drive; the grid must
// cover both the slow and fast asymptotic regions.
inline std::vector<DeltaScanRow> asymptotic_scan(const VarianceSpec& base,
                                                 const std::vector<double>& delta_grid,
                                                 int threads = 0) {
    if (delta_grid.empty()) throw ConfigError("delta scan: grid must be nonempty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0)) throw ConfigError("delta scan: frequencies must be > 0");
        if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
            throw ConfigError("delta scan: grid must be strictly increasing");
    }
    if (!(delta_grid.front() <= 0.1 && delta_grid.back() >= 100.0))
        throw ConfigError("delta scan: grid must span at least [0.1, 100]");
    if (!base.model.is_modulated())
        throw ConfigError("delta scan: needs a modulated drive (F1 > 0)");

    std::vector<DeltaScanRow> rows(delta_grid.size());
    detail::parallel_for(rows.size(), detail::sweep_threads(threads), [&](std::size_t i) {
        DeltaScanRow& row = rows[i];
        row.Delta = delta_grid[i];
        try {
            DimensionlessModel model = base.model;
            model.mod_freq = row.Delta;
            model.validate();

            std::function<double(double)> n_of;
            if (base.source_mode == SourceMode::Literal &&
                classify(model).kind == RegimeKind::Above)
                n_of = PhotonProvider(make_photon_spec(model, base.rel_tol));

            const VarianceSpec spec{model, base.source_mode, base.extra_damping, base.rel_tol};
            const MinimaResult r = find_minimum(spec, n_of);
            row.v_min = r.v_min;
            row.t0 = r.t0;
            row.achieved_at_samples = r.achieved_at_samples;
        } catch (const Error& e) {
            row.status = e.kind();
        }
    });
    return rows;
}

} // namespace pulsq
