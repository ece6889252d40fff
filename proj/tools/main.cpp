// Command-line front end: evaluate the photon-number and variance formulas,
// sweep variance minima, and cross-check everything against the ODE oracle,
// emitting self-describing CSV/JSON datasets.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pulsq/dataset.hpp"
#include "pulsq/errors.hpp"
#include "pulsq/model.hpp"
#include "pulsq/observables.hpp"
#include "pulsq/oracle.hpp"
#include "pulsq/run_config.hpp"
#include "pulsq/sweep.hpp"
#include "pulsq/version.hpp"

namespace {

using namespace pulsq;

constexpr double kCheckResidualGate = 1e-6;
constexpr double kOracleTol = 1e-9;

struct FlagBuffer {
    double gamma = 0, gamma_l = 0, k = 0, epsilon = 0;
    double f0 = 0, f1 = 0, delta = 0;
    double F0 = 0, F1 = 0, Delta = 0, phi = 0;
    double t_start = 0, t_end = 0;
    int samples = 256;
    std::string source_mode;
    double m0 = 0, rel_tol = kQuadratureDefaultRelTol;
    std::string format = "csv", out, config_path;
    bool oracle = false;
    std::string fbar_grid, f1_levels, delta_grid;

    CLI::Option* o_gamma = nullptr;
    CLI::Option* o_gamma_l = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_epsilon = nullptr;
    CLI::Option* o_f0 = nullptr;
    CLI::Option* o_f1 = nullptr;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_F0 = nullptr;
    CLI::Option* o_F1 = nullptr;
    CLI::Option* o_Delta = nullptr;
    CLI::Option* o_phi = nullptr;
    CLI::Option* o_m0 = nullptr;
    CLI::Option* o_rel_tol = nullptr;
    CLI::Option* o_t_start = nullptr;
    CLI::Option* o_t_end = nullptr;
    CLI::Option* o_samples = nullptr;
    CLI::Option* o_source_mode = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_config = nullptr;
    CLI::Option* o_oracle = nullptr;
    CLI::Option* o_fbar_grid = nullptr;
    CLI::Option* o_f1_levels = nullptr;
    CLI::Option* o_delta_grid = nullptr;
};

void add_model_flags(CLI::App* cmd, FlagBuffer& b) {
    b.o_gamma = cmd->add_option("--gamma", b.gamma, "Subharmonic decay rate (physical style)");
    b.o_gamma_l = cmd->add_option("--gamma-l", b.gamma_l, "Pump decay rate (physical style)");
    b.o_k = cmd->add_option("--k", b.k, "Down-conversion coupling (physical style)");
    b.o_epsilon =
        cmd->add_option("--epsilon", b.epsilon, "Fluctuation parameter k^2/(gamma*gamma_l)");
    b.o_f0 = cmd->add_option("--f0", b.f0, "Mean pump amplitude (physical style)");
    b.o_f1 = cmd->add_option("--f1", b.f1, "Pump modulation amplitude (physical style)");
    b.o_delta = cmd->add_option("--delta", b.delta, "Modulation frequency (physical style)");
    b.o_F0 = cmd->add_option("--F0", b.F0, "Mean drive over threshold, f0/f_th");
    b.o_F1 = cmd->add_option("--F1", b.F1, "Modulation over threshold, f1/f_th");
    b.o_Delta = cmd->add_option("--Delta", b.Delta, "Modulation frequency over gamma");
    b.o_phi = cmd->add_option("--phi", b.phi, "Modulation phase");
    b.o_m0 = cmd->add_option("--m0", b.m0, "Constant extra damping added to the variance kernel");
    b.o_rel_tol =
        cmd->add_option("--rel-tol", b.rel_tol, "Quadrature relative tolerance [1e-14, 1e-3]");
}

void add_output_flags(CLI::App* cmd, FlagBuffer& b) {
    b.o_format = cmd->add_option("--format", b.format, "Output format: csv or json")
                     ->check(CLI::IsMember({"csv", "json"}));
    b.o_out = cmd->add_option("--out", b.out, "Output file (default: stdout)");
    b.o_config = cmd->add_option("--config", b.config_path,
                                 "Flat key=value config file; flags take precedence");
}

void add_window_flags(CLI::App* cmd, FlagBuffer& b) {
    b.o_t_start = cmd->add_option("--t-start", b.t_start, "Window start (units of 1/gamma)");
    b.o_t_end = cmd->add_option("--t-end", b.t_end, "Window end (default: two periods)");
    b.o_samples = cmd->add_option("--samples", b.samples, "Number of trace samples");
}

int parse_int_value(const std::string& key, const std::string& value) {
    const double v = parse_double(value);
    const int i = int(v);
    if (double(i) != v) throw ConfigError("config file: '" + key + "' must be an integer");
    return i;
}

bool parse_bool_value(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigError("config file: '" + key + "' must be true/false or 1/0");
}

// Keys are the long flag names without the leading dashes; a key whose flag
// is absent from this subcommand is rejected, same as the flag would be.
void apply_config_entry(RunConfig& c, const FlagBuffer& b, const std::string& key,
                        const std::string& value) {
    const auto require = [&](const CLI::Option* o) {
        if (!o) throw ConfigError("config file: key '" + key + "' is not valid for this command");
    };
    if (key == "gamma") c.gamma = parse_double(value);
    else if (key == "gamma-l") c.gamma_l = parse_double(value);
    else if (key == "k") c.k = parse_double(value);
    else if (key == "epsilon") c.epsilon = parse_double(value);
    else if (key == "f0") c.f0 = parse_double(value);
    else if (key == "f1") c.f1 = parse_double(value);
    else if (key == "delta") c.delta = parse_double(value);
    else if (key == "F0") c.F0 = parse_double(value);
    else if (key == "F1") c.F1 = parse_double(value);
    else if (key == "Delta") c.Delta = parse_double(value);
    else if (key == "phi") c.phi = parse_double(value);
    else if (key == "m0") c.m0 = parse_double(value);
    else if (key == "rel-tol") c.rel_tol = parse_double(value);
    else if (key == "t-start") { require(b.o_t_start); c.t_start = parse_double(value); }
    else if (key == "t-end") { require(b.o_t_end); c.t_end = parse_double(value); }
    else if (key == "samples") { require(b.o_samples); c.samples = parse_int_value(key, value); }
    else if (key == "format") c.format = value;
    else if (key == "out") c.out = value;
    else if (key == "oracle") { require(b.o_oracle); c.oracle = parse_bool_value(key, value); }
    else if (key == "source-mode") {
        require(b.o_source_mode);
        c.source_mode = parse_source_mode(value);
    } else if (key == "fbar-grid") {
        require(b.o_fbar_grid);
        c.fbar_grid = parse_number_list(value);
    } else if (key == "f1-levels") {
        require(b.o_f1_levels);
        c.f1_levels = parse_number_list(value);
    } else if (key == "delta-grid") {
        require(b.o_delta_grid);
        c.delta_grid = parse_number_list(value);
    } else {
        throw ConfigError("config file: unknown key '" + key + "'");
    }
}

RunConfig to_config(const FlagBuffer& b) {
    RunConfig c;
    // Config file fills in first; flags given on the command line overlay it.
    if (b.o_config->count())
        for (const auto& [key, value] : read_config_file(b.config_path))
            apply_config_entry(c, b, key, value);

    const auto given = [](const CLI::Option* o) { return o && o->count() > 0; };
    if (given(b.o_gamma)) c.gamma = b.gamma;
    if (given(b.o_gamma_l)) c.gamma_l = b.gamma_l;
    if (given(b.o_k)) c.k = b.k;
    if (given(b.o_epsilon)) c.epsilon = b.epsilon;
    if (given(b.o_f0)) c.f0 = b.f0;
    if (given(b.o_f1)) c.f1 = b.f1;
    if (given(b.o_delta)) c.delta = b.delta;
    if (given(b.o_F0)) c.F0 = b.F0;
    if (given(b.o_F1)) c.F1 = b.F1;
    if (given(b.o_Delta)) c.Delta = b.Delta;
    if (given(b.o_phi)) c.phi = b.phi;
    if (given(b.o_t_start)) c.t_start = b.t_start;
    if (given(b.o_t_end)) c.t_end = b.t_end;
    if (given(b.o_samples)) c.samples = b.samples;
    if (given(b.o_source_mode)) c.source_mode = parse_source_mode(b.source_mode);
    if (given(b.o_m0)) c.m0 = b.m0;
    if (given(b.o_rel_tol)) c.rel_tol = b.rel_tol;
    if (given(b.o_format)) c.format = b.format;
    if (given(b.o_out)) c.out = b.out;
    if (given(b.o_oracle)) c.oracle = b.oracle;
    if (given(b.o_fbar_grid)) c.fbar_grid = parse_number_list(b.fbar_grid);
    if (given(b.o_f1_levels)) c.f1_levels = parse_number_list(b.f1_levels);
    if (given(b.o_delta_grid)) c.delta_grid = parse_number_list(b.delta_grid);
    return c;
}

void report_warnings(const ResolvedRun& run) {
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
}

void write_output(const Dataset& d, const ResolvedRun& run) {
    const std::string body = d.serialize(run.format);
    if (run.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(run.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: '" + run.out + "'");
    f << body;
    if (!f) throw ConfigError("failed writing output file: '" + run.out + "'");
    std::cerr << "wrote " << run.out << "\n";
}

std::function<double(double)> damping_of(const ResolvedRun& run) {
    if (run.m0 == 0.0) return {};
    const double m0 = run.m0;
    return [m0](double) { return m0; };
}

// Periodic extension of the oracle attractor, valid at any trace time.
std::vector<double> oracle_column(const PeriodicSteadyState& state, const Eigen::ArrayXd& times,
                                  Eigen::Index dim, bool invert) {
    std::vector<double> out(std::size_t(times.size()));
    for (Eigen::Index i = 0; i < times.size(); ++i) {
        const double v = state.value_at(times[i], dim);
        out[std::size_t(i)] = invert ? 1.0 / v : v;
    }
    return out;
}

std::vector<double> to_vector(const Eigen::ArrayXd& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

int cmd_photon(const RunConfig& config) {
    const ResolvedRun run = resolve(config, CommandDefaults{2.0, 1.5, true});
    report_warnings(run);

    Dataset d;
    emit_run_meta(d, run, "photon");
    d.set_meta("t_start", run.t_start);
    d.set_meta("t_end", run.t_end);
    d.set_meta("samples", long(run.samples));
    if (run.oracle) d.set_meta("oracle", "1");

    const Eigen::ArrayXd grid = uniform_grid(run.t_start, run.t_end, run.samples);
    d.add_column("t", to_vector(grid));

    const bool above = run.regime.kind == RegimeKind::Above;
    if (!above) {
        d.set_meta("note", "drive at or below threshold: photon number is identically 0");
        d.add_column("n", std::vector<double>(std::size_t(run.samples), 0.0));
    } else {
        const TimeTrace tr = trace(make_photon_spec(run.model, run.rel_tol), grid);
        d.add_column("n", to_vector(tr.values));
        if (run.oracle) {
            const double T = run.model.is_modulated() ? run.model.period() : 1.0;
            const PeriodicSteadyState state =
                solve_to_periodic(make_photon_problem(run.model), T, kOracleTol);
            d.add_column("n_oracle", oracle_column(state, grid, 0, true));
        }
    }
    write_output(d, run);
    return 0;
}

int cmd_variance(const RunConfig& config) {
    const ResolvedRun run = resolve(config, CommandDefaults{2.0, 1.5, true});
    report_warnings(run);

    Dataset d;
    emit_run_meta(d, run, "variance");
    d.set_meta("source_mode", "both");
    d.set_meta("t_start", run.t_start);
    d.set_meta("t_end", run.t_end);
    d.set_meta("samples", long(run.samples));
    if (run.oracle) d.set_meta("oracle", "1");

    const Eigen::ArrayXd grid = uniform_grid(run.t_start, run.t_end, run.samples);
    const std::function<double(double)> damping = damping_of(run);

    const TimeTrace literal =
        trace(VarianceSpec{run.model, SourceMode::Literal, damping, run.rel_tol}, grid);
    const TimeTrace vacuum =
        trace(VarianceSpec{run.model, SourceMode::VacuumSource, damping, run.rel_tol}, grid);
    d.set_meta("grid_min_V", literal.values.minCoeff());
    d.set_meta("grid_min_V_vacuum_source", vacuum.values.minCoeff());

    d.add_column("t", to_vector(grid));
    d.add_column("V", to_vector(literal.values));
    d.add_column("V_vacuum_source", to_vector(vacuum.values));

    if (run.oracle) {
        const double T = run.model.is_modulated() ? run.model.period() : 1.0;
        const bool literal_n = run.regime.kind == RegimeKind::Above;
        if (literal_n) {
            const PeriodicSteadyState coupled =
                solve_to_periodic(make_coupled_problem(run.model, false, damping), T, kOracleTol);
            d.add_column("V_oracle", oracle_column(coupled, grid, 1, false));
        } else {
            const PeriodicSteadyState plain =
                solve_to_periodic(make_variance_problem(run.model, {}, damping), T, kOracleTol);
            d.add_column("V_oracle", oracle_column(plain, grid, 0, false));
        }
        const PeriodicSteadyState vac =
            solve_to_periodic(make_variance_problem(run.model, {}, damping), T, kOracleTol);
        d.add_column("V_vacuum_source_oracle", oracle_column(vac, grid, 0, false));
    }
    write_output(d, run);
    return 0;
}

int cmd_minima(const RunConfig& config) {
    const ResolvedRun run = resolve(config, CommandDefaults{2.0, 0.0, false});
    report_warnings(run);

    const std::vector<double> fbars =
        run.fbar_grid.empty() ? default_fbar_grid() : run.fbar_grid;
    const std::vector<double> levels =
        run.f1_levels.empty() ? default_f1_levels() : run.f1_levels;
    const std::vector<SourceMode> modes =
        run.source_mode_given
            ? std::vector<SourceMode>{run.source_mode}
            : std::vector<SourceMode>{SourceMode::Literal, SourceMode::VacuumSource};

    const MinimaTable table = minima_table(fbars, levels, run.model.mod_freq,
                                           run.model.epsilon, modes, run.rel_tol, run.m0);

    Dataset d;
    emit_run_meta(d, run, "minima");
    d.set_meta("source_mode", run.source_mode_given ? to_string(run.source_mode) : "both");
    d.set_meta("fbar_grid", join_number_list(fbars));
    d.set_meta("f1_levels", join_number_list(levels));
    if (run.oracle) d.set_meta("oracle", "1");

    const std::size_t n = table.rows.size();
    std::vector<double> c_fbar(n), c_level(n), c_delta(n), c_eps(n), c_vmin(n), c_t0(n),
        c_samples(n);
    std::vector<std::string> c_mode(n), c_status(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MinimaRow& r = table.rows[i];
        c_fbar[i] = r.fbar_over_fth;
        c_level[i] = r.f1_over_fbar;
        c_delta[i] = r.Delta;
        c_eps[i] = r.epsilon;
        c_mode[i] = to_string(r.source_mode);
        c_vmin[i] = r.v_min;
        c_t0[i] = r.t0;
        c_samples[i] = double(r.achieved_at_samples);
        c_status[i] = r.status;
    }
    d.add_column("fbar_over_fth", c_fbar);
    d.add_column("f1_over_fbar", c_level);
    d.add_column("Delta", c_delta);
    d.add_column("epsilon", c_eps);
    d.add_text_column("source_mode", c_mode);
    d.add_column("v_min", c_vmin);
    d.add_column("t0", c_t0);
    d.add_column("achieved_at_samples", c_samples);
    d.add_text_column("status", c_status);

    if (run.oracle) {
        const std::function<double(double)> damping = damping_of(run);
        std::vector<double> c_oracle(n, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < n; ++i) {
            const MinimaRow& r = table.rows[i];
            if (r.status != "ok") continue;
            DimensionlessModel model;
            model.drive_mean = r.fbar_over_fth;
            model.drive_mod = r.f1_over_fbar * r.fbar_over_fth;
            model.mod_freq = r.Delta;
            model.epsilon = r.epsilon;
            c_oracle[i] = find_minimum_oracle(model, r.source_mode, damping, kOracleTol).v_min;
        }
        d.add_column("v_min_oracle", c_oracle);
    }
    write_output(d, run);
    return 0;
}

int cmd_scan_delta(const RunConfig& config) {
    const ResolvedRun run = resolve(config, CommandDefaults{1.0, 1.5, false});
    report_warnings(run);

    const std::vector<double> grid =
        run.delta_grid.empty() ? default_delta_grid() : run.delta_grid;
    const std::function<double(double)> damping = damping_of(run);
    const VarianceSpec base{run.model, run.source_mode, damping, run.rel_tol};
    const std::vector<DeltaScanRow> rows = asymptotic_scan(base, grid);

    Dataset d;
    emit_run_meta(d, run, "scan-delta");
    d.set_meta("source_mode", to_string(run.source_mode));
    d.set_meta("delta_grid", join_number_list(grid));
    d.set_meta("stationary_v_min", stationary_variance(run.model.drive_mean, run.m0));
    if (run.oracle) d.set_meta("oracle", "1");

    const std::size_t n = rows.size();
    std::vector<double> c_delta(n), c_vmin(n), c_t0(n), c_samples(n);
    std::vector<std::string> c_status(n);
    for (std::size_t i = 0; i < n; ++i) {
        c_delta[i] = rows[i].Delta;
        c_vmin[i] = rows[i].v_min;
        c_t0[i] = rows[i].t0;
        c_samples[i] = double(rows[i].achieved_at_samples);
        c_status[i] = rows[i].status;
    }
    d.add_column("Delta", c_delta);
    d.add_column("v_min", c_vmin);
    d.add_column("t0", c_t0);
    d.add_column("achieved_at_samples", c_samples);
    d.add_text_column("status", c_status);

    if (run.oracle) {
        std::vector<double> c_oracle(n, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].status != "ok") continue;
            DimensionlessModel model = run.model;
            model.mod_freq = rows[i].Delta;
            c_oracle[i] = find_minimum_oracle(model, run.source_mode, damping, kOracleTol).v_min;
        }
        d.add_column("v_min_oracle", c_oracle);
    }
    write_output(d, run);
    return 0;
}

int cmd_check(const RunConfig& config) {
    const ResolvedRun run = resolve(config, CommandDefaults{2.0, 1.5, false});
    report_warnings(run);

    const DimensionlessModel& model = run.model;
    const double T = model.is_modulated() ? model.period() : 1.0;
    const int n = kAttractorSamples;
    const std::function<double(double)> damping = damping_of(run);
    const bool above = run.regime.kind == RegimeKind::Above;
    const bool literal_n = above && run.source_mode == SourceMode::Literal;

    Eigen::ArrayXd phases(n);
    for (int j = 0; j < n; ++j) phases[j] = T * double(j) / double(n);

    Dataset d;
    emit_run_meta(d, run, "check");
    d.set_meta("source_mode", to_string(run.source_mode));
    d.set_meta("residual_gate", kCheckResidualGate);

    d.add_column("t", to_vector(phases));

    double resid_max = 0.0;
    auto residuals = [&](const std::vector<double>& a, const std::vector<double>& b,
                         const char* max_key, const char* mean_key) {
        double mx = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double r = std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300);
            mx = std::max(mx, r);
            mean += r;
        }
        mean /= double(a.size());
        d.set_meta(max_key, mx);
        d.set_meta(mean_key, mean);
        resid_max = std::max(resid_max, mx);
    };

    if (above) {
        const PhotonNumberSpec pspec = make_photon_spec(model, run.rel_tol);
        std::vector<double> n_quad(n);
        for (int j = 0; j < n; ++j) n_quad[std::size_t(j)] = photon_number(pspec, phases[j]);
        const PeriodicSteadyState pstate =
            solve_to_periodic(make_photon_problem(model), T, kOracleTol);
        std::vector<double> n_ode(n);
        for (int j = 0; j < n; ++j) n_ode[std::size_t(j)] = 1.0 / pstate.period_samples(j, 0);
        d.add_column("n", n_quad);
        d.add_column("n_oracle", n_ode);
        residuals(n_quad, n_ode, "residual_n_max", "residual_n_mean");
    } else {
        d.set_meta("note", "drive at or below threshold: photon check skipped (n = 0)");
    }

    std::function<double(double)> n_of;
    if (literal_n) n_of = PhotonProvider(make_photon_spec(model, run.rel_tol));
    const VarianceEvaluator v(VarianceSpec{model, run.source_mode, damping, run.rel_tol}, n_of);
    std::vector<double> v_quad(n);
    for (int j = 0; j < n; ++j) v_quad[std::size_t(j)] = v(phases[j]);

    std::vector<double> v_ode(n);
    if (literal_n) {
        const PeriodicSteadyState coupled =
            solve_to_periodic(make_coupled_problem(model, false, damping), T, kOracleTol);
        for (int j = 0; j < n; ++j) v_ode[std::size_t(j)] = coupled.period_samples(j, 1);
    } else {
        const PeriodicSteadyState plain =
            solve_to_periodic(make_variance_problem(model, {}, damping), T, kOracleTol);
        for (int j = 0; j < n; ++j) v_ode[std::size_t(j)] = plain.period_samples(j, 0);
    }
    d.add_column("V", v_quad);
    d.add_column("V_oracle", v_ode);
    residuals(v_quad, v_ode, "residual_v_max", "residual_v_mean");

    const bool pass = resid_max <= kCheckResidualGate;
    d.set_meta("pass", pass ? "1" : "0");
    write_output(d, run);
    if (!pass) {
        std::cerr << "check failed: max relative residual " << format_double(resid_max)
                  << " exceeds " << format_double(kCheckResidualGate) << "\n";
        return kExitResidualExceeded;
    }
    std::cerr << "check passed: max relative residual " << format_double(resid_max) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(pulsq::kToolName) +
                 " — periodically modulated OPO squeezing datasets"};
    app.set_version_flag("--version", std::string(pulsq::kToolVersion));
    app.require_subcommand(1);

    FlagBuffer b_photon, b_variance, b_minima, b_scan, b_check;

    CLI::App* photon = app.add_subcommand("photon", "Mean photon number trace n(t)");
    add_model_flags(photon, b_photon);
    add_window_flags(photon, b_photon);
    add_output_flags(photon, b_photon);
    b_photon.o_oracle = photon->add_flag("--oracle", b_photon.oracle, "Add the ODE-attractor column");

    CLI::App* variance = app.add_subcommand("variance", "Quadrature variance trace V(t)");
    add_model_flags(variance, b_variance);
    add_window_flags(variance, b_variance);
    add_output_flags(variance, b_variance);
    b_variance.o_oracle =
        variance->add_flag("--oracle", b_variance.oracle, "Add the ODE-attractor columns");

    CLI::App* minima = app.add_subcommand("minima", "Variance minima vs drive table");
    add_model_flags(minima, b_minima);
    add_output_flags(minima, b_minima);
    b_minima.o_source_mode =
        minima->add_option("--source-mode", b_minima.source_mode,
                           "Restrict rows to one source mode: literal or vacuum")
            ->check(CLI::IsMember({"literal", "vacuum"}));
    b_minima.o_fbar_grid = minima->add_option("--fbar-grid", b_minima.fbar_grid,
                                              "Comma-separated period-averaged drive ratios");
    b_minima.o_f1_levels = minima->add_option("--f1-levels", b_minima.f1_levels,
                                              "Comma-separated modulation depths f1/fbar");
    b_minima.o_oracle =
        minima->add_flag("--oracle", b_minima.oracle, "Recompute each row through the ODE oracle");

    CLI::App* scan = app.add_subcommand("scan-delta", "Variance minimum vs modulation frequency");
    add_model_flags(scan, b_scan);
    add_output_flags(scan, b_scan);
    b_scan.o_source_mode = scan->add_option("--source-mode", b_scan.source_mode,
                                            "Source term: literal or vacuum")
                               ->check(CLI::IsMember({"literal", "vacuum"}));
    b_scan.o_delta_grid =
        scan->add_option("--delta-grid", b_scan.delta_grid,
                         "Comma-separated modulation frequencies (must span [0.1, 100])");
    b_scan.o_oracle =
        scan->add_flag("--oracle", b_scan.oracle, "Recompute each row through the ODE oracle");

    CLI::App* check = app.add_subcommand("check", "Formula-vs-oracle residual report");
    add_model_flags(check, b_check);
    add_output_flags(check, b_check);
    b_check.o_source_mode = check->add_option("--source-mode", b_check.source_mode,
                                              "Variance source term: literal or vacuum")
                                ->check(CLI::IsMember({"literal", "vacuum"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (photon->parsed()) return cmd_photon(to_config(b_photon));
        if (variance->parsed()) return cmd_variance(to_config(b_variance));
        if (minima->parsed()) return cmd_minima(to_config(b_minima));
        if (scan->parsed()) return cmd_scan_delta(to_config(b_scan));
        if (check->parsed()) return cmd_check(to_config(b_check));
    } catch (const pulsq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
