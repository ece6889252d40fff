#include "pulsq/run_config.hpp"

#include <cmath>
#include <fstream>

#include "pulsq/errors.hpp"
#include "pulsq/version.hpp"

namespace pulsq {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

SourceMode parse_source_mode(const std::string& s) {
    if (s == "literal") return SourceMode::Literal;
    if (s == "vacuum") return SourceMode::VacuumSource;
    throw ConfigError("unknown source mode: '" + s + "' (expected literal or vacuum)");
}

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::size_t p = 0;
    while (true) {
        const std::size_t comma = s.find(',', p);
        out.push_back(parse_double(trim(s.substr(p, comma - p))));
        if (comma == std::string::npos) break;
        p = comma + 1;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(f, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config file: expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) throw ConfigError("config file: empty key in '" + stripped + "'");
        entries.emplace_back(key, trim(stripped.substr(eq + 1)));
    }
    return entries;
}

std::string join_number_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

ResolvedRun resolve(const RunConfig& config, const CommandDefaults& defaults) {
    const bool physical_cavity =
        config.gamma.has_value() || config.gamma_l.has_value() || config.k.has_value();
    const bool physical_drive =
        config.f0.has_value() || config.f1.has_value() || config.delta.has_value();
    const bool dimless = config.epsilon.has_value() || config.F0.has_value() ||
                         config.F1.has_value() || config.Delta.has_value();

    if ((physical_cavity || physical_drive) && dimless)
        throw ConfigError(
            "parameter styles are mutually exclusive: use --gamma/--gamma-l/--k with "
            "--f0/--f1/--delta, or --epsilon with --F0/--F1/--Delta");

    ResolvedRun run;
    if (physical_cavity || physical_drive) {
        if (!(config.gamma && config.gamma_l && config.k))
            throw ConfigError("physical style needs all of --gamma, --gamma-l, --k");
        if (!config.f0) throw ConfigError("physical style needs --f0");
        ModelParams params{*config.gamma, *config.gamma_l, *config.k};
        DriveProfile drive;
        drive.mean = *config.f0;
        drive.modulation = config.f1.value_or(0.0);
        if (drive.modulation > 0.0 && !config.delta)
            throw ConfigError("--f1 > 0 needs --delta");
        drive.frequency = config.delta.value_or(0.0);
        drive.phase = config.phi;
        run.model = nondimensionalize(params, drive);
        run.physical = params;
        run.physical_drive = drive;
        run.warnings = params.validity_warnings();
    } else {
        run.model.epsilon = config.epsilon.value_or(1e-8);
        run.model.drive_mean = config.F0.value_or(defaults.F0);
        run.model.drive_mod = config.F1.value_or(defaults.F1);
        run.model.mod_freq = config.Delta.value_or(2.0);
        run.model.mod_phase = config.phi;
        run.model.validate();
        run.warnings = run.model.validity_warnings();
    }
    run.regime = classify(run.model);

    if (defaults.needs_window) {
        run.t_start = config.t_start;
        run.t_end = config.t_end.value_or(
            config.t_start + (run.model.is_modulated() ? 2.0 * run.model.period() : 5.0));
        run.samples = config.samples;
        if (run.samples < 2) throw ConfigError("--samples must be at least 2");
        if (!(run.t_end > run.t_start)) throw ConfigError("need --t-end > --t-start");
    }

    run.source_mode = config.source_mode.value_or(SourceMode::Literal);
    run.source_mode_given = config.source_mode.has_value();
    run.m0 = config.m0;
    if (!std::isfinite(run.m0)) throw ConfigError("--m0 must be finite");
    run.rel_tol = config.rel_tol;
    if (!(run.rel_tol >= kQuadratureRelTolMin && run.rel_tol <= kQuadratureRelTolMax))
        throw ConfigError("--rel-tol must lie in [1e-14, 1e-3]");
    if (config.format != "csv" && config.format != "json")
        throw ConfigError("--format must be csv or json");
    run.format = config.format;
    run.out = config.out;
    run.oracle = config.oracle;
    run.fbar_grid = config.fbar_grid;
    run.f1_levels = config.f1_levels;
    run.delta_grid = config.delta_grid;
    return run;
}

void emit_run_meta(Dataset& d, const ResolvedRun& run, const std::string& command) {
    d.set_meta("tool", std::string(kToolName));
    d.set_meta("version", std::string(kToolVersion));
    d.set_meta("command", command);
    d.set_meta("epsilon", run.model.epsilon);
    d.set_meta("F0", run.model.drive_mean);
    d.set_meta("F1", run.model.drive_mod);
    d.set_meta("Delta", run.model.mod_freq);
    d.set_meta("phi", run.model.mod_phase);
    if (run.physical) {
        d.set_meta("gamma", run.physical->gamma);
        d.set_meta("gamma_l", run.physical->gamma_pump);
        d.set_meta("k", run.physical->coupling);
        d.set_meta("f_th", threshold(*run.physical));
        d.set_meta("f0", run.physical_drive->mean);
        d.set_meta("f1", run.physical_drive->modulation);
        d.set_meta("delta", run.physical_drive->frequency);
    }
    d.set_meta("regime", to_string(run.regime.kind));
    d.set_meta("fbar_over_fth", run.regime.fbar_over_fth);
    d.set_meta("m0", run.m0);
    d.set_meta("rel_tol", run.rel_tol);
}

std::pair<std::string, RunConfig> config_from_meta(const Dataset& d) {
    const std::string* command = d.find_meta("command");
    if (!command) throw ConfigError("dataset header has no 'command' key");

    RunConfig config;
    auto num = [&](const char* key) -> std::optional<double> {
        const std::string* v = d.find_meta(key);
        if (!v) return std::nullopt;
        return parse_double(*v);
    };
    config.epsilon = num("epsilon");
    config.F0 = num("F0");
    config.F1 = num("F1");
    config.Delta = num("Delta");
    if (auto v = num("phi")) config.phi = *v;
    if (auto v = num("m0")) config.m0 = *v;
    if (auto v = num("rel_tol")) config.rel_tol = *v;
    if (auto v = num("t_start")) config.t_start = *v;
    config.t_end = num("t_end");
    if (auto v = num("samples")) config.samples = int(*v);
    if (const std::string* v = d.find_meta("source_mode")) {
        if (*v != "both") config.source_mode = parse_source_mode(*v);
    }
    if (const std::string* v = d.find_meta("fbar_grid")) config.fbar_grid = parse_number_list(*v);
    if (const std::string* v = d.find_meta("f1_levels")) config.f1_levels = parse_number_list(*v);
    if (const std::string* v = d.find_meta("delta_grid"))
        config.delta_grid = parse_number_list(*v);
    if (const std::string* v = d.find_meta("oracle")) config.oracle = (*v == "1");
    return {*command, config};
}

} // namespace pulsq
