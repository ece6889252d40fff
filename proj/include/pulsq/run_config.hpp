#pragma once

// Shared CLI plumbing: raw flag values, their resolution into a validated
// dimensionless model plus run settings, and the metadata block that makes
// every emitted dataset self-describing (header alone reproduces the run).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulsq/dataset.hpp"
#include "pulsq/model.hpp"
#include "pulsq/observables.hpp"

namespace pulsq {

struct RunConfig {
    // Cavity, physical style (all three together) ...
    std::optional<double> gamma, gamma_l, k;
    // ... or dimensionless style.
    std::optional<double> epsilon;

    // Drive, physical style (with the cavity's physical style) ...
    std::optional<double> f0, f1, delta;
    // ... or dimensionless style.
    std::optional<double> F0, F1, Delta;
    double phi = 0.0;

    double t_start = 0.0;
    std::optional<double> t_end; // default: two periods (or 5 when unmodulated)
    int samples = 256;

    std::optional<SourceMode> source_mode;
    double m0 = 0.0;
    double rel_tol = kQuadratureDefaultRelTol;
    std::string format = "csv";
    std::string out; // empty = stdout
    bool oracle = false;

    std::vector<double> fbar_grid;  // empty = default grid
    std::vector<double> f1_levels;  // empty = default levels
    std::vector<double> delta_grid; // empty = default grid
};

// Per-command fallbacks applied when the dimensionless style leaves fields
// unset.
struct CommandDefaults {
    double F0 = 2.0;
    double F1 = 1.5;
    bool needs_window = false;
};

struct ResolvedRun {
    DimensionlessModel model;
    Regime regime;
    std::optional<ModelParams> physical;
    std::optional<DriveProfile> physical_drive;

    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 0;

    SourceMode source_mode = SourceMode::Literal;
    bool source_mode_given = false;
    double m0 = 0.0;
    double rel_tol = kQuadratureDefaultRelTol;
    std::string format = "csv";
    std::string out;
    bool oracle = false;

    std::vector<double> fbar_grid;
    std::vector<double> f1_levels;
    std::vector<double> delta_grid;

    std::vector<std::string> warnings; // model-validity notes for stderr
};

ResolvedRun resolve(const RunConfig& config, const CommandDefaults& defaults);

// Parameter block shared by all commands, in fixed order.
void emit_run_meta(Dataset& d, const ResolvedRun& run, const std::string& command);

// Inverse of the emitters: rebuilds (command, config) from a dataset header.
std::pair<std::string, RunConfig> config_from_meta(const Dataset& d);

SourceMode parse_source_mode(const std::string& s);
std::vector<double> parse_number_list(const std::string& s);
std::string join_number_list(const std::vector<double>& values);

// Flat key=value file (blank lines and '#' comments skipped), in file order.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

} // namespace pulsq
