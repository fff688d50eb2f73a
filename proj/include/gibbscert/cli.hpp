#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbscert/models.hpp"

namespace gibbscert {

enum class OutputFormat {
    csv,
    jsonl, // one JSON object per row
};

// Everything a batch command needs, resolved and validated up front.
struct RunConfig {
    ModelSpec model;
    double x0 = 0.0;
    double omega = 0.01;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::csv;
    long lmax = 200;

    // Bound parameters; unset values are resolved by grid search (r, w) or
    // default to the sharpest certified rate (gamma).
    std::optional<double> r;
    std::optional<double> gamma;
    std::optional<double> w;
    std::optional<double> epsilon; // user-supplied minorization mass

    // Deliberate corruption knob for the validation sweep: scales the
    // minorization mass before the domination check so the check's ability
    // to fail is itself testable.
    double epsilon_scale = 1.0;

    // Explicit search grids; empty means the default grid.
    std::vector<double> grid_r;
    std::vector<double> grid_gamma;
    std::vector<double> grid_w;

    std::size_t replicates = 100'000; // Monte Carlo ensemble size
    std::size_t length = 10'000;      // simulated path length
};

// Reads a flat key=value config file ('#' starts a comment).  Returns the
// raw pairs; make_run_config validates them.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Builds a validated RunConfig from file values plus command-line
// overrides; overrides win key by key.  Unknown keys, malformed numbers,
// out-of-range targets, and grid entries violating the bounds-module
// constraints are all rejected here (config_error), so commands start from
// a coherent configuration.
RunConfig make_run_config(const std::map<std::string, std::string>& file_values,
                          const std::map<std::string, std::string>& overrides);

// Batch commands.  Each writes its artifacts under cfg.out_dir, prints a
// human-readable summary to `out`, and returns a process exit status
// (0 = all good).  Errors from the underlying modules propagate as
// exceptions for the caller to report.
int cmd_certify(const RunConfig& cfg, std::ostream& out);
int cmd_bound(const RunConfig& cfg, std::ostream& out);
int cmd_optimize(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);

// Number formatting used in every artifact: 9 significant digits.
std::string format_number(double v);

} // namespace gibbscert
