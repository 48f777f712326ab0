#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmfg/grid.hpp"
#include "cmfg/hamiltonian.hpp"
#include "cmfg/solver.hpp"

namespace cmfg::tools {

/// Bad config file: unknown or duplicate key, unparsable value, or a value
/// outside the range its owning module accepts. The message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Solve, Continuation, Scaling, Threshold, Verify };

std::string to_string(Mode mode);
/// Throws ConfigError on anything but solve, continuation, scaling, threshold, verify.
Mode parse_mode(const std::string& text);

struct RunConfig {
    Mode mode = Mode::Solve;

    int dimension = 1;
    int cells = 128;

    double gamma = 2.0;
    double c_h = 1.0;
    double c_f = 0.0;
    double alpha = 0.5;
    double epsilon = 0.0;

    SolveConfig solve;

    std::vector<double> sigma_list;
    std::vector<double> c_f_grid;

    int n_perturbations = 200;
    double perturbation_radius = 1e-2;
    int n_directions = 100;

    std::filesystem::path output_dir = "cmfg_out";

    /// Validated model parameters; ConfigError names the offending key.
    MFGParams params() const;
    GridSpec grid() const;
    /// Full range check across every key.
    void validate() const;
};

/**
 * Flat "key = value" text, one entry per line. '#' starts a comment, lists
 * are comma separated, and every key may appear at most once. Unknown keys
 * are rejected. The result is validated.
 */
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// One line per key: name, type, default and meaning. Generated from the
/// same table the parser uses.
std::string config_reference();

/// Key/value pairs of the config as they would be written back to a file.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

}  // namespace cmfg::tools
