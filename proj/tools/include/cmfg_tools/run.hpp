#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmfg_tools/config.hpp"

namespace cmfg::tools {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitSuiteFailed = 3;

struct SuiteResult {
    std::string name;
    bool passed = false;
    Json details;
};

/// All verify suites on the config: grid identities, Legendre check, FP Gibbs
/// test, HJB manufactured solution, interpolation audit, HLS invariance,
/// and a small solve followed by the local-minimality and J audits.
std::vector<SuiteResult> run_verify_suites(const RunConfig& config, Json* timings = nullptr);

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    Json report;  ///< config echo, payload, timings, artifacts
    std::vector<std::filesystem::path> artifacts;
};

/// Runs config.mode and writes report.json plus the mode's CSV files into
/// config.output_dir.
RunOutcome execute(const RunConfig& config);

struct RunOverrides {
    std::optional<Mode> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

/// Parse, apply overrides, execute. Diagnostics go to err. Returns the exit
/// code: 0 success, 1 config error, 2 solver non-convergence or a failed
/// numerical stage, 3 a failed verify suite.
int run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& err);

/// run() with the mode forced to verify.
int verify_all(const std::filesystem::path& config_path, std::ostream& err);

/// Round-trip decimal text of a double (17 significant digits).
std::string format_real(double v);

}  // namespace cmfg::tools
