#include "cmfg_tools/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string_view>

namespace cmfg::tools {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// shortest text that parses back to the same double
std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(key + ": value out of range");
    }
    return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

struct Key {
    const char* name;
    const char* type;
    const char* meaning;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define CMFG_REAL(NAME, FIELD, MEANING)                                                    \
    Key {                                                                                  \
        NAME, "real", MEANING, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
            [](const RunConfig& c) { return fmt(c.FIELD); }                                \
    }
#define CMFG_INT(NAME, FIELD, MEANING)                                                     \
    Key {                                                                                  \
        NAME, "integer", MEANING, [](RunConfig& c, const std::string& v) { c.FIELD = to_int(NAME, v); }, \
            [](const RunConfig& c) { return std::to_string(c.FIELD); }                     \
    }
#define CMFG_LIST(NAME, FIELD, MEANING)                                                    \
    Key {                                                                                  \
        NAME, "list", MEANING, [](RunConfig& c, const std::string& v) { c.FIELD = to_list(NAME, v); }, \
            [](const RunConfig& c) { return fmt_list(c.FIELD); }                           \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        Key{"mode", "word", "solve | continuation | scaling | threshold | verify",
            [](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); },
            [](const RunConfig& c) { return to_string(c.mode); }},
        CMFG_INT("dimension", dimension, "space dimension n, 1 or 2"),
        CMFG_INT("cells", cells, "cells per axis N (>= 4)"),
        CMFG_REAL("gamma", gamma, "Hamiltonian exponent, > 1"),
        CMFG_REAL("C_H", c_h, "Hamiltonian constant, > 0"),
        CMFG_REAL("C_f", c_f, "coupling strength, >= 0"),
        CMFG_REAL("alpha", alpha, "Riesz exponent, in (0, n)"),
        CMFG_REAL("epsilon", epsilon, "mollification radius for solve mode, >= 0"),
        CMFG_REAL("tau", solve.tau, "damping of the density update, in (0, 1]"),
        CMFG_REAL("min_tau", solve.min_tau, "smallest damping after halving"),
        CMFG_REAL("tol", solve.tol, "outer tolerance on ||m_new - m||_2"),
        CMFG_INT("max_outer_iterations", solve.max_outer_iterations, "outer iteration cap"),
        CMFG_LIST("epsilon_schedule", solve.epsilon_schedule,
                  "strictly decreasing mollification radii; last < h/2 (continuation)"),
        CMFG_REAL("ball_radius", solve.ball_radius, "L^q radius of the density ball, >= 1; inf disables"),
        Key{"rng_seed", "integer", "seed of every random draw",
            [](RunConfig& c, const std::string& v) {
                const long long s = to_integer("rng_seed", v);
                if (s < 0) throw ConfigError("rng_seed: must be >= 0");
                c.solve.rng_seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.solve.rng_seed); }},
        CMFG_REAL("hjb_tol", solve.hjb_tol, "HJB Newton tolerance (max-norm)"),
        CMFG_INT("hjb_max_iter", solve.hjb_max_iter, "HJB Newton iteration cap"),
        CMFG_REAL("fp_tol", solve.fp_tol, "Fokker-Planck relative residual tolerance, ||A m|| / (||A|| ||m||)"),
        CMFG_LIST("sigma_list", sigma_list, "bump widths (scaling mode)"),
        CMFG_LIST("C_f_grid", c_f_grid, "increasing coupling values (threshold mode)"),
        CMFG_INT("n_perturbations", n_perturbations, "trials of the local-minimality audit (verify)"),
        CMFG_REAL("perturbation_radius", perturbation_radius, "L2 size of audit perturbations (verify)"),
        CMFG_INT("n_directions", n_directions, "trials of the J-stationarity audit (verify)"),
        Key{"output_dir", "path", "directory for report.json and CSV files",
            [](RunConfig& c, const std::string& v) {
                if (v.empty()) throw ConfigError("output_dir: must not be empty");
                c.output_dir = v;
            },
            [](const RunConfig& c) { return c.output_dir.string(); }},
    };
    return table;
}

#undef CMFG_REAL
#undef CMFG_INT
#undef CMFG_LIST

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Solve: return "solve";
        case Mode::Continuation: return "continuation";
        case Mode::Scaling: return "scaling";
        case Mode::Threshold: return "threshold";
        case Mode::Verify: return "verify";
    }
    return "solve";
}

Mode parse_mode(const std::string& text) {
    for (Mode m : {Mode::Solve, Mode::Continuation, Mode::Scaling, Mode::Threshold, Mode::Verify}) {
        if (text == to_string(m)) return m;
    }
    throw ConfigError("mode: expected solve, continuation, scaling, threshold or verify, got '" + text + "'");
}

MFGParams RunConfig::params() const {
    try {
        return MFGParams::make(dimension, gamma, c_h, c_f, alpha, epsilon);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

GridSpec RunConfig::grid() const {
    if (dimension != 1 && dimension != 2) throw ConfigError("dimension: must be 1 or 2");
    if (cells < 4) throw ConfigError("cells: must be >= 4");
    return GridSpec(dimension, cells);
}

void RunConfig::validate() const {
    const GridSpec spec = grid();
    (void)params();
    try {
        solve.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (dimension == 2 && cells > 96) {
        throw ConfigError("cells: at most 96 in 2D (the dense Riesz matrix grows as N^4)");
    }
    if (n_perturbations < 1) throw ConfigError("n_perturbations: must be >= 1");
    if (n_directions < 1) throw ConfigError("n_directions: must be >= 1");
    if (!(perturbation_radius > 0.0)) throw ConfigError("perturbation_radius: must be positive");
    for (double s : sigma_list) {
        if (!(s > 2.0 * spec.spacing() && s < 0.25)) {
            throw ConfigError("sigma_list: entries must lie in (2h, 0.25), got " + fmt(s));
        }
    }
    for (std::size_t i = 1; i < c_f_grid.size(); ++i) {
        if (!(c_f_grid[i] > c_f_grid[i - 1])) throw ConfigError("C_f_grid: must be strictly increasing");
    }
    for (double c : c_f_grid) {
        if (!(c >= 0.0)) throw ConfigError("C_f_grid: entries must be >= 0");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + body + "'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto& table = keys();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return key == k.name; });
        if (it == table.end()) throw ConfigError(key + ": unknown key (line " + std::to_string(lineno) + ")");
        if (!seen.insert(key).second) throw ConfigError(key + ": given more than once");
        it->set(config, value);
    }
    config.validate();
    return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_reference() {
    const RunConfig defaults;
    std::string out;
    for (const Key& k : keys()) {
        char line[256];
        std::snprintf(line, sizeof line, "%-22s %-8s default: %-12s %s\n", k.name, k.type, k.get(defaults).c_str(),
                      k.meaning);
        out += line;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Key& k : keys()) out.emplace_back(k.name, k.get(config));
    return out;
}

}  // namespace cmfg::tools
