#include "cmfg_tools/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "cmfg/diagnostics.hpp"

namespace cmfg::tools {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double finite_or_max(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::max(); }

Json config_echo(const RunConfig& config) {
    Json echo = Json::object();
    for (const auto& [key, value] : config_entries(config)) echo[key] = value;
    return echo;
}

Json solution_json(const MFGSolution& sol, const MFGParams& params, const RieszOperator& k) {
    Json j{{"converged", sol.converged},
           {"message", sol.message},
           {"iterations", sol.iterations},
           {"final_tau", sol.final_tau},
           {"epsilon", sol.epsilon},
           {"lambda", sol.lambda},
           {"hjb_residual", sol.hjb_residual},
           {"fp_residual", sol.fp_residual},
           {"coupling_residual", sol.coupling_residual},
           {"admissibility_residual", sol.admissibility_residual},
           {"energy", finite_or_max(sol.energy_value)},
           {"energy_regularized", finite_or_max(sol.energy_reg_value)},
           {"mass", integrate(sol.m)},
           {"min_m", sol.m.min()},
           {"max_m", sol.m.max()},
           {"norm_q", norm_lp(sol.m, params.q_alpha)}};
    if (sol.converged && sol.m.min() > 0.0) j["schrodinger_residual"] = schrodinger_residual(sol, params, k);
    j["residual_history"] = sol.residual_history;
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("output: cannot write '" + path.string() + "'");
    out << text;
}

std::string fields_csv(const MFGSolution& sol) {
    const GridSpec& spec = sol.m.spec();
    std::string out = spec.dimension() == 2 ? "x,y,m,u\n" : "x,m,u\n";
    for (std::size_t c = 0; c < spec.num_cells(); ++c) {
        const auto x = spec.cell_center(c);
        out += format_real(x[0]) + ",";
        if (spec.dimension() == 2) out += format_real(x[1]) + ",";
        out += format_real(sol.m[c]) + "," + format_real(sol.u[c]) + "\n";
    }
    return out;
}

struct ModeResult {
    Json payload;
    std::vector<std::pair<std::string, std::string>> files;  // name, contents
    int exit_code = kExitOk;
    std::string message;
};

ModeResult run_solve(const RunConfig& config, Json& timings) {
    const MFGParams p = config.params();
    auto t0 = Clock::now();
    const RieszOperator k(config.grid(), p.alpha);
    timings["build_riesz"] = seconds_since(t0);
    t0 = Clock::now();
    const MFGSolution sol = solve_mfg(p, config.solve, k);
    timings["solve"] = seconds_since(t0);

    ModeResult r;
    r.payload = Json{{"regime", classify_regime(p.dimension, p.gamma, p.alpha).label()},
                     {"solution", solution_json(sol, p, k)}};
    r.files.emplace_back("fields.csv", fields_csv(sol));
    if (!sol.converged) {
        r.exit_code = kExitNotConverged;
        r.message = sol.message.empty() ? "solve: no convergence" : sol.message;
    }
    return r;
}

ModeResult run_continuation(const RunConfig& config, Json& timings) {
    const MFGParams p = config.params();
    if (config.solve.epsilon_schedule.empty()) throw ConfigError("epsilon_schedule: required in continuation mode");
    const RieszOperator k(config.grid(), p.alpha);
    const auto t0 = Clock::now();
    ContinuationResult res;
    try {
        res = continuation(p, config.solve, k);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    timings["continuation"] = seconds_since(t0);

    ModeResult r;
    Json stages = Json::array();
    for (const MFGSolution& s : res.stages) stages.push_back(solution_json(s, p.with_epsilon(s.epsilon), k));
    r.payload = Json{{"stages", stages},
                     {"tail_differences", res.tail_differences},
                     {"tail_decreasing", res.tail_decreasing()},
                     {"aborted", res.aborted}};
    r.files.emplace_back("fields.csv", fields_csv(res.final_stage()));
    if (res.aborted || !res.final_stage().converged) {
        r.exit_code = kExitNotConverged;
        r.message = "continuation: final stage did not converge";
    }
    return r;
}

ModeResult run_scaling(const RunConfig& config, Json& timings) {
    const MFGParams p = config.params();
    if (config.sigma_list.empty()) throw ConfigError("sigma_list: required in scaling mode");
    const RieszOperator k(config.grid(), p.alpha);
    const auto t0 = Clock::now();
    ScalingReport rep;
    try {
        rep = scaling_sweep(p, k, config.sigma_list);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sigma_list: ") + e.what());
    }
    timings["scaling_sweep"] = seconds_since(t0);

    ModeResult r;
    std::string csv = "sigma,kinetic,potential,energy,interaction,used_in_fit\n";
    for (std::size_t i = 0; i < rep.sigma_list.size(); ++i) {
        csv += format_real(rep.sigma_list[i]) + "," + format_real(rep.kinetic_values[i]) + "," +
               format_real(rep.potential_values[i]) + "," + format_real(rep.energy_values[i]) + "," +
               format_real(rep.interaction_values[i]) + "," + (rep.used_in_fit[i] ? "1" : "0") + "\n";
    }
    r.files.emplace_back("scaling.csv", csv);
    const Regime regime = classify_regime(p.dimension, p.gamma, p.alpha);
    r.payload = Json{{"regime", regime.label()},
                     {"alpha_mc", regime.alpha_mc},
                     {"alpha_sc", regime.alpha_sc},
                     {"kinetic_slope", rep.kinetic_slope},
                     {"potential_slope", rep.potential_slope},
                     {"expected_kinetic_slope", -p.gamma_prime},
                     {"expected_potential_slope", -(p.dimension - p.alpha)},
                     {"energy_sign_trend", rep.unbounded_below() ? "unbounded_below" : "bounded_below"},
                     {"energy_decreasing_as_sigma_shrinks", rep.energy_decreasing_as_sigma_shrinks},
                     {"sigma", rep.sigma_list},
                     {"kinetic", rep.kinetic_values},
                     {"potential", rep.potential_values},
                     {"energy", rep.energy_values}};
    return r;
}

ModeResult run_threshold(const RunConfig& config, Json& timings) {
    const MFGParams p = config.params();
    if (config.c_f_grid.empty()) throw ConfigError("C_f_grid: required in threshold mode");
    const RieszOperator k(config.grid(), p.alpha);
    const auto t0 = Clock::now();
    const ThresholdTable table = threshold_probe(p, k, config.c_f_grid, config.solve);
    timings["threshold_probe"] = seconds_since(t0);

    ModeResult r;
    std::string csv = "C_f,converged,norm_q,norm_inf,lambda,iterations\n";
    Json rows = Json::array();
    for (const ThresholdRow& row : table.rows) {
        csv += format_real(row.c_f) + "," + (row.converged ? "1" : "0") + "," + format_real(row.norm_q) + "," +
               format_real(row.norm_inf) + "," + format_real(row.lambda) + "," + std::to_string(row.iterations) +
               "\n";
        rows.push_back(Json{{"C_f", row.c_f},
                            {"converged", row.converged},
                            {"norm_q", row.norm_q},
                            {"norm_inf", row.norm_inf},
                            {"lambda", row.lambda},
                            {"iterations", row.iterations}});
    }
    r.files.emplace_back("threshold.csv", csv);
    r.payload = Json{{"rows", rows},
                     {"largest_convergent_C_f", table.largest_convergent_c_f ? Json(*table.largest_convergent_c_f)
                                                                            : Json(nullptr)},
                     {"first_failure_C_f",
                      table.first_failure_c_f ? Json(*table.first_failure_c_f) : Json(nullptr)}};
    return r;
}

ModeResult run_verify(const RunConfig& config, Json& timings) {
    const std::vector<SuiteResult> suites = run_verify_suites(config, &timings);
    ModeResult r;
    Json list = Json::array();
    std::string failed;
    for (const SuiteResult& s : suites) {
        list.push_back(Json{{"name", s.name}, {"passed", s.passed}, {"details", s.details}});
        if (!s.passed) failed += (failed.empty() ? "" : ", ") + s.name;
    }
    r.payload = Json{{"suites", list}, {"all_passed", failed.empty()}};
    if (!failed.empty()) {
        r.exit_code = kExitSuiteFailed;
        r.message = "verify: failed suites: " + failed;
    }
    return r;
}

}  // namespace

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunOutcome execute(const RunConfig& config) {
    config.validate();
    RunOutcome out;
    Json timings = Json::object();
    const auto t0 = Clock::now();

    ModeResult r;
    try {
        switch (config.mode) {
            case Mode::Solve: r = run_solve(config, timings); break;
            case Mode::Continuation: r = run_continuation(config, timings); break;
            case Mode::Scaling: r = run_scaling(config, timings); break;
            case Mode::Threshold: r = run_threshold(config, timings); break;
            case Mode::Verify: r = run_verify(config, timings); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        r.payload = Json{{"error", e.what()}};
        r.exit_code = kExitNotConverged;
        r.message = std::string(to_string(config.mode)) + ": " + e.what();
    }
    timings["total"] = seconds_since(t0);

    std::filesystem::create_directories(config.output_dir);
    Json artifacts = Json::array();
    for (const auto& [name, text] : r.files) {
        const auto path = config.output_dir / name;
        write_text(path, text);
        out.artifacts.push_back(path);
        artifacts.push_back(name);
    }
    artifacts.push_back("report.json");
    out.artifacts.push_back(config.output_dir / "report.json");

    out.exit_code = r.exit_code;
    out.message = r.message;
    out.report = Json{{"mode", to_string(config.mode)},
                      {"exit_code", r.exit_code},
                      {"message", r.message},
                      {"config", config_echo(config)},
                      {"payload", r.payload},
                      {"timings", timings},
                      {"artifacts", artifacts}};
    write_text(config.output_dir / "report.json", out.report.dump(2) + "\n");
    return out;
}

int run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& err) {
    RunConfig config;
    try {
        config = parse_config_file(config_path);
        if (overrides.mode) config.mode = *overrides.mode;
        if (overrides.seed) config.solve.rng_seed = *overrides.seed;
        if (overrides.output_dir) config.output_dir = *overrides.output_dir;
        config.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const RunOutcome out = execute(config);
        if (out.exit_code != kExitOk) err << out.message << "\n";
        return out.exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int verify_all(const std::filesystem::path& config_path, std::ostream& err) {
    RunOverrides o;
    o.mode = Mode::Verify;
    return run(config_path, o, err);
}

}  // namespace cmfg::tools
