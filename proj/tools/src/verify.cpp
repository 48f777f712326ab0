#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cmfg/diagnostics.hpp"
#include "cmfg/fp.hpp"
#include "cmfg/hjb.hpp"
#include "cmfg_tools/run.hpp"

namespace cmfg::tools {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Finite stand-in for JSON, which has no infinity.
double finite_or_max(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::max(); }

ScalarField random_field(const GridSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(spec);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = u(rng);
    return f;
}

SuiteResult grid_identities(const RunConfig& cfg) {
    const GridSpec spec = cfg.grid();
    std::mt19937_64 rng(cfg.solve.rng_seed);
    double worst_mass = 0.0;
    double worst_parts = 0.0;
    double worst_const = 0.0;
    for (int t = 0; t < 10; ++t) {
        const ScalarField u = random_field(spec, rng);
        const ScalarField v = random_field(spec, rng);
        const double scale = 1.0 / (spec.spacing() * spec.spacing());
        worst_mass = std::max(worst_mass, std::abs(integrate(laplacian(u))) / scale);
        // <div grad u, v> = -<grad u, grad v>
        const double lhs = inner(laplacian(u), v);
        const double rhs = -face_inner(gradient(u), gradient(v));
        worst_parts = std::max(worst_parts, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    ScalarField one(spec, 1.7);
    worst_const = std::max(gradient(one).max_abs(), max_abs(laplacian(one)));
    const bool ok = worst_mass < 1e-12 && worst_parts < 1e-12 && worst_const == 0.0;
    return {"grid_identities", ok,
            Json{{"laplacian_mass", worst_mass}, {"summation_by_parts", worst_parts}, {"constant_gradient", worst_const}}};
}

SuiteResult legendre(const RunConfig& cfg) {
    const MFGParams p = cfg.params();
    std::vector<std::vector<double>> q;
    double qmax = 0.0;
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
        const int dirs = (cfg.dimension == 1 || r == 0.0) ? (r == 0.0 ? 1 : 2) : 8;
        for (int k = 0; k < dirs; ++k) {
            const double th = 2.0 * std::numbers::pi * k / dirs;
            if (cfg.dimension == 1) {
                q.push_back({k == 0 ? r : -r});
            } else {
                q.push_back({r * std::cos(th), r * std::sin(th)});
            }
        }
        qmax = std::max(qmax, r);
    }
    const LegendreCheck chk = legendre_check(p, q, legendre_radius_for(p, qmax), 41);
    return {"legendre", chk.passed(1e-6),
            Json{{"max_abs_gap", chk.max_abs_gap}, {"inconclusive", chk.inconclusive}, {"C_L", p.c_l}}};
}

// Drift b = grad(phi) has the Gibbs density exp(-phi) as stationary state.
double gibbs_error(int dim, int n) {
    const GridSpec spec(dim, n);
    const double pi = std::numbers::pi;
    auto phi = [&](double x, double y) { return 0.8 * std::sin(2.0 * pi * x) + x * x + 0.5 * std::cos(pi * y); };
    auto dphi = [&](int axis, double x, double y) {
        return axis == 0 ? 1.6 * pi * std::cos(2.0 * pi * x) + 2.0 * x : -0.5 * pi * std::sin(pi * y);
    };
    VectorField b(spec);
    for (int d = 0; d < dim; ++d) {
        auto comp = b.component(d);
        for (std::size_t f = 0; f < comp.size(); ++f) {
            if (spec.face_cells(d, f).boundary) continue;
            const auto x = spec.face_center(d, f);
            comp[f] = dphi(d, x[0], dim == 2 ? x[1] : 0.0);
        }
    }
    const FPSolution sol = solve_fp(b, spec);
    ScalarField g = ScalarField::from_function(spec, [&](std::array<double, 2> x) {
        return std::exp(-phi(x[0], dim == 2 ? x[1] : 0.0));
    });
    g *= 1.0 / integrate(g);
    return max_abs(sol.m - g);
}

SuiteResult fp_gibbs(const RunConfig& cfg) {
    const int n = cfg.dimension == 1 ? cfg.cells : std::min(cfg.cells, 64);
    const double e1 = gibbs_error(cfg.dimension, n);
    const double e2 = gibbs_error(cfg.dimension, 2 * n);
    const double ratio = e1 / e2;
    return {"fp_gibbs", ratio >= 1.6 && ratio <= 2.6,
            Json{{"cells", n}, {"error_coarse", e1}, {"error_fine", e2}, {"ratio", ratio}}};
}

double hjb_manufactured_error(const MFGParams& p, int n) {
    const GridSpec spec(p.dimension, n);
    const double a = 0.3;
    const double pi = std::numbers::pi;
    const bool two = p.dimension == 2;
    const ScalarField exact = ScalarField::from_function(spec, [&](std::array<double, 2> x) {
        return a * std::cos(pi * x[0]) * (two ? std::cos(pi * x[1]) : 1.0);
    });
    const ScalarField f = ScalarField::from_function(spec, [&](std::array<double, 2> x) {
        const double cy = two ? std::cos(pi * x[1]) : 1.0;
        const double gx = -a * pi * std::sin(pi * x[0]) * cy;
        const double gy = two ? -a * pi * std::cos(pi * x[0]) * std::sin(pi * x[1]) : 0.0;
        const double lap = -(two ? 2.0 : 1.0) * pi * pi * a * std::cos(pi * x[0]) * cy;
        return -lap + p.c_h * std::pow(std::hypot(gx, gy), p.gamma);
    });
    const HJBSolution sol = solve_hjb(f, p);
    if (!sol.converged) return std::numeric_limits<double>::infinity();
    return std::max(max_abs(sol.u - exact), std::abs(sol.lambda));
}

SuiteResult hjb_manufactured(const RunConfig& cfg) {
    const MFGParams p = cfg.params();
    const std::vector<int> sizes = cfg.dimension == 1 ? std::vector<int>{32, 64, 128} : std::vector<int>{16, 32, 64};
    Json errors = Json::array();
    Json ratios = Json::array();
    std::vector<double> e;
    for (int n : sizes) {
        e.push_back(hjb_manufactured_error(p, n));
        errors.push_back(finite_or_max(e.back()));
    }
    bool ok = true;
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double r = e[i - 1] / e[i];
        ratios.push_back(std::isfinite(r) ? r : 0.0);
        ok = ok && std::isfinite(r) && r >= 1.6 && r <= 4.4;
    }
    return {"hjb_manufactured", ok, Json{{"cells", sizes}, {"errors", errors}, {"ratios", ratios}}};
}

SuiteResult interpolation(const RunConfig& cfg) {
    const MFGParams p = cfg.params();
    const GridSpec spec = cfg.grid();
    std::mt19937_64 rng(cfg.solve.rng_seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> power(1, 8);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        const int k = power(rng);
        const double keep = u(rng);
        ScalarField m(spec);
        for (std::size_t c = 0; c < m.size(); ++c) {
            const double v = std::pow(u(rng), k);
            m[c] = u(rng) < keep ? v : 0.0;
        }
        m[static_cast<std::size_t>(t) % m.size()] += 1e-3;
        m *= 1.0 / integrate(m);
        worst = std::min(worst, interpolation_slack(m, p));
    }
    return {"interpolation", worst >= -1e-12, Json{{"trials", 1000}, {"min_slack", worst}}};
}

SuiteResult hls(const RunConfig& cfg) {
    const HlsAuditReport rep = hls_invariance_audit({cfg.grid()}, cfg.alpha, {0.1, 0.15, 0.2, 0.25, 0.3});
    Json rows = Json::array();
    for (const auto& r : rep.rows) rows.push_back(Json{{"sigma", r.sigma}, {"ratio", r.ratio}});
    return {"hls_invariance", rep.passed(),
            Json{{"spread", rep.spread.front()}, {"max_ratio", rep.max_ratio.front()}, {"rows", rows}}};
}

Json audit_json(const AuditReport& a) {
    return Json{{"trials", a.trials},
                {"violations", a.violations},
                {"skipped", a.skipped},
                {"min_gap", finite_or_max(a.min_gap)},
                {"slack", a.slack}};
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const RunConfig& config, Json* timings) {
    std::vector<SuiteResult> out;
    auto timed = [&](const char* name, auto&& fn) {
        const auto t0 = Clock::now();
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, Json{{"error", e.what()}}});
        }
        if (timings) (*timings)[name] = seconds_since(t0);
    };

    timed("grid_identities", [&] { return grid_identities(config); });
    timed("legendre", [&] { return legendre(config); });
    timed("fp_gibbs", [&] { return fp_gibbs(config); });
    timed("hjb_manufactured", [&] { return hjb_manufactured(config); });
    timed("interpolation", [&] { return interpolation(config); });
    timed("hls_invariance", [&] { return hls(config); });

    const auto t0 = Clock::now();
    const MFGParams p = config.params();
    const RieszOperator k(config.grid(), p.alpha);
    const MFGSolution sol = solve_mfg(p, config.solve, k);
    out.push_back({"solve", sol.converged,
                   Json{{"iterations", sol.iterations},
                        {"coupling_residual", sol.coupling_residual},
                        {"hjb_residual", sol.hjb_residual},
                        {"fp_residual", sol.fp_residual},
                        {"lambda", sol.lambda},
                        {"message", sol.message}}});
    if (timings) (*timings)["solve"] = seconds_since(t0);

    timed("local_min", [&] {
        if (!sol.converged) return SuiteResult{"local_min", false, Json{{"error", "solve did not converge"}}};
        const AuditReport a =
            verify_local_min(sol, k, p, config.n_perturbations, config.perturbation_radius, config.solve.rng_seed);
        return SuiteResult{"local_min", a.passed(), audit_json(a)};
    });
    timed("j_stationarity", [&] {
        if (!sol.converged) return SuiteResult{"j_stationarity", false, Json{{"error", "solve did not converge"}}};
        const Mollifier eta(k.spec(), p.epsilon);
        const AuditReport a = verify_j_stationarity(sol, k, eta, p, config.n_directions, config.solve.rng_seed);
        return SuiteResult{"j_stationarity", a.passed(), audit_json(a)};
    });
    return out;
}

}  // namespace cmfg::tools
