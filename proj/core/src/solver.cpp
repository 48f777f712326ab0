#include "cmfg/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cmfg/fp.hpp"
#include "cmfg/hjb.hpp"

#include "format.hpp"

namespace cmfg {

void SolveConfig::validate() const {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau: must lie in (0, 1]");
    if (!(min_tau > 0.0 && min_tau <= tau)) throw std::invalid_argument("min_tau: must lie in (0, tau]");
    if (!(tol > 0.0)) throw std::invalid_argument("tol: must be positive");
    if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations: must be >= 1");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] >= 0.0)) throw std::invalid_argument("epsilon_schedule: entries must be >= 0");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1])) {
            throw std::invalid_argument("epsilon_schedule: must be strictly decreasing");
        }
    }
    if (!(ball_radius >= 1.0)) {
        throw std::invalid_argument("ball_radius: must be >= 1 (every unit-mass density has ||m||_q >= 1)");
    }
    if (!(hjb_tol > 0.0)) throw std::invalid_argument("hjb_tol: must be positive");
    if (hjb_max_iter < 1) throw std::invalid_argument("hjb_max_iter: must be >= 1");
    if (!(fp_tol > 0.0)) throw std::invalid_argument("fp_tol: must be positive");
}

namespace {

ScalarField coupling_rhs(const ScalarField& m, const RieszOperator& k, const Mollifier& eta, const MFGParams& params) {
    if (params.c_f == 0.0) return ScalarField(m.spec());
    ScalarField f = apply(k, mollify(m, eta));
    f *= -params.c_f;
    return f;
}

// Moves m toward the uniform density along the segment (1-s) m + s until
// ||.||_q <= radius. The norm is convex along the segment and equals 1 at s = 1.
void project_to_ball(ScalarField& m, double radius, double q) {
    if (!std::isfinite(radius) || norm_lp(m, q) <= radius) return;
    double lo = 0.0;
    double hi = 1.0;
    auto blend = [&](double s) {
        ScalarField t = m;
        for (auto& v : t.values()) v = (1.0 - s) * v + s;
        return t;
    };
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm_lp(blend(mid), q) > radius) lo = mid;
        else hi = mid;
    }
    m = blend(hi);
}

}  // namespace

MFGSolution solve_mfg(const MFGParams& params, const SolveConfig& config, const RieszOperator& k,
                      const std::optional<ScalarField>& initial_m) {
    config.validate();
    const GridSpec& spec = k.spec();
    if (spec.dimension() != params.dimension) throw std::invalid_argument("solve_mfg: dimension mismatch");
    if (std::abs(k.alpha() - params.alpha) > 0.0) throw std::invalid_argument("solve_mfg: operator alpha differs");

    const Mollifier eta(spec, params.epsilon);
    MFGSolution sol(spec);
    sol.epsilon = params.epsilon;

    ScalarField m = initial_m.value_or(ScalarField(spec, 1.0));
    require_same_grid(m.spec(), spec, "solve_mfg initial_m");
    if (m.min() <= 0.0) throw std::invalid_argument("solve_mfg: initial density must be positive");
    m *= 1.0 / integrate(m);
    project_to_ball(m, config.ball_radius, params.q_alpha);

    HJBOptions hjb_opts;
    hjb_opts.tol = config.hjb_tol;
    hjb_opts.max_iter = config.hjb_max_iter;

    double tau = config.tau;
    double prev = std::numeric_limits<double>::infinity();
    int increases = 0;
    std::optional<HJBSolution> hjb;
    std::optional<FPSolution> fp;

    for (int it = 0; it < config.max_outer_iterations; ++it) {
        const ScalarField f = coupling_rhs(m, k, eta, params);
        if (hjb) {
            hjb_opts.initial_u = hjb->u;
            hjb_opts.initial_lambda = hjb->lambda;
        }
        HJBSolution next = solve_hjb(f, params, hjb_opts);
        if (!next.converged) {
            sol.iterations = it;
            sol.message = "outer iteration " + std::to_string(it) + ": " + next.message;
            break;
        }
        hjb = std::move(next);
        const VectorField b = drift_from_u(hjb->u, params);
        try {
            fp = solve_fp(b, spec, config.fp_tol);
        } catch (const std::exception& e) {
            sol.iterations = it;
            sol.message = "outer iteration " + std::to_string(it) + ": " + e.what();
            break;
        }
        sol.drift = b;

        const double diff = norm_lp(fp->m - m, 2.0);
        sol.residual_history.push_back(diff);
        sol.iterations = it + 1;
        if (diff <= config.tol) {
            sol.converged = true;
            break;
        }
        increases = diff > prev ? increases + 1 : 0;
        prev = diff;
        if (increases >= 5) {
            tau = std::max(0.5 * tau, config.min_tau);
            increases = 0;
        }
        for (std::size_t c = 0; c < m.size(); ++c) m[c] = (1.0 - tau) * m[c] + tau * fp->m[c];
        project_to_ball(m, config.ball_radius, params.q_alpha);
    }
    sol.final_tau = tau;
    if (!sol.converged && sol.message.empty()) {
        sol.message = "no convergence after " + std::to_string(config.max_outer_iterations) +
                      " outer iterations, last ||m_new - m||_2 = " +
                      detail::format_number(sol.residual_history.empty() ? 0.0 : sol.residual_history.back());
    }
    if (!hjb || !fp) {
        sol.m = m;
        return sol;
    }

    sol.coupling_residual = sol.residual_history.back();
    sol.m = sol.converged ? fp->m : m;
    sol.u = hjb->u;
    sol.lambda = hjb->lambda;
    sol.fp_residual = fp->residual;
    sol.hjb_residual = max_abs(hjb_residual(sol.u, sol.lambda, coupling_rhs(sol.m, k, eta, params), params));
    sol.w = flux_from_solution(sol.m, sol.drift);
    sol.admissibility_residual = norm_lp(admissibility_defect(sol.m, sol.w), 2.0);

    if (sol.converged) {
        const AdmissiblePair pair = solution_pair(sol, params);
        sol.energy_value = energy(pair, k, params).raw();
        sol.energy_reg_value = energy_regularized(pair, k, eta, params).raw();
    }
    return sol;
}

bool ContinuationResult::tail_decreasing() const {
    for (std::size_t i = 1; i < tail_differences.size(); ++i) {
        if (!(tail_differences[i] < tail_differences[i - 1])) return false;
    }
    return true;
}

ContinuationResult continuation(const MFGParams& params, const SolveConfig& config, const RieszOperator& k) {
    config.validate();
    if (config.epsilon_schedule.empty()) throw std::invalid_argument("epsilon_schedule: must not be empty");
    const double h = k.spec().spacing();
    if (!(config.epsilon_schedule.back() < 0.5 * h)) {
        throw std::invalid_argument("epsilon_schedule: last value must be below h/2 = " + detail::format_number(0.5 * h));
    }

    ContinuationResult out;
    std::optional<ScalarField> warm;
    int consecutive_failures = 0;
    for (double eps : config.epsilon_schedule) {
        MFGSolution stage = solve_mfg(params.with_epsilon(eps), config, k, warm);
        if (stage.converged) {
            consecutive_failures = 0;
            if (!out.stages.empty() && out.stages.back().converged) {
                out.tail_differences.push_back(norm_lp(stage.m - out.stages.back().m, 2.0));
            }
            warm = stage.m;
        } else if (++consecutive_failures >= 2) {
            out.stages.push_back(std::move(stage));
            out.aborted = true;
            break;
        }
        out.stages.push_back(std::move(stage));
    }
    return out;
}

ScalarField solve_neumann_poisson(const ScalarField& rhs) {
    const GridSpec& spec = rhs.spec();
    const auto cells = static_cast<Eigen::Index>(spec.num_cells());
    const double inv_h2 = 1.0 / (spec.spacing() * spec.spacing());
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t c = 0; c < spec.num_cells(); ++c) {
        const auto row = static_cast<Eigen::Index>(c);
        double diag = 0.0;
        for (int d = 0; d < spec.dimension(); ++d) {
            for (const std::size_t f : {spec.lower_face(d, c), spec.upper_face(d, c)}) {
                const auto fc = spec.face_cells(d, f);
                if (fc.boundary) continue;
                const std::size_t other = fc.lower == c ? fc.upper : fc.lower;
                trip.emplace_back(row, static_cast<Eigen::Index>(other), inv_h2);
                diag -= inv_h2;
            }
        }
        trip.emplace_back(row, row, diag);
        trip.emplace_back(row, cells, 1.0);
        trip.emplace_back(cells, row, 1.0);
    }
    Eigen::SparseMatrix<double> a(cells + 1, cells + 1);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("solve_neumann_poisson: factorization failed");
    Eigen::VectorXd b(cells + 1);
    for (Eigen::Index i = 0; i < cells; ++i) b(i) = rhs[static_cast<std::size_t>(i)];
    b(cells) = 0.0;
    const Eigen::VectorXd x = lu.solve(b);
    // The multiplier x(cells) absorbs the mean of rhs; it must be at rounding level.
    const double scale = std::max(1.0, max_abs(rhs));
    if (!(std::abs(x(cells)) <= 1e-8 * scale)) {
        throw std::runtime_error("solve_neumann_poisson: right-hand side is not mean-zero");
    }
    ScalarField phi(spec);
    for (Eigen::Index i = 0; i < cells; ++i) phi[static_cast<std::size_t>(i)] = x(i);
    return phi;
}

AdmissiblePair solution_pair(const MFGSolution& sol, const MFGParams& params) {
    return AdmissiblePair::make(sol.m, sol.w, params);
}

Perturbation admissible_perturbation(const ScalarField& m, ScalarField dm) {
    require_same_grid(m.spec(), dm.spec(), "admissible_perturbation");
    // keep m + dm strictly positive, then restore zero mean
    for (int pass = 0; pass < 50; ++pass) {
        bool clipped = false;
        for (std::size_t c = 0; c < dm.size(); ++c) {
            const double floor = -0.999 * m[c];
            if (dm[c] < floor) {
                dm[c] = floor;
                clipped = true;
            }
        }
        dm += -integrate(dm);
        if (!clipped) break;
    }
    const ScalarField phi = solve_neumann_poisson(laplacian(dm));
    return {std::move(dm), gradient(phi)};
}

Perturbation random_admissible_perturbation(const ScalarField& m, double radius, std::uint64_t seed) {
    const GridSpec& spec = m.spec();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kModes = 4;
    const int ly = spec.dimension() == 2 ? kModes : 0;

    ScalarField dm(spec);
    for (int ky = 0; ky <= ly; ++ky) {
        for (int kx = 0; kx <= kModes; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double a = normal(rng) / (1.0 + kx * kx + ky * ky);
            for (std::size_t c = 0; c < spec.num_cells(); ++c) {
                const auto x = spec.cell_center(c);
                dm[c] += a * std::cos(std::numbers::pi * kx * x[0]) * std::cos(std::numbers::pi * ky * x[1]);
            }
        }
    }
    dm += -integrate(dm);
    const double norm = norm_lp(dm, 2.0);
    if (norm > 0.0) dm *= radius / norm;
    return admissible_perturbation(m, std::move(dm));
}

ExtendedReal energy_gap(const MFGSolution& sol, const Perturbation& p, const RieszOperator& k,
                        const MFGParams& params) {
    const AdmissiblePair base = solution_pair(sol, params);
    const AdmissiblePair moved = AdmissiblePair::make(sol.m + p.dm, sol.w + p.dw, params);
    const ExtendedReal e1 = energy(moved, k, params);
    return e1 - energy(base, k, params).value();
}

AuditReport verify_local_min(const MFGSolution& sol, const RieszOperator& k, const MFGParams& params,
                             int n_perturbations, double radius, std::uint64_t rng_seed, double slack) {
    AuditReport report;
    report.slack = slack;
    const AdmissiblePair base = solution_pair(sol, params);
    const double e0 = energy(base, k, params).value();
    std::mt19937_64 seeds(rng_seed);
    for (int t = 0; t < n_perturbations; ++t) {
        const std::uint64_t trial_seed = seeds();
        ++report.trials;
        try {
            const Perturbation p = random_admissible_perturbation(sol.m, radius, trial_seed);
            const AdmissiblePair moved = AdmissiblePair::make(sol.m + p.dm, sol.w + p.dw, params);
            const ExtendedReal gap = energy(moved, k, params) - e0;
            report.min_gap = std::min(report.min_gap, gap.raw());
            if (gap < ExtendedReal(-slack)) ++report.violations;
        } catch (const std::exception&) {
            ++report.skipped;
        }
    }
    return report;
}

AuditReport verify_j_stationarity(const MFGSolution& sol, const RieszOperator& k, const Mollifier& eta,
                                  const MFGParams& params, int n_directions, std::uint64_t rng_seed, double radius,
                                  double slack) {
    AuditReport report;
    report.slack = slack;
    const AdmissiblePair base = solution_pair(sol, params);
    const double j0 = linearized_j(base, sol.m, k, eta, params).value();
    std::mt19937_64 seeds(rng_seed);
    for (int t = 0; t < n_directions; ++t) {
        const std::uint64_t trial_seed = seeds();
        ++report.trials;
        try {
            const Perturbation p = random_admissible_perturbation(sol.m, radius, trial_seed);
            const AdmissiblePair other = AdmissiblePair::make(sol.m + p.dm, sol.w + p.dw, params);
            const ExtendedReal gap = linearized_j(other, sol.m, k, eta, params) - j0;
            report.min_gap = std::min(report.min_gap, gap.raw());
            if (gap < ExtendedReal(-slack)) ++report.violations;
        } catch (const std::exception&) {
            ++report.skipped;
        }
    }
    return report;
}

}  // namespace cmfg
