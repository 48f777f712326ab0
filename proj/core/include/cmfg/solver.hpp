#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cmfg/energy.hpp"
#include "cmfg/grid.hpp"
#include "cmfg/hamiltonian.hpp"
#include "cmfg/riesz.hpp"

namespace cmfg {

struct SolveConfig {
    double tau = 0.5;  ///< convex damping of the density update, in (0, 1]
    double min_tau = 1.0 / 64.0;
    double tol = 1e-10;  ///< on ||m_new - m||_2
    int max_outer_iterations = 500;
    /// Strictly decreasing; continuation expects the last value below h/2.
    std::vector<double> epsilon_schedule;
    /// L^{q_alpha} radius of the ball the iterates are kept in; +inf disables.
    double ball_radius = std::numeric_limits<double>::infinity();
    std::uint64_t rng_seed = 0;

    double hjb_tol = 1e-11;
    int hjb_max_iter = 100;
    double fp_tol = 1e-12;  ///< relative: ||A m|| / (||A|| ||m||)

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct MFGSolution {
    ScalarField u;
    ScalarField m;
    double lambda = 0.0;
    VectorField w;      ///< -m_up * drift, the optimal flux
    VectorField drift;  ///< C_H gamma |grad u|^{gamma-2} grad u on faces

    double hjb_residual = 0.0;
    double fp_residual = 0.0;
    double coupling_residual = 0.0;
    double admissibility_residual = 0.0;
    double energy_value = 0.0;
    double energy_reg_value = 0.0;
    double epsilon = 0.0;
    int iterations = 0;
    double final_tau = 0.0;
    bool converged = false;
    std::string message;
    std::vector<double> residual_history;

    explicit MFGSolution(const GridSpec& spec) : u(spec), m(spec, 1.0), w(spec), drift(spec) {}
};

/**
 * Damped fixed point for the system regularized at params.epsilon:
 *
 *   f_k  = -C_f K * mollify(m_k)
 *   (u_k, lambda_k) = solve_hjb(f_k)
 *   m~   = solve_fp(drift_from_u(u_k))
 *   m_{k+1} = (1 - tau) m_k + tau m~
 *
 * until ||m~ - m_k||_2 <= tol. tau is halved (down to min_tau) after five
 * consecutive residual increases. Non-convergence is returned as data with
 * the residual history; inner solver failures are reported with the stage.
 */
MFGSolution solve_mfg(const MFGParams& params, const SolveConfig& config, const RieszOperator& k,
                      const std::optional<ScalarField>& initial_m = std::nullopt);

struct ContinuationResult {
    std::vector<MFGSolution> stages;
    std::vector<double> tail_differences;  ///< ||m_{k+1} - m_k||_2 between consecutive stages
    bool aborted = false;

    bool tail_decreasing() const;
    const MFGSolution& final_stage() const { return stages.back(); }
};

/// Runs solve_mfg along config.epsilon_schedule, warm-starting each stage.
/// Aborts after two consecutive failed stages.
ContinuationResult continuation(const MFGParams& params, const SolveConfig& config, const RieszOperator& k);

/// Mean-zero phi solving laplacian(phi) = rhs with Neumann conditions.
/// rhs must have zero mean to rounding.
ScalarField solve_neumann_poisson(const ScalarField& rhs);

/// The pair (m, w) of a solution.
AdmissiblePair solution_pair(const MFGSolution& sol, const MFGParams& params);

/**
 * Admissible perturbation of (m, w): delta_m is a random mean-zero
 * combination of smooth Neumann cosine modes with ||delta_m||_2 = radius
 * (reduced where needed to keep m + delta_m > 0), and delta_w is the gradient
 * of the Neumann potential with laplacian(phi) = laplacian(delta_m).
 */
struct Perturbation {
    ScalarField dm;
    VectorField dw;
};
Perturbation random_admissible_perturbation(const ScalarField& m, double radius, std::uint64_t seed);
Perturbation admissible_perturbation(const ScalarField& m, ScalarField dm);

struct AuditReport {
    int trials = 0;
    int violations = 0;
    int skipped = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double slack = 0.0;

    bool passed() const { return violations == 0 && skipped == 0 && trials > 0; }
};

/// E(m + dm, w + dw) - E(m, w); +inf if the perturbed pair leaves the domain of E.
ExtendedReal energy_gap(const MFGSolution& sol, const Perturbation& p, const RieszOperator& k,
                        const MFGParams& params);

/// Local minimality of E at sol against seeded admissible perturbations.
AuditReport verify_local_min(const MFGSolution& sol, const RieszOperator& k, const MFGParams& params,
                             int n_perturbations, double radius, std::uint64_t rng_seed, double slack = 1e-10);

/// J_eps(m', w') >= J_eps(m_sol, w_sol) - slack for seeded admissible pairs,
/// with J linearized at m_sol.
AuditReport verify_j_stationarity(const MFGSolution& sol, const RieszOperator& k, const Mollifier& eta,
                                  const MFGParams& params, int n_directions, std::uint64_t rng_seed,
                                  double radius = 1e-2, double slack = 1e-8);

}  // namespace cmfg
