#pragma once

#include <optional>
#include <string>

#include "cmfg/grid.hpp"
#include "cmfg/hamiltonian.hpp"

namespace cmfg {

struct HJBOptions {
    double tol = 1e-10;
    int max_iter = 100;
    std::optional<ScalarField> initial_u;
    std::optional<double> initial_lambda;
};

struct HJBSolution {
    ScalarField u;
    double lambda = 0.0;
    double residual = 0.0;  ///< max-norm of the discrete equation
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Godunov upwind |grad u|^2: per axis max(D-u, 0)^2 + max(-D+u, 0)^2.
ScalarField upwind_gradient_sq(const ScalarField& u);

/// Cell values of -laplacian(u) + C_H |grad u|_up^gamma + lambda - f.
ScalarField hjb_residual(const ScalarField& u, double lambda, const ScalarField& f, const MFGParams& params);

/**
 * Solves -laplacian(u) + C_H |grad u|^gamma + lambda = f with homogeneous
 * Neumann conditions and mean(u) = 0.
 *
 * Damped Newton on the augmented system in (u, lambda): one equation per
 * cell plus the mean-zero row. The step is halved (at most 30 times) until
 * the max-norm residual decreases; u is re-centered after every step.
 * Failure to converge is reported in the result, not thrown.
 */
HJBSolution solve_hjb(const ScalarField& f, const MFGParams& params, const HJBOptions& options = {});

/**
 * Face velocity C_H gamma |g|^{gamma-2} g_n, where g_n is the face-normal
 * difference and, in 2D, the tangential component of g is the average of
 * the four adjacent tangential face differences. Zero where g = 0 and on
 * boundary-normal faces.
 */
VectorField drift_from_u(const ScalarField& u, const MFGParams& params);

}  // namespace cmfg
