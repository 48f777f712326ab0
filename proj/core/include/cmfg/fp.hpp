#pragma once

#include <Eigen/SparseCore>

#include "cmfg/grid.hpp"

namespace cmfg {

struct FPSolution {
    ScalarField m;
    double residual = 0.0;  ///< ||A m||_inf after normalization
    double min_value = 0.0;
};

/**
 * Matrix A with (A m)_c = -(divergence of F)_c, where the face flux is
 * F = (m_upper - m_lower)/h + m_up b and m_up is the donor cell for the
 * velocity -b. Boundary faces carry no flux. A is a singular M-matrix with
 * zero column sums.
 */
Eigen::SparseMatrix<double> assemble_fp_operator(const VectorField& b);

/**
 * Stationary Fokker-Planck equation laplacian(m) + div(m b) = 0 with zero
 * flux through the boundary and unit mass.
 *
 * One redundant row of A is replaced by m_0 = 1, the system is solved
 * directly, and the kernel vector is normalized to unit mass. Throws
 * std::runtime_error if the factorization fails, a kernel entry is not
 * positive, or ||A m||_inf / (||A||_inf ||m||_inf) stays above tol after
 * iterative refinement.
 */
FPSolution solve_fp(const VectorField& b, const GridSpec& spec, double tol = 1e-12);

/// Face flux -m_up b with the donor-cell choice of solve_fp; the pair
/// (m, w) then satisfies laplacian(m) = divergence(w) whenever m solves FP.
VectorField flux_from_solution(const ScalarField& m, const VectorField& b);

}  // namespace cmfg
