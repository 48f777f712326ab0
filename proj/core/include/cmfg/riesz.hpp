#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cmfg/grid.hpp"

namespace cmfg {

/**
 * Dense cell-interaction matrix for the Riesz potential K_alpha = |x|^{alpha-n}.
 *
 * W(i,j) = |x_i - x_j|^{alpha-n} for i != j. The diagonal is the cell average
 * of the singular kernel: (1/h) 2 (h/2)^alpha / alpha in 1D and, in 2D, the
 * average over the equal-area disk, 2 pi r^alpha / (alpha h^2) with
 * pi r^2 = h^2. Convolution is over the box only (no periodic images).
 */
class RieszOperator {
public:
    RieszOperator(const GridSpec& spec, double alpha);

    const GridSpec& spec() const noexcept { return spec_; }
    double alpha() const noexcept { return alpha_; }
    const Eigen::MatrixXd& weights() const noexcept { return w_; }
    double diagonal() const noexcept { return w_(0, 0); }

private:
    GridSpec spec_;
    double alpha_;
    Eigen::MatrixXd w_;
};

/// Throws std::invalid_argument unless 0 < alpha < n.
RieszOperator build_riesz(const GridSpec& spec, double alpha);

/// Analytic cell average of |t|^{alpha-n} over the cell containing the origin.
double riesz_self_weight(int dimension, double h, double alpha);

/// (K * f)_i = h^n sum_j W(i,j) f_j.
ScalarField apply(const RieszOperator& k, const ScalarField& f);

/// h^{2n} sum_ij f_i W(i,j) g_j.
double bilinear(const RieszOperator& k, const ScalarField& f, const ScalarField& g);

/// bilinear(f,f) / ||f||_{q_alpha}^2. Throws on the zero field.
double hls_ratio(const RieszOperator& k, const ScalarField& f, double q_alpha);

/**
 * Discrete mollifier with the standard bump exp(-1/(1-(r/eps)^2)) on r < eps.
 *
 * Stored as a symmetric doubly stochastic matrix: off-diagonal weights are the
 * bump values divided by the largest stencil sum (the full interior stencil),
 * and each diagonal entry absorbs whatever its row is missing. Interior rows
 * are therefore the plain normalized bump; rows near the boundary keep the
 * weight that would have left the box on the cell itself. Constants are
 * fixed, mass is preserved and the max-norm never grows.
 *
 * When no neighbor lies within eps (in particular eps < h/2, or eps = 0)
 * the matrix is the identity.
 */
class Mollifier {
public:
    Mollifier(const GridSpec& spec, double epsilon);

    const GridSpec& spec() const noexcept { return spec_; }
    double epsilon() const noexcept { return epsilon_; }
    bool is_identity() const noexcept { return identity_; }
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const noexcept { return p_; }

private:
    GridSpec spec_;
    double epsilon_;
    bool identity_ = true;
    Eigen::SparseMatrix<double, Eigen::RowMajor> p_;
};

ScalarField mollify(const ScalarField& f, const Mollifier& eta);

}  // namespace cmfg
