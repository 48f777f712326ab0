#pragma once

#include "cmfg/extended_real.hpp"
#include "cmfg/grid.hpp"
#include "cmfg/hamiltonian.hpp"
#include "cmfg/riesz.hpp"

namespace cmfg {

/// Relative residual below which a pair counts as a member of the admissible set.
inline constexpr double kAdmissibilityTolerance = 1e-8;

/**
 * Density/flux pair (m, w) with unit mass.
 *
 * The continuity constraint is the discrete weak form laplacian(m) =
 * divergence(w); its L2 residual is recorded, not enforced, so that
 * perturbed or manufactured pairs can be inspected.
 */
class AdmissiblePair {
public:
    /// Throws std::invalid_argument if m has a negative entry, the mass
    /// differs from 1 by more than 1e-12, or w has a nonzero boundary flux.
    static AdmissiblePair make(ScalarField m, VectorField w, const MFGParams& params);

    const ScalarField& m() const noexcept { return m_; }
    const VectorField& w() const noexcept { return w_; }
    const GridSpec& spec() const noexcept { return m_.spec(); }

    ExtendedReal lambda() const noexcept { return lambda_; }
    double norm_q() const noexcept { return norm_q_; }
    double residual() const noexcept { return residual_; }
    double relative_residual() const noexcept { return relative_residual_; }
    bool is_admissible() const noexcept { return relative_residual_ <= kAdmissibilityTolerance; }

private:
    AdmissiblePair(ScalarField m, VectorField w) : m_(std::move(m)), w_(std::move(w)) {}

    ScalarField m_;
    VectorField w_;
    ExtendedReal lambda_;
    double norm_q_ = 0.0;
    double residual_ = 0.0;
    double relative_residual_ = 0.0;
};

/// laplacian(m) - divergence(w).
ScalarField admissibility_defect(const ScalarField& m, const VectorField& w);

/**
 * Kinetic integral C_L sum_c h^n |w_c|^gamma' m_c^{1-gamma'}.
 *
 * Face fluxes are averaged to cell centers. The density is reconstructed
 * per cell as m_c + (h^2/8n) laplacian(m)_c, the axis-averaged cell mean of
 * the piecewise-linear interpolant, which stays positive next to any
 * occupied cell. A cell whose reconstructed density is 0 while its flux is
 * not yields +infinity.
 */
ExtendedReal kinetic_term(const ScalarField& m, const VectorField& w, const MFGParams& params);

/// -1/2 C_f bilinear(K, m, m).
double interaction_term(const ScalarField& m, const RieszOperator& k, const MFGParams& params);

ExtendedReal energy(const AdmissiblePair& pair, const RieszOperator& k, const MFGParams& params);

/// Kinetic term minus 1/2 C_f bilinear(K, mollify(m), m).
ExtendedReal energy_regularized(const AdmissiblePair& pair, const RieszOperator& k, const Mollifier& eta,
                                const MFGParams& params);

/// Kinetic term minus C_f h^n sum m (K * mollify(frozen_m)); convex in the pair.
ExtendedReal linearized_j(const AdmissiblePair& pair, const ScalarField& frozen_m, const RieszOperator& k,
                          const Mollifier& eta, const MFGParams& params);

/// Kinetic integral divided by C_L.
ExtendedReal lambda_quantity(const AdmissiblePair& pair, const MFGParams& params);

bool in_ball(const AdmissiblePair& pair, double r, const MFGParams& params);
bool on_sphere(const AdmissiblePair& pair, double r, double tol, const MFGParams& params);

/// ||m||_q^{1/gamma} ||m||_1^{1/gamma'} - ||m||_beta; nonnegative by Hoelder.
double interpolation_slack(const ScalarField& m, const MFGParams& params);

}  // namespace cmfg
