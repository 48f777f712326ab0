#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmfg/extended_real.hpp"

namespace cmfg {

/**
 * Model parameters for the ergodic system with Hamiltonian C_H |p|^gamma and
 * Riesz coupling -C_f (K_alpha * m), plus the exponents derived from them.
 *
 * Construct through make(), which validates ranges and fills the derived
 * fields. Direct aggregate construction skips validation.
 */
struct MFGParams {
    int dimension = 1;
    double gamma = 2.0;
    double c_h = 1.0;
    double c_f = 0.0;
    double alpha = 0.5;
    double epsilon = 0.0;  ///< mollification radius; 0 means unregularized

    // derived
    double gamma_prime = 2.0;  ///< conjugate exponent gamma/(gamma-1)
    double c_l = 0.25;         ///< Lagrangian constant: L(q) = c_l |q|^gamma'
    double q_alpha = 1.0;      ///< 2n/(n+alpha)
    double beta = 1.0;         ///< 1/beta = 1/gamma' + 1/(gamma q_alpha)
    double alpha_mc = 0.0;     ///< mass-critical exponent
    double alpha_sc = 0.0;     ///< Sobolev-critical exponent
    double flux_exponent = 1.0;  ///< integrability exponent of w: gamma' q/(gamma'+q-1), metadata only

    /// Throws std::invalid_argument naming the offending field.
    static MFGParams make(int dimension, double gamma, double c_h, double c_f, double alpha, double epsilon = 0.0);

    MFGParams with_coupling(double new_c_f) const;
    MFGParams with_epsilon(double new_epsilon) const;
};

/// (gamma C_H)^{-(gamma'-1)} / gamma'.
double lagrangian_constant(double gamma, double c_h);

double hamiltonian_value(const MFGParams& params, std::span<const double> p);
/// Writes C_H gamma |p|^{gamma-2} p into out; zero at p = 0 for every gamma > 1.
void hamiltonian_grad(const MFGParams& params, std::span<const double> p, std::span<double> out);

double legendre_lagrangian(std::span<const double> q, const MFGParams& params);

struct LegendreCheck {
    double max_abs_gap = 0.0;
    bool inconclusive = false;  ///< a maximizer landed on the edge of the p-grid
    std::size_t worst_sample = 0;

    bool passed(double threshold) const { return !inconclusive && max_abs_gap < threshold; }
};

/**
 * Brute-force check of the closed-form Lagrangian: for each q, maximizes
 * q.p - H(p) over a tensor p-grid of p_grid_count points per axis on
 * [-radius, radius]^n, then zooms in around the best node with successively
 * finer grids. The dimension is taken from the q samples.
 */
LegendreCheck legendre_check(const MFGParams& params, const std::vector<std::vector<double>>& q_samples,
                             double p_grid_radius, int p_grid_count);

/// Radius that keeps the maximizer |p*| = (|q|/(gamma C_H))^{1/(gamma-1)} well inside the grid.
double legendre_radius_for(const MFGParams& params, double max_q_norm);

/**
 * Kinetic cost m L(-w/m) = C_L |w|^{gamma'} m^{1-gamma'} for m > 0, 0 at
 * (0,0) and +infinity for m = 0 with w != 0. Throws on m < 0.
 */
ExtendedReal kinetic_density(double m, std::span<const double> w, const MFGParams& params);

}  // namespace cmfg
