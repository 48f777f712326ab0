#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cmfg/energy.hpp"
#include "cmfg/grid.hpp"
#include "cmfg/hamiltonian.hpp"
#include "cmfg/riesz.hpp"
#include "cmfg/solver.hpp"

namespace cmfg {

enum class RegimeKind {
    SobolevSupercritical,  // H1
    SobolevCritical,       // H2
    MassSupercritical,     // H3
    MassCritical,          // H4
    MassSubcritical,       // H5
};

struct Regime {
    RegimeKind kind;
    double alpha_mc;
    double alpha_sc;

    /// "H1" ... "H5".
    std::string label() const;
    std::string name() const;
};

/// Exponent comparisons use a relative tolerance of 1e-12.
Regime classify_regime(int n, double gamma, double alpha);

/// q_alpha (1 + delta) at alpha = alpha_mc with delta = (n - gamma')/n; equals 2
/// whenever n > gamma'. Throws if alpha_mc = 0.
double mass_critical_exponent_product(int n, double gamma);

/// Normalized (1 - (r/sigma)^2)^3 bump; the support must lie inside the box.
ScalarField bump_density(const GridSpec& spec, double sigma, std::array<double, 2> center);

/**
 * m_sigma = normalized bump of width sigma, w_sigma = gradient(m_sigma), so
 * that laplacian(m) = divergence(w) holds exactly. Requires 2h < sigma < 0.25
 * and a center at least 4 sigma away from the boundary.
 */
AdmissiblePair concentration_family(const GridSpec& spec, double sigma, std::array<double, 2> center,
                                    const MFGParams& params);

enum class EnergyTrend { UnboundedBelow, BoundedBelow };

struct ScalingReport {
    std::vector<double> sigma_list;
    std::vector<double> kinetic_values;
    std::vector<double> interaction_values;  ///< bilinear(K, m, m)
    std::vector<double> potential_values;    ///< 1/2 C_f bilinear(K, m, m), magnitude of the negative part
    std::vector<double> energy_values;
    std::vector<bool> used_in_fit;
    double kinetic_slope = 0.0;
    double potential_slope = 0.0;  ///< fitted on bilinear(K, m, m), so defined for C_f = 0
    EnergyTrend energy_sign_trend = EnergyTrend::BoundedBelow;
    bool energy_decreasing_as_sigma_shrinks = false;

    bool unbounded_below() const { return energy_sign_trend == EnergyTrend::UnboundedBelow; }
};

/**
 * Kinetic and interaction terms along the concentration family, centered in
 * the box, with least-squares log-log slopes. Points with sigma < 4h are
 * excluded from the fit. The trend is UnboundedBelow when the interaction
 * grows strictly faster than the kinetic term as sigma -> 0.
 */
ScalingReport scaling_sweep(const MFGParams& params, const RieszOperator& k, const std::vector<double>& sigma_list);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/**
 * Max-norm over interior cells of -mu Delta_{gamma'} v + (f - lambda) v^{gamma'-1}
 * with v = m^{1/gamma'}, mu = ((gamma'-1)/C_H)^{gamma'-1} and f = -C_f K * m.
 * Throws if m has a nonpositive entry.
 */
double schrodinger_residual(const MFGSolution& sol, const MFGParams& params, const RieszOperator& k);

struct ThresholdRow {
    double c_f = 0.0;
    bool converged = false;
    double norm_q = 0.0;
    double norm_inf = 0.0;
    double lambda = 0.0;
    int iterations = 0;
};

struct ThresholdTable {
    std::vector<ThresholdRow> rows;
    /// Largest C_f of the convergent prefix of the grid.
    std::optional<double> largest_convergent_c_f;
    /// Smallest C_f that failed, if any.
    std::optional<double> first_failure_c_f;
};

ThresholdTable threshold_probe(const MFGParams& params_base, const RieszOperator& k,
                               const std::vector<double>& c_f_grid, const SolveConfig& config);

struct HlsAuditRow {
    int dimension = 1;
    int cells = 0;
    double sigma = 0.0;  ///< 0 marks the constant field
    double ratio = 0.0;
};

struct HlsAuditReport {
    std::vector<HlsAuditRow> rows;
    std::vector<double> spread;     ///< per grid: (max - min)/min of the bump rows
    std::vector<double> max_ratio;  ///< per grid, over all rows
    double spread_limit = 0.10;

    bool passed() const;
};

HlsAuditReport hls_invariance_audit(const std::vector<GridSpec>& spec_list, double alpha,
                                    const std::vector<double>& sigma_list);

}  // namespace cmfg
