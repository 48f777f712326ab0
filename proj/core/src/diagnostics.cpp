#include "cmfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "format.hpp"

namespace cmfg {

namespace {

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

std::string Regime::label() const {
    switch (kind) {
        case RegimeKind::SobolevSupercritical: return "H1";
        case RegimeKind::SobolevCritical: return "H2";
        case RegimeKind::MassSupercritical: return "H3";
        case RegimeKind::MassCritical: return "H4";
        case RegimeKind::MassSubcritical: return "H5";
    }
    return "?";
}

std::string Regime::name() const {
    switch (kind) {
        case RegimeKind::SobolevSupercritical: return "sobolev-supercritical";
        case RegimeKind::SobolevCritical: return "sobolev-critical";
        case RegimeKind::MassSupercritical: return "mass-supercritical";
        case RegimeKind::MassCritical: return "mass-critical";
        case RegimeKind::MassSubcritical: return "mass-subcritical";
    }
    return "unknown";
}

Regime classify_regime(int n, double gamma, double alpha) {
    if (n < 1) throw std::invalid_argument("classify_regime: n must be positive");
    if (!(gamma > 1.0)) throw std::invalid_argument("classify_regime: gamma must exceed 1");
    if (!(alpha > 0.0 && alpha < n)) throw std::invalid_argument("classify_regime: alpha must lie in (0, n)");
    const double gp = gamma / (gamma - 1.0);
    const double nd = n;
    Regime r{RegimeKind::MassSubcritical, nd > gp ? nd - gp : 0.0, nd > 2.0 * gp ? nd - 2.0 * gp : 0.0};

    if (r.alpha_sc > 0.0 && nearly_equal(alpha, r.alpha_sc)) {
        r.kind = RegimeKind::SobolevCritical;
    } else if (r.alpha_mc > 0.0 && nearly_equal(alpha, r.alpha_mc)) {
        r.kind = RegimeKind::MassCritical;
    } else if (alpha < r.alpha_sc) {
        r.kind = RegimeKind::SobolevSupercritical;
    } else if (alpha < r.alpha_mc) {
        r.kind = RegimeKind::MassSupercritical;
    }
    return r;
}

double mass_critical_exponent_product(int n, double gamma) {
    const double gp = gamma / (gamma - 1.0);
    const double nd = n;
    if (!(nd > gp)) throw std::invalid_argument("mass_critical_exponent_product: no mass-critical exponent for n <= gamma'");
    const double alpha = nd - gp;
    const double q = 2.0 * nd / (nd + alpha);
    const double delta = (nd - gp) / nd;
    return q * (1.0 + delta);
}

// ---------------------------------------------------------------------------

ScalarField bump_density(const GridSpec& spec, double sigma, std::array<double, 2> center) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bump_density: sigma must be positive");
    for (int d = 0; d < spec.dimension(); ++d) {
        const double c = center[static_cast<std::size_t>(d)];
        if (c - sigma < 0.0 || c + sigma > 1.0) {
            throw std::invalid_argument("bump_density: support leaves the box");
        }
    }
    const int dim = spec.dimension();
    ScalarField m = ScalarField::from_function(spec, [&](std::array<double, 2> x) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double dx = x[static_cast<std::size_t>(d)] - center[static_cast<std::size_t>(d)];
            r2 += dx * dx;
        }
        const double t = 1.0 - r2 / (sigma * sigma);
        return t > 0.0 ? t * t * t : 0.0;
    });
    const double mass = integrate(m);
    if (!(mass > 0.0)) throw std::invalid_argument("bump_density: sigma too small for the grid");
    m *= 1.0 / mass;
    return m;
}

AdmissiblePair concentration_family(const GridSpec& spec, double sigma, std::array<double, 2> center,
                                    const MFGParams& params) {
    const double h = spec.spacing();
    if (!(sigma > 2.0 * h && sigma < 0.25)) {
        throw std::invalid_argument("concentration_family: sigma must lie in (2h, 0.25), got " + detail::format_number(sigma));
    }
    for (int d = 0; d < spec.dimension(); ++d) {
        const double c = center[static_cast<std::size_t>(d)];
        if (c < 4.0 * sigma || c > 1.0 - 4.0 * sigma) {
            throw std::invalid_argument("concentration_family: center must be at least 4 sigma from the boundary");
        }
    }
    ScalarField m = bump_density(spec, sigma, center);
    VectorField w = gradient(m);
    return AdmissiblePair::make(std::move(m), std::move(w), params);
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need matching samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: samples must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw std::invalid_argument("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

ScalingReport scaling_sweep(const MFGParams& params, const RieszOperator& k, const std::vector<double>& sigma_list) {
    if (sigma_list.size() < 5) throw std::invalid_argument("scaling_sweep: need at least 5 sigma values");
    const GridSpec& spec = k.spec();
    if (spec.dimension() != params.dimension) throw std::invalid_argument("scaling_sweep: dimension mismatch");
    const std::array<double, 2> center{0.5, 0.5};
    const double fit_floor = 4.0 * spec.spacing();

    ScalingReport rep;
    rep.sigma_list = sigma_list;
    std::vector<double> fx, fk, fb;
    for (double sigma : sigma_list) {
        const AdmissiblePair pair = concentration_family(spec, sigma, center, params);
        const ExtendedReal kin = kinetic_term(pair.m(), pair.w(), params);
        if (kin.is_infinite()) throw std::runtime_error("scaling_sweep: infinite kinetic term");
        const double b = bilinear(k, pair.m(), pair.m());
        rep.kinetic_values.push_back(kin.value());
        rep.interaction_values.push_back(b);
        rep.potential_values.push_back(0.5 * params.c_f * b);
        rep.energy_values.push_back(kin.value() - 0.5 * params.c_f * b);
        const bool use = sigma >= fit_floor;
        rep.used_in_fit.push_back(use);
        if (use) {
            fx.push_back(sigma);
            fk.push_back(kin.value());
            fb.push_back(b);
        }
    }
    if (fx.size() < 3) throw std::invalid_argument("scaling_sweep: fewer than 3 sigma values at least 4h");
    rep.kinetic_slope = loglog_slope(fx, fk);
    rep.potential_slope = loglog_slope(fx, fb);
    if (!std::isfinite(rep.kinetic_slope) || !std::isfinite(rep.potential_slope)) {
        throw std::runtime_error("scaling_sweep: non-finite slope");
    }
    // Along sigma -> 0 the energy behaves like a sigma^k - c sigma^p; it is
    // unbounded below when the negative part wins, i.e. p < k.
    rep.energy_sign_trend = (params.c_f > 0.0 && rep.potential_slope < rep.kinetic_slope)
                                ? EnergyTrend::UnboundedBelow
                                : EnergyTrend::BoundedBelow;

    const auto smallest = std::min_element(sigma_list.begin(), sigma_list.end()) - sigma_list.begin();
    const auto largest = std::max_element(sigma_list.begin(), sigma_list.end()) - sigma_list.begin();
    rep.energy_decreasing_as_sigma_shrinks =
        rep.energy_values[static_cast<std::size_t>(smallest)] < rep.energy_values[static_cast<std::size_t>(largest)];
    return rep;
}

// ---------------------------------------------------------------------------

double schrodinger_residual(const MFGSolution& sol, const MFGParams& params, const RieszOperator& k) {
    const ScalarField& m = sol.m;
    const GridSpec& spec = m.spec();
    if (m.min() <= 0.0) throw std::invalid_argument("schrodinger_residual: m must be positive");
    const double gp = params.gamma_prime;
    const double mu = std::pow((gp - 1.0) / params.c_h, gp - 1.0);

    ScalarField v(spec);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = std::pow(m[c], 1.0 / gp);
    const VectorField g = gradient(v);

    // |grad v|^{gamma'-2} grad v on faces, same face norm as the drift.
    VectorField flux(spec);
    for (int d = 0; d < spec.dimension(); ++d) {
        const auto gn = g.component(d);
        auto out = flux.component(d);
        const int t = 1 - d;
        for (std::size_t f = 0; f < out.size(); ++f) {
            const auto fc = spec.face_cells(d, f);
            if (fc.boundary) continue;
            double norm2 = gn[f] * gn[f];
            if (spec.dimension() == 2) {
                const auto gt = g.component(t);
                const double tang = 0.25 * (gt[spec.lower_face(t, fc.lower)] + gt[spec.upper_face(t, fc.lower)] +
                                            gt[spec.lower_face(t, fc.upper)] + gt[spec.upper_face(t, fc.upper)]);
                norm2 += tang * tang;
            }
            out[f] = norm2 > 0.0 ? std::pow(norm2, 0.5 * (gp - 2.0)) * gn[f] : 0.0;
        }
    }
    const ScalarField plap = divergence(flux);
    ScalarField f = apply(k, m);
    f *= -params.c_f;

    const int n = spec.cells_per_axis();
    const int jmax = spec.dimension() == 2 ? n - 1 : 1;
    const int jmin = spec.dimension() == 2 ? 1 : 0;
    double worst = 0.0;
    for (int j = jmin; j < jmax; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t c = spec.cell_index(i, j);
            const double r = -mu * plap[c] + (f[c] - sol.lambda) * std::pow(v[c], gp - 1.0);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

ThresholdTable threshold_probe(const MFGParams& params_base, const RieszOperator& k,
                               const std::vector<double>& c_f_grid, const SolveConfig& config) {
    for (std::size_t i = 1; i < c_f_grid.size(); ++i) {
        if (!(c_f_grid[i] > c_f_grid[i - 1])) throw std::invalid_argument("threshold_probe: C_f grid must increase");
    }
    ThresholdTable table;
    bool prefix = true;
    for (double c_f : c_f_grid) {
        const MFGParams p = params_base.with_coupling(c_f);
        const MFGSolution sol = solve_mfg(p, config, k);
        ThresholdRow row;
        row.c_f = c_f;
        row.converged = sol.converged;
        row.iterations = sol.iterations;
        row.lambda = sol.lambda;
        row.norm_q = norm_lp(sol.m, p.q_alpha);
        row.norm_inf = norm_lp(sol.m, std::numeric_limits<double>::infinity());
        table.rows.push_back(row);
        if (sol.converged && prefix) {
            table.largest_convergent_c_f = c_f;
        } else if (!sol.converged && prefix) {
            prefix = false;
            table.first_failure_c_f = c_f;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------

bool HlsAuditReport::passed() const {
    if (rows.empty()) return false;
    for (const auto& r : rows) {
        if (!(std::isfinite(r.ratio) && r.ratio > 0.0)) return false;
    }
    return std::all_of(spread.begin(), spread.end(), [this](double s) { return s < spread_limit; });
}

HlsAuditReport hls_invariance_audit(const std::vector<GridSpec>& spec_list, double alpha,
                                    const std::vector<double>& sigma_list) {
    HlsAuditReport rep;
    for (const GridSpec& spec : spec_list) {
        const RieszOperator k(spec, alpha);
        const double n = spec.dimension();
        const double q = 2.0 * n / (n + alpha);
        const std::array<double, 2> center{0.5, 0.5};

        const ScalarField one(spec, 1.0);
        double top = hls_ratio(k, one, q);
        rep.rows.push_back({spec.dimension(), spec.cells_per_axis(), 0.0, top});

        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (double sigma : sigma_list) {
            const double ratio = hls_ratio(k, bump_density(spec, sigma, center), q);
            rep.rows.push_back({spec.dimension(), spec.cells_per_axis(), sigma, ratio});
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            top = std::max(top, ratio);
        }
        rep.spread.push_back(sigma_list.empty() ? 0.0 : (hi - lo) / lo);
        rep.max_ratio.push_back(top);
    }
    return rep;
}

}  // namespace cmfg
