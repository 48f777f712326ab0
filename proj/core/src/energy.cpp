#include "cmfg/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "format.hpp"

namespace cmfg {

ScalarField admissibility_defect(const ScalarField& m, const VectorField& w) {
    require_same_grid(m.spec(), w.spec(), "admissibility_defect");
    return laplacian(m) - divergence(w);
}

AdmissiblePair AdmissiblePair::make(ScalarField m, VectorField w, const MFGParams& params) {
    require_same_grid(m.spec(), w.spec(), "AdmissiblePair");
    if (m.spec().dimension() != params.dimension) {
        throw std::invalid_argument("AdmissiblePair: grid dimension does not match params");
    }
    if (m.min() < 0.0) throw std::invalid_argument("AdmissiblePair: density has a negative entry");
    const double mass = integrate(m);
    if (std::abs(mass - 1.0) > 1e-12) {
        throw std::invalid_argument("AdmissiblePair: mass must be 1, got " + detail::format_number(mass));
    }
    if (!w.is_neumann_compatible()) throw std::invalid_argument("AdmissiblePair: flux has nonzero boundary values");

    AdmissiblePair pair(std::move(m), std::move(w));
    const ScalarField lap = laplacian(pair.m_);
    const ScalarField div = divergence(pair.w_);
    pair.residual_ = norm_lp(lap - div, 2.0);
    const double scale = std::max({1.0, norm_lp(lap, 2.0), norm_lp(div, 2.0)});
    pair.relative_residual_ = pair.residual_ / scale;
    pair.norm_q_ = norm_lp(pair.m_, params.q_alpha);
    pair.lambda_ = lambda_quantity(pair, params);
    return pair;
}

ExtendedReal kinetic_term(const ScalarField& m, const VectorField& w, const MFGParams& params) {
    require_same_grid(m.spec(), w.spec(), "kinetic_term");
    const GridSpec& spec = m.spec();
    const int dim = spec.dimension();
    ExtendedReal total(0.0);
    std::array<double, 2> wc{};
    for (std::size_t c = 0; c < spec.num_cells(); ++c) {
        double m_faces = 0.0;
        for (int d = 0; d < dim; ++d) {
            const auto comp = w.component(d);
            const std::size_t lo = spec.lower_face(d, c);
            const std::size_t hi = spec.upper_face(d, c);
            wc[static_cast<std::size_t>(d)] = 0.5 * (comp[lo] + comp[hi]);
            for (const std::size_t f : {lo, hi}) {
                const auto fc = spec.face_cells(d, f);
                m_faces += fc.boundary ? m[c] : 0.5 * (m[fc.lower] + m[fc.upper]);
            }
        }
        // Mean over axes of the cell average of the linear interpolant along
        // that axis: m + (h^2 / 8n) laplacian(m).
        const double m_rec = 0.5 * (m[c] + m_faces / (2.0 * dim));
        total += kinetic_density(m_rec, std::span<const double>(wc.data(), static_cast<std::size_t>(dim)), params);
        if (total.is_infinite()) return total;
    }
    return spec.cell_volume() * total;
}

double interaction_term(const ScalarField& m, const RieszOperator& k, const MFGParams& params) {
    if (params.c_f == 0.0) return 0.0;
    return -0.5 * params.c_f * bilinear(k, m, m);
}

ExtendedReal energy(const AdmissiblePair& pair, const RieszOperator& k, const MFGParams& params) {
    const ExtendedReal kin = kinetic_term(pair.m(), pair.w(), params);
    if (kin.is_infinite()) return kin;
    return kin + interaction_term(pair.m(), k, params);
}

ExtendedReal energy_regularized(const AdmissiblePair& pair, const RieszOperator& k, const Mollifier& eta,
                                const MFGParams& params) {
    const ExtendedReal kin = kinetic_term(pair.m(), pair.w(), params);
    if (kin.is_infinite() || params.c_f == 0.0) return kin;
    return kin - 0.5 * params.c_f * bilinear(k, mollify(pair.m(), eta), pair.m());
}

ExtendedReal linearized_j(const AdmissiblePair& pair, const ScalarField& frozen_m, const RieszOperator& k,
                          const Mollifier& eta, const MFGParams& params) {
    const ExtendedReal kin = kinetic_term(pair.m(), pair.w(), params);
    if (kin.is_infinite() || params.c_f == 0.0) return kin;
    const ScalarField potential = apply(k, mollify(frozen_m, eta));
    return kin - params.c_f * inner(pair.m(), potential);
}

ExtendedReal lambda_quantity(const AdmissiblePair& pair, const MFGParams& params) {
    const ExtendedReal kin = kinetic_term(pair.m(), pair.w(), params);
    if (kin.is_infinite()) return kin;
    return ExtendedReal(kin.value() / params.c_l);
}

bool in_ball(const AdmissiblePair& pair, double r, const MFGParams& params) {
    if (!(r > 0.0)) throw std::invalid_argument("in_ball: radius must be positive");
    return norm_lp(pair.m(), params.q_alpha) <= r;
}

bool on_sphere(const AdmissiblePair& pair, double r, double tol, const MFGParams& params) {
    if (!(r > 0.0)) throw std::invalid_argument("on_sphere: radius must be positive");
    return std::abs(norm_lp(pair.m(), params.q_alpha) - r) <= tol;
}

double interpolation_slack(const ScalarField& m, const MFGParams& params) {
    if (m.min() < 0.0) throw std::invalid_argument("interpolation_slack: density has a negative entry");
    const double l1 = norm_lp(m, 1.0);
    if (l1 == 0.0) throw std::invalid_argument("interpolation_slack: zero field");
    const double lq = norm_lp(m, params.q_alpha);
    const double lb = norm_lp(m, params.beta);
    return std::pow(lq, 1.0 / params.gamma) * std::pow(l1, 1.0 / params.gamma_prime) - lb;
}

}  // namespace cmfg
