#include "cmfg/fp.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "format.hpp"

namespace cmfg {

namespace {

// Donor cell for the mass flux m b: the velocity is -b, so b > 0 moves mass
// from upper to lower and the upper cell is upstream.
double donor(double b, double m_lower, double m_upper) { return b > 0.0 ? m_upper : m_lower; }

}  // namespace

Eigen::SparseMatrix<double> assemble_fp_operator(const VectorField& b) {
    const GridSpec& spec = b.spec();
    if (!b.is_neumann_compatible()) throw std::invalid_argument("solve_fp: drift must vanish on boundary faces");
    const double inv_h = 1.0 / spec.spacing();
    const auto cells = static_cast<Eigen::Index>(spec.num_cells());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(cells) * (1 + 2 * static_cast<std::size_t>(spec.dimension())) * 2);
    for (int d = 0; d < spec.dimension(); ++d) {
        const auto comp = b.component(d);
        for (std::size_t f = 0; f < comp.size(); ++f) {
            const auto fc = spec.face_cells(d, f);
            if (fc.boundary) continue;
            if (!std::isfinite(comp[f])) throw std::invalid_argument("solve_fp: drift is not finite");
            // F = coef_upper m_upper + coef_lower m_lower
            const double bp = std::max(comp[f], 0.0);
            const double bm = std::min(comp[f], 0.0);
            const double coef_upper = inv_h + bp;
            const double coef_lower = -inv_h + bm;
            const auto lo = static_cast<Eigen::Index>(fc.lower);
            const auto hi = static_cast<Eigen::Index>(fc.upper);
            // A = -div F: the face adds +F/h to its lower cell and -F/h to its upper cell.
            trip.emplace_back(lo, hi, coef_upper * inv_h);
            trip.emplace_back(lo, lo, coef_lower * inv_h);
            trip.emplace_back(hi, hi, -coef_upper * inv_h);
            trip.emplace_back(hi, lo, -coef_lower * inv_h);
        }
    }
    Eigen::SparseMatrix<double> a(cells, cells);
    a.setFromTriplets(trip.begin(), trip.end());
    // -div F: negate so that off-diagonals are nonpositive.
    a *= -1.0;
    return a;
}

FPSolution solve_fp(const VectorField& b, const GridSpec& spec, double tol) {
    require_same_grid(b.spec(), spec, "solve_fp");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_fp: tol must be positive");
    const Eigen::SparseMatrix<double> a = assemble_fp_operator(b);
    const auto cells = a.rows();

    // Row 0 is redundant (columns sum to zero); pin m_0 = 1 instead.
    Eigen::SparseMatrix<double, Eigen::RowMajor> pinned = a;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(pinned, 0); it; ++it) {
        it.valueRef() = it.col() == 0 ? 1.0 : 0.0;
    }
    Eigen::SparseMatrix<double> sys = pinned;
    sys.prune(0.0);
    if (sys.coeff(0, 0) != 1.0) sys.coeffRef(0, 0) = 1.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys);
    if (lu.info() != Eigen::Success) throw std::runtime_error("solve_fp: factorization failed");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cells);
    rhs(0) = 1.0;
    Eigen::VectorXd x = lu.solve(rhs);
    for (int refine = 0; refine < 3; ++refine) {
        const Eigen::VectorXd r = rhs - sys * x;
        if (r.lpNorm<Eigen::Infinity>() == 0.0) break;
        x += lu.solve(r);
    }

    ScalarField m(spec);
    for (Eigen::Index i = 0; i < cells; ++i) {
        if (!(x(i) > 0.0)) {
            throw std::runtime_error("solve_fp: nonpositive kernel entry " + detail::format_number(x(i)) + " at cell " +
                                     std::to_string(i) + " (operator is not an M-matrix)");
        }
        m[static_cast<std::size_t>(i)] = x(i);
    }
    m *= 1.0 / integrate(m);

    const Eigen::Map<const Eigen::VectorXd> mv(m.values().data(), cells);
    FPSolution out{std::move(m), 0.0, 0.0};
    out.residual = (a * mv).lpNorm<Eigen::Infinity>();
    out.min_value = out.m.min();
    // Entries of A grow like N^2, so the absolute residual has a rounding floor
    // that rises with refinement; tol bounds the normwise backward error.
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(cells);
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) row_sums(it.row()) += std::abs(it.value());
    }
    const double a_norm = row_sums.maxCoeff();
    const double relative = out.residual / (a_norm * mv.lpNorm<Eigen::Infinity>());
    if (relative > tol) {
        throw std::runtime_error("solve_fp: relative residual " + detail::format_number(relative) + " exceeds tol " +
                                 detail::format_number(tol));
    }
    return out;
}

VectorField flux_from_solution(const ScalarField& m, const VectorField& b) {
    require_same_grid(m.spec(), b.spec(), "flux_from_solution");
    const GridSpec& spec = m.spec();
    VectorField w(spec);
    for (int d = 0; d < spec.dimension(); ++d) {
        const auto bc = b.component(d);
        auto wc = w.component(d);
        for (std::size_t f = 0; f < wc.size(); ++f) {
            const auto fc = spec.face_cells(d, f);
            wc[f] = fc.boundary ? 0.0 : -donor(bc[f], m[fc.lower], m[fc.upper]) * bc[f];
        }
    }
    return w;
}

}  // namespace cmfg
