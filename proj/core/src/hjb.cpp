#include "cmfg/hjb.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "format.hpp"

namespace cmfg {

namespace {

struct Neighbors {
    bool has_lo;
    bool has_hi;
    std::size_t lo;
    std::size_t hi;
};

Neighbors neighbors(const GridSpec& spec, int axis, std::size_t c) {
    const auto flo = spec.face_cells(axis, spec.lower_face(axis, c));
    const auto fhi = spec.face_cells(axis, spec.upper_face(axis, c));
    return {!flo.boundary, !fhi.boundary, flo.lower, fhi.upper};
}

double center(ScalarField& u) {
    const double mean = integrate(u);  // |Omega| = 1
    u += -mean;
    return mean;
}

}  // namespace

ScalarField upwind_gradient_sq(const ScalarField& u) {
    const GridSpec& spec = u.spec();
    const double inv_h = 1.0 / spec.spacing();
    ScalarField g(spec);
    for (std::size_t c = 0; c < spec.num_cells(); ++c) {
        double s = 0.0;
        for (int d = 0; d < spec.dimension(); ++d) {
            const Neighbors nb = neighbors(spec, d, c);
            const double dm = nb.has_lo ? (u[c] - u[nb.lo]) * inv_h : 0.0;
            const double dp = nb.has_hi ? (u[nb.hi] - u[c]) * inv_h : 0.0;
            const double a = std::max(dm, 0.0);
            const double b = std::max(-dp, 0.0);
            s += a * a + b * b;
        }
        g[c] = s;
    }
    return g;
}

ScalarField hjb_residual(const ScalarField& u, double lambda, const ScalarField& f, const MFGParams& params) {
    require_same_grid(u.spec(), f.spec(), "hjb_residual");
    const ScalarField g = upwind_gradient_sq(u);
    ScalarField r = laplacian(u);
    r *= -1.0;
    for (std::size_t c = 0; c < r.size(); ++c) {
        r[c] += params.c_h * std::pow(g[c], 0.5 * params.gamma) + lambda - f[c];
    }
    return r;
}

HJBSolution solve_hjb(const ScalarField& f, const MFGParams& params, const HJBOptions& options) {
    if (!f.all_finite()) throw std::invalid_argument("solve_hjb: right-hand side is not finite");
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve_hjb: tol must be positive");
    const GridSpec& spec = f.spec();
    if (spec.dimension() != params.dimension) throw std::invalid_argument("solve_hjb: dimension mismatch");

    const auto cells = static_cast<Eigen::Index>(spec.num_cells());
    const double h = spec.spacing();
    const double inv_h = 1.0 / h;
    const double inv_h2 = inv_h * inv_h;
    const double half_gamma = 0.5 * params.gamma;

    HJBSolution sol{options.initial_u.value_or(ScalarField(spec)), 0.0, 0.0, 0, false, {}};
    require_same_grid(sol.u.spec(), spec, "solve_hjb initial_u");
    center(sol.u);
    if (options.initial_lambda) {
        sol.lambda = *options.initial_lambda;
    } else {
        // Compatibility: integrating the equation kills the Laplacian.
        const ScalarField g = upwind_gradient_sq(sol.u);
        double hsum = 0.0;
        for (double v : g.values()) hsum += std::pow(v, half_gamma);
        sol.lambda = integrate(f) - params.c_h * spec.cell_volume() * hsum;
    }

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool pattern_ready = false;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(cells + 1);

    // Newton matrix at sol.u with `shift` added to the u-block diagonal.
    // shift = 1/dt turns the step into one implicit pseudo-time step of
    // u_t + F(u) = 0, which the comparison principle keeps bounded.
    auto factorize = [&](double shift) {
        trip.clear();
        const ScalarField g = upwind_gradient_sq(sol.u);
        for (std::size_t c = 0; c < spec.num_cells(); ++c) {
            const auto row = static_cast<Eigen::Index>(c);
            double diag = shift;
            // d/dG of C_H G^{gamma/2}; zero at G = 0 (continuous extension).
            const double dh = g[c] > 0.0 ? params.c_h * half_gamma * std::pow(g[c], half_gamma - 1.0) : 0.0;
            for (int d = 0; d < spec.dimension(); ++d) {
                const Neighbors nb = neighbors(spec, d, c);
                if (nb.has_lo) {
                    const double a = std::max((sol.u[c] - sol.u[nb.lo]) * inv_h, 0.0);
                    diag += inv_h2 + dh * 2.0 * a * inv_h;
                    trip.emplace_back(row, static_cast<Eigen::Index>(nb.lo), -inv_h2 - dh * 2.0 * a * inv_h);
                }
                if (nb.has_hi) {
                    const double b = std::max((sol.u[c] - sol.u[nb.hi]) * inv_h, 0.0);
                    diag += inv_h2 + dh * 2.0 * b * inv_h;
                    trip.emplace_back(row, static_cast<Eigen::Index>(nb.hi), -inv_h2 - dh * 2.0 * b * inv_h);
                }
            }
            trip.emplace_back(row, row, diag);
            trip.emplace_back(row, cells, 1.0);
            trip.emplace_back(cells, row, 1.0 / static_cast<double>(cells));
        }
        Eigen::SparseMatrix<double> jac(cells + 1, cells + 1);
        jac.setFromTriplets(trip.begin(), trip.end());
        if (!pattern_ready) {
            lu.analyzePattern(jac);
            pattern_ready = true;
        }
        lu.factorize(jac);
        return lu.info() == Eigen::Success;
    };

    // max_abs skips NaN, so finiteness is checked entrywise.
    auto finite_norm = [](const ScalarField& r) {
        for (double v : r.values()) {
            if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        }
        return max_abs(r);
    };

    ScalarField res = hjb_residual(sol.u, sol.lambda, f, params);
    sol.residual = finite_norm(res);
    if (!std::isfinite(sol.residual) || !std::isfinite(sol.lambda)) {
        sol.message = "solve_hjb: initial residual is not finite";
        return sol;
    }

    // Pure Newton while the max-norm residual drops under a short backtracking
    // search; otherwise raise the pseudo-time shift until it does, and relax
    // it again after each accepted step.
    const double first_shift = inv_h2;
    constexpr int kMaxShiftRaises = 40;
    double shift = 0.0;
    for (int it = 0; it < options.max_iter; ++it) {
        if (sol.residual <= options.tol) {
            sol.converged = true;
            sol.iterations = it;
            return sol;
        }
        for (Eigen::Index i = 0; i < cells; ++i) rhs(i) = -res[static_cast<std::size_t>(i)];
        rhs(cells) = 0.0;  // u is kept centered

        bool accepted = false;
        for (int raise = 0; raise <= kMaxShiftRaises && !accepted; ++raise) {
            if (raise > 0) shift = shift == 0.0 ? first_shift : 10.0 * shift;
            if (!factorize(shift)) continue;
            const Eigen::VectorXd step = lu.solve(rhs);
            double t = 1.0;
            for (int halving = 0; halving < 6; ++halving, t *= 0.5) {
                ScalarField trial = sol.u;
                for (Eigen::Index i = 0; i < cells; ++i) trial[static_cast<std::size_t>(i)] += t * step(i);
                center(trial);
                const double trial_lambda = sol.lambda + t * step(cells);
                ScalarField trial_res = hjb_residual(trial, trial_lambda, f, params);
                const double trial_norm = finite_norm(trial_res);
                if (std::isfinite(trial_norm) && std::isfinite(trial_lambda) &&
                    trial_norm < (1.0 - 1e-4 * t) * sol.residual) {
                    sol.u = std::move(trial);
                    sol.lambda = trial_lambda;
                    res = std::move(trial_res);
                    sol.residual = trial_norm;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            sol.iterations = it + 1;
            sol.message = "solve_hjb: no residual decrease at iteration " + std::to_string(it) + " (residual " +
                          detail::format_number(sol.residual) + ")";
            return sol;
        }
        shift = shift > 1e-6 * first_shift ? 0.1 * shift : 0.0;
    }
    sol.iterations = options.max_iter;
    sol.converged = sol.residual <= options.tol;
    if (!sol.converged) {
        sol.message = "solve_hjb: no convergence after " + std::to_string(options.max_iter) +
                      " iterations, residual " + detail::format_number(sol.residual);
    }
    return sol;
}

VectorField drift_from_u(const ScalarField& u, const MFGParams& params) {
    const GridSpec& spec = u.spec();
    const VectorField g = gradient(u);
    VectorField b(spec);
    for (int d = 0; d < spec.dimension(); ++d) {
        const auto gn = g.component(d);
        auto out = b.component(d);
        const int t = 1 - d;  // tangential axis in 2D
        for (std::size_t f = 0; f < out.size(); ++f) {
            const auto fc = spec.face_cells(d, f);
            if (fc.boundary) {
                out[f] = 0.0;
                continue;
            }
            double norm2 = gn[f] * gn[f];
            if (spec.dimension() == 2) {
                const auto gt = g.component(t);
                const double tang = 0.25 * (gt[spec.lower_face(t, fc.lower)] + gt[spec.upper_face(t, fc.lower)] +
                                            gt[spec.lower_face(t, fc.upper)] + gt[spec.upper_face(t, fc.upper)]);
                norm2 += tang * tang;
            }
            out[f] = norm2 > 0.0
                         ? params.c_h * params.gamma * std::pow(norm2, 0.5 * (params.gamma - 2.0)) * gn[f]
                         : 0.0;
        }
    }
    return b;
}

}  // namespace cmfg
