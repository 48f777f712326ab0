#include "cmfg/riesz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "format.hpp"

namespace cmfg {

double riesz_self_weight(int dimension, double h, double alpha) {
    if (dimension == 1) return 2.0 * std::pow(0.5 * h, alpha) / (alpha * h);
    const double r_eq = h / std::sqrt(std::numbers::pi);
    return 2.0 * std::numbers::pi * std::pow(r_eq, alpha) / (alpha * h * h);
}

RieszOperator::RieszOperator(const GridSpec& spec, double alpha) : spec_(spec), alpha_(alpha) {
    const double n = spec.dimension();
    if (!(alpha > 0.0 && alpha < n)) {
        throw std::invalid_argument("build_riesz: alpha must lie in (0, " + std::to_string(spec.dimension()) +
                                    "), got " + detail::format_number(alpha));
    }
    const int cells = spec.cells_per_axis();
    const double h = spec.spacing();
    const double expo = 0.5 * (alpha - n);  // applied to squared distance

    // Kernel by lattice offset; every W entry is read from this table, which
    // makes W exactly translation invariant and symmetric.
    const int ny = spec.dimension() == 2 ? cells : 1;
    std::vector<double> table(static_cast<std::size_t>(cells) * static_cast<std::size_t>(ny));
    for (int dj = 0; dj < ny; ++dj) {
        for (int di = 0; di < cells; ++di) {
            const double r2 = (static_cast<double>(di) * di + static_cast<double>(dj) * dj) * h * h;
            table[static_cast<std::size_t>(di) + static_cast<std::size_t>(cells) * static_cast<std::size_t>(dj)] =
                (di == 0 && dj == 0) ? riesz_self_weight(spec.dimension(), h, alpha) : std::pow(r2, expo);
        }
    }

    const auto total = static_cast<Eigen::Index>(spec.num_cells());
    w_.resize(total, total);
    for (Eigen::Index j = 0; j < total; ++j) {
        const auto [jx, jy] = spec.cell_coords(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < total; ++i) {
            const auto [ix, iy] = spec.cell_coords(static_cast<std::size_t>(i));
            const int di = std::abs(ix - jx);
            const int dj = std::abs(iy - jy);
            w_(i, j) = table[static_cast<std::size_t>(di) + static_cast<std::size_t>(cells) * static_cast<std::size_t>(dj)];
        }
    }
}

RieszOperator build_riesz(const GridSpec& spec, double alpha) { return RieszOperator(spec, alpha); }

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const ScalarField& f) {
    return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

}  // namespace

ScalarField apply(const RieszOperator& k, const ScalarField& f) {
    require_same_grid(k.spec(), f.spec(), "apply");
    ScalarField out(f.spec());
    Eigen::Map<Eigen::VectorXd> dst(out.values().data(), static_cast<Eigen::Index>(out.size()));
    dst.noalias() = k.weights() * as_vector(f);
    dst *= f.spec().cell_volume();
    return out;
}

double bilinear(const RieszOperator& k, const ScalarField& f, const ScalarField& g) {
    require_same_grid(k.spec(), f.spec(), "bilinear");
    require_same_grid(k.spec(), g.spec(), "bilinear");
    const double vol = f.spec().cell_volume();
    const Eigen::VectorXd wg = k.weights() * as_vector(g);
    return vol * vol * as_vector(f).dot(wg);
}

double hls_ratio(const RieszOperator& k, const ScalarField& f, double q_alpha) {
    const double norm = norm_lp(f, q_alpha);
    if (norm == 0.0) throw std::invalid_argument("hls_ratio: zero field");
    return bilinear(k, f, f) / (norm * norm);
}

// ---------------------------------------------------------------------------

Mollifier::Mollifier(const GridSpec& spec, double epsilon) : spec_(spec), epsilon_(epsilon) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("Mollifier: epsilon must be nonnegative");
    const double h = spec.spacing();
    const int reach = static_cast<int>(std::floor(epsilon / h));
    const auto total = static_cast<Eigen::Index>(spec.num_cells());
    p_.resize(total, total);
    if (reach < 1 || epsilon <= h) {
        p_.setIdentity();
        return;
    }

    auto bump = [epsilon](double r) {
        const double t = r / epsilon;
        return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    };

    const int cells = spec.cells_per_axis();
    const int ry = spec.dimension() == 2 ? reach : 0;
    struct Entry {
        Eigen::Index col;
        double value;
    };
    std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(total));
    std::vector<double> off_sum(static_cast<std::size_t>(total), 0.0);
    for (Eigen::Index c = 0; c < total; ++c) {
        const auto [ix, iy] = spec.cell_coords(static_cast<std::size_t>(c));
        for (int dj = -ry; dj <= ry; ++dj) {
            const int jy = iy + dj;
            if (jy < 0 || jy >= (spec.dimension() == 2 ? cells : 1)) continue;
            for (int di = -reach; di <= reach; ++di) {
                if (di == 0 && dj == 0) continue;
                const int jx = ix + di;
                if (jx < 0 || jx >= cells) continue;
                const double v = bump(h * std::sqrt(static_cast<double>(di) * di + static_cast<double>(dj) * dj));
                if (v <= 0.0) continue;
                rows[static_cast<std::size_t>(c)].push_back({static_cast<Eigen::Index>(spec.cell_index(jx, jy)), v});
                off_sum[static_cast<std::size_t>(c)] += v;
            }
        }
    }

    double d_max = 0.0;
    for (double s : off_sum) d_max = std::max(d_max, s);
    if (d_max == 0.0) {
        p_.setIdentity();
        return;
    }
    d_max += bump(0.0);
    identity_ = false;

    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index c = 0; c < total; ++c) {
        double row_off = 0.0;
        for (const auto& e : rows[static_cast<std::size_t>(c)]) {
            const double v = e.value / d_max;
            trip.emplace_back(c, e.col, v);
            row_off += v;
        }
        trip.emplace_back(c, c, 1.0 - row_off);
    }
    p_.setFromTriplets(trip.begin(), trip.end());
}

ScalarField mollify(const ScalarField& f, const Mollifier& eta) {
    require_same_grid(eta.spec(), f.spec(), "mollify");
    if (eta.is_identity()) return f;
    ScalarField out(f.spec());
    Eigen::Map<Eigen::VectorXd> dst(out.values().data(), static_cast<Eigen::Index>(out.size()));
    dst.noalias() = eta.matrix() * as_vector(f);
    return out;
}

}  // namespace cmfg
