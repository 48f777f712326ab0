#include "cmfg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "format.hpp"

namespace cmfg {

namespace {

double euclid_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double lagrangian_constant(double gamma, double c_h) {
    const double gp = gamma / (gamma - 1.0);
    return std::pow(gamma * c_h, -(gp - 1.0)) / gp;
}

MFGParams MFGParams::make(int dimension, double gamma, double c_h, double c_f, double alpha, double epsilon) {
    if (dimension < 1) throw std::invalid_argument("dimension: must be >= 1 (got " + std::to_string(dimension) + ")");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma: must satisfy gamma > 1 (got " + detail::format_number(gamma) + ")");
    }
    if (!(c_h > 0.0) || !std::isfinite(c_h)) {
        throw std::invalid_argument("C_H: must satisfy C_H > 0 (got " + detail::format_number(c_h) + ")");
    }
    if (!(c_f >= 0.0) || !std::isfinite(c_f)) {
        throw std::invalid_argument("C_f: must satisfy C_f >= 0 (got " + detail::format_number(c_f) + ")");
    }
    const double n = dimension;
    if (!(alpha > 0.0 && alpha < n)) {
        throw std::invalid_argument("alpha: must satisfy 0 < alpha < n = " + std::to_string(dimension) + " (got " +
                                    detail::format_number(alpha) + ")");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("epsilon: must satisfy epsilon >= 0 (got " + detail::format_number(epsilon) + ")");
    }

    MFGParams p;
    p.dimension = dimension;
    p.gamma = gamma;
    p.c_h = c_h;
    p.c_f = c_f;
    p.alpha = alpha;
    p.epsilon = epsilon;
    p.gamma_prime = gamma / (gamma - 1.0);
    p.c_l = lagrangian_constant(gamma, c_h);
    p.q_alpha = 2.0 * n / (n + alpha);
    p.beta = 1.0 / (1.0 / p.gamma_prime + 1.0 / (gamma * p.q_alpha));
    p.alpha_mc = n > p.gamma_prime ? n - p.gamma_prime : 0.0;
    p.alpha_sc = n > 2.0 * p.gamma_prime ? n - 2.0 * p.gamma_prime : 0.0;
    p.flux_exponent = p.gamma_prime * p.q_alpha / (p.gamma_prime + p.q_alpha - 1.0);
    return p;
}

MFGParams MFGParams::with_coupling(double new_c_f) const {
    return make(dimension, gamma, c_h, new_c_f, alpha, epsilon);
}

MFGParams MFGParams::with_epsilon(double new_epsilon) const {
    return make(dimension, gamma, c_h, c_f, alpha, new_epsilon);
}

double hamiltonian_value(const MFGParams& params, std::span<const double> p) {
    return params.c_h * std::pow(euclid_norm(p), params.gamma);
}

void hamiltonian_grad(const MFGParams& params, std::span<const double> p, std::span<double> out) {
    if (out.size() != p.size()) throw std::invalid_argument("hamiltonian_grad: output size mismatch");
    const double r = euclid_norm(p);
    if (r == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double s = params.c_h * params.gamma * std::pow(r, params.gamma - 2.0);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = s * p[i];
}

double legendre_lagrangian(std::span<const double> q, const MFGParams& params) {
    return params.c_l * std::pow(euclid_norm(q), params.gamma_prime);
}

double legendre_radius_for(const MFGParams& params, double max_q_norm) {
    const double p_star = std::pow(max_q_norm / (params.gamma * params.c_h), 1.0 / (params.gamma - 1.0));
    return 2.0 * p_star + 1.0;
}

namespace {

struct GridMax {
    double value;
    std::vector<double> argmax;
    bool on_edge;
};

// Maximize q.p - H(p) over count^n nodes of the box center +- half_width.
GridMax grid_maximize(const MFGParams& params, std::span<const double> q, std::span<const double> center,
                      double half_width, int count) {
    const std::size_t dim = q.size();
    const double step = 2.0 * half_width / (count - 1);
    GridMax best{-std::numeric_limits<double>::infinity(), std::vector<double>(dim, 0.0), false};
    std::vector<int> idx(dim, 0);
    std::vector<double> p(dim);
    std::vector<int> best_idx(dim, 0);
    while (true) {
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            // Symmetric node placement so that the center itself is a node for odd counts.
            const int offset = idx[d] - (count - 1) / 2;
            p[d] = center[d] + (count % 2 == 1 ? offset * step : -half_width + idx[d] * step);
            dot += q[d] * p[d];
        }
        const double val = dot - hamiltonian_value(params, p);
        if (val > best.value) {
            best.value = val;
            best.argmax = p;
            best_idx = idx;
        }
        std::size_t d = 0;
        while (d < dim && ++idx[d] == count) idx[d++] = 0;
        if (d == dim) break;
    }
    for (std::size_t d = 0; d < dim; ++d) {
        if (best_idx[d] == 0 || best_idx[d] == count - 1) best.on_edge = true;
    }
    return best;
}

}  // namespace

LegendreCheck legendre_check(const MFGParams& params, const std::vector<std::vector<double>>& q_samples,
                             double p_grid_radius, int p_grid_count) {
    if (!(p_grid_radius > 0.0)) throw std::invalid_argument("legendre_check: radius must be positive");
    if (p_grid_count < 5) throw std::invalid_argument("legendre_check: need at least 5 points per axis");

    constexpr int kZoomCount = 41;
    LegendreCheck out;
    for (std::size_t s = 0; s < q_samples.size(); ++s) {
        const auto& q = q_samples[s];
        if (q.empty()) throw std::invalid_argument("legendre_check: empty q sample");
        const std::vector<double> origin(q.size(), 0.0);
        GridMax best = grid_maximize(params, q, origin, p_grid_radius, p_grid_count);
        if (best.on_edge) out.inconclusive = true;

        double half = 2.0 * (2.0 * p_grid_radius / (p_grid_count - 1));
        for (int level = 0; level < 60 && half > 1e-12 * std::max(1.0, p_grid_radius); ++level) {
            GridMax zoom = grid_maximize(params, q, best.argmax, half, kZoomCount);
            if (zoom.value >= best.value) best = zoom;
            half *= 4.0 / (kZoomCount - 1);
        }
        const double gap = std::abs(best.value - legendre_lagrangian(q, params));
        if (gap > out.max_abs_gap) {
            out.max_abs_gap = gap;
            out.worst_sample = s;
        }
    }
    return out;
}

ExtendedReal kinetic_density(double m, std::span<const double> w, const MFGParams& params) {
    if (m < 0.0) throw std::invalid_argument("kinetic_density: negative density");
    const double wn = euclid_norm(w);
    if (m == 0.0) return wn == 0.0 ? ExtendedReal(0.0) : ExtendedReal::infinity();
    return ExtendedReal(params.c_l * std::pow(wn, params.gamma_prime) * std::pow(m, 1.0 - params.gamma_prime));
}

}  // namespace cmfg
