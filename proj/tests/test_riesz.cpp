#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cmfg/diagnostics.hpp"
#include "cmfg/riesz.hpp"
#include "oracles.hpp"

using namespace cmfg;

namespace {

std::vector<double> to_vec(const ScalarField& f) { return {f.values().begin(), f.values().end()}; }

ScalarField random_field(const GridSpec& spec, std::mt19937_64& rng, double lo = -1.0) {
    return ScalarField(spec, oracle::random_vector(spec.num_cells(), rng, lo, 1.0));
}

}  // namespace

TEST(Riesz, RejectsAlphaOutsideRange) {
    EXPECT_THROW(build_riesz(GridSpec(1, 8), 0.0), std::invalid_argument);
    EXPECT_THROW(build_riesz(GridSpec(1, 8), 1.0), std::invalid_argument);
    EXPECT_THROW(build_riesz(GridSpec(2, 8), 2.0), std::invalid_argument);
    EXPECT_NO_THROW(build_riesz(GridSpec(2, 8), 1.5));
}

TEST(Riesz, DiagonalOneDimensional) {
    const RieszOperator k(GridSpec(1, 10), 0.5);
    EXPECT_NEAR(k.diagonal(), 8.94427190999916, 1e-12);
    EXPECT_NEAR(k.diagonal(), oracle::riesz_diagonal_1d(0.1, 0.5), 1e-13);
}

TEST(Riesz, DiagonalTwoDimensionalAgainstSingularCellIntegral) {
    const RieszOperator k(GridSpec(2, 8), 1.0);
    const double exact = oracle::riesz_diagonal_2d_exact(0.125, 1.0);
    // closed form of the same integral: 4 h log(1 + sqrt 2) / h^2
    EXPECT_NEAR(exact, 4.0 * std::log(1.0 + std::sqrt(2.0)) / 0.125, 1e-9);
    EXPECT_LT(std::abs(k.diagonal() - exact) / exact, 0.05);
}

TEST(Riesz, SymmetricPositiveTranslationInvariant) {
    for (int dim : {1, 2}) {
        const GridSpec g(dim, dim == 1 ? 32 : 8);
        const RieszOperator k(g, 0.7);
        const auto& w = k.weights();
        EXPECT_TRUE(w.isApprox(w.transpose(), 0.0));
        EXPECT_GT(w.minCoeff(), 0.0);
        EXPECT_TRUE(std::isfinite(w.maxCoeff()));
        for (std::size_t a = 0; a < g.num_cells(); ++a) {
            for (std::size_t b = 0; b < g.num_cells(); ++b) {
                const auto ca = g.cell_coords(a);
                const auto cb = g.cell_coords(b);
                const std::size_t a0 = g.cell_index(std::abs(ca[0] - cb[0]), std::abs(ca[1] - cb[1]));
                EXPECT_EQ(w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), w(static_cast<Eigen::Index>(a0), 0));
            }
        }
    }
}

TEST(Riesz, ApplyMatchesDoubleLoop) {
    std::mt19937_64 rng(11);
    for (int dim : {1, 2}) {
        const int n = dim == 1 ? 48 : 10;
        const GridSpec g(dim, n);
        const double alpha = dim == 1 ? 0.5 : 1.3;
        const RieszOperator k(g, alpha);
        const ScalarField f = random_field(g, rng);
        const ScalarField kf = apply(k, f);
        const auto ref = oracle::riesz_apply({dim, n}, alpha, to_vec(f));
        for (std::size_t c = 0; c < kf.size(); ++c) EXPECT_NEAR(kf[c], ref[c], 1e-12 * std::max(1.0, std::abs(ref[c])));
    }
}

TEST(Riesz, DeltaGivesColumn) {
    const GridSpec g(1, 16);
    const RieszOperator k(g, 0.5);
    ScalarField delta(g);
    delta[5] = 1.0 / g.cell_volume();
    const ScalarField col = apply(k, delta);
    for (std::size_t c = 0; c < col.size(); ++c) EXPECT_NEAR(col[c], k.weights()(static_cast<Eigen::Index>(c), 5), 1e-12);
}

TEST(Riesz, ConstantIsReflectionSymmetric) {
    const GridSpec g(2, 9);
    const RieszOperator k(g, 0.8);
    const ScalarField kf = apply(k, ScalarField(g, 1.0));
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) {
            const double v = kf[g.cell_index(i, j)];
            EXPECT_NEAR(v, kf[g.cell_index(8 - i, j)], 1e-12);
            EXPECT_NEAR(v, kf[g.cell_index(i, 8 - j)], 1e-12);
            EXPECT_NEAR(v, kf[g.cell_index(j, i)], 1e-12);
        }
    }
    EXPECT_GT(kf.min(), 0.0);
}

TEST(Riesz, BilinearProperties) {
    std::mt19937_64 rng(12);
    const GridSpec g(1, 64);
    const RieszOperator k(g, 0.5);
    EXPECT_EQ(bilinear(k, ScalarField(g), ScalarField(g)), 0.0);
    for (int t = 0; t < 10; ++t) {
        const ScalarField f = random_field(g, rng);
        const ScalarField h = random_field(g, rng);
        EXPECT_NEAR(bilinear(k, f, h), bilinear(k, h, f), 1e-13);
        EXPECT_NEAR(bilinear(k, f, f), integrate(hadamard(f, apply(k, f))), 1e-12);
        const ScalarField p = random_field(g, rng, 0.0);
        EXPECT_GE(bilinear(k, p, p), 0.0);
    }
}

TEST(Riesz, HlsRatio) {
    const GridSpec g(1, 128);
    const RieszOperator k(g, 0.5);
    const double q = 2.0 / 1.5;
    const ScalarField one(g, 1.0);
    EXPECT_NEAR(hls_ratio(k, one, q), bilinear(k, one, one), 1e-12);
    EXPECT_THROW(hls_ratio(k, ScalarField(g), q), std::invalid_argument);
    const ScalarField bump = bump_density(g, 0.15, {0.5, 0.5});
    const double r = hls_ratio(k, bump, q);
    EXPECT_NEAR(hls_ratio(k, 3.7 * bump, q), r, 1e-12 * r);
    EXPECT_GE(r, hls_ratio(k, one, q));
}

TEST(Mollifier, IdentityBelowGridScale) {
    const GridSpec g(1, 32);
    EXPECT_THROW(Mollifier(g, -1.0), std::invalid_argument);
    for (double eps : {0.0, g.spacing() / 4.0, g.spacing() / 2.0}) {
        const Mollifier eta(g, eps);
        EXPECT_TRUE(eta.is_identity());
        std::mt19937_64 rng(13);
        const ScalarField f = random_field(g, rng);
        const ScalarField mf = mollify(f, eta);
        for (std::size_t c = 0; c < f.size(); ++c) EXPECT_EQ(mf[c], f[c]);
    }
}

TEST(Mollifier, StochasticMassPreservingContractive) {
    std::mt19937_64 rng(14);
    for (int dim : {1, 2}) {
        const GridSpec g(dim, dim == 1 ? 64 : 24);
        const Mollifier eta(g, 0.1);
        EXPECT_FALSE(eta.is_identity());
        const auto& p = eta.matrix();
        Eigen::SparseMatrix<double> pt = p.transpose();
        EXPECT_NEAR((Eigen::SparseMatrix<double>(p) - pt).norm(), 0.0, 1e-15);
        for (int k = 0; k < p.outerSize(); ++k) {
            double row = 0.0;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p, k); it; ++it) {
                EXPECT_GE(it.value(), 0.0);
                row += it.value();
            }
            EXPECT_NEAR(row, 1.0, 1e-14);
        }
        const ScalarField one = mollify(ScalarField(g, 1.0), eta);
        EXPECT_NEAR(max_abs(one - ScalarField(g, 1.0)), 0.0, 1e-14);
        for (int t = 0; t < 5; ++t) {
            const ScalarField f = random_field(g, rng);
            const ScalarField mf = mollify(f, eta);
            EXPECT_NEAR(integrate(mf), integrate(f), 1e-13);
            EXPECT_LE(max_abs(mf), max_abs(f) + 1e-15);
        }
    }
}
