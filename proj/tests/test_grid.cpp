#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cmfg/grid.hpp"
#include "oracles.hpp"

using namespace cmfg;

namespace {

std::vector<double> to_vec(const ScalarField& f) { return {f.values().begin(), f.values().end()}; }

ScalarField random_field(const GridSpec& spec, std::mt19937_64& rng) {
    return ScalarField(spec, oracle::random_vector(spec.num_cells(), rng));
}

VectorField random_flux(const GridSpec& spec, std::mt19937_64& rng) {
    VectorField f(spec);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int d = 0; d < spec.dimension(); ++d) {
        for (double& v : f.component(d)) v = u(rng);
    }
    f.zero_boundary_faces();
    return f;
}

}  // namespace

TEST(GridSpec, RejectsBadShapes) {
    EXPECT_THROW(GridSpec(3, 8), std::invalid_argument);
    EXPECT_THROW(GridSpec(0, 8), std::invalid_argument);
    EXPECT_THROW(GridSpec(1, 3), std::invalid_argument);
}

TEST(GridSpec, CountsAndSpacing) {
    const GridSpec g1(1, 10);
    EXPECT_EQ(g1.num_cells(), 10u);
    EXPECT_EQ(g1.num_faces(0), 11u);
    EXPECT_DOUBLE_EQ(g1.spacing() * 10, 1.0);
    const GridSpec g2(2, 8);
    EXPECT_EQ(g2.num_cells(), 64u);
    EXPECT_EQ(g2.num_faces(0), 72u);
    EXPECT_EQ(g2.num_faces(1), 72u);
    EXPECT_DOUBLE_EQ(g2.cell_volume(), 1.0 / 64.0);
}

TEST(GridSpec, FaceCellsAreConsistent) {
    const GridSpec g(2, 6);
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
        for (int d = 0; d < 2; ++d) {
            const auto lo = g.face_cells(d, g.lower_face(d, c));
            const auto hi = g.face_cells(d, g.upper_face(d, c));
            if (!lo.boundary) EXPECT_EQ(lo.upper, c);
            if (!hi.boundary) EXPECT_EQ(hi.lower, c);
        }
    }
}

TEST(Integrate, ConstantAndAffine) {
    EXPECT_DOUBLE_EQ(integrate(ScalarField(GridSpec(1, 37), 1.0)), 1.0);
    EXPECT_NEAR(integrate(ScalarField(GridSpec(2, 13), 1.0)), 1.0, 1e-15);
    const GridSpec g(1, 100);
    const auto f = ScalarField::from_function(g, [](std::array<double, 2> x) { return x[0]; });
    EXPECT_NEAR(integrate(f), 0.5, 1e-15);
}

TEST(Integrate, MatchesNaiveSum) {
    std::mt19937_64 rng(1);
    for (int dim : {1, 2}) {
        const GridSpec g(dim, 24);
        const ScalarField f = random_field(g, rng);
        EXPECT_NEAR(integrate(f), oracle::integrate({dim, 24}, to_vec(f)), 1e-14);
    }
}

TEST(Gradient, ConstantAndAffine) {
    const GridSpec g(1, 10);
    EXPECT_EQ(gradient(ScalarField(g, 3.0)).max_abs(), 0.0);
    const auto u = ScalarField::from_function(g, [](std::array<double, 2> x) { return x[0]; });
    const VectorField gu = gradient(u);
    const auto c = gu.component(0);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[10], 0.0);
    for (int k = 1; k < 10; ++k) EXPECT_NEAR(c[static_cast<std::size_t>(k)], 1.0, 1e-13);
}

TEST(Gradient, MatchesStencilOracle) {
    std::mt19937_64 rng(2);
    for (int dim : {1, 2}) {
        const int n = 17;
        const GridSpec g(dim, n);
        const ScalarField u = random_field(g, rng);
        const VectorField gu = gradient(u);
        const auto ref = oracle::gradient({dim, n}, to_vec(u));
        for (int d = 0; d < dim; ++d) {
            const auto comp = gu.component(d);
            ASSERT_EQ(comp.size(), ref[static_cast<std::size_t>(d)].size());
            for (std::size_t f = 0; f < comp.size(); ++f) EXPECT_NEAR(comp[f], ref[static_cast<std::size_t>(d)][f], 1e-14 * n);
        }
        EXPECT_TRUE(gu.is_neumann_compatible());
    }
}

TEST(Divergence, ZeroFieldAndTelescoping) {
    std::mt19937_64 rng(3);
    for (int dim : {1, 2}) {
        const GridSpec g(dim, 20);
        EXPECT_EQ(max_abs(divergence(VectorField(g))), 0.0);
        const VectorField f = random_flux(g, rng);
        EXPECT_NEAR(integrate(divergence(f)), 0.0, 1e-13);
    }
}

TEST(Divergence, SummationByParts) {
    std::mt19937_64 rng(4);
    for (int dim : {1, 2}) {
        const GridSpec g(dim, 19);
        for (int t = 0; t < 5; ++t) {
            const ScalarField u = random_field(g, rng);
            const VectorField f = random_flux(g, rng);
            const double lhs = inner(u, divergence(f));
            // right side summed by hand over faces
            const auto gu = oracle::gradient({dim, 19}, to_vec(u));
            long double s = 0.0L;
            for (int d = 0; d < dim; ++d) {
                const auto fc = f.component(d);
                for (std::size_t k = 0; k < fc.size(); ++k) s += fc[k] * gu[static_cast<std::size_t>(d)][k];
            }
            const double rhs = -static_cast<double>(s) * g.cell_volume();
            EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST(Laplacian, ConstantAndMass) {
    std::mt19937_64 rng(5);
    for (int dim : {1, 2}) {
        const GridSpec g(dim, 16);
        EXPECT_EQ(max_abs(laplacian(ScalarField(g, 2.5))), 0.0);
        const ScalarField u = random_field(g, rng);
        EXPECT_NEAR(integrate(laplacian(u)), 0.0, 1e-11);
        const auto ref = oracle::laplacian({dim, 16}, to_vec(u));
        const ScalarField lu = laplacian(u);
        for (std::size_t c = 0; c < lu.size(); ++c) EXPECT_NEAR(lu[c], ref[c], 1e-10);
    }
}

TEST(Laplacian, NeumannEigenfunctionIsSecondOrder) {
    auto err = [](int n) {
        const GridSpec g(1, n);
        const double pi = std::numbers::pi;
        const auto u = ScalarField::from_function(g, [&](std::array<double, 2> x) { return std::cos(pi * x[0]); });
        const auto ex = ScalarField::from_function(g, [&](std::array<double, 2> x) { return -pi * pi * std::cos(pi * x[0]); });
        return max_abs(laplacian(u) - ex);
    };
    const double ratio = err(128) / err(256);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(NormLp, ConstantsHoelderAndOracle) {
    const GridSpec g(2, 12);
    for (double p : {1.0, 1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
        EXPECT_NEAR(norm_lp(ScalarField(g, 1.0), p), 1.0, 1e-14);
    }
    EXPECT_THROW(norm_lp(ScalarField(g, 1.0), 0.5), std::invalid_argument);

    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        const ScalarField f = random_field(g, rng);
        double prev = 0.0;
        for (double p : {1.0, 4.0 / 3.0, 2.0, 2.5, 6.0}) {
            const double v = norm_lp(f, p);
            EXPECT_GE(v, prev - 1e-14);
            prev = v;
        }
        EXPECT_LE(prev, norm_lp(f, std::numeric_limits<double>::infinity()) + 1e-14);
        EXPECT_NEAR(norm_lp(f, 2.0), oracle::norm_p({2, 12}, to_vec(f), 2.0), 1e-14);
        EXPECT_NEAR(norm_lp(f, 1.3), oracle::norm_p({2, 12}, to_vec(f), 1.3), 1e-14);
    }
}

TEST(Fields, ArithmeticAndGridChecks) {
    const GridSpec a(1, 8);
    const GridSpec b(1, 9);
    ScalarField f(a, 1.0);
    EXPECT_THROW(f += ScalarField(b, 1.0), std::invalid_argument);
    const ScalarField g = 2.0 * f + ScalarField(a, 0.5);
    EXPECT_DOUBLE_EQ(g[3], 2.5);
    EXPECT_DOUBLE_EQ(hadamard(g, g)[0], 6.25);
    EXPECT_THROW(ScalarField(a, std::vector<double>(7, 0.0)), std::invalid_argument);

    VectorField w(a);
    w.component(0)[0] = 1.0;
    EXPECT_FALSE(w.is_neumann_compatible());
    w.zero_boundary_faces();
    EXPECT_TRUE(w.is_neumann_compatible());
}
