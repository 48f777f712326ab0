#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cmfg/diagnostics.hpp"
#include "oracles.hpp"

using namespace cmfg;

TEST(Regime, ThreeDimensionalQuadratic) {
    const Regime sub = classify_regime(3, 2.0, 1.5);
    EXPECT_NEAR(sub.alpha_mc, 1.0, 1e-14);
    EXPECT_NEAR(sub.alpha_sc, 0.0, 1e-14);
    EXPECT_EQ(sub.label(), "H5");
    EXPECT_EQ(classify_regime(3, 2.0, 1.0).label(), "H4");
    EXPECT_EQ(classify_regime(3, 2.0, 0.5).label(), "H3");
}

TEST(Regime, SobolevThresholdInFiveDimensions) {
    const Regime r = classify_regime(5, 2.0, 1.0);
    EXPECT_NEAR(r.alpha_sc, 1.0, 1e-14);
    EXPECT_EQ(r.kind, RegimeKind::SobolevCritical);
    EXPECT_EQ(classify_regime(5, 2.0, 0.5).label(), "H1");
    EXPECT_EQ(classify_regime(5, 2.0, 2.0).label(), "H3");
}

TEST(Regime, DeskScaleCases) {
    EXPECT_EQ(classify_regime(1, 2.0, 0.5).label(), "H5");
    EXPECT_EQ(classify_regime(2, 3.0, 0.3).label(), "H3");
    EXPECT_EQ(classify_regime(2, 3.0, 0.5).label(), "H4");
    EXPECT_EQ(classify_regime(2, 3.0, 0.8).label(), "H5");
    EXPECT_THROW(classify_regime(1, 2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(classify_regime(2, 1.0, 0.5), std::invalid_argument);
    EXPECT_FALSE(classify_regime(2, 3.0, 0.8).name().empty());
}

TEST(Regime, MassCriticalProductIsTwo) {
    for (auto [n, gamma] : {std::pair{2, 3.0}, {3, 2.0}, {5, 2.0}, {3, 1.8}, {2, 2.5}}) {
        EXPECT_NEAR(mass_critical_exponent_product(n, gamma), 2.0, 1e-12) << n << " " << gamma;
    }
    EXPECT_THROW(mass_critical_exponent_product(1, 2.0), std::invalid_argument);
}

TEST(Bump, ClosedFormAndNormalization) {
    const GridSpec g(1, 200);
    const ScalarField b = bump_density(g, 0.1, {0.5, 0.5});
    EXPECT_NEAR(integrate(b), 1.0, 1e-13);
    // continuum normalization of (1 - r^2/s^2)^3 in 1D: 32 s / 35
    EXPECT_NEAR(b.max(), 35.0 / 32.0 / 0.1, 0.01 * b.max());
    EXPECT_THROW(bump_density(g, 0.6, {0.5, 0.5}), std::invalid_argument);
}

TEST(ConcentrationFamily, MassConstraintAndPeakScaling) {
    for (int dim : {1, 2}) {
        const GridSpec g(dim, dim == 1 ? 256 : 64);
        const MFGParams p = MFGParams::make(dim, 2.0, 1.0, 0.0, 0.5);
        const AdmissiblePair a = concentration_family(g, 0.12, {0.5, 0.5}, p);
        const AdmissiblePair b = concentration_family(g, 0.06, {0.5, 0.5}, p);
        EXPECT_NEAR(integrate(a.m()), 1.0, 1e-13);
        EXPECT_TRUE(a.is_admissible());
        const double ratio = b.m().max() / a.m().max();
        EXPECT_NEAR(ratio, std::pow(2.0, dim), 0.15 * std::pow(2.0, dim));
    }
    const GridSpec g(1, 64);
    const MFGParams p = MFGParams::make(1, 2.0, 1.0, 0.0, 0.5);
    EXPECT_THROW(concentration_family(g, 0.02, {0.5, 0.5}, p), std::invalid_argument);
    EXPECT_THROW(concentration_family(g, 0.1, {0.2, 0.5}, p), std::invalid_argument);
}

TEST(LogLogSlope, ExactPowerLaw) {
    const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.7));
    EXPECT_NEAR(loglog_slope(x, y), -1.7, 1e-12);
}

TEST(ScalingSweep, MassSupercriticalTwoDimensional) {
    const GridSpec g(2, 64);
    const MFGParams p = MFGParams::make(2, 3.0, 1.0, 1.0, 0.3);
    const RieszOperator k(g, p.alpha);
    const ScalingReport r = scaling_sweep(p, k, {0.04, 0.06, 0.08, 0.1, 0.12});
    EXPECT_NEAR(r.kinetic_slope, -1.5, 0.07 * 1.5);
    EXPECT_NEAR(r.potential_slope, -1.7, 0.07 * 1.7);
    EXPECT_TRUE(r.unbounded_below());
}

TEST(ScalingSweep, MassSubcriticalTwoDimensional) {
    const GridSpec g(2, 64);
    const MFGParams p = MFGParams::make(2, 3.0, 1.0, 1.0, 0.8);
    const RieszOperator k(g, p.alpha);
    const ScalingReport r = scaling_sweep(p, k, {0.04, 0.06, 0.08, 0.1, 0.12});
    EXPECT_NEAR(r.kinetic_slope, -1.5, 0.07 * 1.5);
    EXPECT_NEAR(r.potential_slope, -1.2, 0.07 * 1.2);
    EXPECT_FALSE(r.unbounded_below());
}

TEST(ScalingSweep, UncoupledHasNoPotential) {
    const GridSpec g(1, 256);
    const MFGParams p0 = MFGParams::make(1, 2.0, 1.0, 0.0, 0.5);
    const MFGParams p1 = MFGParams::make(1, 2.0, 1.0, 1.0, 0.5);
    const RieszOperator k(g, 0.5);
    const std::vector<double> sig{0.04, 0.06, 0.08, 0.1, 0.12};
    const ScalingReport a = scaling_sweep(p0, k, sig);
    const ScalingReport b = scaling_sweep(p1, k, sig);
    for (double v : a.potential_values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(a.kinetic_slope, b.kinetic_slope);
    EXPECT_FALSE(a.unbounded_below());
    EXPECT_THROW(scaling_sweep(p0, k, {0.05, 0.1}), std::invalid_argument);
}

TEST(Schrodinger, TrivialAndNegativeControl) {
    const GridSpec g(1, 128);
    const MFGParams p = MFGParams::make(1, 2.0, 1.0, 0.0, 0.5);
    const RieszOperator k(g, 0.5);
    MFGSolution trivial(g);
    EXPECT_NEAR(schrodinger_residual(trivial, p, k), 0.0, 1e-12);

    MFGSolution fake(g);
    fake.m = ScalarField::from_function(g, [](std::array<double, 2> x) {
        return 1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * x[0]);
    });
    const double control = schrodinger_residual(fake, p, k);
    EXPECT_GT(control, 0.5);
    fake.m[3] = 0.0;
    EXPECT_THROW(schrodinger_residual(fake, p, k), std::invalid_argument);
}

TEST(Schrodinger, ConvergedResidualDecreasesUnderRefinement) {
    auto residual = [](int n) {
        const GridSpec g(1, n);
        const MFGParams p = MFGParams::make(1, 2.0, 1.0, 0.1, 0.5);
        const RieszOperator k(g, 0.5);
        const MFGSolution s = solve_mfg(p, SolveConfig{}, k);
        EXPECT_TRUE(s.converged);
        return schrodinger_residual(s, p, k);
    };
    const double r1 = residual(64);
    const double r2 = residual(128);
    EXPECT_LT(r2, r1);
    EXPECT_LT(10.0 * r1, 0.5);
}

TEST(Threshold, UncoupledRowAndMonotonePeak) {
    const GridSpec g(1, 64);
    const MFGParams p = MFGParams::make(1, 2.0, 1.0, 0.0, 0.5);
    const RieszOperator k(g, 0.5);
    const ThresholdTable t = threshold_probe(p, k, {0.0, 0.1, 0.2, 0.4}, SolveConfig{});
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_TRUE(t.rows[0].converged);
    EXPECT_NEAR(t.rows[0].norm_q, 1.0, 1e-12);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        ASSERT_TRUE(t.rows[i].converged);
        EXPECT_GT(t.rows[i].norm_inf, t.rows[i - 1].norm_inf);
    }
    ASSERT_TRUE(t.largest_convergent_c_f.has_value());
    EXPECT_EQ(*t.largest_convergent_c_f, 0.4);
    EXPECT_FALSE(t.first_failure_c_f.has_value());
    EXPECT_THROW(threshold_probe(p, k, {0.2, 0.1}, SolveConfig{}), std::invalid_argument);
}

TEST(Threshold, SupercriticalFailureIsFound) {
    const GridSpec g(2, 32);
    const MFGParams p = MFGParams::make(2, 3.0, 1.0, 0.0, 0.3);
    const RieszOperator k(g, 0.3);
    SolveConfig cfg;
    cfg.max_outer_iterations = 200;
    const ThresholdTable t = threshold_probe(p, k, {0.0, 1.0, 2.0, 4.0}, cfg);
    ASSERT_TRUE(t.first_failure_c_f.has_value());
    EXPECT_GT(*t.first_failure_c_f, 0.0);
}

TEST(HlsAudit, ConstantRowsAndBumpSpread) {
    const double alpha = 0.5;
    const std::vector<GridSpec> grids{GridSpec(1, 128), GridSpec(1, 256)};
    const HlsAuditReport r = hls_invariance_audit(grids, alpha, {0.1, 0.15, 0.2, 0.25, 0.3});
    for (const HlsAuditRow& row : r.rows) {
        if (row.sigma != 0.0) continue;
        const GridSpec g(row.dimension, row.cells);
        const RieszOperator k(g, alpha);
        const ScalarField one(g, 1.0);
        EXPECT_NEAR(row.ratio, bilinear(k, one, one), 1e-12);
    }
    ASSERT_EQ(r.spread.size(), 2u);
    EXPECT_LT(r.spread[1], 0.10);
    EXPECT_TRUE(r.passed());
}
