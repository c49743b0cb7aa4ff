#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "renyi/euler_lagrange.hpp"
#include "renyi/generalized_gaussian.hpp"
#include "renyi/solver.hpp"
#include "test_support.hpp"

namespace renyi {
namespace {

const GridFunction& fixed_point()
{
    static const GridFunction g = run_fixed_point(SolverConfig{}).grid();
    return g;
}

TEST(ElResidual, ConvergedSolutionSatisfiesEquation)
{
    const GridFunction& Q = fixed_point();
    const double M = natural_constraint_value(Q, 2.0);
    const auto r = el_residual(Q, 2, 2.0, M);
    EXPECT_LT(r.sup_residual, 1e-6);
    EXPECT_LE(r.l2_residual, r.sup_residual * std::sqrt(2.0) + 1e-15);
    EXPECT_TRUE(r.rescaled);  // mass normalisation still applies
    EXPECT_GE(r.domain_lo, Q.x0());
    EXPECT_LE(r.domain_hi, Q.last_node());
    EXPECT_LT(el_residual(Q, 2, 2.0, 0.5).sup_residual, 1e-6);
}

TEST(ElResidual, GeneralizedGaussianMissesEquation)
{
    const GridFunction G = gengauss(1.0, 2.0).sample(1e-3);
    const auto r = el_residual(G, 2, 2.0, natural_constraint_value(G, 2.0));
    EXPECT_GT(r.sup_residual, 1e-3);
}

TEST(ElResidual, IndicatorMissesEquationGrossly)
{
    const GridFunction f0 = detail::unit_indicator_grid(1e-3);
    const auto r = el_residual(f0, 2, 2.0, natural_constraint_value(f0, 2.0));
    EXPECT_GT(r.sup_residual, 1e-2);
    EXPECT_GT(r.sup_residual, 0.1 * r.Lambda);
}

TEST(ElResidual, ReflectionLeavesReportUnchanged)
{
    const GridFunction& Q = fixed_point();
    const auto a = el_residual(Q, 2, 2.0, 0.5);
    const auto b = el_residual(reflect(Q), 2, 2.0, 0.5);
    EXPECT_NEAR(a.sup_residual, b.sup_residual, 1e-12);
    EXPECT_NEAR(a.l2_residual, b.l2_residual, 1e-12);
    EXPECT_NEAR(a.Lambda, b.Lambda, 1e-12);
    EXPECT_NEAR(a.fitted_scale, b.fitted_scale, 1e-12);
}

TEST(ElResidual, Errors)
{
    EXPECT_THROW(el_residual(GridFunction(0.0, 0.1, {0.0, 0.0}), 2, 2.0, 1.0), InfeasibleInput);
    EXPECT_THROW(el_residual(fixed_point(), 2, 2.0, -1.0), InvalidArgument);
}

TEST(Identities, IntegratedElIdentity)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction Q = testing::unit_mass(testing::random_grid(rng, 40, 0.05));
        for (const auto& [n, p] : {std::pair{2U, 2.0}, std::pair{3U, 2.0}, std::pair{2U, 3.0}, std::pair{2U, 1.5}}) {
            const auto id = integrated_el_identity(Q, n, p);
            EXPECT_NEAR(id.pairing, id.objective, 1e-8 * id.objective);
        }
    }
    const auto id = integrated_el_identity(fixed_point(), 2, 2.0);
    EXPECT_NEAR(id.pairing, id.objective, 1e-8 * id.objective);
}

TEST(Identities, AdjointPairing)
{
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<std::size_t> half(1, 80);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double dx = 0.05;
        const auto shifted = [&](GridFunction g) { return GridFunction(g.x0() + dx * std::round(shift(rng) / dx), dx, g.values()); };
        const GridFunction f = shifted(testing::random_grid(rng, half(rng), dx));
        const GridFunction g = shifted(testing::random_grid(rng, half(rng), dx));
        const GridFunction h = shifted(testing::random_grid(rng, half(rng), dx));
        const auto a = adjoint_pairing(f, g, h);
        const double scale = std::max(std::abs(a.convolved_side), 1e-300);
        EXPECT_NEAR(a.reflected_side, a.convolved_side, 1e-9 * scale);
    }
}

TEST(Counterexample, ExactValues)
{
    const CounterexampleReport r = counterexample_check();
    EXPECT_EQ(r.alpha, make_rational(3, 4));
    EXPECT_EQ(r.x6_coefficient, make_rational(-9, 640));
    EXPECT_TRUE(r.verdict);
    EXPECT_TRUE(r.indicator_identity);
    EXPECT_EQ(r.indicator_triple, (Polynomial{-24, 0, 8}));
    EXPECT_EQ(r.affine_fit_a, make_rational(1553, 4480));
    EXPECT_EQ(r.affine_fit_b, make_rational(33, 140));
    EXPECT_GT(r.sup_affine_residual, 1e-3);
    EXPECT_GT(r.sup_lsq_residual, 1e-3);
    // C_3(G)(0) = a G(0) + b and C_3(G)(1) = b by construction
    EXPECT_EQ(r.triple_convolution(Rational(0)), r.affine_fit_a * r.alpha + r.affine_fit_b);
    EXPECT_EQ(r.triple_convolution(Rational(1)), r.affine_fit_b);
}

TEST(Counterexample, Deterministic)
{
    const CounterexampleReport a = counterexample_check();
    const CounterexampleReport b = counterexample_check();
    EXPECT_EQ(a.triple_convolution, b.triple_convolution);
    EXPECT_EQ(a.lsq_fit_a, b.lsq_fit_a);
    EXPECT_EQ(a.lsq_fit_b, b.lsq_fit_b);
    EXPECT_EQ(a.sup_affine_residual, b.sup_affine_residual);
}

TEST(Counterexample, GridFiniteDifferenceCrossCheck)
{
    const X6GridCheck g = x6_coefficient_grid(1e-4);
    EXPECT_LT(g.relative_error, 1e-3);
    EXPECT_DOUBLE_EQ(g.exact_value, -9.0 / 640.0);
}

TEST(Counterexample, StencilIsExactOnDegreeNine)
{
    // Sixth derivative of x^6 + x^9 at 0 is 720.
    double d6 = 0.0;
    const double h = 0.5;
    for (int k = 0; k < 9; ++k) {
        const double x = (k - 4) * h;
        d6 += kSixthDerivativeStencil[static_cast<std::size_t>(k)] * (std::pow(x, 6) + std::pow(x, 9));
    }
    EXPECT_NEAR(d6 / std::pow(h, 6), 720.0, 1e-9);
}

TEST(Young, ExponentAndExamples)
{
    EXPECT_DOUBLE_EQ(young_exponent(2, 2.0), 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(young_exponent(3, 2.0), 6.0 / 5.0);

    const double dx = 1e-3;
    const GridFunction half = sample(make_rational(1, 2) * PiecewisePoly::indicator(-1, 1), dx);
    const std::vector<GridFunction> two{half, half};
    const YoungCheck y = young_bound_check(two, 2.0);
    EXPECT_NEAR(y.lhs, std::sqrt(1.0 / 3.0), 1e-5);
    EXPECT_NEAR(y.rhs, std::pow(2.0 * std::pow(0.5, 4.0 / 3.0), 1.5), 5 * dx);  // O(dx) at the jumps
    EXPECT_TRUE(y.holds);

    const std::vector<GridFunction> with_zero{half, GridFunction(0.0, dx, {0.0, 0.0, 0.0})};
    const YoungCheck z = young_bound_check(with_zero, 2.0);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_TRUE(z.holds);

    EXPECT_THROW(young_bound_check(std::vector<GridFunction>{half}, 2.0), InvalidArgument);
}

TEST(Young, RandomTrials)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial)
        for (const auto& [n, p] : {std::pair{2U, 2.0}, std::pair{3U, 2.0}, std::pair{2U, 3.0}}) {
            std::vector<GridFunction> gs;
            for (unsigned k = 0; k < n; ++k) gs.push_back(testing::random_grid(rng, 30, 0.1));
            EXPECT_TRUE(young_bound_check(gs, p).holds);
        }
}

TEST(Riesz, Examples)
{
    const GridFunction& Q = fixed_point();
    const RieszCheck same = riesz_check(Q, 2, 2.0);
    EXPECT_EQ(same.i_f, same.i_fstar);
    EXPECT_TRUE(same.holds);

    // Two separated bumps: rearranging packs the mass together.
    std::vector<double> v(101, 0.0);
    for (int i = 5; i < 20; ++i) v[static_cast<std::size_t>(i)] = 1.0;
    for (int i = 80; i < 90; ++i) v[static_cast<std::size_t>(i)] = 0.5;
    const RieszCheck split = riesz_check(GridFunction::symmetric(0.01, v), 2, 2.0);
    EXPECT_GT(split.i_fstar, split.i_f + 1e-6);
}

TEST(Riesz, RandomTrials)
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const GridFunction f = testing::unit_mass(testing::random_grid(rng, 50, 0.02));
        EXPECT_TRUE(riesz_check(f, 2, 2.0).holds);
        EXPECT_TRUE(riesz_check(f, 3, 1.5).holds);
    }
}

}  // namespace
}  // namespace renyi
