#include <gtest/gtest.h>

#include <random>

#include "renyi/piecewise_poly.hpp"
#include "test_support.hpp"

namespace renyi {
namespace {

using testing::reference_f2;
using testing::reference_f3;

const PiecewisePoly kIndicator = PiecewisePoly::indicator(-1, 1);
const PiecewisePoly kParabola = PiecewisePoly::single(-1, 1, Polynomial{1, 0, -1});

/// Midpoint Riemann sum of int f(t) g(x - t) dt with n cells over f's support.
double riemann_convolution(const PiecewisePoly& f, const PiecewisePoly& g, double x, int n)
{
    const double lo = f.support_lo().get_d();
    const double hi = f.support_hi().get_d();
    const double h = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = lo + (i + 0.5) * h;
        s += f.eval_double(t) * g.eval_double(x - t);
    }
    return s * h;
}

TEST(Eval, ZeroFunctionIsZeroEverywhere)
{
    const PiecewisePoly z;
    EXPECT_EQ(z(make_rational(-7, 3)), 0);
    EXPECT_EQ(z(Rational(0)), 0);
    EXPECT_TRUE(z.is_zero());
}

TEST(Eval, RootAndOutsideSupport)
{
    EXPECT_EQ(kParabola(Rational(1)), 0);
    EXPECT_EQ(kParabola(Rational(0)), 1);
    EXPECT_EQ(kParabola(Rational(2)), 0);
}

TEST(Eval, ReferenceSecondIterateAtOneHalf)
{
    // 1 - (6/5)(1/4) + (1/5)(1/16)
    EXPECT_EQ(reference_f2()(make_rational(1, 2)), make_rational(57, 80));
}

TEST(Eval, HalfOpenConventionWithClosedRightEnd)
{
    const PiecewisePoly step({Rational(0), Rational(1), Rational(2)}, {Polynomial{1}, Polynomial{5}});
    EXPECT_EQ(step(Rational(0)), 1);
    EXPECT_EQ(step(Rational(1)), 5);  // right piece owns the interior breakpoint
    EXPECT_EQ(step(Rational(2)), 5);  // last piece owns b_k
    EXPECT_EQ(step(make_rational(201, 100)), 0);
}

TEST(Construction, MergesIdenticalAdjacentPieces)
{
    const PiecewisePoly f({Rational(-1), Rational(0), Rational(1)}, {Polynomial{2}, Polynomial{2}});
    EXPECT_EQ(f.piece_count(), 1U);
    EXPECT_EQ(f, PiecewisePoly::indicator(-1, 1, 2));
}

TEST(Construction, RejectsBadBreakpoints)
{
    EXPECT_THROW(PiecewisePoly({Rational(1), Rational(0)}, {Polynomial{1}}), InvalidArgument);
    EXPECT_THROW(PiecewisePoly({Rational(0)}, {}), InvalidArgument);
    EXPECT_THROW(PiecewisePoly({Rational(0), Rational(1)}, {Polynomial{1}, Polynomial{2}}), InvalidArgument);
}

TEST(Convolve, IndicatorWithItselfIsTent)
{
    const PiecewisePoly tent = convolve(kIndicator, kIndicator);
    const PiecewisePoly expected({Rational(-2), Rational(0), Rational(2)}, {Polynomial{2, 1}, Polynomial{2, -1}});
    EXPECT_EQ(tent, expected);
    // independent Riemann sum at 10^4 cells
    for (double x : {-1.9, -1.0, -0.3, 0.0, 0.7, 1.55}) {
        EXPECT_NEAR(riemann_convolution(kIndicator, kIndicator, x, 10000), 2.0 - std::abs(x), 1e-3) << x;
    }
}

TEST(Convolve, TripleIndicatorOnUnitIntervalIsThreeMinusXSquared)
{
    const PiecewisePoly c3 = self_convolve(kIndicator, 3);
    const long i = c3.piece_index(Rational(0));
    ASSERT_GE(i, 0);
    EXPECT_EQ(c3.breakpoints()[static_cast<std::size_t>(i)], -1);
    EXPECT_EQ(c3.breakpoints()[static_cast<std::size_t>(i) + 1], 1);
    EXPECT_EQ(c3.pieces()[static_cast<std::size_t>(i)], (Polynomial{3, 0, -1}));
    EXPECT_EQ(c3.support_lo(), -3);
    EXPECT_EQ(c3.support_hi(), 3);
}

TEST(Convolve, ZeroAnnihilates)
{
    EXPECT_TRUE(convolve(kParabola, PiecewisePoly::zero()).is_zero());
    EXPECT_TRUE(convolve(PiecewisePoly::zero(), reference_f3()).is_zero());
}

TEST(Convolve, SupportIsSumOfSupportsAndResultIsContinuous)
{
    const PiecewisePoly f = PiecewisePoly::indicator(make_rational(-1, 2), 1);
    const PiecewisePoly g = PiecewisePoly::single(0, 3, Polynomial{0, 1});
    const PiecewisePoly h = convolve(f, g);
    EXPECT_EQ(h.support_lo(), make_rational(-1, 2));
    EXPECT_EQ(h.support_hi(), 4);
    for (std::size_t i = 1; i + 1 < h.breakpoints().size(); ++i) {
        const Rational& b = h.breakpoints()[i];
        EXPECT_EQ(h.pieces()[i - 1](b), h.pieces()[i](b)) << to_string(b);
    }
}

TEST(ConvolveProperties, CommutativeAssociativeAndMassMultiplicative)
{
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 25; ++trial) {
        const PiecewisePoly f = testing::random_piecewise(rng);
        const PiecewisePoly g = testing::random_piecewise(rng);
        const PiecewisePoly h = testing::random_piecewise(rng, 2);
        EXPECT_EQ(convolve(f, g), convolve(g, f));
        EXPECT_EQ(convolve(convolve(f, g), h), convolve(f, convolve(g, h)));
    }
    for (int trial = 0; trial < 25; ++trial) {
        const PiecewisePoly f = testing::random_piecewise(rng, 3, true);
        const PiecewisePoly g = testing::random_piecewise(rng, 3, true);
        EXPECT_EQ(integral(convolve(f, g)), integral(f) * integral(g));
    }
}

TEST(ConvolveProperties, AgreesWithRiemannSums)
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const PiecewisePoly f = testing::random_piecewise(rng);
        const PiecewisePoly g = testing::random_piecewise(rng);
        const PiecewisePoly h = convolve(f, g);
        double scale = 1.0;
        for (double x = -2.0; x <= 2.0; x += 0.01) scale = std::max(scale, std::abs(f.eval_double(x)) * 1.0);
        double gscale = 1.0;
        for (double x = -2.0; x <= 2.0; x += 0.01) gscale = std::max(gscale, std::abs(g.eval_double(x)));
        const double width = Rational(f.support_hi() - f.support_lo()).get_d();
        const int cells = static_cast<int>(std::ceil(width / 1e-3));
        for (double x = -3.9; x < 4.0; x += 0.37) {
            // O(dx) with jump count <= 4
            EXPECT_NEAR(h.eval_double(x), riemann_convolution(f, g, x, cells), 8e-3 * scale * gscale) << x;
        }
    }
}

TEST(Multiply, BinomialSquareAndIdentity)
{
    EXPECT_EQ(power_int(kParabola, 2), PiecewisePoly::single(-1, 1, Polynomial{1, 0, -2, 0, 1}));
    EXPECT_EQ(multiply(kParabola, kIndicator), kParabola);
    EXPECT_EQ(power_int(reference_f2(), 2)(Rational(0)), 1);
    EXPECT_THROW(power_int(kParabola, 0), InvalidArgument);
}

TEST(Multiply, ProductVanishesOutsideCommonSupport)
{
    const PiecewisePoly a = PiecewisePoly::indicator(0, 2, 3);
    const PiecewisePoly b = PiecewisePoly::indicator(1, 4, 2);
    const PiecewisePoly ab = multiply(a, b);
    EXPECT_EQ(ab(make_rational(1, 2)), 0);
    EXPECT_EQ(ab(make_rational(3, 2)), 6);
    EXPECT_EQ(ab(Rational(3)), 0);
}

TEST(Derivative, SecondDerivativeOfCentralPiece)
{
    const PiecewisePoly c = PiecewisePoly::single(-1, 1, Polynomial{3, 0, -1});
    EXPECT_EQ(derivative_at(c, 2, Rational(0)), -2);
}

TEST(Derivative, TenthDerivativeOfThirdIterate)
{
    const Rational expected = Rational(factorial(10)) * make_rational(-1, 50521);
    EXPECT_EQ(derivative_at(reference_f3(), 10, Rational(0)), expected);
}

TEST(Derivative, ConstantPieceHasZeroDerivative)
{
    EXPECT_TRUE(derivative(kIndicator, 1).is_zero());
    EXPECT_EQ(derivative(kParabola, 0), kParabola);
}

TEST(Derivative, BreakpointIsRejected)
{
    EXPECT_THROW(derivative_at(kParabola, 1, Rational(1)), BreakpointDerivative);
    EXPECT_THROW(derivative_at(convolve(kIndicator, kIndicator), 1, Rational(0)), BreakpointDerivative);
}

TEST(Derivative, PrimitiveDifferentiatesBack)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const PiecewisePoly f = testing::random_piecewise(rng);
        EXPECT_EQ(derivative(primitive(f), 1), f);
        EXPECT_EQ(primitive(f)(f.support_hi()), integral(f));
    }
}

TEST(Integral, NormsOfReferenceFunctions)
{
    EXPECT_EQ(lp_norm_int(kIndicator, 1), 2);
    EXPECT_EQ(lp_norm_int(kParabola, 1), make_rational(4, 3));
    EXPECT_EQ(lp_norm_int(kParabola, 2), make_rational(16, 15));
}

TEST(Integral, PartialRanges)
{
    EXPECT_EQ(integral(kParabola, Rational(0), Rational(1)), make_rational(2, 3));
    EXPECT_EQ(integral(kParabola, Rational(-5), Rational(5)), make_rational(4, 3));
    EXPECT_EQ(integral(kParabola, Rational(2), Rational(3)), 0);
    EXPECT_THROW(integral(kParabola, Rational(1), Rational(0)), InvalidArgument);
}

TEST(Integral, NegativeDensityIsRejected)
{
    EXPECT_THROW(lp_norm_int(PiecewisePoly::single(-1, 1, Polynomial{0, 1}), 2), NegativeDensity);
    // interior dip: x^2 - 1/100 is negative near 0 only
    const PiecewisePoly dip = PiecewisePoly::single(-1, 1, Polynomial{make_rational(-1, 100), 0, 1});
    EXPECT_THROW(lp_norm_int(dip, 1), NegativeDensity);
    // double root at a non-sample point is fine
    const PiecewisePoly touch =
        PiecewisePoly::single(-1, 1, Polynomial{make_rational(1, 9), make_rational(-2, 3), 1});
    EXPECT_NO_THROW(lp_norm_int(touch, 1));
}

TEST(Dilation, ScalesBreakpointsAndMass)
{
    const PiecewisePoly d = dilate(kParabola, 2, make_rational(1, 2));
    EXPECT_EQ(d.support_lo(), -2);
    EXPECT_EQ(d.support_hi(), 2);
    EXPECT_EQ(integral(d), integral(kParabola));
    EXPECT_EQ(d(Rational(1)), make_rational(3, 8));
    EXPECT_EQ(reflect(reflect(convolve(kParabola, kIndicator))), convolve(kParabola, kIndicator));
}

}  // namespace
}  // namespace renyi
