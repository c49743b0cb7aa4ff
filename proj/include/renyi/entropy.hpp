#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "renyi/errors.hpp"
#include "renyi/grid_function.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/rational.hpp"

namespace renyi {

/// Constraint set F(M, p) with the number n of summands: unit mass and
/// int f^p = M. Everything here is one-dimensional.
struct ConstraintSet {
    double M = 1.0;
    double p = 2.0;
    unsigned n = 2;

    void validate() const
    {
        if (!(M > 0.0) || !std::isfinite(M)) throw InvalidArgument("constraint M must be positive");
        if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("constraint p must exceed 1");
        if (n < 2) throw InvalidArgument("constraint n must be at least 2");
    }
};

/// An exact rational together with its rounding to double.
struct ExactValue {
    Rational exact;
    double value;
};

namespace detail {

inline bool is_integer_exponent(double p) { return p == std::floor(p) && p >= 1.0 && p < 64.0; }

inline void check_entropy_exponent(double p)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("Renyi exponent p must exceed 1");
}

/// int max(f, 0)^p over the support by adaptive Gauss-Kronrod per piece.
inline double power_integral_quadrature(const PiecewisePoly& f, double p)
{
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const Polynomial& piece = f.pieces()[i];
        if (piece.is_zero()) continue;
        auto integrand = [&](double x) {
            const double v = piece.eval_double(x);
            return v > 0.0 ? std::pow(v, p) : 0.0;
        };
        total += gauss_kronrod<double, 31>::integrate(integrand, b[i].get_d(), b[i + 1].get_d(), 15, 1e-13);
    }
    return total;
}

inline double entropy_from_power_integral(double integral, double p)
{
    if (!(integral > 0.0)) throw DegenerateDensity("int f^p vanishes; Renyi entropy undefined");
    return -std::log(integral) / (p - 1.0);
}

}  // namespace detail

/// h_p(f) = -log(int f^p) / (p - 1) for a sampled density.
inline double renyi_entropy(const GridFunction& f, double p)
{
    detail::check_entropy_exponent(p);
    return detail::entropy_from_power_integral(lp_norm_real(f, p), p);
}

/// h_p for an exact density; the integral is exact when p is an integer.
inline double renyi_entropy(const PiecewisePoly& f, double p)
{
    detail::check_entropy_exponent(p);
    if (detail::is_integer_exponent(p))
        return detail::entropy_from_power_integral(lp_norm_int(f, static_cast<unsigned>(p)).get_d(), p);
    if (!is_nonnegative(f)) throw NegativeDensity("renyi_entropy needs a nonnegative density");
    return detail::entropy_from_power_integral(detail::power_integral_quadrature(f, p), p);
}

/// N_p = exp(2 h_p) (one dimension).
template <typename Density>
double entropy_power(const Density& f, double p)
{
    return std::exp(2.0 * renyi_entropy(f, p));
}

/// I(f) = int (f * ... * f)^p with n factors, computed exactly.
inline ExactValue objective_I_exact(const PiecewisePoly& f, unsigned n, unsigned p)
{
    if (n < 1) throw InvalidArgument("objective needs n >= 1");
    if (p < 2) throw InvalidArgument("objective needs an integer p >= 2");
    Rational v = lp_norm_int(self_convolve(f, n), p);
    const double d = v.get_d();
    return {std::move(v), d};
}

/// I(f) on the grid: dx * sum (C_n f)^p.
inline double objective_I(const GridFunction& f, unsigned n, double p)
{
    if (n < 1) throw InvalidArgument("objective needs n >= 1");
    if (!(p > 1.0)) throw InvalidArgument("objective needs p > 1");
    return lp_norm_real(self_convolve_grid(f, n), p);
}

/// I(f) for an exact density: exact for integer p, otherwise sampled at dx.
inline double objective_I(const PiecewisePoly& f, unsigned n, double p, double dx = 1e-3)
{
    if (detail::is_integer_exponent(p) && p >= 2.0) return objective_I_exact(f, n, static_cast<unsigned>(p)).value;
    return objective_I(sample(f, dx), n, p);
}

/// Result of moving a density into F(M, p) by mass normalisation and dilation.
template <typename Density, typename Scalar>
struct FeasibleScaling {
    Density f_tilde;
    Scalar lambda;
    /// I(f_tilde) = predicted_ratio * I(f).
    Scalar predicted_ratio;
};

/// f_tilde(x) = f(x / lambda) / (lambda * |f|_1) with
/// lambda = (|f|_p^p / (M |f|_1^p))^(1/(p-1)).
inline FeasibleScaling<GridFunction, double> scale_to_feasible(const GridFunction& f, const ConstraintSet& c)
{
    c.validate();
    const double mass = f.mass();
    if (!(mass > 0.0)) throw ZeroMass("cannot normalise a function with zero mass");
    const double norm_p = lp_norm_real(f, c.p);
    const double lambda = std::pow(norm_p / (c.M * std::pow(mass, c.p)), 1.0 / (c.p - 1.0));
    GridFunction out = dilate(f, lambda, 1.0 / (lambda * mass));

    const double out_mass = out.mass();
    const double out_norm = lp_norm_real(out, c.p);
    if (std::abs(out_mass - 1.0) > 1e-9 || std::abs(out_norm - c.M) > 1e-9 * c.M)
        throw InfeasibleInput("rescaled density misses the constraint set (mass " + std::to_string(out_mass)
                              + ", norm " + std::to_string(out_norm) + ")");
    const double ratio = c.M / (norm_p * std::pow(mass, c.p * static_cast<double>(c.n - 1)));
    return {std::move(out), lambda, ratio};
}

/// Exact variant for p = 2 and rational M, where lambda is rational.
inline FeasibleScaling<PiecewisePoly, Rational> scale_to_feasible_exact(const PiecewisePoly& f, const Rational& M,
                                                                        unsigned n)
{
    if (!(M > 0)) throw InvalidArgument("constraint M must be positive");
    if (n < 2) throw InvalidArgument("constraint n must be at least 2");
    const Rational mass = integral(f);
    if (!(mass > 0)) throw ZeroMass("cannot normalise a function with zero mass");
    const Rational norm2 = lp_norm_int(f, 2);
    const Rational lambda = norm2 / (M * mass * mass);
    PiecewisePoly out = dilate(f, lambda, 1 / (lambda * mass));
    if (integral(out) != 1 || lp_norm_int(out, 2) != M)
        throw InfeasibleInput("exact rescaling missed the constraint set");
    const Rational ratio = M / (norm2 * pow(mass, 2 * (n - 1)));
    return {std::move(out), lambda, ratio};
}

}  // namespace renyi
