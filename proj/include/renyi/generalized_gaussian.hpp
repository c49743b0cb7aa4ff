#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "renyi/errors.hpp"
#include "renyi/grid_function.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/rational.hpp"

namespace renyi {

/// log B(a, b) through log-gamma.
inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Density alpha * (1 - beta x^2)_+^(1/(p-1)) on [-beta^(-1/2), beta^(-1/2)].
class GeneralizedGaussian {
public:
    GeneralizedGaussian(double beta, double p, double alpha) : beta_(beta), p_(p), alpha_(alpha) {}

    double beta() const { return beta_; }
    double p() const { return p_; }
    double alpha() const { return alpha_; }
    double exponent() const { return 1.0 / (p_ - 1.0); }
    double half_width() const { return 1.0 / std::sqrt(beta_); }

    double operator()(double x) const
    {
        const double u = 1.0 - beta_ * x * x;
        return u > 0.0 ? alpha_ * std::pow(u, exponent()) : 0.0;
    }

    /// int G^r in closed form: alpha^r beta^(-1/2) B(1/2, r q + 1).
    double power_integral(double r) const
    {
        return std::exp(r * std::log(alpha_) - 0.5 * std::log(beta_) + log_beta(0.5, r * exponent() + 1.0));
    }

    double renyi_entropy() const { return -std::log(power_integral(p_)) / (p_ - 1.0); }

    /// Samples on a grid centred at 0 with spacing dx covering the support.
    GridFunction sample(double dx) const
    {
        const auto k = static_cast<std::size_t>(std::ceil(half_width() / dx - 1e-9));
        std::vector<double> v(2 * k + 1);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (*this)((static_cast<double>(i) - static_cast<double>(k)) * dx);
        return GridFunction::symmetric(dx, std::move(v));
    }

private:
    double beta_;
    double p_;
    double alpha_;
};

/// int (1 - beta x^2)_+^q dx = beta^(-1/2) B(1/2, q + 1).
inline double gengauss_shape_integral(double beta, double p)
{
    const double q = 1.0 / (p - 1.0);
    return std::exp(-0.5 * std::log(beta) + log_beta(0.5, q + 1.0));
}

/// Same integral by tanh-sinh quadrature on u = x sqrt(beta), which copes with
/// the endpoint singularities of (1 - u^2)^q for q < 1.
inline double gengauss_shape_integral_quadrature(double beta, double p)
{
    const double q = 1.0 / (p - 1.0);
    boost::math::quadrature::tanh_sinh<double> integrator;
    // |xc| is the distance to the nearer endpoint (negative near -1), so
    // 1 - u^2 = |xc| (2 - |xc|) without cancellation.
    auto f = [q](double u, double xc) {
        const double e = std::abs(xc);
        const double d = (std::abs(u) > 0.5) ? e * (2.0 - e) : 1.0 - u * u;
        return d > 0.0 ? std::pow(d, q) : 0.0;
    };
    const double unit = integrator.integrate(f, -1.0, 1.0, 1e-14);
    return unit / std::sqrt(beta);
}

/// G_{beta,p} with alpha from the closed form, cross-checked by quadrature.
inline GeneralizedGaussian gengauss(double beta, double p)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("p must exceed 1");
    const double closed = gengauss_shape_integral(beta, p);
    const double quad = gengauss_shape_integral_quadrature(beta, p);
    if (std::abs(closed - quad) > 1e-10 * closed)
        throw Error("generalized Gaussian normalisation: closed form and quadrature disagree");
    return {beta, p, 1.0 / closed};
}

/// Finds beta with h_p(G_{beta,p}) = h_target by TOMS 748 on log(beta);
/// h_p decreases strictly in beta.
inline GeneralizedGaussian gengauss_beta_for_entropy(double h_target, double p)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("p must exceed 1");
    if (!std::isfinite(h_target)) throw NoBracket("target entropy must be finite");
    auto gap = [p, h_target](double log_beta_value) {
        const double beta = std::exp(log_beta_value);
        return GeneralizedGaussian(beta, p, 1.0 / gengauss_shape_integral(beta, p)).renyi_entropy() - h_target;
    };
    const double lo = std::log(1e-300);
    const double hi = std::log(1e300);
    const double g_lo = gap(lo);
    const double g_hi = gap(hi);
    if (g_lo < 0.0 || g_hi > 0.0)
        throw NoBracket("target entropy " + std::to_string(h_target) + " unreachable for beta in [1e-300, 1e300]");
    if (g_lo == 0.0) return gengauss(std::exp(lo), p);
    if (g_hi == 0.0) return gengauss(std::exp(hi), p);

    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, g_lo, g_hi,
                                                          boost::math::tools::eps_tolerance<double>(52), max_iter);
    return gengauss(std::exp(0.5 * (a + b)), p);
}

/// Exact generalized Gaussian for p = 1 + 1/q with integer q and rational
/// half width w (beta = 1/w^2): alpha (1 - x^2/w^2)^q on [-w, w], alpha exact.
inline PiecewisePoly gengauss_exact(unsigned q, const Rational& half_width)
{
    if (q == 0) throw InvalidArgument("exponent q must be positive");
    if (!(half_width > 0)) throw InvalidArgument("half width must be positive");
    const Polynomial base{Rational(1), Rational(0), -1 / (half_width * half_width)};
    PiecewisePoly shape = PiecewisePoly::single(-half_width, half_width, base.pow(q));
    const Rational mass = integral(shape);
    return (1 / mass) * shape;
}

}  // namespace renyi
