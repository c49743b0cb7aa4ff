#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "renyi/entropy.hpp"
#include "renyi/errors.hpp"
#include "renyi/grid_function.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/rational.hpp"

namespace renyi {

/// Signed offset k such that node i of `inner` is node i + k of `outer`.
/// Throws when the two grids are not aligned.
inline long node_offset(const GridFunction& outer, const GridFunction& inner)
{
    if (std::abs(outer.dx() - inner.dx()) > 1e-12 * outer.dx())
        throw MismatchedSpacing("grids have different spacings");
    const double r = (inner.x0() - outer.x0()) / outer.dx();
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-6) throw InvalidArgument("grids are not aligned to a common lattice");
    return static_cast<long>(k);
}

/// dx * sum a(x) b(x) over the nodes the two aligned grids share.
inline double inner_product(const GridFunction& a, const GridFunction& b)
{
    const long off = node_offset(a, b);
    double s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const long i = static_cast<long>(j) + off;
        if (i < 0 || i >= static_cast<long>(a.size())) continue;
        s += a[static_cast<std::size_t>(i)] * b[j];
    }
    return a.dx() * s;
}

/// Left-hand side of the Euler-Lagrange equation,
/// T(C_{n-1}(Q)) * (C_n(Q))^(p-1), on its natural (wide) grid.
inline GridFunction el_operator(const GridFunction& Q, unsigned n, double p)
{
    if (n < 2) throw InvalidArgument("Euler-Lagrange operator needs n >= 2");
    const GridFunction lower = reflect(self_convolve_grid(Q, n - 1));
    const GridFunction upper = power_real(self_convolve_grid(Q, n), p - 1.0);
    return convolve_grid(lower, upper);
}

/// Values of a wide-grid function at the nodes of `on`.
inline std::vector<double> restrict_to_nodes(const GridFunction& wide, const GridFunction& on)
{
    const long off = node_offset(wide, on);
    std::vector<double> out(on.size(), 0.0);
    for (std::size_t j = 0; j < on.size(); ++j) {
        const long i = static_cast<long>(j) + off;
        if (i >= 0 && i < static_cast<long>(wide.size())) out[j] = wide[static_cast<std::size_t>(i)];
    }
    return out;
}

struct ElResidualReport {
    double sup_residual = 0.0;
    double l2_residual = 0.0;
    /// Dilation applied to bring Q into F(M, p); 1 when Q was already feasible.
    double fitted_scale = 1.0;
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    /// I(Q) of the (possibly rescaled) input.
    double Lambda = 0.0;
    double M = 0.0;
    bool rescaled = false;
};

/// Residual of T(C_{n-1}Q) * (C_nQ)^(p-1) = Lambda/(Mn) Q^(p-1) + Lambda(n-1)/n
/// with Lambda = I(Q), on {Q > 1e-9 max Q}. Inputs outside F(M, p) (tolerance
/// 1e-6) are rescaled first.
inline ElResidualReport el_residual(const GridFunction& Q_in, unsigned n, double p, double M)
{
    const ConstraintSet c{M, p, n};
    c.validate();
    ElResidualReport report;
    report.M = M;

    GridFunction Q = Q_in;
    const double mass = Q.mass();
    const double norm = lp_norm_real(Q, p);
    if (std::abs(mass - 1.0) > 1e-6 || std::abs(norm - M) > 1e-6 * M) {
        try {
            auto scaled = scale_to_feasible(Q, c);
            Q = std::move(scaled.f_tilde);
            report.fitted_scale = scaled.lambda;
            report.rescaled = true;
        } catch (const ZeroMass& e) {
            throw InfeasibleInput(std::string("cannot rescale input into F(M, p): ") + e.what());
        }
    }

    const double Lambda = objective_I(Q, n, p);
    report.Lambda = Lambda;
    const std::vector<double> lhs = restrict_to_nodes(el_operator(Q, n, p), Q);
    const double coef_q = Lambda / (M * static_cast<double>(n));
    const double coef_1 = Lambda * static_cast<double>(n - 1) / static_cast<double>(n);
    const double threshold = 1e-9 * Q.max_value();

    double sup = 0.0;
    double sq = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        if (!(Q[i] > threshold)) continue;
        const double r = lhs[i] - coef_q * std::pow(Q[i], p - 1.0) - coef_1;
        sup = std::max(sup, std::abs(r));
        sq += r * r;
        if (!any) report.domain_lo = Q.node(i);
        report.domain_hi = Q.node(i);
        any = true;
    }
    if (!any) throw InfeasibleInput("Q has an empty positivity set");
    report.sup_residual = sup;
    report.l2_residual = std::sqrt(Q.dx() * sq);
    return report;
}

/// Both sides of the integrated Euler-Lagrange identity:
/// int Q * LHS(Q) and I(Q). They coincide for every Q.
struct IntegratedIdentity {
    double pairing;
    double objective;
};

inline IntegratedIdentity integrated_el_identity(const GridFunction& Q, unsigned n, double p)
{
    return {inner_product(el_operator(Q, n, p), Q), objective_I(Q, n, p)};
}

/// Both sides of int f (T(g) * h) = int (f * g) h.
struct AdjointPairing {
    double reflected_side;
    double convolved_side;
};

inline AdjointPairing adjoint_pairing(const GridFunction& f, const GridFunction& g, const GridFunction& h)
{
    return {inner_product(f, convolve_grid(reflect(g), h)), inner_product(convolve_grid(f, g), h)};
}

/// Exact verdict that C_3(G) is not affine in G near 0, G = (3/4)(1 - x^2)_+.
struct CounterexampleReport {
    Rational alpha;
    /// C_3(G) on [-1, 1] (a single polynomial piece).
    Polynomial triple_convolution;
    Rational x6_coefficient;
    /// a G + b through x = 0 and x = 1.
    Rational affine_fit_a;
    Rational affine_fit_b;
    double sup_affine_residual = 0.0;
    /// L^2([-1, 1]) least-squares alternative.
    Rational lsq_fit_a;
    Rational lsq_fit_b;
    double sup_lsq_residual = 0.0;
    /// C_3(-2 * 1_[-1,1]) on [-1, 1] and whether it equals -8 (3 - x^2).
    Polynomial indicator_triple;
    bool indicator_identity = false;
    bool verdict = false;
};

namespace detail {

/// max |r(x)| over x = -1 + i/1000, exact evaluation.
inline double sup_on_unit_interval(const Polynomial& r)
{
    double sup = 0.0;
    for (long i = -1000; i <= 1000; ++i) sup = std::max(sup, std::abs(r(make_rational(i, 1000)).get_d()));
    return sup;
}

inline Polynomial center_piece(const PiecewisePoly& f)
{
    // the piece containing 0 must cover all of [-1, 1]
    const long i = f.piece_index(Rational(0));
    const auto& b = f.breakpoints();
    if (i < 0 || b[static_cast<std::size_t>(i)] > -1 || b[static_cast<std::size_t>(i) + 1] < 1)
        throw Error("expected a single polynomial piece on [-1, 1]");
    return f.pieces()[static_cast<std::size_t>(i)];
}

}  // namespace detail

inline CounterexampleReport counterexample_check()
{
    CounterexampleReport r;
    r.alpha = Rational(3, 4);
    const Polynomial g_poly = Polynomial{Rational(1), Rational(0), Rational(-1)} * r.alpha;
    const PiecewisePoly G = PiecewisePoly::single(-1, 1, g_poly);
    r.triple_convolution = detail::center_piece(self_convolve(G, 3));
    r.x6_coefficient = r.triple_convolution.coefficient(6);
    r.verdict = r.x6_coefficient != 0;

    const Polynomial& C = r.triple_convolution;
    // G(0) = alpha, G(1) = 0
    r.affine_fit_b = C(Rational(1));
    r.affine_fit_a = (C(Rational(0)) - r.affine_fit_b) / r.alpha;
    r.sup_affine_residual = detail::sup_on_unit_interval(
        C - g_poly * r.affine_fit_a - Polynomial::constant(r.affine_fit_b));

    // Normal equations of min int_{-1}^{1} (C - a G - b)^2.
    auto integral11 = [](const Polynomial& p) {
        const Polynomial anti = p.antiderivative();
        return Rational(anti(Rational(1)) - anti(Rational(-1)));
    };
    const Rational gg = integral11(g_poly * g_poly);
    const Rational g1 = integral11(g_poly);
    const Rational cg = integral11(C * g_poly);
    const Rational c1 = integral11(C);
    const Rational det = gg * 2 - g1 * g1;
    r.lsq_fit_a = (cg * 2 - g1 * c1) / det;
    r.lsq_fit_b = (gg * c1 - g1 * cg) / det;
    r.sup_lsq_residual =
        detail::sup_on_unit_interval(C - g_poly * r.lsq_fit_a - Polynomial::constant(r.lsq_fit_b));

    const PiecewisePoly minus_two = PiecewisePoly::indicator(-1, 1, -2);
    r.indicator_triple = detail::center_piece(self_convolve(minus_two, 3));
    r.indicator_identity = r.indicator_triple == Polynomial{Rational(-24), Rational(0), Rational(8)};
    return r;
}

/// Sixth-derivative weights on offsets -4..4 (exact for polynomials of degree
/// up to 9).
inline constexpr std::array<double, 9> kSixthDerivativeStencil{-0.25, 3.0, -13.0, 29.0, -37.5, 29.0, -13.0, 3.0, -0.25};

struct X6GridCheck {
    double grid_value;
    double exact_value;
    double relative_error;
    double dx;
    double stencil_step;
};

/// Grid estimate of the x^6 coefficient of C_3(G): sample G, convolve three
/// times on the grid, apply the central sixth-derivative stencil at 0 and
/// divide by 6!.
inline X6GridCheck x6_coefficient_grid(double dx = 1e-4, double stencil_step = 0.1)
{
    const std::size_t N = symmetric_node_count(1.0, dx);
    const std::size_t c = (N - 1) / 2;
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = (static_cast<double>(i) - static_cast<double>(c)) * dx;
        v[i] = std::max(0.0, 0.75 * (1.0 - x * x));
    }
    const GridFunction K = self_convolve_grid(GridFunction::symmetric(dx, std::move(v)), 3);
    const auto m = static_cast<std::size_t>(std::llround(stencil_step / dx));
    if (m == 0 || 4 * m >= c) throw InvalidArgument("stencil step must stay inside (-1, 1)");
    const std::size_t centre = 3 * c;
    double d6 = 0.0;
    for (std::size_t k = 0; k < 9; ++k) d6 += kSixthDerivativeStencil[k] * K[centre + k * m - 4 * m];
    const double h = static_cast<double>(m) * dx;
    const double estimate = d6 / std::pow(h, 6) / 720.0;
    const double exact = counterexample_check().x6_coefficient.get_d();
    return {estimate, exact, std::abs(estimate - exact) / std::abs(exact), dx, h};
}

/// Discrete Young bound with exponent r = np/(np - p + 1):
/// (int |g_1 * ... * g_n|^p)^(1/p) <= prod |g_j|_r.
struct YoungCheck {
    double lhs;
    double rhs;
    double exponent;
    bool holds;
};

inline double young_exponent(unsigned n, double p)
{
    const double np = static_cast<double>(n) * p;
    return np / (np - p + 1.0);
}

inline YoungCheck young_bound_check(std::span<const GridFunction> gs, double p)
{
    if (gs.size() < 2) throw InvalidArgument("Young check needs at least two functions");
    if (!(p > 1.0)) throw InvalidArgument("Young check needs p > 1");
    const double r = young_exponent(static_cast<unsigned>(gs.size()), p);
    GridFunction conv = gs[0];
    for (std::size_t j = 1; j < gs.size(); ++j) conv = convolve_grid(conv, gs[j]);
    const double lhs = std::pow(lp_norm_real(conv, p), 1.0 / p);
    double rhs = 1.0;
    for (const auto& g : gs) rhs *= std::pow(lp_norm_real(g, r), 1.0 / r);
    return {lhs, rhs, r, lhs <= rhs * (1.0 + 1e-8)};
}

struct RieszCheck {
    double i_f;
    double i_fstar;
    bool holds;
};

/// I(f) against I(f*), f* the symmetric decreasing rearrangement.
inline RieszCheck riesz_check(const GridFunction& f, unsigned n, double p)
{
    const double i_f = objective_I(f, n, p);
    const double i_star = objective_I(rearrange_symmetric_decreasing(f), n, p);
    return {i_f, i_star, i_star >= i_f - 1e-8};
}

}  // namespace renyi
