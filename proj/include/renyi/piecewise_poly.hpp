#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "renyi/errors.hpp"
#include "renyi/polynomial.hpp"
#include "renyi/rational.hpp"

namespace renyi {

/// Compactly supported piecewise polynomial with rational breakpoints.
///
/// Piece i is valid on the half-open interval [b_i, b_{i+1}); the last piece
/// also owns the right endpoint b_k. Outside [b_0, b_k] the function is zero.
/// Adjacent identical pieces are merged on construction, so two functions are
/// equal iff their canonical representations are equal. Continuity is not
/// required.
class PiecewisePoly {
public:
    /// The zero function (on [0, 1]).
    PiecewisePoly() : breaks_{Rational(0), Rational(1)}, pieces_(1) {}

    PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces)
        : breaks_(std::move(breakpoints)), pieces_(std::move(pieces))
    {
        if (breaks_.size() < 2) throw InvalidArgument("piecewise polynomial needs at least two breakpoints");
        if (pieces_.size() + 1 != breaks_.size())
            throw InvalidArgument("piece count must equal breakpoint count minus one");
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            if (!(breaks_[i] < breaks_[i + 1])) throw InvalidArgument("breakpoints must be strictly increasing");
        merge();
    }

    static PiecewisePoly zero() { return {}; }

    /// poly on [lo, hi], zero elsewhere.
    static PiecewisePoly single(const Rational& lo, const Rational& hi, Polynomial poly)
    {
        return PiecewisePoly({lo, hi}, {std::move(poly)});
    }

    static PiecewisePoly indicator(const Rational& lo, const Rational& hi, const Rational& height = 1)
    {
        return single(lo, hi, Polynomial::constant(height));
    }

    const std::vector<Rational>& breakpoints() const { return breaks_; }
    const std::vector<Polynomial>& pieces() const { return pieces_; }
    std::size_t piece_count() const { return pieces_.size(); }
    const Rational& support_lo() const { return breaks_.front(); }
    const Rational& support_hi() const { return breaks_.back(); }

    bool is_zero() const
    {
        return std::all_of(pieces_.begin(), pieces_.end(), [](const Polynomial& p) { return p.is_zero(); });
    }

    /// Index of the piece owning x, or -1 outside the support.
    long piece_index(const Rational& x) const
    {
        if (x < breaks_.front() || x > breaks_.back()) return -1;
        if (x == breaks_.back()) return static_cast<long>(pieces_.size()) - 1;
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        return static_cast<long>(std::distance(breaks_.begin(), it)) - 1;
    }

    bool is_breakpoint(const Rational& x) const { return std::binary_search(breaks_.begin(), breaks_.end(), x); }

    Rational operator()(const Rational& x) const
    {
        const long i = piece_index(x);
        return i < 0 ? Rational(0) : pieces_[static_cast<std::size_t>(i)](x);
    }

    double eval_double(double x) const
    {
        const long i = std::isfinite(x) ? piece_index(Rational(x)) : -1;
        return i < 0 ? 0.0 : pieces_[static_cast<std::size_t>(i)].eval_accurate(x);
    }

    friend bool operator==(const PiecewisePoly& a, const PiecewisePoly& b)
    {
        return a.breaks_ == b.breaks_ && a.pieces_ == b.pieces_;
    }

private:
    void merge()
    {
        std::vector<Rational> b{breaks_.front()};
        std::vector<Polynomial> p{pieces_.front()};
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
            if (pieces_[i] == p.back()) {
                continue;
            }
            b.push_back(breaks_[i]);
            p.push_back(pieces_[i]);
        }
        b.push_back(breaks_.back());
        breaks_ = std::move(b);
        pieces_ = std::move(p);
    }

    std::vector<Rational> breaks_;
    std::vector<Polynomial> pieces_;
};

namespace detail {

inline std::vector<Rational> sorted_unique(std::vector<Rational> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// Sum of (lo, hi, poly) contributions on the elementary intervals of `grid`.
struct PieceAccumulator {
    std::vector<Rational> grid;
    std::vector<Polynomial> sums;

    explicit PieceAccumulator(std::vector<Rational> points) : grid(sorted_unique(std::move(points)))
    {
        sums.resize(grid.size() - 1);
    }

    void add(const Rational& lo, const Rational& hi, const Polynomial& poly)
    {
        if (!(lo < hi) || poly.is_zero()) return;
        auto first = std::lower_bound(grid.begin(), grid.end(), lo);
        auto last = std::lower_bound(grid.begin(), grid.end(), hi);
        for (auto it = first; it != last; ++it) sums[static_cast<std::size_t>(it - grid.begin())] += poly;
    }

    PiecewisePoly finish() && { return PiecewisePoly(std::move(grid), std::move(sums)); }
};

/// Common refinement of the breakpoints of f and g over the union of supports.
inline std::vector<Rational> merged_breakpoints(const PiecewisePoly& f, const PiecewisePoly& g)
{
    std::vector<Rational> all = f.breakpoints();
    all.insert(all.end(), g.breakpoints().begin(), g.breakpoints().end());
    return sorted_unique(std::move(all));
}

/// Piece of f that is active on the open interval (lo, hi), zero if none.
inline Polynomial piece_on(const PiecewisePoly& f, const Rational& lo, const Rational& hi)
{
    const Rational mid = (lo + hi) / 2;
    if (mid < f.support_lo() || mid > f.support_hi()) return {};
    return f.pieces()[static_cast<std::size_t>(f.piece_index(mid))];
}

template <typename Op>
PiecewisePoly combine(const PiecewisePoly& f, const PiecewisePoly& g, Op op)
{
    std::vector<Rational> grid = merged_breakpoints(f, g);
    std::vector<Polynomial> pieces;
    pieces.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        pieces.push_back(op(piece_on(f, grid[i], grid[i + 1]), piece_on(g, grid[i], grid[i + 1])));
    return PiecewisePoly(std::move(grid), std::move(pieces));
}

}  // namespace detail

inline PiecewisePoly operator+(const PiecewisePoly& f, const PiecewisePoly& g)
{
    return detail::combine(f, g, [](const Polynomial& a, const Polynomial& b) { return a + b; });
}

inline PiecewisePoly operator-(const PiecewisePoly& f, const PiecewisePoly& g)
{
    return detail::combine(f, g, [](const Polynomial& a, const Polynomial& b) { return a - b; });
}

inline PiecewisePoly operator*(const Rational& s, const PiecewisePoly& f)
{
    std::vector<Polynomial> pieces;
    for (const auto& p : f.pieces()) pieces.push_back(p * s);
    return PiecewisePoly(f.breakpoints(), std::move(pieces));
}

/// Pointwise product on the common refinement of both breakpoint sets.
inline PiecewisePoly multiply(const PiecewisePoly& f, const PiecewisePoly& g)
{
    return detail::combine(f, g, [](const Polynomial& a, const Polynomial& b) { return a * b; });
}

inline PiecewisePoly power_int(const PiecewisePoly& f, unsigned m)
{
    if (m == 0) throw InvalidArgument("power_int exponent must be >= 1");
    std::vector<Polynomial> pieces;
    for (const auto& p : f.pieces()) pieces.push_back(p.pow(m));
    return PiecewisePoly(f.breakpoints(), std::move(pieces));
}

/// Restriction of f to [lo, hi]; the result is zero outside [lo, hi].
inline PiecewisePoly restrict_to(const PiecewisePoly& f, const Rational& lo, const Rational& hi)
{
    if (!(lo < hi)) throw InvalidArgument("restrict_to requires lo < hi");
    std::vector<Rational> grid{lo, hi};
    for (const auto& b : f.breakpoints())
        if (b > lo && b < hi) grid.push_back(b);
    grid = detail::sorted_unique(std::move(grid));
    std::vector<Polynomial> pieces;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) pieces.push_back(detail::piece_on(f, grid[i], grid[i + 1]));
    return PiecewisePoly(std::move(grid), std::move(pieces));
}

/// c on [lo, hi].
inline PiecewisePoly constant_on(const Rational& c, const Rational& lo, const Rational& hi)
{
    return PiecewisePoly::indicator(lo, hi, c);
}

/// x -> scale * f(x / dilation), exact.
inline PiecewisePoly dilate(const PiecewisePoly& f, const Rational& dilation, const Rational& scale = 1)
{
    if (!(dilation > 0)) throw InvalidArgument("dilation factor must be positive");
    std::vector<Rational> breaks;
    for (const auto& b : f.breakpoints()) breaks.push_back(b * dilation);
    const Rational inv = 1 / dilation;
    std::vector<Polynomial> pieces;
    for (const auto& p : f.pieces()) pieces.push_back(p.scaled_argument(inv) * scale);
    return PiecewisePoly(std::move(breaks), std::move(pieces));
}

/// x -> f(-x)
inline PiecewisePoly reflect(const PiecewisePoly& f)
{
    std::vector<Rational> breaks;
    for (auto it = f.breakpoints().rbegin(); it != f.breakpoints().rend(); ++it) breaks.push_back(-*it);
    std::vector<Polynomial> pieces;
    for (auto it = f.pieces().rbegin(); it != f.pieces().rend(); ++it) pieces.push_back(it->scaled_argument(-1));
    return PiecewisePoly(std::move(breaks), std::move(pieces));
}

namespace detail {

// With R_k the k-th antiderivative of Q, repeated integration by parts gives
// F(t) = -sum_k P^(k)(t) R_(k+1)(x - t) as a t-primitive of P(t) Q(x - t).

inline std::vector<Polynomial> repeated_antiderivatives(const Polynomial& q, std::size_t count)
{
    std::vector<Polynomial> r;
    r.reserve(count);
    Polynomial cur = q;
    for (std::size_t k = 0; k < count; ++k) {
        cur = cur.antiderivative();
        r.push_back(cur);
    }
    return r;
}

/// F(a) as a polynomial in x.
inline Polynomial primitive_at_constant(const Polynomial& p, const Polynomial& q, const Rational& a)
{
    const std::size_t terms = static_cast<std::size_t>(p.degree()) + 1;
    const auto r = repeated_antiderivatives(q, terms);
    // P^(k)(a) = k! [y^k] P(a + y)
    const Polynomial taylor = p.shifted(a);
    Polynomial sum;
    Rational k_fact(1);
    for (std::size_t k = 0; k < terms; ++k) {
        if (k > 0) k_fact *= static_cast<unsigned long>(k);
        const Rational d = taylor.coefficient(k) * k_fact;
        if (d != 0) sum += r[k] * d;
    }
    return (-sum).shifted(-a);
}

/// F(x - c) as a polynomial in x.
inline Polynomial primitive_at_linear(const Polynomial& p, const Polynomial& q, const Rational& c)
{
    const std::size_t terms = static_cast<std::size_t>(p.degree()) + 1;
    const auto r = repeated_antiderivatives(q, terms);
    Polynomial sum;
    Polynomial deriv = p;
    for (std::size_t k = 0; k < terms; ++k) {
        const Rational w = r[k](c);
        if (w != 0) sum += deriv * w;
        deriv = deriv.derivative(1);
    }
    return (-sum).shifted(-c);
}

}  // namespace detail

/// Exact convolution (f * g)(x) = int f(t) g(x - t) dt.
///
/// For pieces P on [a1, a2] and Q on [c1, c2] the integration window is
/// [max(a1, x - c2), min(a2, x - c1)], whose endpoints are linear in x between
/// the four sums a_i + c_j. A t-primitive of P(t) Q(x - t) is evaluated at
/// those endpoints symbolically, giving an exact polynomial in x per region.
inline PiecewisePoly convolve(const PiecewisePoly& f, const PiecewisePoly& g)
{
    const auto& fb = f.breakpoints();
    const auto& gb = g.breakpoints();
    std::vector<Rational> points;
    points.reserve(fb.size() * gb.size());
    for (const auto& a : fb)
        for (const auto& c : gb) points.push_back(a + c);
    detail::PieceAccumulator acc(std::move(points));

    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const Polynomial& p = f.pieces()[i];
        if (p.is_zero()) continue;
        const Rational& a1 = fb[i];
        const Rational& a2 = fb[i + 1];
        for (std::size_t j = 0; j < g.piece_count(); ++j) {
            const Polynomial& q = g.pieces()[j];
            if (q.is_zero()) continue;
            const Rational& c1 = gb[j];
            const Rational& c2 = gb[j + 1];
            const Polynomial at_a1 = detail::primitive_at_constant(p, q, a1);
            const Polynomial at_a2 = detail::primitive_at_constant(p, q, a2);
            const Polynomial at_x_minus_c1 = detail::primitive_at_linear(p, q, c1);
            const Polynomial at_x_minus_c2 = detail::primitive_at_linear(p, q, c2);

            const Rational lo = a1 + c1;
            const Rational hi = a2 + c2;
            const Rational left_long = a1 + c2;
            const Rational right_long = a2 + c1;
            const Rational m1 = std::min(left_long, right_long);
            const Rational m2 = std::max(left_long, right_long);

            // rising edge: window [a1, x - c1]
            acc.add(lo, m1, at_x_minus_c1 - at_a1);
            // plateau: the shorter piece slides fully inside the longer one
            if (left_long <= right_long)
                acc.add(m1, m2, at_x_minus_c1 - at_x_minus_c2);
            else
                acc.add(m1, m2, at_a2 - at_a1);
            // falling edge: window [x - c2, a2]
            acc.add(m2, hi, at_a2 - at_x_minus_c2);
        }
    }
    return std::move(acc).finish();
}

/// n-fold self-convolution f * ... * f (n factors); n = 1 returns f.
inline PiecewisePoly self_convolve(const PiecewisePoly& f, unsigned n)
{
    if (n == 0) throw InvalidArgument("self_convolve needs at least one factor");
    PiecewisePoly out = f;
    for (unsigned k = 1; k < n; ++k) out = convolve(out, f);
    return out;
}

/// Piecewise formal derivative; jumps at breakpoints are ignored.
inline PiecewisePoly derivative(const PiecewisePoly& f, unsigned order)
{
    std::vector<Polynomial> pieces;
    for (const auto& p : f.pieces()) pieces.push_back(p.derivative(order));
    return PiecewisePoly(f.breakpoints(), std::move(pieces));
}

/// order-th derivative of the piece containing x. x must not be a breakpoint.
inline Rational derivative_at(const PiecewisePoly& f, unsigned order, const Rational& x)
{
    if (f.is_breakpoint(x))
        throw BreakpointDerivative("derivative requested at breakpoint " + to_string(x));
    const long i = f.piece_index(x);
    if (i < 0) return 0;
    return f.pieces()[static_cast<std::size_t>(i)].derivative(order)(x);
}

/// Continuous primitive F with F(b_0) = 0 (F is constant beyond b_k).
inline PiecewisePoly primitive(const PiecewisePoly& f)
{
    std::vector<Polynomial> pieces;
    Rational carry(0);
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        Polynomial anti = f.pieces()[i].antiderivative();
        anti += Polynomial::constant(carry - anti(b[i]));
        carry = anti(b[i + 1]);
        pieces.push_back(std::move(anti));
    }
    return PiecewisePoly(b, std::move(pieces));
}

/// Exact definite integral of f over [lo, hi].
inline Rational integral(const PiecewisePoly& f, const Rational& lo, const Rational& hi)
{
    if (hi < lo) throw InvalidArgument("integral requires lo <= hi");
    const auto& b = f.breakpoints();
    Rational total(0);
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const Rational l = std::max(lo, b[i]);
        const Rational h = std::min(hi, b[i + 1]);
        if (!(l < h)) continue;
        const Polynomial anti = f.pieces()[i].antiderivative();
        total += anti(h) - anti(l);
    }
    return total;
}

/// Integral over the whole support.
inline Rational integral(const PiecewisePoly& f) { return integral(f, f.support_lo(), f.support_hi()); }

namespace detail {

/// Checks p >= 0 on [lo, hi]: sign test on a 64-point rational sample, then
/// the local minima bracketed by sign changes of p' are refined by bisection
/// and tested.
inline bool nonnegative_on(const Polynomial& p, const Rational& lo, const Rational& hi)
{
    constexpr unsigned kSamples = 64;
    if (p.is_zero()) return true;
    if (p(lo) < 0 || p(hi) < 0) return false;
    if (p.degree() <= 1) return true;

    const Polynomial dp = p.derivative();
    std::vector<Rational> xs;
    xs.reserve(kSamples);
    for (unsigned i = 0; i < kSamples; ++i) xs.push_back(lo + (hi - lo) * make_rational(i, kSamples - 1));

    for (const auto& x : xs)
        if (p(x) < 0) return false;

    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rational l = xs[i];
        Rational r = xs[i + 1];
        const int sl = sgn(dp(l));
        const int sr = sgn(dp(r));
        // A local minimum sits where p' goes from negative to positive.
        if (!(sl < 0 && sr > 0)) continue;
        for (int it = 0; it < 80; ++it) {
            const Rational m = (l + r) / 2;
            const int sm = sgn(dp(m));
            if (sm == 0) {
                l = r = m;
                break;
            }
            (sm < 0 ? l : r) = m;
        }
        if (p((l + r) / 2) < 0) return false;
    }
    return true;
}

}  // namespace detail

/// True when f >= 0 everywhere (see detail::nonnegative_on for the method).
inline bool is_nonnegative(const PiecewisePoly& f)
{
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i < f.piece_count(); ++i)
        if (!detail::nonnegative_on(f.pieces()[i], b[i], b[i + 1])) return false;
    return true;
}

/// int f^p, the p-th power of the L^p norm. Requires f >= 0.
inline Rational lp_norm_int(const PiecewisePoly& f, unsigned p)
{
    if (p == 0) throw InvalidArgument("lp_norm_int exponent must be >= 1");
    if (!is_nonnegative(f)) throw NegativeDensity("lp_norm_int called on a function with negative values");
    return p == 1 ? integral(f) : integral(power_int(f, p));
}

}  // namespace renyi
