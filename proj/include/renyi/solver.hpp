#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "renyi/entropy.hpp"
#include "renyi/errors.hpp"
#include "renyi/euler_lagrange.hpp"
#include "renyi/generalized_gaussian.hpp"
#include "renyi/grid_function.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/rational.hpp"

namespace renyi {

enum class SolverMode { exact, grid };

struct SolverConfig {
    SolverMode mode = SolverMode::grid;
    unsigned n = 2;
    double p = 2.0;
    /// Iteration cap (grid) or the exact number of steps taken (exact).
    unsigned max_iter = 200;
    /// Sup-norm step threshold for grid convergence.
    double tol = 1e-10;
    double dx = 1e-3;
    /// Grid mode only: iterate the general (n, p) Euler-Lagrange map
    /// K = T(C_{n-1} f) * (C_n f)^(p-1), f <- ((K - K(1))/(K(0) - K(1)))_+^(1/(p-1)).
    /// This map is an extension; without it only n = p = 2 is accepted.
    bool general_extension = false;
    /// Grid mode: keep every iterate in the history (exact iterates are always kept).
    bool keep_iterates = false;

    static SolverConfig exact(unsigned steps = 4)
    {
        SolverConfig c;
        c.mode = SolverMode::exact;
        c.max_iter = steps;
        return c;
    }

    void validate() const
    {
        if (n < 2) throw InvalidArgument("solver needs n >= 2");
        if (!(p > 1.0)) throw InvalidArgument("solver needs p > 1");
        if (!(tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
        if (!(dx > 0.0)) throw InvalidArgument("solver grid spacing must be positive");
        if (mode == SolverMode::exact && (p != 2.0 || n != 2))
            throw InvalidArgument("exact mode supports only p = 2, n = 2");
        if (mode == SolverMode::exact && general_extension)
            throw InvalidArgument("the general (n, p) extension is grid-only");
        if (mode == SolverMode::grid && !general_extension && (p != 2.0 || n != 2))
            throw InvalidArgument("n, p other than 2 require the general extension flag");
        symmetric_node_count(1.0, dx);
    }
};

/// One application of the renormalised map, with the normaliser values.
template <typename Density, typename Scalar>
struct IterationStep {
    Density next;
    /// K(0) and K(1) of the kernel image used for the renormalisation.
    Scalar k_center;
    Scalar k_edge;
    /// Grid nodes in [-1, 1] where the positive part was active.
    std::size_t clipped_nodes = 0;
};

/// Exact step for n = p = 2: K = f*f*f, f <- (K - K(1))/(K(0) - K(1)) on [-1, 1].
/// The exact path cannot clip (that would need irrational breakpoints), so a
/// renormalised kernel that dips below zero on [-1, 1] raises NegativeDensity.
inline IterationStep<PiecewisePoly, Rational> iterate_step(const PiecewisePoly& f)
{
    if (f.support_lo() < -1 || f.support_hi() > 1) throw InvalidArgument("iterate must be supported in [-1, 1]");
    const PiecewisePoly K = self_convolve(f, 3);
    const Rational k0 = K(Rational(0));
    const Rational k1 = K(Rational(1));
    if (k0 == k1) throw DegenerateNormalizer("K(0) = K(1); affine renormalisation undefined");
    PiecewisePoly next = (1 / Rational(k0 - k1)) * (restrict_to(K, -1, 1) - constant_on(k1, -1, 1));
    // drop the trailing zero produced by the subtraction outside [-1, 1]
    next = restrict_to(next, -1, 1);
    if (!is_nonnegative(next))
        throw NegativeDensity("renormalised iterate is negative inside [-1, 1]; exact clipping unsupported");
    return {std::move(next), k0, k1, 0};
}

namespace detail {

struct GridLayout {
    std::size_t nodes;
    std::size_t center;
};

inline GridLayout unit_grid_layout(const GridFunction& f)
{
    if (!f.is_symmetric_grid() || std::abs(f.last_node() - 1.0) > 1e-9)
        throw InvalidArgument("grid iterate must live on the symmetric grid over [-1, 1]");
    return {f.size(), (f.size() - 1) / 2};
}

/// Kernel image of f and the index of f's node 0 inside it.
inline std::pair<GridFunction, std::size_t> kernel_image(const GridFunction& f, unsigned n, double p, bool general)
{
    const GridLayout g = unit_grid_layout(f);
    if (!general) return {self_convolve_grid(f, 3), 2 * g.center};
    GridFunction K = el_operator(f, n, p);
    const long off = node_offset(K, f);
    return {std::move(K), static_cast<std::size_t>(off)};
}

}  // namespace detail

/// Grid step. Standard map for n = p = 2; general map when `general` is set.
inline IterationStep<GridFunction, double> iterate_step(const GridFunction& f, unsigned n = 2, double p = 2.0,
                                                        bool general = false)
{
    if (!general && (n != 2 || p != 2.0))
        throw InvalidArgument("n, p other than 2 require the general extension flag");
    const auto [K, off] = detail::kernel_image(f, n, p, general);
    const detail::GridLayout g = detail::unit_grid_layout(f);
    // The map preserves evenness; averaging mirror nodes removes transform round-off.
    const auto Ks = [&](std::size_t i) { return 0.5 * (K[off + i] + K[off + g.nodes - 1 - i]); };
    const double k0 = K[off + g.center];
    const double k1 = Ks(0);
    if (k0 == k1) throw DegenerateNormalizer("K(0) = K(1); affine renormalisation undefined");

    const double inv = 1.0 / (k0 - k1);
    const double root = general ? 1.0 / (p - 1.0) : 1.0;
    std::vector<double> v(g.nodes);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < g.nodes; ++i) {
        double y = (Ks(i) - k1) * inv;
        if (y < 0.0) {
            if (y < -1e-12) ++clipped;
            y = 0.0;
        }
        v[i] = root == 1.0 ? y : std::pow(y, root);
    }
    return {GridFunction(f.x0(), f.dx(), std::move(v)), k0, k1, clipped};
}

inline PiecewisePoly iterate_once(const PiecewisePoly& f) { return iterate_step(f).next; }

inline GridFunction iterate_once(const GridFunction& f, unsigned n = 2, double p = 2.0, bool general = false)
{
    return iterate_step(f, n, p, general).next;
}

struct IterationRecord {
    unsigned iter = 0;
    /// sup over [-1, 1] grid nodes of |f_j - f_{j-1}|.
    double sup_step = 0.0;
    /// Normaliser of this step: a = K(0) - K(1), b = K(1) with K built from f_{j-1}.
    double a = 0.0;
    double b = 0.0;
    std::optional<PiecewisePoly> exact;
    std::optional<GridFunction> grid;
};

struct FixedPointSolution {
    std::variant<PiecewisePoly, GridFunction> f;
    /// Fit C(f) = a f^(p-1) + b at the final iterate.
    double a = 0.0;
    double b = 0.0;
    std::optional<Rational> exact_a;
    std::optional<Rational> exact_b;
    unsigned iterations = 0;
    double final_step_sup = 0.0;
    /// sup over [-1, 1] grid nodes of |K - a f^(p-1) - b|.
    double el_residual_sup = 0.0;
    bool converged = false;
    std::size_t clipped_nodes = 0;
    std::vector<IterationRecord> history;
    SolverConfig config;

    bool is_exact() const { return std::holds_alternative<PiecewisePoly>(f); }

    /// The solution on the solver grid (exact iterates are sampled).
    GridFunction grid() const
    {
        if (const auto* g = std::get_if<GridFunction>(&f)) return *g;
        return sample(std::get<PiecewisePoly>(f), config.dx);
    }
};

class NotConverged : public Error {
public:
    NotConverged(const std::string& what, FixedPointSolution last) : Error(what), solution(std::move(last)) {}
    FixedPointSolution solution;
};

namespace detail {

inline double sup_difference(const GridFunction& a, const GridFunction& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

inline GridFunction unit_indicator_grid(double dx)
{
    return GridFunction::symmetric(dx, std::vector<double>(symmetric_node_count(1.0, dx), 1.0));
}

inline void finish_grid(FixedPointSolution& sol, const GridFunction& f)
{
    const SolverConfig& cfg = sol.config;
    const auto [K, off] = kernel_image(f, cfg.n, cfg.p, cfg.general_extension);
    const GridLayout g = unit_grid_layout(f);
    sol.b = K[off + g.nodes - 1];
    sol.a = K[off + g.center] - sol.b;
    const double e = cfg.general_extension ? cfg.p - 1.0 : 1.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < g.nodes; ++i)
        sup = std::max(sup, std::abs(K[off + i] - sol.a * std::pow(f[i], e) - sol.b));
    sol.el_residual_sup = sup;
}

inline FixedPointSolution run_grid(const SolverConfig& cfg)
{
    FixedPointSolution sol;
    sol.config = cfg;
    GridFunction f = unit_indicator_grid(cfg.dx);
    double step = 0.0;
    for (unsigned j = 1; j <= cfg.max_iter; ++j) {
        auto s = iterate_step(f, cfg.n, cfg.p, cfg.general_extension);
        step = sup_difference(s.next, f);
        sol.clipped_nodes += s.clipped_nodes;
        sol.history.push_back({j, step, s.k_center - s.k_edge, s.k_edge, std::nullopt,
                               cfg.keep_iterates ? std::optional<GridFunction>(s.next) : std::nullopt});
        f = std::move(s.next);
        sol.iterations = j;
        if (step < cfg.tol) {
            sol.converged = true;
            break;
        }
    }
    sol.final_step_sup = step;
    finish_grid(sol, f);
    sol.f = std::move(f);
    if (cfg.max_iter > 0 && !sol.converged)
        throw NotConverged("no convergence after " + std::to_string(cfg.max_iter) + " iterations (last step "
                               + std::to_string(step) + ")",
                           std::move(sol));
    return sol;
}

inline FixedPointSolution run_exact(const SolverConfig& cfg)
{
    FixedPointSolution sol;
    sol.config = cfg;
    PiecewisePoly f = PiecewisePoly::indicator(-1, 1);
    GridFunction prev = sample(f, cfg.dx);
    for (unsigned j = 1; j <= cfg.max_iter; ++j) {
        auto s = iterate_step(f);
        GridFunction cur = sample(s.next, cfg.dx);
        const double step = sup_difference(cur, prev);
        sol.history.push_back({j, step, Rational(s.k_center - s.k_edge).get_d(), s.k_edge.get_d(), s.next, std::nullopt});
        sol.final_step_sup = step;
        f = std::move(s.next);
        prev = std::move(cur);
        sol.iterations = j;
    }

    const PiecewisePoly K = self_convolve(f, 3);
    const Rational b = K(Rational(1));
    const Rational a = K(Rational(0)) - b;
    sol.exact_a = a;
    sol.exact_b = b;
    sol.a = a.get_d();
    sol.b = b.get_d();
    const PiecewisePoly residual = restrict_to(K, -1, 1) - a * f - constant_on(b, -1, 1);
    double sup = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) sup = std::max(sup, std::abs(residual.eval_double(prev.node(i))));
    sol.el_residual_sup = sup;
    sol.f = std::move(f);
    return sol;
}

}  // namespace detail

/// Runs the renormalised fixed-point iteration from f_0 = 1_[-1,1].
///
/// Grid mode iterates until the sup-norm step drops below `tol` and throws
/// NotConverged (carrying the last iterate) if `max_iter` steps do not get
/// there; max_iter = 0 just evaluates f_0. Exact mode takes exactly
/// `max_iter` steps.
inline FixedPointSolution run_fixed_point(const SolverConfig& cfg)
{
    cfg.validate();
    return cfg.mode == SolverMode::exact ? detail::run_exact(cfg) : detail::run_grid(cfg);
}

struct ElConsistencyReport {
    double M = 0.0;
    double Lambda = 0.0;
    /// Dilation used to move the solution into F(M, p).
    double dilation = 1.0;
    double a_fit = 0.0;
    double b_fit = 0.0;
    double a_expected = 0.0;
    double b_expected = 0.0;
    double dev_a = 0.0;
    double dev_b = 0.0;
};

namespace detail {

inline ElConsistencyReport consistency_exact(const PiecewisePoly& f, const ConstraintSet& c)
{
    const Rational M = from_double(c.M);
    const auto scaled = scale_to_feasible_exact(f, M, c.n);
    const PiecewisePoly& Q = scaled.f_tilde;
    const Rational Lambda = objective_I_exact(Q, c.n, 2).exact;
    const PiecewisePoly K = convolve(self_convolve(Q, c.n - 1), self_convolve(Q, c.n));
    const Rational edge = Q.support_hi();
    const Rational b = K(edge);
    const Rational a = (K(Rational(0)) - b) / Q(Rational(0));
    const Rational n(c.n);
    const Rational a_exp = Lambda / (M * n);
    const Rational b_exp = Lambda * (n - 1) / n;

    ElConsistencyReport r;
    r.M = c.M;
    r.Lambda = Lambda.get_d();
    r.dilation = scaled.lambda.get_d();
    r.a_fit = a.get_d();
    r.b_fit = b.get_d();
    r.a_expected = a_exp.get_d();
    r.b_expected = b_exp.get_d();
    r.dev_a = Rational(abs(a - a_exp) / a).get_d();
    r.dev_b = Rational(abs(b - b_exp) / b).get_d();
    return r;
}

inline ElConsistencyReport consistency_grid(const GridFunction& f, const ConstraintSet& c)
{
    const auto scaled = scale_to_feasible(f, c);
    const GridFunction& Q = scaled.f_tilde;
    const double Lambda = objective_I(Q, c.n, c.p);
    const GridFunction K = el_operator(Q, c.n, c.p);
    const auto off = static_cast<std::size_t>(node_offset(K, Q));
    const std::size_t center = (Q.size() - 1) / 2;
    const double b = K[off + Q.size() - 1];
    const double a = (K[off + center] - b) / std::pow(Q[center], c.p - 1.0);
    const double n = static_cast<double>(c.n);

    ElConsistencyReport r;
    r.M = c.M;
    r.Lambda = Lambda;
    r.dilation = scaled.lambda;
    r.a_fit = a;
    r.b_fit = b;
    r.a_expected = Lambda / (c.M * n);
    r.b_expected = Lambda * (n - 1.0) / n;
    r.dev_a = std::abs(a - r.a_expected) / a;
    r.dev_b = std::abs(b - r.b_expected) / b;
    return r;
}

}  // namespace detail

/// Rescales the solution into F(M, p), recomputes Lambda = I, refits (a, b) on
/// the rescaled function and compares with Lambda/(Mn) and Lambda(n-1)/n.
/// Exact solutions are handled in rational arithmetic (p = 2).
inline ElConsistencyReport consistency_with_el(const FixedPointSolution& sol, const ConstraintSet& c)
{
    c.validate();
    if (const auto* exact = std::get_if<PiecewisePoly>(&sol.f)) {
        if (c.p != 2.0) throw InvalidArgument("exact consistency check needs p = 2");
        return detail::consistency_exact(*exact, c);
    }
    return detail::consistency_grid(std::get<GridFunction>(sol.f), c);
}

/// M = |f / |f|_1|_p^p, the constraint value the solution meets after mass
/// normalisation alone.
inline double natural_constraint_value(const GridFunction& f, double p)
{
    const double mass = f.mass();
    if (!(mass > 0.0)) throw ZeroMass("solution has zero mass");
    return lp_norm_real(f, p) / std::pow(mass, p);
}

/// The grid fixed point against the generalized Gaussian G_{1,p}, both moved
/// into the same F(M, p). Larger I means smaller h_p of the n-fold sum.
struct CandidateComparison {
    double M = 0.0;
    double I_fixed_point = 0.0;
    double I_gengauss = 0.0;
    double h_fixed_point = 0.0;
    double h_gengauss = 0.0;
    /// I(fixed point) - I(generalized Gaussian).
    double margin = 0.0;
    bool ordering_holds = false;
};

/// M <= 0 selects the fixed point's own constraint value.
inline CandidateComparison compare_candidates(const SolverConfig& cfg, double M = 0.0)
{
    if (cfg.mode != SolverMode::grid) throw InvalidArgument("comparison runs in grid mode");
    const GridFunction fp = run_fixed_point(cfg).grid();
    CandidateComparison r;
    r.M = M > 0.0 ? M : natural_constraint_value(fp, cfg.p);
    const ConstraintSet c{r.M, cfg.p, cfg.n};
    const GridFunction f = scale_to_feasible(fp, c).f_tilde;
    const GridFunction g = scale_to_feasible(gengauss(1.0, cfg.p).sample(cfg.dx), c).f_tilde;
    r.I_fixed_point = objective_I(f, cfg.n, cfg.p);
    r.I_gengauss = objective_I(g, cfg.n, cfg.p);
    r.h_fixed_point = renyi_entropy(self_convolve_grid(f, cfg.n), cfg.p);
    r.h_gengauss = renyi_entropy(self_convolve_grid(g, cfg.n), cfg.p);
    r.margin = r.I_fixed_point - r.I_gengauss;
    r.ordering_holds = r.margin > 1e-8;
    return r;
}

}  // namespace renyi
