// Command-line front end: iterates, solves and checks the convolution
// extremal problem and writes JSON/CSV results plus a run manifest.

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "renyi/renyi.hpp"

namespace fs = std::filesystem;
using renyi::Json;
using renyi::real_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitOrdering = 4;

/// Collects outputs of one run and writes them atomically.
class RunWriter {
public:
    RunWriter(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir))
    {
        fs::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content)
    {
        const fs::path target = dir_ / name;
        const fs::path tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw renyi::Error("cannot open " + tmp.string() + " for writing");
            out << content;
            if (!out.flush()) throw renyi::Error("write failed for " + tmp.string());
        }
        fs::rename(tmp, target);
        outputs_.push_back(target.string());
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    void finish(const Json& config)
    {
        Json m;
        m["command"] = command_;
        m["config"] = config;
        Json versions;
        versions["renyi"] = std::string(RENYI_VERSION);
        versions["gmp"] = std::string(gmp_version);
        versions["fftw"] = std::string(fftw_version);
        versions["boost"] = std::string(BOOST_LIB_VERSION);
        m["versions"] = versions;
        m["outputs"] = outputs_;
        write("manifest.json", m.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path dir_;
    std::vector<std::string> outputs_;
};

/// Plot sampling on [-1, 1] with 2001 nodes. Grid functions are linearly
/// interpolated, which is the identity when dx = 1e-3.
constexpr std::size_t kPlotNodes = 2001;

renyi::GridFunction plot_samples(const renyi::PiecewisePoly& f)
{
    std::vector<double> v(kPlotNodes);
    for (std::size_t i = 0; i < kPlotNodes; ++i) {
        const long k = static_cast<long>(i) - 1000;
        v[i] = f(renyi::make_rational(k, 1000)).get_d();
    }
    return renyi::GridFunction(-1.0, 1e-3, std::move(v));
}

renyi::GridFunction plot_samples(const renyi::GridFunction& g)
{
    std::vector<double> v(kPlotNodes);
    for (std::size_t i = 0; i < kPlotNodes; ++i) {
        const double x = -1.0 + static_cast<double>(i) * 1e-3;
        double s = (x - g.x0()) / g.dx();
        if (std::abs(s - std::round(s)) < 1e-9) s = std::round(s);
        if (s < 0.0 || s > static_cast<double>(g.size() - 1)) continue;
        const auto j = static_cast<std::size_t>(s);
        const double t = s - static_cast<double>(j);
        const double lo = g[j];
        const double hi = j + 1 < g.size() ? g[j + 1] : 0.0;
        v[i] = t == 0.0 ? lo : lo + t * (hi - lo);
    }
    return renyi::GridFunction(-1.0, 1e-3, std::move(v));
}

Json solution_json(const renyi::FixedPointSolution& sol)
{
    Json j;
    j["mode"] = sol.is_exact() ? "exact" : "grid";
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["a"] = real_json(sol.a);
    j["b"] = real_json(sol.b);
    if (sol.exact_a) j["a_exact"] = renyi::to_string(*sol.exact_a);
    if (sol.exact_b) j["b_exact"] = renyi::to_string(*sol.exact_b);
    j["final_step_sup"] = real_json(sol.final_step_sup);
    j["el_residual_sup"] = real_json(sol.el_residual_sup);
    j["clipped_nodes"] = sol.clipped_nodes;
    if (const auto* f = std::get_if<renyi::PiecewisePoly>(&sol.f)) j["coefficients"] = renyi::to_json(*f);
    return j;
}

Json history_json(const renyi::IterationRecord& r)
{
    Json j;
    j["iter"] = r.iter;
    j["sup_step"] = real_json(r.sup_step);
    j["a"] = real_json(r.a);
    j["b"] = real_json(r.b);
    if (r.exact) j["coefficients"] = renyi::to_json(*r.exact);
    return j;
}

renyi::SolverMode parse_mode(const std::string& s)
{
    if (s == "exact") return renyi::SolverMode::exact;
    if (s == "grid") return renyi::SolverMode::grid;
    throw renyi::InvalidArgument("--mode must be exact or grid");
}

std::string iterate_name(unsigned j, const char* ext)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "f%02u.%s", j, ext);
    return buf;
}

struct IterateArgs {
    std::string mode = "exact";
    unsigned steps = 4;
    double dx = 1e-3;
    std::string out = "out/iterate";
};

int cmd_iterate(const IterateArgs& a)
{
    renyi::SolverConfig cfg;
    cfg.mode = parse_mode(a.mode);
    cfg.max_iter = a.steps;
    cfg.dx = a.dx;
    cfg.keep_iterates = true;
    cfg.validate();

    RunWriter w("iterate", a.out);
    const Json config = {{"mode", a.mode}, {"steps", a.steps}, {"dx", a.dx}};

    int code = 0;
    renyi::FixedPointSolution sol;
    try {
        sol = renyi::run_fixed_point(cfg);
    } catch (const renyi::NotConverged& e) {
        std::cerr << "warning: " << e.what() << "\n";
        sol = e.solution;
        code = kExitNotConverged;
    }

    // f_0 first, then one record per step.
    const renyi::PiecewisePoly f0 = renyi::PiecewisePoly::indicator(-1, 1);
    Json j0 = {{"iter", 0}};
    if (cfg.mode == renyi::SolverMode::exact) j0["coefficients"] = renyi::to_json(f0);
    w.write_json(iterate_name(0, "json"), j0);
    w.write(iterate_name(0, "csv"), renyi::to_csv(plot_samples(f0)));

    Json log = Json::array();
    for (const auto& r : sol.history) {
        std::cout << "iter " << r.iter << " sup_step " << r.sup_step << " a " << r.a << " b " << r.b << "\n";
        w.write_json(iterate_name(r.iter, "json"), history_json(r));
        if (r.exact) w.write(iterate_name(r.iter, "csv"), renyi::to_csv(plot_samples(*r.exact)));
        if (r.grid) w.write(iterate_name(r.iter, "csv"), renyi::to_csv(plot_samples(*r.grid)));
        Json entry = history_json(r);
        entry.erase("coefficients");
        log.push_back(entry);
    }
    Json summary = solution_json(sol);
    summary["log"] = log;
    w.write_json("summary.json", summary);
    w.finish(config);
    return code;
}

struct SolveArgs {
    std::string mode = "grid";
    unsigned max_iter = 200;
    double tol = 1e-10;
    double dx = 1e-3;
    unsigned n = 2;
    double p = 2.0;
    bool general = false;
    std::string out = "out/solve";
};

renyi::SolverConfig solve_config(const SolveArgs& a)
{
    renyi::SolverConfig cfg;
    cfg.mode = parse_mode(a.mode);
    cfg.max_iter = a.max_iter;
    cfg.tol = a.tol;
    cfg.dx = a.dx;
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.general_extension = a.general;
    cfg.validate();
    return cfg;
}

Json solve_config_json(const SolveArgs& a)
{
    return {{"mode", a.mode}, {"max_iter", a.max_iter}, {"tol", a.tol}, {"dx", a.dx},
            {"n", a.n},       {"p", a.p},               {"general", a.general}};
}

int cmd_solve(const SolveArgs& a)
{
    const renyi::SolverConfig cfg = solve_config(a);
    RunWriter w("solve", a.out);
    int code = 0;
    renyi::FixedPointSolution sol;
    try {
        sol = renyi::run_fixed_point(cfg);
    } catch (const renyi::NotConverged& e) {
        std::cerr << "warning: " << e.what() << "\n";
        sol = e.solution;
        code = kExitNotConverged;
    }
    Json j = solution_json(sol);
    if (a.general) j["extension"] = "general (n, p) map; not the published iteration";
    w.write_json("solution.json", j);
    w.write("solution.csv", renyi::to_csv(sol.grid()));
    w.finish(solve_config_json(a));
    std::cout << "iterations " << sol.iterations << " a " << sol.a << " b " << sol.b << " residual "
              << sol.el_residual_sup << "\n";
    return code;
}

struct ElArgs {
    std::string input;
    unsigned n = 2;
    double p = 2.0;
    double M = 0.0;
    double dx = 1e-3;
    std::string out = "out/el-residual";
};

int cmd_el_residual(const ElArgs& a)
{
    renyi::GridFunction Q = [&] {
        if (!a.input.empty()) return renyi::read_grid_csv(a.input);
        renyi::SolverConfig cfg;
        cfg.dx = a.dx;
        return renyi::run_fixed_point(cfg).grid();
    }();
    const double M = a.M > 0.0 ? a.M : renyi::natural_constraint_value(Q, a.p);
    const auto rep = renyi::el_residual(Q, a.n, a.p, M);

    RunWriter w("el-residual", a.out);
    Json j = {{"sup_residual", real_json(rep.sup_residual)},
              {"l2_residual", real_json(rep.l2_residual)},
              {"Lambda", real_json(rep.Lambda)},
              {"M", real_json(rep.M)},
              {"rescaled", rep.rescaled},
              {"fitted_scale", real_json(rep.fitted_scale)},
              {"domain", {real_json(rep.domain_lo), real_json(rep.domain_hi)}}};
    w.write_json("el_residual.json", j);
    w.finish({{"input", a.input.empty() ? "fixed point (grid)" : a.input},
              {"n", a.n},
              {"p", a.p},
              {"M", real_json(M)},
              {"dx", a.dx}});
    std::cout << "sup_residual " << rep.sup_residual << "\n";
    return 0;
}

int cmd_counterexample(const std::string& out, double dx)
{
    const auto r = renyi::counterexample_check();
    const auto g = renyi::x6_coefficient_grid(dx);
    RunWriter w("counterexample", out);
    Json j;
    j["verdict"] = r.verdict;
    j["alpha"] = renyi::to_string(r.alpha);
    j["x6_coefficient"] = renyi::to_string(r.x6_coefficient);
    j["triple_convolution"] = renyi::to_json(r.triple_convolution);
    j["affine_fit"] = {{"a", renyi::to_string(r.affine_fit_a)},
                       {"b", renyi::to_string(r.affine_fit_b)},
                       {"sup_residual", real_json(r.sup_affine_residual)}};
    j["lsq_fit"] = {{"a", renyi::to_string(r.lsq_fit_a)},
                    {"b", renyi::to_string(r.lsq_fit_b)},
                    {"sup_residual", real_json(r.sup_lsq_residual)}};
    j["indicator_triple"] = renyi::to_json(r.indicator_triple);
    j["indicator_identity"] = r.indicator_identity;
    j["grid_check"] = {{"dx", g.dx},
                       {"stencil_step", g.stencil_step},
                       {"x6_grid", real_json(g.grid_value)},
                       {"relative_error", real_json(g.relative_error)}};
    w.write_json("counterexample.json", j);
    w.finish({{"dx", dx}});
    std::cout << "verdict " << (r.verdict ? "true" : "false") << " x6 " << renyi::to_string(r.x6_coefficient)
              << "\n";
    return 0;
}

struct GengaussArgs {
    double p = 2.0;
    double beta = 1.0;
    double entropy = std::numeric_limits<double>::quiet_NaN();
    double dx = 1e-3;
    std::string out = "out/gengauss";
};

int cmd_gengauss(const GengaussArgs& a)
{
    const renyi::GeneralizedGaussian G = std::isnan(a.entropy) ? renyi::gengauss(a.beta, a.p)
                                                               : renyi::gengauss_beta_for_entropy(a.entropy, a.p);
    RunWriter w("gengauss", a.out);
    Json j = {{"alpha", real_json(G.alpha())},
              {"beta", real_json(G.beta())},
              {"p", real_json(G.p())},
              {"half_width", real_json(G.half_width())},
              {"renyi_entropy", real_json(G.renyi_entropy())},
              {"shape_integral", real_json(renyi::gengauss_shape_integral(G.beta(), G.p()))},
              {"shape_integral_quadrature", real_json(renyi::gengauss_shape_integral_quadrature(G.beta(), G.p()))}};
    w.write_json("gengauss.json", j);
    w.write("gengauss.csv", renyi::to_csv(G.sample(a.dx)));
    Json config = {{"p", a.p}, {"dx", a.dx}};
    if (std::isnan(a.entropy))
        config["beta"] = a.beta;
    else
        config["entropy"] = a.entropy;
    w.finish(config);
    std::cout << "alpha " << G.alpha() << " beta " << G.beta() << "\n";
    return 0;
}

struct CompareArgs {
    unsigned n = 2;
    double p = 2.0;
    double M = 0.0;
    double dx = 1e-3;
    bool general = false;
    std::string out = "out/compare";
};

int cmd_compare(const CompareArgs& a)
{
    renyi::SolverConfig cfg;
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.dx = a.dx;
    cfg.general_extension = a.general;
    cfg.validate();
    const renyi::CandidateComparison r = renyi::compare_candidates(cfg, a.M);

    RunWriter w("compare", a.out);
    Json j = {{"M", real_json(r.M)},
              {"fixed_point", {{"I", real_json(r.I_fixed_point)}, {"renyi_entropy_of_sum", real_json(r.h_fixed_point)}}},
              {"generalized_gaussian", {{"I", real_json(r.I_gengauss)}, {"renyi_entropy_of_sum", real_json(r.h_gengauss)}}},
              {"margin", real_json(r.margin)},
              {"ordering_holds", r.ordering_holds}};
    w.write_json("compare.json", j);
    w.finish({{"n", a.n}, {"p", a.p}, {"M", real_json(a.M)}, {"dx", a.dx}, {"general", a.general}});
    std::cout << "I(fixed point) " << r.I_fixed_point << " I(gengauss) " << r.I_gengauss << " margin " << r.margin
              << "\n";
    if (!r.ordering_holds) {
        std::cerr << "ordering violated: the fixed point does not beat the generalized Gaussian\n";
        return kExitOrdering;
    }
    return 0;
}

struct PropertyArgs {
    unsigned trials = 100;
    std::uint64_t seed = 1;
    std::string out = "out/properties";
};

/// Random nonnegative function on a modest symmetric grid.
renyi::GridFunction random_grid(std::mt19937_64& rng, double dx)
{
    std::uniform_int_distribution<std::size_t> half(1, 150);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::vector<double> v(2 * half(rng) + 1);
    for (auto& x : v) x = val(rng);
    return renyi::GridFunction::symmetric(dx, std::move(v));
}

int cmd_properties(const PropertyArgs& a)
{
    std::mt19937_64 rng(a.seed);
    const double dx = 1e-2;
    unsigned scaling_fail = 0;
    unsigned riesz_fail = 0;
    unsigned young_fail = 0;
    for (unsigned t = 0; t < a.trials; ++t) {
        const renyi::GridFunction f = random_grid(rng, dx);
        const renyi::ConstraintSet c{0.75, 2.0, 2};
        const auto s = renyi::scale_to_feasible(f, c);
        const double lhs = renyi::objective_I(s.f_tilde, 2, 2.0);
        const double rhs = s.predicted_ratio * renyi::objective_I(f, 2, 2.0);
        if (std::abs(lhs - rhs) > 1e-9 * rhs) ++scaling_fail;
        if (!renyi::riesz_check(f, 2, 2.0).holds) ++riesz_fail;
        for (const auto& [n, p] : {std::pair{2U, 2.0}, std::pair{3U, 2.0}, std::pair{2U, 3.0}}) {
            std::vector<renyi::GridFunction> gs;
            for (unsigned k = 0; k < n; ++k) gs.push_back(random_grid(rng, dx));
            if (!renyi::young_bound_check(gs, p).holds) ++young_fail;
        }
    }
    RunWriter w("properties", a.out);
    w.write_json("properties.json", {{"trials", a.trials},
                                     {"scaling_failures", scaling_fail},
                                     {"riesz_failures", riesz_fail},
                                     {"young_failures", young_fail}});
    w.finish({{"trials", a.trials}, {"rng_seed", a.seed}});
    std::cout << "scaling " << scaling_fail << " riesz " << riesz_fail << " young " << young_fail << " failures\n";
    return scaling_fail + riesz_fail + young_fail == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv)
{
    if (std::getenv("RENYI_SEED") != nullptr)
        std::cerr << "warning: RENYI_SEED is ignored; core paths are deterministic (use --rng-seed for properties)\n";

    CLI::App app{"Extremal densities for the convolution power problem"};
    app.require_subcommand(1);

    IterateArgs it;
    auto* c_it = app.add_subcommand("iterate", "Run the renormalised triple-convolution iteration");
    c_it->add_option("--mode", it.mode, "exact or grid")->check(CLI::IsMember({"exact", "grid"}));
    c_it->add_option("--steps", it.steps, "Exact: number of steps; grid: iteration cap");
    c_it->add_option("--dx", it.dx, "Grid spacing")->check(CLI::PositiveNumber);
    c_it->add_option("--out", it.out, "Output directory");

    SolveArgs sv;
    auto* c_sv = app.add_subcommand("solve", "Iterate to the fixed point");
    c_sv->add_option("--mode", sv.mode, "exact or grid")->check(CLI::IsMember({"exact", "grid"}));
    c_sv->add_option("--max-iter,--steps", sv.max_iter, "Iteration cap (grid) or step count (exact)");
    c_sv->add_option("--tol", sv.tol, "Sup-norm step tolerance")->check(CLI::PositiveNumber);
    c_sv->add_option("--dx", sv.dx, "Grid spacing")->check(CLI::PositiveNumber);
    c_sv->add_option("--n", sv.n, "Number of summands");
    c_sv->add_option("--p", sv.p, "Exponent p > 1");
    c_sv->add_flag("--general", sv.general, "Enable the general (n, p) extension (grid only)");
    c_sv->add_option("--out", sv.out, "Output directory");

    ElArgs el;
    auto* c_el = app.add_subcommand("el-residual", "Euler-Lagrange residual of a density");
    c_el->add_option("--input", el.input, "CSV grid function (default: the grid fixed point)")
        ->check(CLI::ExistingFile);
    c_el->add_option("--n", el.n, "Number of summands");
    c_el->add_option("--p", el.p, "Exponent p > 1");
    c_el->add_option("--M", el.M, "Constraint value (default: the input's own)");
    c_el->add_option("--dx", el.dx, "Grid spacing when solving")->check(CLI::PositiveNumber);
    c_el->add_option("--out", el.out, "Output directory");

    std::string ce_out = "out/counterexample";
    double ce_dx = 1e-4;
    auto* c_ce = app.add_subcommand("counterexample", "Exact check that the generalized Gaussian is not critical");
    c_ce->add_option("--dx", ce_dx, "Grid spacing of the finite-difference cross-check")->check(CLI::PositiveNumber);
    c_ce->add_option("--out", ce_out, "Output directory");

    GengaussArgs gg;
    auto* c_gg = app.add_subcommand("gengauss", "Normalised generalized Gaussian");
    c_gg->add_option("--p", gg.p, "Exponent p > 1");
    auto* beta_opt = c_gg->add_option("--beta", gg.beta, "Shape parameter")->check(CLI::PositiveNumber);
    c_gg->add_option("--entropy", gg.entropy, "Target Renyi entropy (solves for beta)")->excludes(beta_opt);
    c_gg->add_option("--dx", gg.dx, "Grid spacing of the CSV sample")->check(CLI::PositiveNumber);
    c_gg->add_option("--out", gg.out, "Output directory");

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Fixed point against the generalized Gaussian in F(M, p)");
    c_cmp->add_option("--n", cmp.n, "Number of summands");
    c_cmp->add_option("--p", cmp.p, "Exponent p > 1");
    c_cmp->add_option("--M", cmp.M, "Constraint value (default: the fixed point's own)");
    c_cmp->add_option("--dx", cmp.dx, "Grid spacing")->check(CLI::PositiveNumber);
    c_cmp->add_flag("--general", cmp.general, "Enable the general (n, p) extension");
    c_cmp->add_option("--out", cmp.out, "Output directory");

    PropertyArgs pr;
    auto* c_pr = app.add_subcommand("properties", "Random scaling, Riesz and Young property checks");
    c_pr->add_option("--trials", pr.trials, "Trials per suite");
    c_pr->add_option("--rng-seed", pr.seed, "Seed of the trial generator");
    c_pr->add_option("--out", pr.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (c_it->parsed()) return cmd_iterate(it);
        if (c_sv->parsed()) return cmd_solve(sv);
        if (c_el->parsed()) return cmd_el_residual(el);
        if (c_ce->parsed()) return cmd_counterexample(ce_out, ce_dx);
        if (c_gg->parsed()) return cmd_gengauss(gg);
        if (c_cmp->parsed()) return cmd_compare(cmp);
        if (c_pr->parsed()) return cmd_properties(pr);
    } catch (const renyi::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const renyi::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const renyi::NotConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
