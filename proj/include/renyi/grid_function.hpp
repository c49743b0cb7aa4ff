#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "renyi/errors.hpp"
#include "renyi/piecewise_poly.hpp"

namespace renyi {

/// Nonnegative function sampled on the uniform grid x_i = x0 + i * dx.
///
/// Values in [-1e-12, 0) are clamped to zero on construction; anything more
/// negative, or non-finite, is rejected.
class GridFunction {
public:
    static constexpr double kNegativeClamp = 1e-12;

    GridFunction(double x0, double dx, std::vector<double> values)
        : x0_(x0), dx_(dx), values_(std::move(values))
    {
        if (!(dx_ > 0.0) || !std::isfinite(dx_)) throw InvalidArgument("grid spacing must be positive and finite");
        if (!std::isfinite(x0_)) throw InvalidArgument("grid origin must be finite");
        if (values_.size() < 2) throw InvalidArgument("grid function needs at least two nodes");
        for (auto& v : values_) {
            if (!std::isfinite(v)) throw InvalidArgument("grid function values must be finite");
            if (v < 0.0) {
                if (v < -kNegativeClamp) throw NegativeDensity("grid function value below -1e-12");
                v = 0.0;
            }
        }
    }

    /// Grid centred on 0: odd node count, x0 = -(n - 1)/2 * dx.
    static GridFunction symmetric(double dx, std::vector<double> values)
    {
        if (values.size() % 2 == 0) throw AsymmetricGrid("symmetric grid needs an odd node count");
        const double x0 = -static_cast<double>((values.size() - 1) / 2) * dx;
        return GridFunction(x0, dx, std::move(values));
    }

    double x0() const { return x0_; }
    double dx() const { return dx_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double node(std::size_t i) const { return x0_ + static_cast<double>(i) * dx_; }
    double last_node() const { return node(values_.size() - 1); }

    /// True when the nodes are placed symmetrically about 0.
    bool is_symmetric_grid() const
    {
        if (values_.size() % 2 == 0) return false;
        const double expected = -static_cast<double>((values_.size() - 1) / 2) * dx_;
        return std::abs(x0_ - expected) <= 1e-9 * dx_;
    }

    /// Index of the node at x, if x lies on the grid (within 1e-6 dx).
    std::optional<std::size_t> index_of(double x) const
    {
        const double r = (x - x0_) / dx_;
        const double k = std::round(r);
        if (std::abs(r - k) > 1e-6 || k < 0 || k > static_cast<double>(values_.size() - 1)) return std::nullopt;
        return static_cast<std::size_t>(k);
    }

    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    /// dx * sum of values (the L^1 norm).
    double mass() const { return dx_ * std::accumulate(values_.begin(), values_.end(), 0.0); }

private:
    double x0_;
    double dx_;
    std::vector<double> values_;
};

/// Odd node count of a symmetric grid covering [-half_width, half_width].
inline std::size_t symmetric_node_count(double half_width, double dx)
{
    const double r = half_width / dx;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, r))
        throw InvalidArgument("half width must be an integer multiple of the grid spacing");
    return 2 * static_cast<std::size_t>(k) + 1;
}

namespace detail {

/// Mean of the one-sided limits at a breakpoint, or nullopt where f is
/// continuous there.
inline std::optional<double> jump_midpoint(const PiecewisePoly& f, const Rational& x)
{
    const auto& b = f.breakpoints();
    const auto it = std::lower_bound(b.begin(), b.end(), x);
    if (it == b.end() || *it != x) return std::nullopt;
    const auto k = static_cast<std::size_t>(it - b.begin());
    const Rational left = k == 0 ? Rational(0) : f.pieces()[k - 1](x);
    const Rational right = k == f.piece_count() ? Rational(0) : f.pieces()[k](x);
    if (left == right) return std::nullopt;
    return Rational((left + right) / 2).get_d();
}

}  // namespace detail

/// Samples f on the grid covering [support_lo - padding, support_hi + padding].
/// Node values are exact evaluations rounded once to double; at a jump the
/// node takes the mean of the one-sided limits, so rectangle sums of sampled
/// step functions carry no half-cell bias.
inline GridFunction sample(const PiecewisePoly& f, double dx, double padding = 0.0)
{
    if (!(dx > 0.0)) throw InvalidArgument("sample spacing must be positive");
    const double lo = f.support_lo().get_d() - padding;
    const double hi = f.support_hi().get_d() + padding;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / dx + 1e-9)) + 1;
    std::vector<double> v(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = lo + static_cast<double>(i) * dx;
        const auto jump = detail::jump_midpoint(f, Rational(x));
        v[i] = jump ? *jump : f.eval_double(x);
    }
    return GridFunction(lo, dx, std::move(v));
}

/// Samples an arbitrary nonnegative callable on n nodes.
inline GridFunction sample(const std::function<double(double)>& f, double x0, double dx, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(x0 + static_cast<double>(i) * dx);
    return GridFunction(x0, dx, std::move(v));
}

namespace detail {

inline void check_spacing(const GridFunction& f, const GridFunction& g)
{
    if (std::abs(f.dx() - g.dx()) > 1e-12 * std::max(f.dx(), g.dx()))
        throw MismatchedSpacing("grid functions have different spacings");
}

/// Plain O(nm) discrete convolution sum (no dx factor).
inline std::vector<double> convolve_sum_direct(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* o = out.data() + i;
        for (std::size_t j = 0; j < b.size(); ++j) o[j] += ai * b[j];
    }
    return out;
}

inline std::size_t fft_size(std::size_t n)
{
    // smallest 2^a 3^b 5^c >= n
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t p2 = 1; p2 < 2 * n; p2 *= 2)
        for (std::size_t p3 = p2; p3 < 2 * n; p3 *= 3)
            for (std::size_t p5 = p3; p5 < 2 * n; p5 *= 5)
                if (p5 >= n && p5 < best) best = p5;
    return best;
}

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes))
    {
        if (ptr == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* ptr;
};

struct FftwPlan {
    explicit FftwPlan(fftw_plan p) : plan(p)
    {
        if (plan == nullptr) throw Error("FFTW failed to create a plan");
    }
    ~FftwPlan()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    fftw_plan plan;
};

/// Discrete convolution sum via real FFTs (FFTW_ESTIMATE plans, so results are
/// reproducible for fixed input sizes).
inline std::vector<double> convolve_sum_fft(std::span<const double> a, std::span<const double> b)
{
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = fft_size(out_len);
    const std::size_t nc = n / 2 + 1;

    FftwBuffer ra(sizeof(double) * n), rb(sizeof(double) * n);
    FftwBuffer ca(sizeof(fftw_complex) * nc), cb(sizeof(fftw_complex) * nc);
    auto* da = static_cast<double*>(ra.ptr);
    auto* db = static_cast<double*>(rb.ptr);
    auto* fa = static_cast<fftw_complex*>(ca.ptr);
    auto* fb = static_cast<fftw_complex*>(cb.ptr);

    std::optional<FftwPlan> pa, pb, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        const int ni = static_cast<int>(n);
        pa.emplace(fftw_plan_dft_r2c_1d(ni, da, fa, FFTW_ESTIMATE));
        pb.emplace(fftw_plan_dft_r2c_1d(ni, db, fb, FFTW_ESTIMATE));
        inv.emplace(fftw_plan_dft_c2r_1d(ni, fa, da, FFTW_ESTIMATE));
    }

    std::fill(da, da + n, 0.0);
    std::fill(db, db + n, 0.0);
    std::copy(a.begin(), a.end(), da);
    std::copy(b.begin(), b.end(), db);
    fftw_execute(pa->plan);
    fftw_execute(pb->plan);
    for (std::size_t k = 0; k < nc; ++k) {
        const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
        const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
        fa[k][0] = re;
        fa[k][1] = im;
    }
    fftw_execute(inv->plan);

    std::vector<double> out(da, da + out_len);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

inline constexpr std::size_t kDirectConvolutionLimit = 1U << 16;

}  // namespace detail

/// (f*g)[i] = dx * sum_j f[j] g[i-j]; output x0 = f.x0 + g.x0.
/// Large inputs go through an FFT; `force_direct` selects the plain sum.
inline GridFunction convolve_grid(const GridFunction& f, const GridFunction& g, bool force_direct = false)
{
    detail::check_spacing(f, g);
    const std::span<const double> a(f.values());
    const std::span<const double> b(g.values());
    const bool direct = force_direct || a.size() * b.size() <= detail::kDirectConvolutionLimit;
    std::vector<double> out = direct ? detail::convolve_sum_direct(a, b) : detail::convolve_sum_fft(a, b);

    const double dx = f.dx();
    // Round-off floor of the transform: eps * sum|a| * sum|b| (nonnegative data).
    const double noise = 64.0 * std::numeric_limits<double>::epsilon()
        * std::accumulate(a.begin(), a.end(), 0.0) * std::accumulate(b.begin(), b.end(), 0.0);
    for (auto& v : out) {
        if (v < 0.0 && -v <= noise) v = 0.0;
        v *= dx;
    }
    return GridFunction(f.x0() + g.x0(), dx, std::move(out));
}

/// n-fold self-convolution on the grid; n = 1 returns f.
inline GridFunction self_convolve_grid(const GridFunction& f, unsigned n)
{
    if (n == 0) throw InvalidArgument("self_convolve_grid needs at least one factor");
    GridFunction out = f;
    for (unsigned k = 1; k < n; ++k) out = convolve_grid(out, f);
    return out;
}

inline GridFunction power_real(const GridFunction& f, double q)
{
    if (!(q > 0.0)) throw InvalidArgument("power exponent must be positive");
    std::vector<double> v(f.values());
    if (q != 1.0)
        for (auto& x : v) x = std::pow(x, q);
    return GridFunction(f.x0(), f.dx(), std::move(v));
}

/// dx * sum f[i]^p, the p-th power of the discrete L^p norm.
inline double lp_norm_real(const GridFunction& f, double p)
{
    if (!(p > 0.0)) throw InvalidArgument("norm exponent must be positive");
    double s = 0.0;
    if (p == 1.0)
        for (double v : f.values()) s += v;
    else if (p == 2.0)
        for (double v : f.values()) s += v * v;
    else
        for (double v : f.values()) s += std::pow(v, p);
    return f.dx() * s;
}

/// x -> f(-x)
inline GridFunction reflect(const GridFunction& f)
{
    std::vector<double> v(f.values().rbegin(), f.values().rend());
    return GridFunction(-f.last_node(), f.dx(), std::move(v));
}

/// x -> scale * f(x / dilation): nodes are stretched, values multiplied.
inline GridFunction dilate(const GridFunction& f, double dilation, double scale = 1.0)
{
    if (!(dilation > 0.0)) throw InvalidArgument("dilation factor must be positive");
    std::vector<double> v(f.values());
    for (auto& x : v) x *= scale;
    return GridFunction(f.x0() * dilation, f.dx() * dilation, std::move(v));
}

/// Discrete symmetric decreasing rearrangement: values sorted in descending
/// order and placed at centre, +1, -1, +2, -2, ... nodes from the centre.
inline GridFunction rearrange_symmetric_decreasing(const GridFunction& f)
{
    if (!f.is_symmetric_grid()) throw AsymmetricGrid("rearrangement needs a grid symmetric about 0");
    std::vector<double> sorted(f.values());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t c = (f.size() - 1) / 2;
    std::vector<double> out(f.size());
    out[c] = sorted[0];
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        const std::size_t offset = (k + 1) / 2;
        out[k % 2 == 1 ? c + offset : c - offset] = sorted[k];
    }
    return GridFunction(f.x0(), f.dx(), std::move(out));
}

/// Two-column CSV (`x,value` header), 17 significant digits.
inline std::string to_csv(const GridFunction& f)
{
    std::string out = "x,value\n";
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.node(i), f[i]);
        out += buf;
    }
    return out;
}

/// Parses the CSV written by to_csv; spacing must be uniform within 1e-9
/// relative to the step.
inline GridFunction grid_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,value") throw ParseError("CSV header must be 'x,value'");
    std::vector<double> xs, vs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("missing comma on CSV line " + std::to_string(lineno));
        try {
            std::size_t used = 0;
            const std::string xs_text = line.substr(0, comma);
            const std::string vs_text = line.substr(comma + 1);
            xs.push_back(std::stod(xs_text, &used));
            if (used != xs_text.size()) throw std::invalid_argument("trailing text");
            vs.push_back(std::stod(vs_text, &used));
            if (used != vs_text.size()) throw std::invalid_argument("trailing text");
        } catch (const std::logic_error&) {
            throw ParseError("malformed number on CSV line " + std::to_string(lineno));
        }
    }
    if (xs.size() < 2) throw ParseError("CSV needs at least two rows");
    const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(dx > 0.0)) throw ParseError("CSV nodes must be increasing");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * dx)) > 1e-9 * dx)
            throw ParseError("CSV nodes are not uniformly spaced");
    return GridFunction(xs.front(), dx, std::move(vs));
}

inline GridFunction read_grid_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return grid_from_csv(ss.str());
}

}  // namespace renyi
