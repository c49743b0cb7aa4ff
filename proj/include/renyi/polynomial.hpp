#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "renyi/rational.hpp"

namespace renyi {

/// Dense univariate polynomial with rational coefficients in the global
/// monomial basis: coefficient i multiplies x^i. Trailing zeros are always
/// stripped, so the zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients))
    {
        trim();
    }

    Polynomial(std::initializer_list<Rational> coefficients) : coeffs_(coefficients) { trim(); }

    static Polynomial constant(const Rational& c) { return Polynomial(std::vector<Rational>{c}); }

    /// c * x^k
    static Polynomial monomial(const Rational& c, std::size_t k)
    {
        std::vector<Rational> v(k + 1);
        v[k] = c;
        return Polynomial(std::move(v));
    }

    bool is_zero() const { return coeffs_.empty(); }

    /// Degree of the polynomial; -1 for the zero polynomial.
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

    const std::vector<Rational>& coefficients() const { return coeffs_; }

    /// Coefficient of x^i (zero beyond the degree).
    Rational coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

    Rational operator()(const Rational& x) const
    {
        Rational acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc *= x;
            acc += *it;
        }
        return acc;
    }

    /// Horner evaluation in floating point; coefficients rounded once.
    double eval_double(double x) const
    {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
        return acc;
    }

    /// Horner evaluation in GMP floating point with enough guard bits that the
    /// absolute error stays far below one double ulp of the coefficient scale.
    double eval_accurate(double x) const
    {
        if (coeffs_.empty()) return 0.0;
        long top = 0;
        for (const auto& c : coeffs_) {
            if (c == 0) continue;
            const long bits = static_cast<long>(mpz_sizeinbase(c.get_num_mpz_t(), 2))
                              - static_cast<long>(mpz_sizeinbase(c.get_den_mpz_t(), 2)) + 1;
            top = std::max(top, bits);
        }
        const double ax = std::abs(x);
        const long growth = ax > 1.0 ? static_cast<long>(std::ceil(std::log2(ax) * static_cast<double>(degree()))) : 0;
        const auto prec = static_cast<mp_bitcnt_t>(128 + std::max(0L, top) + growth + 2 * static_cast<long>(coeffs_.size()));
        const mpf_class xf(x, prec);
        mpf_class acc(0, prec);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc *= xf;
            acc += mpf_class(*it, prec);
        }
        return acc.get_d();
    }

    Polynomial& operator+=(const Polynomial& o)
    {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o)
    {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        trim();
        return *this;
    }

    Polynomial& operator*=(const Rational& s)
    {
        if (s == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a)
    {
        for (auto& c : a.coeffs_) c = -c;
        return a;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return Polynomial(std::move(out));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    Polynomial pow(unsigned m) const
    {
        Polynomial result = constant(1);
        Polynomial base = *this;
        while (m > 0) {
            if (m & 1U) result = result * base;
            m >>= 1U;
            if (m > 0) base = base * base;
        }
        return result;
    }

    Polynomial derivative(unsigned order = 1) const
    {
        if (order == 0) return *this;
        if (coeffs_.size() <= order) return {};
        std::vector<Rational> out(coeffs_.size() - order);
        for (std::size_t i = order; i < coeffs_.size(); ++i) {
            // falling factorial i (i-1) ... (i-order+1)
            Integer f(1);
            for (std::size_t k = 0; k < order; ++k) f *= static_cast<unsigned long>(i - k);
            out[i - order] = coeffs_[i] * Rational(f);
        }
        return Polynomial(std::move(out));
    }

    /// Primitive vanishing at 0.
    Polynomial antiderivative() const
    {
        if (is_zero()) return {};
        std::vector<Rational> out(coeffs_.size() + 1);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            out[i + 1] = coeffs_[i] / Rational(static_cast<unsigned long>(i + 1));
        return Polynomial(std::move(out));
    }

    /// p(x + shift)
    Polynomial shifted(const Rational& shift) const
    {
        if (shift == 0) return *this;
        // Horner in the shifted variable: acc = acc * (x + shift) + c
        Polynomial acc;
        const Polynomial lin{shift, Rational(1)};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * lin + constant(*it);
        return acc;
    }

    /// p(s * x)
    Polynomial scaled_argument(const Rational& s) const
    {
        std::vector<Rational> out(coeffs_);
        Rational power(1);
        for (auto& c : out) {
            c *= power;
            power *= s;
        }
        return Polynomial(std::move(out));
    }

private:
    void trim()
    {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::vector<Rational> coeffs_;
};

}  // namespace renyi
