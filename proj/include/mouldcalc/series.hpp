#pragma once

// Truncated power series in x over exact complex rationals, the Euler-type
// derivation x^2 d/dx and its shifted inverses, and the x <-> z = -1/x
// coefficient correspondence.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mouldcalc/scalar.hpp>

namespace mouldcalc
{

/// c_0 + c_1 x + ... + c_K x^K + O(x^{K+1}).
///
/// The order K is the largest exponent whose coefficient is exactly known.
/// Every operation returns the largest order it can certify and never stores
/// coefficients beyond it.
class TruncatedSeries
{
public:
    TruncatedSeries() : TruncatedSeries(0) {}

    /// Zero series known to order `order`.
    explicit TruncatedSeries(int order)
    {
        if (order < 0) {
            throw std::invalid_argument("series order must be nonnegative");
        }
        coeffs_.resize(static_cast<std::size_t>(order) + 1u);
    }

    /// Series with the given coefficients, known to order coeffs.size() - 1.
    explicit TruncatedSeries(std::vector<Scalar> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty()) {
            throw std::invalid_argument("a truncated series needs at least one coefficient");
        }
    }

    /// Series with leading coefficients `coeffs`, zero-padded to `order`.
    TruncatedSeries(int order, std::initializer_list<Scalar> coeffs) : TruncatedSeries(order)
    {
        std::size_t k = 0;
        for (const auto &c : coeffs) {
            if (k < coeffs_.size()) {
                coeffs_[k] = c;
            }
            ++k;
        }
    }

    static TruncatedSeries one(int order)
    {
        TruncatedSeries s(order);
        s.coeffs_[0] = 1;
        return s;
    }

    static TruncatedSeries monomial(int order, int k, Scalar c = Scalar(1))
    {
        TruncatedSeries s(order);
        if (k < 0) {
            throw std::invalid_argument("negative exponent");
        }
        if (k <= order) {
            s.coeffs_[static_cast<std::size_t>(k)] = std::move(c);
        }
        return s;
    }

    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    /// Coefficient of x^k; k must not exceed the order.
    const Scalar &operator[](int k) const
    {
        if (k < 0 || k > order()) {
            throw std::out_of_range("coefficient index " + std::to_string(k) + " outside order "
                                    + std::to_string(order()));
        }
        return coeffs_[static_cast<std::size_t>(k)];
    }

    void set(int k, Scalar c)
    {
        if (k < 0 || k > order()) {
            throw std::out_of_range("coefficient index outside order");
        }
        coeffs_[static_cast<std::size_t>(k)] = std::move(c);
    }

    std::span<const Scalar> coeffs() const noexcept { return coeffs_; }

    /// Least k with c_k != 0, or nullopt when every stored coefficient vanishes
    /// (the true valuation is then only known to be >= order + 1).
    std::optional<int> valuation() const noexcept
    {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (!coeffs_[k].is_zero()) {
                return static_cast<int>(k);
            }
        }
        return std::nullopt;
    }

    /// Certified lower bound for the valuation.
    int valuation_lower_bound() const noexcept { return valuation().value_or(order() + 1); }

    bool is_zero() const noexcept { return !valuation().has_value(); }

    /// Drop everything beyond `order`; orders can only be lowered.
    TruncatedSeries truncated(int order) const
    {
        if (order >= this->order()) {
            return *this;
        }
        if (order < 0) {
            throw std::invalid_argument("series order must be nonnegative");
        }
        return TruncatedSeries(std::vector<Scalar>(coeffs_.begin(), coeffs_.begin() + order + 1));
    }

    TruncatedSeries &operator+=(const TruncatedSeries &o)
    {
        shrink_to(std::min(order(), o.order()));
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            coeffs_[k] += o.coeffs_[k];
        }
        return *this;
    }
    TruncatedSeries &operator-=(const TruncatedSeries &o)
    {
        shrink_to(std::min(order(), o.order()));
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            coeffs_[k] -= o.coeffs_[k];
        }
        return *this;
    }
    TruncatedSeries &operator*=(const Scalar &c)
    {
        for (auto &x : coeffs_) {
            x *= c;
        }
        return *this;
    }

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries &b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries &b) { return a -= b; }
    friend TruncatedSeries operator-(TruncatedSeries a)
    {
        for (auto &x : a.coeffs_) {
            x = -x;
        }
        return a;
    }
    friend TruncatedSeries operator*(TruncatedSeries a, const Scalar &c) { return a *= c; }
    friend TruncatedSeries operator*(const Scalar &c, TruncatedSeries a) { return a *= c; }

    /// Same order and same coefficients.
    friend bool operator==(const TruncatedSeries &, const TruncatedSeries &) = default;

    /// Equality of the common known part.
    bool agrees_with(const TruncatedSeries &o) const
    {
        const int k = std::min(order(), o.order());
        for (int i = 0; i <= k; ++i) {
            if (!((*this)[i] == o[i])) {
                return false;
            }
        }
        return true;
    }

    std::string to_string() const
    {
        std::string s;
        for (int k = 0; k <= order(); ++k) {
            const auto &c = coeffs_[static_cast<std::size_t>(k)];
            if (c.is_zero()) {
                continue;
            }
            if (!s.empty()) {
                s += " + ";
            }
            std::string cs = c.to_string();
            if (!c.is_real()) {
                cs = "(" + cs + ")";
            }
            s += (k == 0) ? cs : (cs + "*x^" + std::to_string(k));
        }
        if (s.empty()) {
            s = "0";
        }
        return s + " + O(x^" + std::to_string(order() + 1) + ")";
    }

    friend std::ostream &operator<<(std::ostream &os, const TruncatedSeries &s) { return os << s.to_string(); }

private:
    void shrink_to(int order)
    {
        coeffs_.resize(static_cast<std::size_t>(order) + 1u);
    }

    std::vector<Scalar> coeffs_;
};

/// Cauchy product. The result order is the largest certified one,
/// min(K_a + v_b, K_b + v_a) with v the certified valuations; for series with
/// nonzero constant terms this is min(K_a, K_b).
inline TruncatedSeries ps_mul(const TruncatedSeries &a, const TruncatedSeries &b)
{
    const int va = a.valuation_lower_bound();
    const int vb = b.valuation_lower_bound();
    const int order = std::min(a.order() + vb, b.order() + va);
    std::vector<Scalar> acc(static_cast<std::size_t>(order) + 1u);
    for (int i = va; i <= std::min(a.order(), order); ++i) {
        const Scalar &ai = a[i];
        if (ai.is_zero()) {
            continue;
        }
        for (int j = vb; j <= b.order() && i + j <= order; ++j) {
            const Scalar &bj = b[j];
            if (!bj.is_zero()) {
                acc[static_cast<std::size_t>(i + j)] += ai * bj;
            }
        }
    }
    return TruncatedSeries(std::move(acc));
}

/// Multiplicative inverse of a series with nonzero constant term.
inline TruncatedSeries ps_inverse(const TruncatedSeries &a)
{
    if (a[0].is_zero()) {
        throw std::domain_error("series with zero constant term is not invertible");
    }
    const int order = a.order();
    std::vector<Scalar> w(static_cast<std::size_t>(order) + 1u);
    const Scalar inv0 = Scalar(1) / a[0];
    w[0] = inv0;
    for (int k = 1; k <= order; ++k) {
        Scalar acc;
        for (int i = 1; i <= k; ++i) {
            if (!a[i].is_zero()) {
                acc += a[i] * w[static_cast<std::size_t>(k - i)];
            }
        }
        w[static_cast<std::size_t>(k)] = -(acc * inv0);
    }
    return TruncatedSeries(std::move(w));
}

/// d = x^2 d/dx : x^k -> k x^{k+1}. Known to order(a) + 1.
inline TruncatedSeries euler_derivation(const TruncatedSeries &a)
{
    TruncatedSeries out(a.order() + 1);
    for (int k = 1; k <= a.order(); ++k) {
        if (!a[k].is_zero()) {
            out.set(k + 1, a[k] * Scalar(k));
        }
    }
    return out;
}

/// Raised when (x^2 d/dx + mu) V = b has no solution in x C[[x]].
class ill_posed_component : public std::domain_error
{
public:
    enum class reason { nonzero_constant_term, resonant_linear_term };

    ill_posed_component(reason r, const std::string &what) : std::domain_error(what), reason_(r) {}

    reason why() const noexcept { return reason_; }

private:
    reason reason_;
};

/// The unique V in x C[[x]] with x^2 V' + mu V = b.
///
/// mu != 0: c_1 = b_1/mu, c_k = (b_k - (k-1) c_{k-1})/mu, known to order(b).
/// mu == 0: c_j = b_{j+1}/j, known to order(b) - 1; requires b_1 = 0.
inline TruncatedSeries solve_euler_shifted(const TruncatedSeries &b, const Scalar &mu)
{
    if (!b[0].is_zero()) {
        throw ill_posed_component(ill_posed_component::reason::nonzero_constant_term,
                                  "right-hand side has a nonzero constant term");
    }
    if (!mu.is_zero()) {
        const int order = b.order();
        std::vector<Scalar> c(static_cast<std::size_t>(order) + 1u);
        const Scalar inv = Scalar(1) / mu;
        for (int k = 1; k <= order; ++k) {
            Scalar rhs = b[k];
            if (k >= 2) {
                rhs -= Scalar(k - 1) * c[static_cast<std::size_t>(k - 1)];
            }
            c[static_cast<std::size_t>(k)] = rhs * inv;
        }
        return TruncatedSeries(std::move(c));
    }
    if (b.order() >= 1 && !b[1].is_zero()) {
        throw ill_posed_component(ill_posed_component::reason::resonant_linear_term,
                                  "mu = 0 with a nonzero x^1 coefficient on the right-hand side");
    }
    const int order = std::max(b.order() - 1, 0);
    std::vector<Scalar> c(static_cast<std::size_t>(order) + 1u);
    for (int j = 1; j <= order; ++j) {
        c[static_cast<std::size_t>(j)] = b[j + 1] / Scalar(j);
    }
    return TruncatedSeries(std::move(c));
}

/// Element of z^{-1} C[[z^{-1}]]: coefficients of z^{-1}, ..., z^{-order}.
class ZSeries
{
public:
    ZSeries() = default;

    explicit ZSeries(int order)
    {
        if (order < 0) {
            throw std::invalid_argument("z-series order must be nonnegative");
        }
        coeffs_.resize(static_cast<std::size_t>(order));
    }

    /// coeffs[k-1] is the coefficient of z^{-k}.
    explicit ZSeries(std::vector<Scalar> coeffs) : coeffs_(std::move(coeffs)) {}

    int order() const noexcept { return static_cast<int>(coeffs_.size()); }

    /// Coefficient of z^{-k}, 1 <= k <= order.
    const Scalar &operator[](int k) const
    {
        if (k < 1 || k > order()) {
            throw std::out_of_range("z-series index outside 1..order");
        }
        return coeffs_[static_cast<std::size_t>(k - 1)];
    }

    void set(int k, Scalar c)
    {
        if (k < 1 || k > order()) {
            throw std::out_of_range("z-series index outside 1..order");
        }
        coeffs_[static_cast<std::size_t>(k - 1)] = std::move(c);
    }

    std::span<const Scalar> coeffs() const noexcept { return coeffs_; }

    /// Least k with a nonzero z^{-k} coefficient, or order + 1.
    int valuation_lower_bound() const noexcept
    {
        for (int k = 1; k <= order(); ++k) {
            if (!(*this)[k].is_zero()) {
                return k;
            }
        }
        return order() + 1;
    }

    /// The same coefficients viewed as a power series in t = 1/z.
    TruncatedSeries in_inverse_variable() const
    {
        std::vector<Scalar> c(coeffs_.size() + 1u);
        std::copy(coeffs_.begin(), coeffs_.end(), c.begin() + 1);
        return TruncatedSeries(std::move(c));
    }

    friend bool operator==(const ZSeries &, const ZSeries &) = default;

private:
    std::vector<Scalar> coeffs_;
};

/// Cauchy product in z^{-1}; both factors lack a constant term, so the
/// product is known one step beyond the smaller order.
inline ZSeries zs_mul(const ZSeries &f, const ZSeries &g)
{
    const int vf = f.valuation_lower_bound();
    const int vg = g.valuation_lower_bound();
    const int order = std::min(f.order() + vg, g.order() + vf);
    std::vector<Scalar> acc(static_cast<std::size_t>(order));
    for (int i = vf; i <= f.order(); ++i) {
        for (int j = vg; j <= g.order() && i + j <= order; ++j) {
            acc[static_cast<std::size_t>(i + j - 1)] += f[i] * g[j];
        }
    }
    return ZSeries(std::move(acc));
}

/// Substitution x = -1/z: the x^k coefficient becomes (-1)^k times the
/// z^{-k} coefficient.
inline ZSeries to_z_coeffs(const TruncatedSeries &a)
{
    if (!a[0].is_zero()) {
        throw std::domain_error("to_z_coeffs: series has a nonzero constant term");
    }
    std::vector<Scalar> c(static_cast<std::size_t>(a.order()));
    for (int k = 1; k <= a.order(); ++k) {
        c[static_cast<std::size_t>(k - 1)] = (k % 2 == 0) ? a[k] : -a[k];
    }
    return ZSeries(std::move(c));
}

/// Inverse of to_z_coeffs.
inline TruncatedSeries from_z_coeffs(const ZSeries &f)
{
    std::vector<Scalar> c(static_cast<std::size_t>(f.order()) + 1u);
    for (int k = 1; k <= f.order(); ++k) {
        c[static_cast<std::size_t>(k)] = (k % 2 == 0) ? f[k] : -f[k];
    }
    return TruncatedSeries(std::move(c));
}

} // namespace mouldcalc
