#pragma once

// Formal Borel transform sum c_n z^{-n-1} -> sum c_n zeta^n / n!, the
// convolution product it maps Cauchy products to, division by (zeta - m), and
// the nested formula for the Borel transforms of V^w and phi_n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mouldcalc/normalisation.hpp>
#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/scalar.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

/// Taylor polynomial at zeta = 0 of a formal Borel transform, known to
/// zeta^order. Same container as an x-series, different variable.
class BorelPoly
{
public:
    BorelPoly() = default;
    explicit BorelPoly(int order) : s_(order) {}
    explicit BorelPoly(std::vector<Scalar> coeffs) : s_(std::move(coeffs)) {}
    explicit BorelPoly(TruncatedSeries s) : s_(std::move(s)) {}

    static BorelPoly constant(int order, Scalar c) { return BorelPoly(TruncatedSeries::monomial(order, 0, std::move(c))); }

    int order() const noexcept { return s_.order(); }
    const Scalar &operator[](int n) const { return s_[n]; }
    std::span<const Scalar> coeffs() const noexcept { return s_.coeffs(); }
    const TruncatedSeries &series() const noexcept { return s_; }
    bool is_zero() const noexcept { return s_.is_zero(); }
    int valuation_lower_bound() const noexcept { return s_.valuation_lower_bound(); }

    BorelPoly truncated(int order) const { return BorelPoly(s_.truncated(order)); }

    BorelPoly &operator+=(const BorelPoly &o)
    {
        s_ += o.s_;
        return *this;
    }
    BorelPoly &operator-=(const BorelPoly &o)
    {
        s_ -= o.s_;
        return *this;
    }
    friend BorelPoly operator+(BorelPoly a, const BorelPoly &b) { return a += b; }
    friend BorelPoly operator-(BorelPoly a, const BorelPoly &b) { return a -= b; }
    friend BorelPoly operator*(BorelPoly a, const Scalar &c) { return BorelPoly(a.s_ * c); }
    friend BorelPoly operator-(BorelPoly a) { return BorelPoly(-a.s_); }
    friend bool operator==(const BorelPoly &, const BorelPoly &) = default;

    std::string to_string() const
    {
        std::string out = s_.to_string();
        for (std::size_t p = out.find('x'); p != std::string::npos; p = out.find('x', p)) {
            out.replace(p, 1, "zeta");
        }
        return out;
    }

private:
    TruncatedSeries s_;
};

namespace detail
{

inline const std::vector<Scalar> &factorials(std::size_t upto)
{
    thread_local std::vector<Scalar> table{Scalar(1)};
    while (table.size() <= upto) {
        table.push_back(table.back() * Scalar(static_cast<long>(table.size())));
    }
    return table;
}

} // namespace detail

/// The z^{-n-1} coefficient c_n becomes the zeta^n coefficient c_n / n!.
inline BorelPoly borel(const ZSeries &f)
{
    if (f.order() < 1) {
        throw std::invalid_argument("borel: the z-series carries no coefficient");
    }
    const auto &fact = detail::factorials(static_cast<std::size_t>(f.order()));
    std::vector<Scalar> c(static_cast<std::size_t>(f.order()));
    for (int n = 0; n < f.order(); ++n) {
        c[static_cast<std::size_t>(n)] = f[n + 1] / fact[static_cast<std::size_t>(n)];
    }
    return BorelPoly(std::move(c));
}

/// Inverse of borel.
inline ZSeries inverse_borel(const BorelPoly &f)
{
    const auto &fact = detail::factorials(static_cast<std::size_t>(f.order()));
    std::vector<Scalar> c(static_cast<std::size_t>(f.order()) + 1u);
    for (int n = 0; n <= f.order(); ++n) {
        c[static_cast<std::size_t>(n)] = f[n] * fact[static_cast<std::size_t>(n)];
    }
    return ZSeries(std::move(c));
}

/// (f * g)(zeta) = int_0^zeta f(s) g(zeta - s) ds, using
/// zeta^i/i! * zeta^j/j! = zeta^{i+j+1}/(i+j+1)!. The result is known one
/// degree beyond the certified product order.
inline BorelPoly conv(const BorelPoly &f, const BorelPoly &g)
{
    const int vf = f.valuation_lower_bound();
    const int vg = g.valuation_lower_bound();
    const int order = std::min(f.order() + vg, g.order() + vf) + 1;
    const auto &fact = detail::factorials(static_cast<std::size_t>(order) + 1u);
    std::vector<Scalar> c(static_cast<std::size_t>(order) + 1u);
    for (int i = vf; i <= f.order(); ++i) {
        if (f[i].is_zero()) {
            continue;
        }
        const Scalar fi = f[i] * fact[static_cast<std::size_t>(i)];
        for (int j = vg; j <= g.order() && i + j + 1 <= order; ++j) {
            if (g[j].is_zero()) {
                continue;
            }
            c[static_cast<std::size_t>(i + j + 1)] +=
                fi * g[j] * fact[static_cast<std::size_t>(j)] / fact[static_cast<std::size_t>(i + j + 1)];
        }
    }
    return BorelPoly(std::move(c));
}

class singular_division : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// f / (zeta - m). For m != 0 this is the product with the expansion
/// -(1/m) sum (zeta/m)^k and keeps the order; for m = 0 it shifts the
/// coefficients down and needs f(0) = 0.
inline BorelPoly divide_by_zeta_minus(long m, const BorelPoly &f)
{
    if (m == 0) {
        if (!f[0].is_zero()) {
            throw singular_division("division by zeta of a series with nonzero constant term");
        }
        if (f.order() < 1) {
            throw singular_division("division by zeta leaves no known coefficient");
        }
        std::vector<Scalar> c(static_cast<std::size_t>(f.order()));
        for (int k = 0; k < f.order(); ++k) {
            c[static_cast<std::size_t>(k)] = f[k + 1];
        }
        return BorelPoly(std::move(c));
    }
    // (zeta - m) g = f  =>  g_0 = -f_0/m,  g_k = (g_{k-1} - f_k)/m.
    const Scalar inv = Scalar(1) / Scalar(m);
    std::vector<Scalar> g(static_cast<std::size_t>(f.order()) + 1u);
    g[0] = -(f[0] * inv);
    for (int k = 1; k <= f.order(); ++k) {
        g[static_cast<std::size_t>(k)] = (g[static_cast<std::size_t>(k - 1)] - f[k]) * inv;
    }
    return BorelPoly(std::move(g));
}

/// hat a_n = borel(a_n(-1/z)) at zeta-order `zeta_order` + 1.
inline BorelPoly borel_letter(const SaddleNodeField &field, Letter n, int zeta_order)
{
    return borel(to_z_coeffs(field.letter(n, zeta_order + 2)));
}

namespace detail
{

// One level of the nested formula: -(1/(zeta - mu)) F.
inline BorelPoly borel_step(long mu, const BorelPoly &f, int zeta_order)
{
    return (-divide_by_zeta_minus(mu, f)).truncated(zeta_order);
}

} // namespace detail

/// Borel transform of V^w(-1/z):
/// (-1)^r 1/(zeta - m_1) (a_{n_1} * 1/(zeta - m_2) (a_{n_2} * ... 1/(zeta - m_r) a_{n_r}))
/// with m_i = n_i + ... + n_r, evaluated innermost first.
inline BorelPoly borel_V(const SaddleNodeField &field, const Word &w, int zeta_order)
{
    if (w.empty()) {
        throw std::invalid_argument("borel_V needs a non-empty word");
    }
    long suffix = 0;
    BorelPoly acc;
    for (std::size_t i = w.size(); i-- > 0;) {
        const Letter n = w[i];
        suffix += n;
        const BorelPoly a = borel_letter(field, n, zeta_order);
        const BorelPoly rhs = (i + 1 == w.size()) ? a : conv(a, acc);
        acc = detail::borel_step(suffix, rhs, zeta_order);
    }
    return acc;
}

/// hat phi_n = sum_w beta_w hat V^w over words of weight n - 1, grouped by
/// suffix weight like the x-route. Words longer than 2(zeta_order + 1)
/// vanish to this order.
inline BorelPoly borel_phi_n(const SaddleNodeField &field, int n, int zeta_order)
{
    if (n < 0) {
        throw std::invalid_argument("borel_phi_n needs n >= 0");
    }
    BorelPoly result(zeta_order);
    const Support &support = field.support();
    if (support.empty()) {
        return result;
    }
    const long target = n - 1;
    const long lo = support.front(), hi = support.back();
    const std::size_t max_len = max_word_length(zeta_order + 1);
    std::map<Letter, BorelPoly> letters;
    for (auto l : support) {
        letters.emplace(l, borel_letter(field, l, zeta_order));
    }
    std::map<long, BorelPoly> layer;
    for (auto l : support) {
        if (detail::reachable_within(target - l, max_len - 1, lo, hi)) {
            layer.emplace(l, detail::borel_step(l, letters.at(l), zeta_order));
        }
    }
    if (auto it = layer.find(target); it != layer.end()) {
        result += it->second;
    }
    for (std::size_t len = 2; len <= max_len && !layer.empty(); ++len) {
        std::map<long, BorelPoly> next;
        for (const auto &[s, f] : layer) {
            const long factor = n - s;
            if (f.is_zero() || factor == 0) {
                continue;
            }
            for (auto l : support) {
                const long s2 = s + l;
                if (!detail::reachable_within(target - s2, max_len - len, lo, hi)) {
                    continue;
                }
                BorelPoly v = detail::borel_step(s2, conv(letters.at(l), f), zeta_order) * Scalar(factor);
                auto [it, inserted] = next.emplace(s2, v);
                if (!inserted) {
                    it->second += v;
                }
            }
        }
        layer = std::move(next);
        if (auto it = layer.find(target); it != layer.end()) {
            result += it->second;
        }
    }
    return result;
}

/// The same sum word by word through borel_V.
inline BorelPoly borel_phi_n_by_words(const SaddleNodeField &field, int n, int zeta_order)
{
    BorelPoly acc(zeta_order);
    for (const auto &w : enumerate_words(n, zeta_order + 1, field.support())) {
        const Integer b = beta(w);
        if (b != 0) {
            acc += borel_V(field, w, zeta_order) * Scalar(b);
        }
    }
    return acc;
}

/// Partial sum sum_{k <= order} c_k zeta^k at an exact point.
struct PartialSum {
    Scalar value;
    /// Geometric tail bound C |zeta|^{order+1} / (1 - |zeta|) with
    /// C = max |c_k|; only reported for |zeta| < 1.
    std::optional<double> tail_bound;
};

inline PartialSum evaluate_partial_sum(const BorelPoly &f, const Scalar &zeta)
{
    PartialSum out;
    Scalar power(1);
    double cmax = 0.0;
    for (int k = 0; k <= f.order(); ++k) {
        out.value += f[k] * power;
        power *= zeta;
        cmax = std::max(cmax, std::sqrt(f[k].norm2().get_d()));
    }
    const double r = std::sqrt(zeta.norm2().get_d());
    if (r < 1.0) {
        out.tail_bound = cmax * std::pow(r, f.order() + 1) / (1.0 - r);
    }
    return out;
}

} // namespace mouldcalc
