#pragma once

// Assembly of the normalising series phi_n and of the inverse series psi_n
// from the mould expansion, the comould B_w = B_{n_r} ... B_{n_1} with
// B_n = y^{n+1} d/dy, and the independent checks: an order-by-order PDE
// solver, the composition phi o psi and the formal-integral residual.

#include <algorithm>
#include <climits>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <mouldcalc/moulds.hpp>
#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

/// Finite sum of c_k(x) y^k, k >= 0.
class YPolynomial
{
public:
    YPolynomial() = default;

    static YPolynomial monomial(int k, TruncatedSeries c)
    {
        YPolynomial p;
        p.add_term(k, std::move(c));
        return p;
    }

    const std::map<int, TruncatedSeries> &terms() const noexcept { return terms_; }

    void add_term(int k, const TruncatedSeries &c)
    {
        if (k < 0) {
            throw std::logic_error("negative power of y in a y-polynomial");
        }
        auto [it, inserted] = terms_.emplace(k, c);
        if (!inserted) {
            it->second += c;
        }
    }

    bool is_zero() const
    {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto &t) { return t.second.is_zero(); });
    }

    /// Coefficient of y^k, or nullopt if absent.
    std::optional<TruncatedSeries> coeff(int k) const
    {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    YPolynomial &operator+=(const YPolynomial &o)
    {
        for (const auto &[k, c] : o.terms_) {
            add_term(k, c);
        }
        return *this;
    }
    YPolynomial &operator-=(const YPolynomial &o)
    {
        for (const auto &[k, c] : o.terms_) {
            add_term(k, -c);
        }
        return *this;
    }
    friend YPolynomial operator+(YPolynomial a, const YPolynomial &b) { return a += b; }
    friend YPolynomial operator-(YPolynomial a, const YPolynomial &b) { return a -= b; }

    friend YPolynomial operator*(const YPolynomial &a, const YPolynomial &b)
    {
        YPolynomial out;
        for (const auto &[i, ci] : a.terms_) {
            for (const auto &[j, cj] : b.terms_) {
                out.add_term(i + j, ps_mul(ci, cj));
            }
        }
        return out;
    }

    /// Multiply every coefficient by an x-series.
    YPolynomial scaled(const TruncatedSeries &s) const
    {
        YPolynomial out;
        for (const auto &[k, c] : terms_) {
            out.add_term(k, ps_mul(s, c));
        }
        return out;
    }

    YPolynomial truncated(int x_order) const
    {
        YPolynomial out;
        for (const auto &[k, c] : terms_) {
            out.add_term(k, c.truncated(x_order));
        }
        return out;
    }

    /// Equal as polynomials on the common known orders.
    bool agrees_with(const YPolynomial &o) const
    {
        auto diff = *this - o;
        return diff.is_zero();
    }

private:
    std::map<int, TruncatedSeries> terms_;
};

/// B_w f with B_{n_1} applied first; B_n (c y^k) = k c y^{k+n}.
inline YPolynomial comould_apply(const Word &w, const YPolynomial &f)
{
    std::map<int, TruncatedSeries> cur(f.terms().begin(), f.terms().end());
    for (auto n : w) {
        std::map<int, TruncatedSeries> next;
        for (const auto &[k, c] : cur) {
            if (k == 0 || c.is_zero()) {
                continue;
            }
            const int e = k + n;
            if (e < 0) {
                throw std::logic_error("comould produced a negative power of y on " + w.to_string());
            }
            TruncatedSeries t = c * Scalar(k);
            auto [it, inserted] = next.emplace(e, t);
            if (!inserted) {
                it->second += t;
            }
        }
        cur = std::move(next);
    }
    YPolynomial out;
    for (const auto &[k, c] : cur) {
        out.add_term(k, c);
    }
    return out;
}

/// sum_{w in words} M^w B_w f, truncated to the mould's order.
inline YPolynomial contract_apply(const Mould &m, const std::vector<Word> &words, const YPolynomial &f)
{
    YPolynomial out;
    for (const auto &w : words) {
        out += comould_apply(w, f).scaled(m(w)).truncated(m.x_order());
    }
    return out;
}

/// X_0 f = x^2 df/dx + y df/dy.
inline YPolynomial apply_X0(const YPolynomial &f)
{
    YPolynomial out;
    for (const auto &[k, c] : f.terms()) {
        out.add_term(k, euler_derivation(c).truncated(c.order()) + c * Scalar(k));
    }
    return out;
}

/// nu(x^m y^n) = 4m + n, minimised over the terms of f. A coefficient that
/// vanishes to its order K contributes the certified bound 4(K+1) + n.
inline long modified_valuation_lower_bound(const YPolynomial &f)
{
    long best = LONG_MAX;
    for (const auto &[n, c] : f.terms()) {
        best = std::min(best, 4L * c.valuation_lower_bound() + n);
    }
    return best;
}

namespace detail
{

// Weighted sum over the words of weight n - 1 of c(w) V^w, grouped by
// suffix weight. For w = (n_1).t with s = |t|, the prefix products in
// beta_w are n - s (so beta_w = prod_{j>=2} (n - |w_j..w_r|)); for the
// inverse mould (-1)^r V^{reversed w} the factor becomes -(s + 1). Grouping
// words with equal suffix weight is exact because V^{(n_1).t} depends on t
// only through V^t, linearly.
inline TruncatedSeries assemble_by_suffix_weight(const SaddleNodeField &field, int n, int x_order, bool inverse)
{
    const Support &support = field.support();
    TruncatedSeries result(x_order);
    if (support.empty() || x_order == 0) {
        return result;
    }
    const long target = n - 1;
    const long lo = support.front(), hi = support.back();
    const std::size_t max_len = max_word_length(x_order);
    std::map<Letter, TruncatedSeries> letters;
    for (auto l : support) {
        letters.emplace(l, field.letter(l, x_order + 1));
    }
    std::map<long, TruncatedSeries> layer;
    for (auto l : support) {
        if (!detail::reachable_within(target - l, max_len - 1, lo, hi)) {
            continue;
        }
        TruncatedSeries v = solve_euler_shifted(letters.at(l), Scalar(static_cast<long>(l))).truncated(x_order);
        layer.emplace(l, inverse ? -v : v);
    }
    if (auto it = layer.find(target); it != layer.end()) {
        result += it->second;
    }
    for (std::size_t len = 2; len <= max_len && !layer.empty(); ++len) {
        std::map<long, TruncatedSeries> next;
        for (const auto &[s, f] : layer) {
            if (f.is_zero()) {
                continue;
            }
            const long factor = inverse ? -(s + 1) : (n - s);
            if (factor == 0) {
                continue;
            }
            for (auto l : support) {
                const long s2 = s + l;
                if (!detail::reachable_within(target - s2, max_len - len, lo, hi)) {
                    continue;
                }
                TruncatedSeries rhs = ps_mul(letters.at(l), f);
                TruncatedSeries v = solve_euler_shifted(rhs, Scalar(s2)).truncated(x_order) * Scalar(factor);
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

// Evaluate term(i) for i in [0, count) on `threads` workers; results are
// returned in index order so any reduction over them is schedule-independent.
template <typename T, typename F>
std::vector<T> parallel_terms(std::size_t count, unsigned threads, F term)
{
    std::vector<std::optional<T>> slots(count);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            slots[i] = term(i);
        }
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += threads) {
                        slots[i] = term(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
        for (auto &e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    std::vector<T> out;
    out.reserve(count);
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

inline void check_valuation_bound(const Word &w, const TruncatedSeries &v)
{
    const int need = static_cast<int>((w.size() + 1) / 2);
    if (v.valuation_lower_bound() < need) {
        throw std::logic_error("V" + w.to_string() + " has valuation " + std::to_string(v.valuation_lower_bound())
                               + " below ceil(r/2) = " + std::to_string(need));
    }
}

inline TruncatedSeries assemble_by_words(const Mould &m, const SaddleNodeField &field, int n, unsigned threads,
                                         bool check_bound)
{
    const int k = m.x_order();
    const auto words = enumerate_words(n, k, field.support());
    auto terms = parallel_terms<TruncatedSeries>(words.size(), threads, [&](std::size_t i) {
        const Word &w = words[i];
        const Integer b = beta(w);
        if (b == 0) {
            return TruncatedSeries(k);
        }
        TruncatedSeries v = m(w);
        if (check_bound) {
            check_valuation_bound(w, v);
        }
        return v * Scalar(b);
    });
    TruncatedSeries acc(k);
    for (const auto &t : terms) {
        acc += t;
    }
    return acc;
}

} // namespace detail

/// phi_n = sum over words w of weight n - 1 of beta_w V^w, at x-order K.
/// Words are grouped by suffix weight, so the cost is polynomial in K.
inline TruncatedSeries phi_n(const SaddleNodeField &field, int n, int x_order)
{
    if (n < 0) {
        throw std::invalid_argument("phi_n needs n >= 0");
    }
    return detail::assemble_by_suffix_weight(field, n, x_order, false);
}

/// phi_n as the explicit word sum over enumerate_words(n, K, support), using
/// (and populating) the memo of a solver mould V. Each V^w is checked against
/// the valuation bound that justifies the length cut-off r <= 2K.
inline TruncatedSeries phi_n(const Mould &v, const SaddleNodeField &field, int n, unsigned threads = 1)
{
    if (n < 0) {
        throw std::invalid_argument("phi_n needs n >= 0");
    }
    return detail::assemble_by_words(v, field, n, threads, true);
}

/// psi_n: the same assembly with the inverse mould (-1)^r V^{reversed w}.
inline TruncatedSeries psi_n(const SaddleNodeField &field, int n, int x_order)
{
    if (n < 0) {
        throw std::invalid_argument("psi_n needs n >= 0");
    }
    return detail::assemble_by_suffix_weight(field, n, x_order, true);
}

inline TruncatedSeries psi_n(const Mould &v, const SaddleNodeField &field, int n, unsigned threads = 1)
{
    if (n < 0) {
        throw std::invalid_argument("psi_n needs n >= 0");
    }
    return detail::assemble_by_words(symmetral_inverse(v), field, n, threads, false);
}

/// Components 0..n_max of phi or psi.
inline PhiSeries phi_series(const SaddleNodeField &field, int n_max, int x_order)
{
    std::vector<TruncatedSeries> c;
    for (int n = 0; n <= n_max; ++n) {
        c.push_back(phi_n(field, n, x_order));
    }
    return PhiSeries(std::move(c));
}

inline PhiSeries psi_series(const SaddleNodeField &field, int n_max, int x_order)
{
    std::vector<TruncatedSeries> c;
    for (int n = 0; n <= n_max; ++n) {
        c.push_back(psi_n(field, n, x_order));
    }
    return PhiSeries(std::move(c));
}

/// phi_0, ..., phi_{n_max} from the conjugacy PDE
/// x^2 d_x phi + y d_y phi = A(x, phi), solved coefficient by coefficient.
///
/// Writing R = A(x, phi) - phi = sum_m a_m phi^{m+1}, the x^k y^n coefficient
/// reads (k-1) phi_{n,k-1} + (n-1) phi_{n,k} = R_{n,k}. Every term of R carries
/// a factor a_m in x C[[x]], so R_{n,k} only involves coefficients of x-degree
/// below k. For n = 1 the equation fixes phi_{1,k-1} instead.
/// Uses nothing from the mould machinery.
inline PhiSeries oracle_phi(const SaddleNodeField &field, int n_max, int x_order)
{
    if (n_max < 0) {
        throw std::invalid_argument("oracle_phi needs n_max >= 0");
    }
    const int kx = x_order;
    const int ny = n_max;
    const BivariateSeries &a = field.polynomial();
    std::vector<std::vector<Scalar>> c(static_cast<std::size_t>(ny) + 1u,
                                       std::vector<Scalar>(static_cast<std::size_t>(kx) + 2u));

    auto remainder = [&](int order) {
        std::vector<TruncatedSeries> comps;
        for (int n = 0; n <= ny; ++n) {
            comps.emplace_back(std::vector<Scalar>(c[static_cast<std::size_t>(n)].begin(),
                                                   c[static_cast<std::size_t>(n)].begin() + order + 1));
        }
        PhiSeries phi(std::move(comps));
        return substitute_phi(a, phi) - phi.as_bivariate(order, ny);
    };

    for (int k = 1; k <= kx + 1; ++k) {
        if (ny >= 1) {
            const auto r = remainder(k);
            if (k == 1) {
                if (!r.coeff(1, 1).is_zero()) {
                    throw std::logic_error("oracle: unsolvable resonant equation for phi_1");
                }
            } else {
                c[1][static_cast<std::size_t>(k - 1)] = r.coeff(k, 1) / Scalar(k - 1);
            }
        }
        if (k > kx) {
            break;
        }
        const auto r = remainder(k);
        for (int n = 0; n <= ny; ++n) {
            if (n == 1) {
                continue;
            }
            auto &cn = c[static_cast<std::size_t>(n)];
            Scalar rhs = r.coeff(k, n) - Scalar(k - 1) * cn[static_cast<std::size_t>(k - 1)];
            cn[static_cast<std::size_t>(k)] = rhs / Scalar(n - 1);
        }
    }

    std::vector<TruncatedSeries> comps;
    for (int n = 0; n <= ny; ++n) {
        comps.emplace_back(std::vector<Scalar>(c[static_cast<std::size_t>(n)].begin(),
                                               c[static_cast<std::size_t>(n)].begin() + kx + 1));
    }
    return PhiSeries(std::move(comps));
}

/// phi(x, psi(x, y)) - y at (x_order, y_order).
///
/// Components of phi beyond phi.y_order() are taken as zero. Since
/// psi_0 lies in x C[[x]], phi_n contributes to y^j only from x-degree
/// n - j + 1 on, so the residual is exact once phi carries components up to
/// y_order + x_order - 1.
inline BivariateSeries compose_check(const PhiSeries &phi, const PhiSeries &psi, int x_order, int y_order)
{
    const BivariateSeries p = psi.as_bivariate(x_order, y_order);
    BivariateSeries out = p;
    BivariateSeries power(x_order, y_order);
    power.set(0, 0, Scalar(1));
    for (int n = 0; n <= phi.y_order(); ++n) {
        if (n > 0) {
            power = bivariate_mul(power, p);
        }
        const TruncatedSeries cn = phi.component(n).truncated(x_order);
        if (cn.is_zero()) {
            continue;
        }
        for (int j = 0; j <= y_order; ++j) {
            const auto &pr = power.row(j);
            if (!pr.is_zero()) {
                out.set_row(j, out.row(j) + ps_mul(cn, pr).truncated(x_order));
            }
        }
    }
    if (y_order >= 1) {
        out.add(0, 1, Scalar(-1));
    }
    return out;
}

/// Residuals of the ansatz Y(z, u) = u e^z + sum_n u^n e^{nz} phi~_n(z),
/// phi~_n(z) = phi_n(-1/z), in dY/dz = A(-1/z, Y).
///
/// rows[n] holds the coefficient of u^n e^{nz}, as a series in t = 1/z:
/// rows[n][k] is the coefficient of z^{-k}.
struct FormalIntegralResidual {
    std::vector<TruncatedSeries> rows;

    bool is_zero() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const auto &r) { return r.is_zero(); });
    }

    /// First (n, k) with a nonzero entry.
    std::optional<std::pair<int, int>> first_nonzero() const
    {
        for (std::size_t n = 0; n < rows.size(); ++n) {
            if (auto v = rows[n].valuation()) {
                return std::pair<int, int>(static_cast<int>(n), *v);
            }
        }
        return std::nullopt;
    }
};

inline FormalIntegralResidual formal_integral_residual(const SaddleNodeField &field, const PhiSeries &phi,
                                                       int u_order, int z_order)
{
    if (phi.y_order() < u_order) {
        throw std::invalid_argument("formal_integral_residual needs phi components up to u_order");
    }
    // Y as a polynomial in w = u e^z with coefficients in C[[t]], t = 1/z.
    std::vector<TruncatedSeries> y;
    for (int n = 0; n <= u_order; ++n) {
        const TruncatedSeries &cn = phi.component(n);
        if (cn.order() < z_order) {
            throw std::invalid_argument("phi component known below the requested z-order");
        }
        y.push_back(to_z_coeffs(cn.truncated(z_order)).in_inverse_variable());
    }
    if (u_order >= 1) {
        y[1] = y[1] + TruncatedSeries::one(z_order);
    }

    auto w_mul = [&](const std::vector<TruncatedSeries> &p, const std::vector<TruncatedSeries> &q) {
        std::vector<TruncatedSeries> out(static_cast<std::size_t>(u_order) + 1u, TruncatedSeries(z_order));
        for (int i = 0; i <= u_order; ++i) {
            for (int j = 0; i + j <= u_order; ++j) {
                out[static_cast<std::size_t>(i + j)] += ps_mul(p[static_cast<std::size_t>(i)],
                                                               q[static_cast<std::size_t>(j)]).truncated(z_order);
            }
        }
        return out;
    };

    // d/dz = -t^2 d/dt, and d/dz (w^n F) = w^n (n F + dF/dz).
    FormalIntegralResidual res;
    for (int n = 0; n <= u_order; ++n) {
        const auto &yn = y[static_cast<std::size_t>(n)];
        res.rows.push_back(yn * Scalar(n) - euler_derivation(yn).truncated(z_order));
    }

    // A(-1/z, Y) = sum_{m,j} A_{mj} (-t)^m Y^j.
    const BivariateSeries &a = field.polynomial();
    std::vector<TruncatedSeries> power(static_cast<std::size_t>(u_order) + 1u, TruncatedSeries(z_order));
    power[0] = TruncatedSeries::one(z_order);
    for (int j = 0; j <= a.y_order(); ++j) {
        if (j > 0) {
            power = w_mul(power, y);
        }
        const auto &row = a.row(j);
        if (row.is_zero()) {
            continue;
        }
        TruncatedSeries coef(z_order);
        for (int m = 0; m <= std::min(row.order(), z_order); ++m) {
            coef.set(m, (m % 2 == 0) ? row[m] : -row[m]);
        }
        for (int n = 0; n <= u_order; ++n) {
            res.rows[static_cast<std::size_t>(n)] -= ps_mul(coef, power[static_cast<std::size_t>(n)]).truncated(z_order);
        }
    }
    return res;
}

} // namespace mouldcalc
