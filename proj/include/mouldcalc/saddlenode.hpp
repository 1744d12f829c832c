#pragma once

// Prepared saddle-node fields x^2 d/dx + A(x, y) d/dy with A(0, y) = y and
// no x*y term, their homogeneous letters a_n(x), and the substitution
// y -> phi(x, y) used to certify conjugacy to x^2 d/dx + y d/dy.

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <mouldcalc/scalar.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

/// Series in x and y known for x-exponents <= x_order and y-exponents
/// <= y_order. Stored densely as one x-series per power of y.
class BivariateSeries
{
public:
    BivariateSeries() : BivariateSeries(0, 0) {}

    BivariateSeries(int x_order, int y_order) : x_order_(x_order)
    {
        if (x_order < 0 || y_order < 0) {
            throw std::invalid_argument("bivariate orders must be nonnegative");
        }
        rows_.assign(static_cast<std::size_t>(y_order) + 1u, TruncatedSeries(x_order));
    }

    int x_order() const noexcept { return x_order_; }
    int y_order() const noexcept { return static_cast<int>(rows_.size()) - 1; }

    /// Coefficient of x^m y^n.
    const Scalar &coeff(int m, int n) const { return row(n)[m]; }

    void set(int m, int n, Scalar c)
    {
        check_y(n);
        rows_[static_cast<std::size_t>(n)].set(m, std::move(c));
    }

    void add(int m, int n, const Scalar &c)
    {
        check_y(n);
        auto &r = rows_[static_cast<std::size_t>(n)];
        r.set(m, r[m] + c);
    }

    /// The x-series multiplying y^n.
    const TruncatedSeries &row(int n) const
    {
        check_y(n);
        return rows_[static_cast<std::size_t>(n)];
    }

    /// Replace the y^n row; the row is truncated/padded to x_order.
    void set_row(int n, const TruncatedSeries &s)
    {
        check_y(n);
        if (s.order() < x_order_) {
            throw std::invalid_argument("row known to a lower x-order than the bivariate series");
        }
        TruncatedSeries r(x_order_);
        for (int k = 0; k <= x_order_; ++k) {
            r.set(k, s[k]);
        }
        rows_[static_cast<std::size_t>(n)] = std::move(r);
    }

    bool is_zero() const noexcept
    {
        return std::all_of(rows_.begin(), rows_.end(), [](const auto &r) { return r.is_zero(); });
    }

    /// Nonzero coefficients as (m, n, c), n-major.
    std::vector<std::tuple<int, int, Scalar>> nonzero_terms() const
    {
        std::vector<std::tuple<int, int, Scalar>> out;
        for (int n = 0; n <= y_order(); ++n) {
            for (int m = 0; m <= x_order_; ++m) {
                if (!coeff(m, n).is_zero()) {
                    out.emplace_back(m, n, coeff(m, n));
                }
            }
        }
        return out;
    }

    BivariateSeries &operator+=(const BivariateSeries &o)
    {
        check_same_shape(o);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            rows_[i] += o.rows_[i];
        }
        return *this;
    }
    BivariateSeries &operator-=(const BivariateSeries &o)
    {
        check_same_shape(o);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            rows_[i] -= o.rows_[i];
        }
        return *this;
    }
    friend BivariateSeries operator+(BivariateSeries a, const BivariateSeries &b) { return a += b; }
    friend BivariateSeries operator-(BivariateSeries a, const BivariateSeries &b) { return a -= b; }
    friend bool operator==(const BivariateSeries &, const BivariateSeries &) = default;

    std::string to_string() const
    {
        std::string s;
        for (const auto &[m, n, c] : nonzero_terms()) {
            if (!s.empty()) {
                s += " + ";
            }
            s += "(" + c.to_string() + ")*x^" + std::to_string(m) + "*y^" + std::to_string(n);
        }
        return s.empty() ? "0" : s;
    }

private:
    void check_y(int n) const
    {
        if (n < 0 || n > y_order()) {
            throw std::out_of_range("y-exponent " + std::to_string(n) + " outside y-order "
                                    + std::to_string(y_order()));
        }
    }
    void check_same_shape(const BivariateSeries &o) const
    {
        if (o.x_order_ != x_order_ || o.y_order() != y_order()) {
            throw std::invalid_argument("bivariate series shapes differ");
        }
    }

    int x_order_;
    std::vector<TruncatedSeries> rows_;
};

/// Product truncated to the common (x_order, y_order) of the operands.
inline BivariateSeries bivariate_mul(const BivariateSeries &a, const BivariateSeries &b)
{
    const int kx = std::min(a.x_order(), b.x_order());
    const int ky = std::min(a.y_order(), b.y_order());
    BivariateSeries out(kx, ky);
    for (int i = 0; i <= ky; ++i) {
        const auto &ra = a.row(i);
        if (ra.is_zero()) {
            continue;
        }
        for (int j = 0; i + j <= ky; ++j) {
            const auto &rb = b.row(j);
            if (rb.is_zero()) {
                continue;
            }
            auto p = ps_mul(ra.truncated(kx), rb.truncated(kx)).truncated(kx);
            TruncatedSeries sum = out.row(i + j) + p;
            out.set_row(i + j, sum);
        }
    }
    return out;
}

/// Which Dulac normalisation condition a field violates.
enum class field_condition { not_normalized, bad_mixed_term };

class validation_error : public std::runtime_error
{
public:
    validation_error(field_condition c, const std::string &what) : std::runtime_error(what), condition_(c) {}
    field_condition condition() const noexcept { return condition_; }

private:
    field_condition condition_;
};

inline std::string condition_name(field_condition c)
{
    switch (c) {
    case field_condition::not_normalized:
        return "A(0, y) = y";
    case field_condition::bad_mixed_term:
        return "d^2A/dxdy(0, 0) = 0";
    }
    return "unknown condition";
}

enum class validation_mode { strict, repair };

/// The letters a_n(x), n >= -1, of A(x, y) = y + sum_n a_n(x) y^{n+1}.
///
/// A is treated as the polynomial formed by its stored coefficients, so each
/// a_n is an exact polynomial in x and can be read at any x-order.
class SaddleNodeField
{
public:
    SaddleNodeField() = default;

    int x_order() const noexcept { return a_.x_order(); }
    int y_order() const noexcept { return a_.y_order(); }

    /// The validated A(x, y).
    const BivariateSeries &polynomial() const noexcept { return a_; }

    /// a_n at x-order `order` (zero-padded; zero for letters outside the field).
    TruncatedSeries letter(Letter n, int order) const
    {
        TruncatedSeries s(order);
        if (n < min_letter || n + 1 > y_order()) {
            return s;
        }
        const auto &row = a_.row(n + 1);
        for (int k = 0; k <= std::min(order, row.order()); ++k) {
            Scalar c = row[k];
            if (n == 0 && k == 0) {
                c -= Scalar(1);
            }
            s.set(k, std::move(c));
        }
        return s;
    }

    /// Letters with a_n != 0, in increasing order.
    const Support &support() const noexcept { return support_; }

    /// Every letter the field could carry: -1, ..., y_order - 1.
    Support alphabet() const
    {
        Support s;
        for (Letter n = min_letter; n + 1 <= y_order(); ++n) {
            s.push_back(n);
        }
        return s;
    }

    friend SaddleNodeField extract_letters(const BivariateSeries &a, validation_mode mode);

private:
    BivariateSeries a_;
    Support support_;
};

/// Validate A(0, y) = y and the vanishing x*y coefficient, then split A into
/// its letters. In repair mode offending terms are overwritten instead.
inline SaddleNodeField extract_letters(const BivariateSeries &a, validation_mode mode = validation_mode::strict)
{
    BivariateSeries fixed = a;
    for (int n = 0; n <= a.y_order(); ++n) {
        const Scalar expected = (n == 1) ? Scalar(1) : Scalar(0);
        if (!(a.coeff(0, n) == expected)) {
            if (mode == validation_mode::strict) {
                throw validation_error(field_condition::not_normalized,
                                       "field violates A(0, y) = y: coefficient of y^" + std::to_string(n) + " is "
                                           + a.coeff(0, n).to_string());
            }
            fixed.set(0, n, expected);
        }
    }
    if (a.y_order() < 1) {
        if (mode == validation_mode::strict) {
            throw validation_error(field_condition::not_normalized, "field violates A(0, y) = y: no y term");
        }
        BivariateSeries grown(a.x_order(), 1);
        for (int m = 0; m <= a.x_order(); ++m) {
            grown.set(m, 0, fixed.coeff(m, 0));
        }
        grown.set(0, 1, Scalar(1));
        fixed = grown;
    }
    if (fixed.x_order() >= 1 && !fixed.coeff(1, 1).is_zero()) {
        if (mode == validation_mode::strict) {
            throw validation_error(field_condition::bad_mixed_term,
                                   "field violates d^2A/dxdy(0, 0) = 0: x*y coefficient is "
                                       + fixed.coeff(1, 1).to_string());
        }
        fixed.set(1, 1, Scalar(0));
    }
    SaddleNodeField f;
    f.a_ = std::move(fixed);
    for (Letter n = min_letter; n + 1 <= f.y_order(); ++n) {
        if (!f.letter(n, f.x_order()).is_zero()) {
            f.support_.push_back(n);
        }
    }
    return f;
}

/// Build A(x, y) from (m, n, c) monomials; orders are the largest exponents.
inline BivariateSeries bivariate_from_terms(const std::vector<std::tuple<int, int, Scalar>> &terms, int x_order,
                                            int y_order)
{
    BivariateSeries a(x_order, y_order);
    for (const auto &[m, n, c] : terms) {
        if (m < 0 || n < 0 || m > x_order || n > y_order) {
            throw std::out_of_range("monomial x^" + std::to_string(m) + " y^" + std::to_string(n)
                                    + " outside the declared orders");
        }
        a.add(m, n, c);
    }
    return a;
}

/// phi(x, y) = y + sum_{n=0}^{N} phi_n(x) y^n with phi_n in x C[[x]].
class PhiSeries
{
public:
    PhiSeries() = default;

    explicit PhiSeries(std::vector<TruncatedSeries> components) : components_(std::move(components))
    {
        for (const auto &c : components_) {
            if (!c[0].is_zero()) {
                throw std::invalid_argument("phi components must lie in x C[[x]]");
            }
        }
    }

    /// All-zero components 0..y_order at x_order.
    static PhiSeries identity(int x_order, int y_order)
    {
        return PhiSeries(std::vector<TruncatedSeries>(static_cast<std::size_t>(y_order) + 1u, TruncatedSeries(x_order)));
    }

    int y_order() const noexcept { return static_cast<int>(components_.size()) - 1; }

    /// Smallest order among the components.
    int x_order() const noexcept
    {
        int k = -1;
        for (const auto &c : components_) {
            k = (k < 0) ? c.order() : std::min(k, c.order());
        }
        return std::max(k, 0);
    }

    const TruncatedSeries &component(int n) const { return components_.at(static_cast<std::size_t>(n)); }
    void set_component(int n, TruncatedSeries s)
    {
        if (!s[0].is_zero()) {
            throw std::invalid_argument("phi components must lie in x C[[x]]");
        }
        components_.at(static_cast<std::size_t>(n)) = std::move(s);
    }

    const std::vector<TruncatedSeries> &components() const noexcept { return components_; }

    /// y + sum phi_n y^n as a bivariate series at (x_order, y_order).
    BivariateSeries as_bivariate(int x_order, int y_order) const
    {
        BivariateSeries out(x_order, y_order);
        for (int n = 0; n <= std::min(y_order, this->y_order()); ++n) {
            out.set_row(n, component(n).truncated(x_order));
        }
        if (y_order >= 1) {
            out.add(0, 1, Scalar(1));
        }
        return out;
    }

private:
    std::vector<TruncatedSeries> components_;
};

/// A(x, phi(x, y)) at the orders of phi, expanding powers of phi.
/// Exact on the stored orders: the y^j part of phi^k only involves
/// components phi_0, ..., phi_j.
inline BivariateSeries substitute_phi(const BivariateSeries &a, const PhiSeries &phi)
{
    const int kx = phi.x_order();
    const int ky = phi.y_order();
    const BivariateSeries p = phi.as_bivariate(kx, ky);
    BivariateSeries out(kx, ky);
    BivariateSeries power(kx, ky);
    power.set(0, 0, Scalar(1));
    for (int j = 0; j <= a.y_order(); ++j) {
        if (j > 0) {
            power = bivariate_mul(power, p);
        }
        const auto &aj = a.row(j);
        if (aj.is_zero()) {
            continue;
        }
        // out += a_j(x) * phi^j
        TruncatedSeries coef(kx);
        for (int m = 0; m <= std::min(kx, aj.order()); ++m) {
            coef.set(m, aj[m]);
        }
        for (int n = 0; n <= ky; ++n) {
            const auto &pr = power.row(n);
            if (pr.is_zero()) {
                continue;
            }
            out.set_row(n, out.row(n) + ps_mul(coef, pr).truncated(kx));
        }
    }
    return out;
}

/// x^2 d_x phi + y d_y phi - A(x, phi). Vanishes iff (x, y) -> (x, phi)
/// conjugates x^2 d/dx + y d/dy to x^2 d/dx + A d/dy, to the stored orders.
inline BivariateSeries pde_residual(const BivariateSeries &a, const PhiSeries &phi)
{
    const int kx = phi.x_order();
    const int ky = phi.y_order();
    BivariateSeries lhs(kx, ky);
    for (int n = 0; n <= ky; ++n) {
        const auto &c = phi.component(n).truncated(kx);
        TruncatedSeries row = euler_derivation(c).truncated(kx) + c * Scalar(n);
        lhs.set_row(n, row);
    }
    if (ky >= 1) {
        lhs.add(0, 1, Scalar(1)); // y d_y y
    }
    return lhs - substitute_phi(a, phi);
}

} // namespace mouldcalc
