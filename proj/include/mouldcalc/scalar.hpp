#pragma once

// Exact complex-rational scalars backed by GMP.

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include <gmpxx.h>

namespace mouldcalc
{

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact element of Q(i). Both parts are kept in canonical (reduced) form,
/// so structural equality is mathematical equality.
class Scalar
{
public:
    Scalar() = default;
    Scalar(long v) : re_(v) {}
    Scalar(int v) : re_(static_cast<long>(v)) {}
    Scalar(const Integer &v) : re_(v) {}
    Scalar(Rational re) : re_(std::move(re)) {}
    Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im))
    {
        re_.canonicalize();
        im_.canonicalize();
    }

    static Scalar fraction(long num, long den)
    {
        if (den == 0) {
            throw std::domain_error("zero denominator");
        }
        Rational q(num, den);
        q.canonicalize();
        return Scalar(q);
    }

    const Rational &re() const noexcept { return re_; }
    const Rational &im() const noexcept { return im_; }

    bool is_zero() const noexcept { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const noexcept { return sgn(im_) == 0; }

    Scalar &operator+=(const Scalar &o)
    {
        re_ += o.re_;
        if (sgn(o.im_) != 0) {
            im_ += o.im_;
        }
        return *this;
    }
    Scalar &operator-=(const Scalar &o)
    {
        re_ -= o.re_;
        if (sgn(o.im_) != 0) {
            im_ -= o.im_;
        }
        return *this;
    }
    Scalar &operator*=(const Scalar &o)
    {
        if (is_real() && o.is_real()) {
            re_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    Scalar &operator/=(const Scalar &o)
    {
        if (o.is_zero()) {
            throw std::domain_error("division by zero scalar");
        }
        if (o.is_real()) {
            re_ /= o.re_;
            if (sgn(im_) != 0) {
                im_ /= o.re_;
            }
            return *this;
        }
        Rational norm = o.re_ * o.re_ + o.im_ * o.im_;
        Rational r = (re_ * o.re_ + im_ * o.im_) / norm;
        Rational i = (im_ * o.re_ - re_ * o.im_) / norm;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar &b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar &b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar &b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar &b) { return a /= b; }
    friend Scalar operator-(const Scalar &a) { return Scalar(Rational(-a.re_), Rational(-a.im_)); }

    friend bool operator==(const Scalar &a, const Scalar &b) { return a.re_ == b.re_ && a.im_ == b.im_; }

    /// |z|^2, exact.
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    /// "p/q", "p/q+r/si" or "r/si"; integers print without a denominator.
    std::string to_string() const
    {
        if (is_real()) {
            return re_.get_str();
        }
        std::string s;
        if (sgn(re_) != 0) {
            s = re_.get_str();
            if (sgn(im_) > 0) {
                s += '+';
            }
        }
        return s + im_.get_str() + "i";
    }

    friend std::ostream &operator<<(std::ostream &os, const Scalar &s) { return os << s.to_string(); }

private:
    Rational re_{0};
    Rational im_{0};
};

inline Scalar factorial(unsigned n)
{
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Scalar(f);
}

/// Parse "p", "p/q" as an exact rational.
inline Rational parse_rational(const std::string &text)
{
    Rational q;
    if (text.empty() || q.set_str(text, 10) != 0) {
        throw std::invalid_argument("not a rational number: '" + text + "'");
    }
    if (sgn(q.get_den()) == 0) {
        throw std::invalid_argument("zero denominator in '" + text + "'");
    }
    q.canonicalize();
    return q;
}

} // namespace mouldcalc
