#pragma once

// Fixtures shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include <mouldcalc.hpp>

namespace mouldcalc::testing
{

inline SaddleNodeField field_of(const std::vector<std::tuple<int, int, Scalar>> &terms)
{
    int mx = 0, my = 1;
    for (const auto &[m, n, c] : terms) {
        mx = std::max(mx, m);
        my = std::max(my, n);
    }
    return extract_letters(bivariate_from_terms(terms, mx, my));
}

/// A = x + y.
inline SaddleNodeField euler_field() { return field_of({{1, 0, Scalar(1)}, {0, 1, Scalar(1)}}); }

/// A = y.
inline SaddleNodeField trivial_field() { return field_of({{0, 1, Scalar(1)}}); }

/// Letters -1, 0, 1, 2 all nonzero, x-degree 2.
inline SaddleNodeField quadratic_field()
{
    return field_of({{1, 0, Scalar(1)},
                     {2, 0, Scalar::fraction(-1, 3)},
                     {0, 1, Scalar(1)},
                     {2, 1, Scalar::fraction(1, 2)},
                     {1, 2, Scalar(1)},
                     {2, 2, Scalar(2)},
                     {1, 3, Scalar::fraction(-1, 2)}});
}

/// A second field with a different support and complex coefficients.
inline SaddleNodeField gaussian_field()
{
    return field_of({{1, 0, Scalar(Rational(1), Rational(1, 2))},
                     {0, 1, Scalar(1)},
                     {3, 1, Scalar(-1)},
                     {1, 2, Scalar(Rational(0), Rational(-1))},
                     {2, 2, Scalar(3)}});
}

inline Scalar random_rational(std::mt19937_64 &rng, int span = 3, int max_den = 4)
{
    std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
    return Scalar::fraction(num(rng), den(rng));
}

/// Polynomial field with y-degree <= 3 and x-degree <= 3 satisfying
/// A(0, y) = y and a vanishing x*y coefficient. Each eligible monomial is
/// present with probability 1/2; a_{-1} is never empty.
inline SaddleNodeField random_field(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(0.5);
    std::vector<std::tuple<int, int, Scalar>> terms{{0, 1, Scalar(1)}};
    for (int n = 0; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            if (n == 1 && m == 1) {
                continue;
            }
            const bool forced = (n == 0 && m == 1);
            if (forced || keep(rng)) {
                Scalar c = random_rational(rng);
                if (c.is_zero()) {
                    c = Scalar(1);
                }
                terms.emplace_back(m, n, c);
            }
        }
    }
    return extract_letters(bivariate_from_terms(terms, 3, 3));
}

inline TruncatedSeries random_series(std::mt19937_64 &rng, int order, int valuation = 0)
{
    TruncatedSeries s(order);
    for (int k = valuation; k <= order; ++k) {
        s.set(k, random_rational(rng, 5, 6));
    }
    return s;
}

} // namespace mouldcalc::testing
