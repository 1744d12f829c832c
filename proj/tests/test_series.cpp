#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace mouldcalc;
using mouldcalc::testing::random_series;

namespace
{

TruncatedSeries euler_phi0(int order)
{
    TruncatedSeries s(order);
    for (int k = 1; k <= order; ++k) {
        s.set(k, -factorial(static_cast<unsigned>(k - 1)));
    }
    return s;
}

// (x^2 d/dx + mu) applied to v, at the order of v.
TruncatedSeries apply_shifted(const TruncatedSeries &v, const Scalar &mu)
{
    return euler_derivation(v).truncated(v.order()) + v * mu;
}

} // namespace

TEST_CASE("scalars are exact complex rationals")
{
    const Scalar a = Scalar::fraction(2, 4);
    CHECK(a == Scalar::fraction(1, 2));
    CHECK(a.to_string() == "1/2");
    const Scalar i(Rational(0), Rational(1));
    CHECK(i * i == Scalar(-1));
    CHECK((Scalar(1) / i) == -i);
    CHECK(Scalar(Rational(3), Rational(-2)).to_string() == "3-2i");
    CHECK(parse_rational("-6/8") == Rational(-3, 4));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("x"));
    CHECK_THROWS(Scalar(1) / Scalar(0));
    CHECK(factorial(20) == Scalar(Integer("2432902008176640000")));
}

TEST_CASE("ps_mul")
{
    CHECK(ps_mul(TruncatedSeries(2, {1, 1}), TruncatedSeries(2, {1, -1})) == TruncatedSeries(2, {1, 0, -1}));
    CHECK(ps_mul(TruncatedSeries(2, {3, 1}), TruncatedSeries(2, {1, 2})) == TruncatedSeries(2, {3, 7, 2}));

    SECTION("the result is known to the smaller order")
    {
        CHECK(ps_mul(TruncatedSeries(2, {1, 1}), TruncatedSeries(5, {1, 1})).order() == 2);
    }
    SECTION("a factor with positive valuation extends the other's order")
    {
        // x * (c_0 + ... + c_3 x^3 + O(x^4)) is known through x^4.
        const auto p = ps_mul(TruncatedSeries(9, {0, 1}), TruncatedSeries(3, {1, 2, 3, 4}));
        CHECK(p.order() == 4);
        CHECK(p == TruncatedSeries(4, {0, 1, 2, 3, 4}));
    }
    SECTION("ring axioms on random triples")
    {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const int order = 1 + trial % 12;
            const auto a = random_series(rng, order), b = random_series(rng, order), c = random_series(rng, order);
            CHECK(ps_mul(a, b) == ps_mul(b, a));
            CHECK(ps_mul(ps_mul(a, b), c) == ps_mul(a, ps_mul(b, c)));
            CHECK(ps_mul(a, b + c) == ps_mul(a, b) + ps_mul(a, c));
            CHECK(ps_mul(a, TruncatedSeries::one(order)) == a);
        }
    }
}

TEST_CASE("ps_inverse")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_series(rng, 8);
        a.set(0, Scalar(1 + trial));
        CHECK(ps_mul(a, ps_inverse(a)) == TruncatedSeries::one(8));
    }
    CHECK_THROWS_AS(ps_inverse(TruncatedSeries(3, {0, 1})), std::domain_error);
}

TEST_CASE("valuation of a truncated zero is only a lower bound")
{
    const TruncatedSeries z(4);
    CHECK_FALSE(z.valuation().has_value());
    CHECK(z.valuation_lower_bound() == 5);
    CHECK(TruncatedSeries(4, {0, 0, 3}).valuation() == 2);
}

TEST_CASE("euler_derivation")
{
    CHECK(euler_derivation(TruncatedSeries(3, {1})).is_zero());
    CHECK(euler_derivation(TruncatedSeries(3, {0, 1})) == TruncatedSeries(4, {0, 0, 1}));
    CHECK(euler_derivation(TruncatedSeries(3, {0, 2, 0, 5})) == TruncatedSeries(4, {0, 0, 2, 0, 15}));
    CHECK(euler_derivation(TruncatedSeries(3)).order() == 4);
}

TEST_CASE("solve_euler_shifted")
{
    const auto x = TruncatedSeries::monomial(10, 1);

    SECTION("mu = -1 gives the Euler series")
    {
        CHECK(solve_euler_shifted(x, Scalar(-1)) == euler_phi0(10));
    }
    SECTION("mu = 0 on x^2 gives x, one order lower")
    {
        const auto v = solve_euler_shifted(TruncatedSeries::monomial(10, 2), Scalar(0));
        CHECK(v == TruncatedSeries::monomial(9, 1));
    }
    SECTION("mu = n >= 1 on x")
    {
        for (int n = 1; n <= 4; ++n) {
            TruncatedSeries expected(10);
            Scalar c = Scalar::fraction(1, n);
            for (int k = 1; k <= 10; ++k) {
                expected.set(k, c);
                c = -(c * Scalar(k)) / Scalar(n);
            }
            CHECK(solve_euler_shifted(x, Scalar(n)) == expected);
        }
    }
    SECTION("two-sided inverse on random right-hand sides")
    {
        std::mt19937_64 rng(3);
        for (int mu = -3; mu <= 3; ++mu) {
            auto b = random_series(rng, 9, 1);
            if (mu == 0) {
                b.set(1, Scalar(0));
            }
            const auto v = solve_euler_shifted(b, Scalar(mu));
            CHECK(v[0].is_zero());
            CHECK(apply_shifted(v, Scalar(mu)) == b.truncated(v.order()));
            if (mu != 0) {
                CHECK(v.order() == b.order());
                CHECK(solve_euler_shifted(apply_shifted(v, Scalar(mu)), Scalar(mu)) == v);
            }
        }
    }
    SECTION("complex shifts")
    {
        const Scalar mu(Rational(1), Rational(2));
        const auto v = solve_euler_shifted(x, mu);
        CHECK(apply_shifted(v, mu) == x);
    }
    SECTION("precondition failures are distinct errors")
    {
        try {
            solve_euler_shifted(TruncatedSeries(3, {1}), Scalar(2));
            FAIL("expected an error");
        } catch (const ill_posed_component &e) {
            CHECK(e.why() == ill_posed_component::reason::nonzero_constant_term);
        }
        try {
            solve_euler_shifted(x, Scalar(0));
            FAIL("expected an error");
        } catch (const ill_posed_component &e) {
            CHECK(e.why() == ill_posed_component::reason::resonant_linear_term);
        }
    }
}

TEST_CASE("to_z_coeffs")
{
    CHECK(to_z_coeffs(TruncatedSeries::monomial(1, 1)) == ZSeries(std::vector<Scalar>{-1}));
    CHECK(to_z_coeffs(TruncatedSeries::monomial(2, 2)) == ZSeries(std::vector<Scalar>{0, 1}));

    const auto z = to_z_coeffs(euler_phi0(8));
    for (int k = 1; k <= 8; ++k) {
        const Scalar expected = factorial(static_cast<unsigned>(k - 1)) * Scalar(k % 2 == 1 ? 1 : -1);
        CHECK(z[k] == expected);
    }
    CHECK_THROWS_AS(to_z_coeffs(TruncatedSeries(2, {1})), std::domain_error);

    SECTION("linear, injective and invertible on stored coefficients")
    {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = random_series(rng, 7, 1), b = random_series(rng, 7, 1);
            CHECK(from_z_coeffs(to_z_coeffs(a)) == a);
            const auto za = to_z_coeffs(a), zb = to_z_coeffs(b);
            CHECK(from_z_coeffs(to_z_coeffs(a + b)) == a + b);
            CHECK(to_z_coeffs(from_z_coeffs(za)) == za);
            if (!(a == b)) {
                CHECK_FALSE(za == zb);
            }
        }
    }
    SECTION("Cauchy products correspond")
    {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = random_series(rng, 6, 1), b = random_series(rng, 6, 1);
            CHECK(to_z_coeffs(ps_mul(a, b)) == zs_mul(to_z_coeffs(a), to_z_coeffs(b)));
        }
    }
}
