#include <catch_amalgamated.hpp>

#include <atomic>
#include <random>
#include <thread>

#include "support.hpp"

using namespace mouldcalc;
using namespace mouldcalc::testing;

namespace
{

// A mould with random values on the words up to length 4 over {-1, 0, 1}.
Mould random_mould(std::uint64_t seed, int order, bool unit_on_empty)
{
    std::mt19937_64 rng(seed);
    std::map<Word, TruncatedSeries> table;
    for (const auto &w : all_words({-1, 0, 1}, 4)) {
        table.emplace(w, random_series(rng, order, w.empty() ? 0 : 1));
    }
    if (unit_on_empty) {
        table[Word{}] = TruncatedSeries::one(order);
    } else {
        auto e = table[Word{}];
        e.set(0, Scalar(2));
        table[Word{}] = e;
    }
    return table_mould(order, table);
}

TruncatedSeries alternating_factorials(int order)
{
    TruncatedSeries s(order);
    for (int k = 1; k <= order; ++k) {
        s.set(k, factorial(static_cast<unsigned>(k - 1)) * Scalar(k % 2 == 1 ? 1 : -1));
    }
    return s;
}

} // namespace

TEST_CASE("mould_mul")
{
    const int k = 5;
    const Mould m = random_mould(1, k, false), n = random_mould(2, k, true), p = random_mould(3, k, true);
    const Mould mn = mould_mul(m, n);
    const Word a{0}, ab{0, 1};
    CHECK(mn(a) == ps_mul(m(Word{}), n(a)).truncated(k) + ps_mul(m(a), n(Word{})).truncated(k));
    CHECK(mn(ab) == ps_mul(m(Word{}), n(ab)).truncated(k) + ps_mul(m(a), n(Word{1})).truncated(k)
                        + ps_mul(m(ab), n(Word{})).truncated(k));

    const Mould unit = unit_mould(k);
    const Mould left = mould_mul(mould_mul(m, n), p), right = mould_mul(m, mould_mul(n, p));
    for (const auto &w : all_words({-1, 0, 1}, 4)) {
        REQUIRE(mould_mul(m, unit)(w) == m(w));
        REQUIRE(mould_mul(unit, m)(w) == m(w));
        REQUIRE(left(w) == right(w));
    }
    CHECK_THROWS_AS(mould_mul(m, unit_mould(k + 1)), std::invalid_argument);
}

TEST_CASE("mould_inverse")
{
    const int k = 5;
    const Mould unit = unit_mould(k);
    for (const auto &w : all_words({0, 1}, 3)) {
        CHECK(mould_inverse(unit)(w) == unit(w));
    }

    SECTION("single-letter mould")
    {
        const TruncatedSeries f(k, {0, 1, 2});
        const Mould m = table_mould(k, {{Word{}, TruncatedSeries::one(k)}, {Word{0}, f}});
        const Mould inv = mould_inverse(m);
        CHECK(inv(Word{0}) == -f);
        CHECK(inv(Word{0, 0}) == ps_mul(f, f).truncated(k));
        CHECK(inv(Word{0, 0, 0}) == -ps_mul(f, ps_mul(f, f)).truncated(k));
    }
    SECTION("length-two formula")
    {
        const Mould m = random_mould(4, k, true);
        const Mould inv = mould_inverse(m);
        const Word a{-1}, b{1};
        CHECK(inv(a + b) == ps_mul(m(a), m(b)).truncated(k) - m(a + b));
    }
    SECTION("two-sided on random moulds")
    {
        const Mould m = random_mould(5, k, false);
        const Mould inv = mould_inverse(m);
        const Mould l = mould_mul(m, inv), r = mould_mul(inv, m);
        for (const auto &w : all_words({-1, 0, 1}, 4)) {
            REQUIRE(l(w) == unit(w));
            REQUIRE(r(w) == unit(w));
        }
    }
    SECTION("J_a is not invertible")
    {
        CHECK_THROWS_AS(mould_inverse(j_a_mould(euler_field(), k)), non_invertible_mould);
    }
}

TEST_CASE("symmetral_inverse, J_a and nabla")
{
    const int k = 4;
    const Mould m = random_mould(6, k, true);
    const Mould s = symmetral_inverse(m);
    CHECK(s(Word{1}) == -m(Word{1}));
    CHECK(s(Word{0, 1}) == m(Word{1, 0}));
    CHECK(s(Word{-1, 0, 1}) == -m(Word{1, 0, -1}));

    const Mould ja = j_a_mould(euler_field(), k);
    CHECK(ja(Word{-1}) == TruncatedSeries::monomial(k, 1));
    CHECK(ja(Word{}).is_zero());
    CHECK(ja(Word{0, 1}).is_zero());

    const Mould nm = nabla(m);
    CHECK(nm(Word{}).is_zero());
    CHECK(nm(Word{2}) == m(Word{2}) * Scalar(2));
    CHECK(nm(Word{-1, -1}) == m(Word{-1, -1}) * Scalar(-2));
}

TEST_CASE("solve_V")
{
    const int k = 10;
    SECTION("Euler field")
    {
        const Mould v = solve_V(euler_field(), k);
        CHECK(v(Word{}) == TruncatedSeries::one(k));
        TruncatedSeries phi0(k);
        for (int j = 1; j <= k; ++j) {
            phi0.set(j, -factorial(static_cast<unsigned>(j - 1)));
        }
        CHECK(v(Word{-1}) == phi0);
        CHECK(v.origin() == provenance::solver);
    }
    SECTION("a_1 = x")
    {
        const Mould v = solve_V(field_of({{0, 1, Scalar(1)}, {1, 2, Scalar(1)}}), k);
        CHECK(v(Word{1}) == alternating_factorials(k));
    }
    SECTION("values lie in x C[[x]] and memoisation is stable")
    {
        const auto f = quadratic_field();
        const Mould v = solve_V(f, 6);
        for (const auto &w : all_words(f.support(), 3)) {
            if (!w.empty()) {
                REQUIRE(v(w)[0].is_zero());
            }
            REQUIRE(v(w) == v(w));
        }
        CHECK(v.memo_size() > 0);
    }
    SECTION("concurrent evaluation gives the same values")
    {
        const auto f = quadratic_field();
        const auto words = all_words(f.support(), 4);
        const Mould serial = solve_V(f, 6);
        const Mould shared = solve_V(f, 6);
        std::vector<std::thread> pool;
        std::atomic<bool> mismatch{false};
        for (unsigned t = 0; t < 4; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < words.size(); i += 4) {
                    (void)shared(words[words.size() - 1 - i]);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
        for (const auto &w : words) {
            if (!(serial(w) == shared(w))) {
                mismatch = true;
            }
        }
        CHECK_FALSE(mismatch);
    }
    SECTION("preloaded values are served from the memo")
    {
        const Mould v = solve_V(euler_field(), 3);
        const TruncatedSeries fake(3, {0, 7});
        v.preload(Word{-1}, fake);
        CHECK(v(Word{-1}) == fake);
        CHECK_THROWS_AS(v.preload(Word{-1, -1}, TruncatedSeries(2)), std::invalid_argument);
    }
}

TEST_CASE("symmetrality and alternality checkers")
{
    const int k = 6;
    const auto f = quadratic_field();
    const Mould v = solve_V(f, k);

    CHECK(check_symmetral(v, Word{0}, Word{0}).is_zero());
    CHECK(v(Word{0, 0}) * Scalar(2) == ps_mul(v(Word{0}), v(Word{0})).truncated(k));

    const Mould ones = function_mould(k, [k](const Word &) { return TruncatedSeries::one(k); });
    CHECK(check_symmetral(ones, Word{1}, Word{2}) == TruncatedSeries::one(k));

    const Mould ja = j_a_mould(f, k);
    for (const auto &a : all_words(f.support(), 2)) {
        for (const auto &b : all_words(f.support(), 2)) {
            if (!a.empty() && !b.empty()) {
                REQUIRE(check_alternal(ja, a, b).is_zero());
            }
        }
    }
    const auto va = check_alternal(v, Word{0}, Word{0});
    CHECK(va == v(Word{0, 0}) * Scalar(2));
    CHECK_FALSE(va.is_zero());

    CHECK_THROWS_AS(check_symmetral(v, Word{}, Word{0}), std::invalid_argument);
}

TEST_CASE("mould equation residual")
{
    const int k = 8;
    for (const auto &f : {euler_field(), quadratic_field(), gaussian_field()}) {
        const Mould v = solve_V(f, k);
        for (const auto &w : all_words(f.alphabet(), 3)) {
            if (!w.empty()) {
                REQUIRE(residual_mould_equation(v, f, w).is_zero());
            }
        }
    }
    SECTION("Euler, word (-1): (x^2 d/dx - 1) V = x")
    {
        const auto f = euler_field();
        const Mould v = solve_V(f, k);
        const auto vw = v(Word{-1});
        CHECK(euler_derivation(vw).truncated(k) - vw == TruncatedSeries::monomial(k, 1));
    }
    SECTION("a perturbed value breaks the equation on that word")
    {
        const auto f = quadratic_field();
        const Mould v = solve_V(f, k);
        const Word target{1, -1};
        const Mould bent = function_mould(k, [&](const Word &w) {
            auto s = v(w);
            if (w == target) {
                s.set(3, s[3] + Scalar(1));
            }
            return s;
        });
        CHECK_FALSE(residual_mould_equation(bent, f, target).is_zero());
        CHECK(residual_mould_equation(bent, f, Word{1}).is_zero());
    }
}
