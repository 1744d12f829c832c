#pragma once

// Moulds over C[[x]]: maps from words to truncated series, with the mould
// product, inverses, the nabla operator, the solver for the normalising mould
// V and residual checkers for symmetrality, alternality and the mould equation.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

enum class provenance { solver, constructed, derived };

inline const char *provenance_name(provenance p)
{
    switch (p) {
    case provenance::solver:
        return "solver";
    case provenance::constructed:
        return "constructed";
    case provenance::derived:
        return "derived";
    }
    return "unknown";
}

class Mould;

/// Raised when the solver meets a weight-zero word whose right-hand side is
/// not in x^2 C[[x]]. Valid fields never trigger it.
class ill_posed_word : public std::logic_error
{
public:
    ill_posed_word(const Word &w, const std::string &why)
        : std::logic_error("ill-posed word " + w.to_string() + ": " + why), word_(w)
    {
    }
    const Word &word() const noexcept { return word_; }

private:
    Word word_;
};

class non_invertible_mould : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A lazily evaluated, memoizing map from words to series known to a fixed
/// x-order. Copies share the evaluator and the memo table.
///
/// The memo allows concurrent lookups; insertions take an exclusive lock.
/// Evaluators may recurse into the same mould (the lock is not held while
/// evaluating), and every value is a pure function of the word, so results do
/// not depend on evaluation order.
class Mould
{
public:
    using evaluator = std::function<TruncatedSeries(const Word &, const Mould &)>;

    Mould(int x_order, provenance origin, evaluator eval)
        : state_(std::make_shared<state>(x_order, origin, std::move(eval)))
    {
        if (x_order < 0) {
            throw std::invalid_argument("mould x-order must be nonnegative");
        }
    }

    int x_order() const noexcept { return state_->x_order; }
    provenance origin() const noexcept { return state_->origin; }

    TruncatedSeries operator()(const Word &w) const
    {
        {
            std::shared_lock lock(state_->mutex);
            if (auto it = state_->memo.find(w); it != state_->memo.end()) {
                return it->second;
            }
        }
        TruncatedSeries value = state_->eval(w, *this).truncated(state_->x_order);
        if (value.order() < state_->x_order) {
            throw std::logic_error("mould value on " + w.to_string() + " known only to order "
                                   + std::to_string(value.order()));
        }
        std::unique_lock lock(state_->mutex);
        auto [it, inserted] = state_->memo.emplace(w, std::move(value));
        return it->second;
    }

    /// Seed the memo (e.g. from a cache file). Existing entries are kept.
    void preload(const Word &w, TruncatedSeries value) const
    {
        if (value.order() < state_->x_order) {
            throw std::invalid_argument("preloaded value has a lower order than the mould");
        }
        std::unique_lock lock(state_->mutex);
        state_->memo.emplace(w, value.truncated(state_->x_order));
    }

    /// Memoized entries in canonical word order.
    std::vector<std::pair<Word, TruncatedSeries>> memo_snapshot() const
    {
        std::shared_lock lock(state_->mutex);
        return {state_->memo.begin(), state_->memo.end()};
    }

    std::size_t memo_size() const
    {
        std::shared_lock lock(state_->mutex);
        return state_->memo.size();
    }

private:
    struct state {
        state(int k, provenance p, evaluator e) : x_order(k), origin(p), eval(std::move(e)) {}
        int x_order;
        provenance origin;
        evaluator eval;
        mutable std::shared_mutex mutex;
        std::map<Word, TruncatedSeries> memo;
    };
    std::shared_ptr<state> state_;
};

/// 1 on the empty word, 0 elsewhere.
inline Mould unit_mould(int x_order)
{
    return Mould(x_order, provenance::constructed, [x_order](const Word &w, const Mould &) {
        return w.empty() ? TruncatedSeries::one(x_order) : TruncatedSeries(x_order);
    });
}

/// Finitely supported mould given by a table; zero off the table.
inline Mould table_mould(int x_order, std::map<Word, TruncatedSeries> table)
{
    return Mould(x_order, provenance::constructed,
                 [x_order, t = std::move(table)](const Word &w, const Mould &) {
                     auto it = t.find(w);
                     return it == t.end() ? TruncatedSeries(x_order) : it->second;
                 });
}

/// Mould given by an arbitrary function of the word.
inline Mould function_mould(int x_order, std::function<TruncatedSeries(const Word &)> f)
{
    return Mould(x_order, provenance::constructed, [f = std::move(f)](const Word &w, const Mould &) { return f(w); });
}

namespace detail
{

inline void require_same_order(const Mould &m, const Mould &n)
{
    if (m.x_order() != n.x_order()) {
        throw std::invalid_argument("moulds have different x-orders");
    }
}

} // namespace detail

/// (M x N)^w = sum over the r(w) + 1 splittings w = w1.w2 of M^{w1} N^{w2}.
inline Mould mould_mul(const Mould &m, const Mould &n)
{
    detail::require_same_order(m, n);
    const int k = m.x_order();
    return Mould(k, provenance::derived, [m, n, k](const Word &w, const Mould &) {
        TruncatedSeries acc(k);
        for (std::size_t i = 0; i <= w.size(); ++i) {
            acc += ps_mul(m(w.prefix(i)), n(w.suffix_from(i))).truncated(k);
        }
        return acc;
    });
}

/// Multiplicative inverse, by recursion on length:
/// W^{w} = -(M^{empty})^{-1} sum_{w = w1.w2, w1 != empty} M^{w1} W^{w2}.
inline Mould mould_inverse(const Mould &m)
{
    const int k = m.x_order();
    const TruncatedSeries m0 = m(Word{});
    if (m0[0].is_zero()) {
        throw non_invertible_mould("mould is not invertible: its value on the empty word has no constant term");
    }
    const TruncatedSeries inv0 = ps_inverse(m0);
    return Mould(k, provenance::derived, [m, k, inv0](const Word &w, const Mould &self) {
        if (w.empty()) {
            return inv0;
        }
        TruncatedSeries acc(k);
        for (std::size_t i = 1; i <= w.size(); ++i) {
            acc += ps_mul(m(w.prefix(i)), self(w.suffix_from(i))).truncated(k);
        }
        return -ps_mul(inv0, acc).truncated(k);
    });
}

/// w -> (-1)^{r(w)} M^{reversed w}. Equals the inverse when M is symmetral.
inline Mould symmetral_inverse(const Mould &m)
{
    return Mould(m.x_order(), provenance::derived, [m](const Word &w, const Mould &) {
        TruncatedSeries v = m(w.reversed());
        return (w.size() % 2 == 0) ? v : -v;
    });
}

/// J_a: a_{n_1} on one-letter words, 0 elsewhere.
inline Mould j_a_mould(const SaddleNodeField &field, int x_order)
{
    return Mould(x_order, provenance::constructed, [field, x_order](const Word &w, const Mould &) {
        return w.size() == 1 ? field.letter(w.front(), x_order) : TruncatedSeries(x_order);
    });
}

/// Multiply the value on each word by its weight; zero on the empty word.
inline Mould nabla(const Mould &m)
{
    return Mould(m.x_order(), provenance::derived, [m](const Word &w, const Mould &) {
        if (w.empty()) {
            return TruncatedSeries(m.x_order());
        }
        return m(w) * Scalar(w.weight());
    });
}

/// The normalising mould: the unique solution of
/// x^2 dV/dx + nabla V = J_a x V with V^{empty} = 1, V^w in x C[[x]].
///
/// On w = (n_1, ..., n_r): (x^2 d/dx + |w|) V^w = a_{n_1} V^{(n_2, ..., n_r)}.
/// Letters are read one x-order beyond the mould's, so resonant (|w| = 0)
/// steps, which lose one order, still land at the full order.
inline Mould solve_V(const SaddleNodeField &field, int x_order)
{
    auto letters = std::make_shared<std::map<Letter, TruncatedSeries>>();
    for (auto n : field.support()) {
        letters->emplace(n, field.letter(n, x_order + 1));
    }
    return Mould(x_order, provenance::solver, [letters, x_order](const Word &w, const Mould &self) {
        if (w.empty()) {
            return TruncatedSeries::one(x_order);
        }
        auto it = letters->find(w.front());
        if (it == letters->end()) {
            return TruncatedSeries(x_order);
        }
        TruncatedSeries rhs = (w.size() == 1) ? it->second : ps_mul(it->second, self(w.tail()));
        try {
            return solve_euler_shifted(rhs, Scalar(w.weight()));
        } catch (const ill_posed_component &e) {
            throw ill_posed_word(w, e.what());
        }
    });
}

/// sum_w sh(w1, w2; w) M^w - M^{w1} M^{w2}; zero iff the symmetrality
/// relation holds for this pair.
inline TruncatedSeries check_symmetral(const Mould &m, const Word &w1, const Word &w2)
{
    if (w1.empty() || w2.empty()) {
        throw std::invalid_argument("check_symmetral needs two non-empty words");
    }
    const int k = m.x_order();
    TruncatedSeries acc(k);
    for (const auto &w : shuffle_support(w1, w2)) {
        acc += m(w) * Scalar(static_cast<long>(shuffle_coeff(w1, w2, w)));
    }
    return acc - ps_mul(m(w1), m(w2)).truncated(k);
}

/// sum_w sh(w1, w2; w) M^w; zero iff the alternality relation holds for this pair.
inline TruncatedSeries check_alternal(const Mould &m, const Word &w1, const Word &w2)
{
    if (w1.empty() || w2.empty()) {
        throw std::invalid_argument("check_alternal needs two non-empty words");
    }
    TruncatedSeries acc(m.x_order());
    for (const auto &w : shuffle_support(w1, w2)) {
        acc += m(w) * Scalar(static_cast<long>(shuffle_coeff(w1, w2, w)));
    }
    return acc;
}

/// x^2 dV^w/dx + |w| V^w - (J_a x V)^w, with the right side recomputed
/// through the general mould product.
inline TruncatedSeries residual_mould_equation(const Mould &v, const SaddleNodeField &field, const Word &w)
{
    if (w.empty()) {
        throw std::invalid_argument("the mould equation is checked on non-empty words");
    }
    const int k = v.x_order();
    const Mould rhs = mould_mul(j_a_mould(field, k), v);
    const TruncatedSeries vw = v(w);
    return euler_derivation(vw).truncated(k) + vw * Scalar(w.weight()) - rhs(w);
}

/// Same as above with a caller-provided J_a x V product (so repeated checks
/// share its memo table).
inline TruncatedSeries residual_mould_equation(const Mould &v, const Mould &ja_times_v, const Word &w)
{
    const int k = v.x_order();
    const TruncatedSeries vw = v(w);
    return euler_derivation(vw).truncated(k) + vw * Scalar(w.weight()) - ja_times_v(w);
}

} // namespace mouldcalc
