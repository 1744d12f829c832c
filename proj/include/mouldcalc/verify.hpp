#pragma once

// Verification suites over finite word ranges. Each suite recomputes an
// identity through a route independent of the one under test and reports the
// first nonzero residual.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <mouldcalc/borel.hpp>
#include <mouldcalc/moulds.hpp>
#include <mouldcalc/normalisation.hpp>
#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

struct CheckOptions {
    int x_order = 6;
    int n_max = 3;
    std::size_t max_length = 4;
    Support alphabet; // empty: the field's full alphabet
    unsigned threads = 1;
};

struct CheckResult {
    std::string suite;
    std::string identity;
    std::string range;
    std::size_t checked = 0;
    bool ok = true;
    std::string failure; // first offending case
};

inline const std::vector<std::string> &suite_names()
{
    static const std::vector<std::string> names{"equation", "valuation", "symmetral", "inverse",
                                                "oracle",   "composition", "borel",   "integral"};
    return names;
}

namespace detail
{

inline std::string residual_note(const TruncatedSeries &r)
{
    return "first nonzero coefficient at x^" + std::to_string(*r.valuation()) + " (" + r[*r.valuation()].to_string()
           + ")";
}

inline std::string alphabet_text(const Support &s)
{
    return Word(std::vector<Letter>(s.begin(), s.end())).to_string();
}

inline std::vector<Word> nonempty_words(const Support &alphabet, std::size_t max_len)
{
    auto all = all_words(alphabet, max_len);
    all.erase(all.begin());
    return all;
}

// Run `residual` on every item (in parallel), report the first failure in
// item order.
template <typename Item>
void scan(CheckResult &res, const std::vector<Item> &items, unsigned threads,
          const std::function<std::optional<std::string>(const Item &)> &residual)
{
    auto outcomes = parallel_terms<std::optional<std::string>>(items.size(), threads,
                                                              [&](std::size_t i) { return residual(items[i]); });
    res.checked = items.size();
    for (auto &o : outcomes) {
        if (o) {
            res.ok = false;
            res.failure = *o;
            return;
        }
    }
}

} // namespace detail

/// Runs the named suite against `field`; V must be the solver mould at
/// opts.x_order (it may carry a preloaded memo).
inline CheckResult run_suite(const std::string &name, const SaddleNodeField &field, const Mould &v,
                             const CheckOptions &opts)
{
    const int k = opts.x_order;
    const Support alphabet = opts.alphabet.empty() ? field.alphabet() : make_support(opts.alphabet);
    const auto words = detail::nonempty_words(alphabet, opts.max_length);
    const std::string range = "words of length <= " + std::to_string(opts.max_length) + " over "
                              + detail::alphabet_text(alphabet) + ", x-order " + std::to_string(k);
    CheckResult res;
    res.suite = name;
    res.range = range;

    if (name == "equation") {
        res.identity = "x^2 dV/dx + nabla V = J_a x V";
        const Mould rhs = mould_mul(j_a_mould(field, k), v);
        detail::scan<Word>(res, words, opts.threads, [&](const Word &w) -> std::optional<std::string> {
            const auto r = residual_mould_equation(v, rhs, w);
            if (r.is_zero()) {
                return std::nullopt;
            }
            return "word " + w.to_string() + ": " + detail::residual_note(r);
        });
    } else if (name == "valuation") {
        res.identity = "val V^w >= ceil(r/2)";
        detail::scan<Word>(res, words, opts.threads, [&](const Word &w) -> std::optional<std::string> {
            const int need = static_cast<int>((w.size() + 1) / 2);
            const int got = v(w).valuation_lower_bound();
            if (got >= need) {
                return std::nullopt;
            }
            return "word " + w.to_string() + ": valuation " + std::to_string(got) + " < " + std::to_string(need);
        });
    } else if (name == "symmetral") {
        res.identity = "sum sh(w1, w2; w) V^w = V^w1 V^w2";
        std::vector<std::pair<Word, Word>> pairs;
        for (const auto &a : words) {
            for (const auto &b : words) {
                if (a.size() + b.size() <= opts.max_length) {
                    pairs.emplace_back(a, b);
                }
            }
        }
        res.range = "word pairs with r1 + r2 <= " + std::to_string(opts.max_length) + " over "
                    + detail::alphabet_text(alphabet) + ", x-order " + std::to_string(k);
        detail::scan<std::pair<Word, Word>>(res, pairs, opts.threads,
                                            [&](const std::pair<Word, Word> &p) -> std::optional<std::string> {
                                                const auto r = check_symmetral(v, p.first, p.second);
                                                if (r.is_zero()) {
                                                    return std::nullopt;
                                                }
                                                return "pair " + p.first.to_string() + ", " + p.second.to_string()
                                                       + ": " + detail::residual_note(r);
                                            });
    } else if (name == "inverse") {
        res.identity = "V x symmetral_inverse(V) = 1 and symmetral_inverse(V) = V^{-1}";
        const Mould inv = symmetral_inverse(v);
        const Mould prod = mould_mul(v, inv);
        const Mould general = mould_inverse(v);
        detail::scan<Word>(res, words, opts.threads, [&](const Word &w) -> std::optional<std::string> {
            if (const auto r = prod(w); !r.is_zero()) {
                return "product on " + w.to_string() + ": " + detail::residual_note(r);
            }
            if (const auto r = inv(w) - general(w); !r.is_zero()) {
                return "inverse on " + w.to_string() + ": " + detail::residual_note(r);
            }
            return std::nullopt;
        });
    } else if (name == "oracle") {
        res.identity = "phi_n from the mould expansion = phi_n from the PDE recursion";
        res.range = "n <= " + std::to_string(opts.n_max) + ", x-order " + std::to_string(k);
        const PhiSeries oracle = oracle_phi(field, opts.n_max, k);
        std::vector<int> ns;
        for (int n = 0; n <= opts.n_max; ++n) {
            ns.push_back(n);
        }
        detail::scan<int>(res, ns, opts.threads, [&](const int &n) -> std::optional<std::string> {
            const auto r = phi_n(field, n, k) - oracle.component(n);
            if (r.is_zero()) {
                return std::nullopt;
            }
            return "phi_" + std::to_string(n) + ": " + detail::residual_note(r);
        });
    } else if (name == "composition") {
        res.identity = "phi(x, psi(x, y)) = y";
        res.range = "x-order " + std::to_string(k) + ", y-order " + std::to_string(opts.n_max);
        const int need = opts.n_max + std::max(k - 1, 0);
        const PhiSeries phi = phi_series(field, need, k);
        const PhiSeries psi = psi_series(field, opts.n_max, k);
        const BivariateSeries r = compose_check(phi, psi, k, opts.n_max);
        res.checked = static_cast<std::size_t>((k + 1) * (opts.n_max + 1));
        if (!r.is_zero()) {
            const auto [m, n, c] = r.nonzero_terms().front();
            res.ok = false;
            res.failure = "nonzero x^" + std::to_string(m) + " y^" + std::to_string(n) + " coefficient "
                          + c.to_string();
        }
    } else if (name == "borel") {
        res.identity = "nested Borel formula = Borel transform of the x-route";
        const int z = std::max(k - 1, 0);
        std::vector<Word> short_words;
        std::copy_if(words.begin(), words.end(), std::back_inserter(short_words),
                     [](const Word &w) { return w.size() <= 4; });
        res.range = "words of length <= " + std::to_string(std::min<std::size_t>(opts.max_length, 4)) + " over "
                    + detail::alphabet_text(alphabet) + " and phi_n, n <= " + std::to_string(opts.n_max)
                    + ", zeta-order " + std::to_string(z);
        if (k >= 1) {
            detail::scan<Word>(res, short_words, opts.threads, [&](const Word &w) -> std::optional<std::string> {
                const auto r = borel_V(field, w, z) - borel(to_z_coeffs(v(w)));
                if (r.is_zero()) {
                    return std::nullopt;
                }
                return "word " + w.to_string() + ": " + detail::residual_note(r.series());
            });
            for (int n = 0; res.ok && n <= opts.n_max; ++n, ++res.checked) {
                const auto r = borel_phi_n(field, n, z) - borel(to_z_coeffs(phi_n(field, n, k)));
                if (!r.is_zero()) {
                    res.ok = false;
                    res.failure = "phi_hat_" + std::to_string(n) + ": " + detail::residual_note(r.series());
                }
            }
        }
    } else if (name == "integral") {
        res.identity = "Y = u e^z + sum u^n e^{nz} phi_n(-1/z) solves dY/dz = A(-1/z, Y)";
        res.range = "u-order " + std::to_string(opts.n_max) + ", z-order " + std::to_string(k);
        const auto r = formal_integral_residual(field, phi_series(field, opts.n_max, k), opts.n_max, k);
        res.checked = r.rows.size();
        if (auto first = r.first_nonzero()) {
            res.ok = false;
            res.failure = "coefficient of u^" + std::to_string(first->first) + " z^-" + std::to_string(first->second)
                          + " is " + r.rows[static_cast<std::size_t>(first->first)][first->second].to_string();
        }
    } else {
        throw std::invalid_argument("unknown suite '" + name + "'");
    }
    return res;
}

} // namespace mouldcalc
