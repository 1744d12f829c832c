#pragma once

// The free monoid over the alphabet {n in Z : n >= -1}: words, weights,
// shuffle coefficients, beta coefficients and the finite word enumerations
// used by the mould expansion.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mouldcalc/scalar.hpp>

namespace mouldcalc
{

using Letter = int;

inline constexpr Letter min_letter = -1;

/// A finite sequence of letters >= -1. Ordered by length, then
/// lexicographically, so containers of words iterate deterministically.
class Word
{
public:
    Word() = default;
    Word(std::initializer_list<Letter> letters) : letters_(letters) { check(); }
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) { check(); }

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_.at(i); }
    Letter front() const { return letters_.at(0); }
    auto begin() const noexcept { return letters_.begin(); }
    auto end() const noexcept { return letters_.end(); }
    std::span<const Letter> letters() const noexcept { return letters_; }

    /// n_1 + ... + n_r.
    long weight() const noexcept
    {
        long w = 0;
        for (auto n : letters_) {
            w += n;
        }
        return w;
    }

    /// Letters [first, first + count).
    Word slice(std::size_t first, std::size_t count) const
    {
        if (first + count > size()) {
            throw std::out_of_range("word slice out of range");
        }
        return Word(std::vector<Letter>(letters_.begin() + static_cast<std::ptrdiff_t>(first),
                                        letters_.begin() + static_cast<std::ptrdiff_t>(first + count)));
    }

    Word prefix(std::size_t len) const { return slice(0, len); }
    Word suffix_from(std::size_t first) const { return slice(first, size() - first); }

    /// (n_2, ..., n_r); the tail of the empty word is an error.
    Word tail() const
    {
        if (empty()) {
            throw std::logic_error("tail of the empty word");
        }
        return suffix_from(1);
    }

    Word reversed() const { return Word(std::vector<Letter>(letters_.rbegin(), letters_.rend())); }

    Word prepended(Letter n) const
    {
        std::vector<Letter> l;
        l.reserve(size() + 1u);
        l.push_back(n);
        l.insert(l.end(), letters_.begin(), letters_.end());
        return Word(std::move(l));
    }

    friend Word operator+(const Word &a, const Word &b)
    {
        std::vector<Letter> l(a.letters_);
        l.insert(l.end(), b.letters_.begin(), b.letters_.end());
        return Word(std::move(l));
    }

    friend bool operator==(const Word &, const Word &) = default;
    friend auto operator<=>(const Word &a, const Word &b)
    {
        if (auto c = a.size() <=> b.size(); c != 0) {
            return c;
        }
        return a.letters_ <=> b.letters_;
    }

    std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (i) {
                s += ',';
            }
            s += std::to_string(letters_[i]);
        }
        return s + ")";
    }

private:
    void check() const
    {
        for (auto n : letters_) {
            if (n < min_letter) {
                throw std::invalid_argument("letter " + std::to_string(n) + " is below -1");
            }
        }
    }

    std::vector<Letter> letters_;
};

inline long weight(const Word &w) noexcept { return w.weight(); }

/// Number of order-preserving interleavings of w1 and w2 that spell w.
/// Dynamic programming over prefix pairs: ways[i][j] counts the ways the first
/// i letters of w1 and j letters of w2 spell the first i + j letters of w.
inline std::uint64_t shuffle_coeff(const Word &w1, const Word &w2, const Word &w)
{
    const std::size_t r1 = w1.size(), r2 = w2.size();
    if (r1 + r2 != w.size()) {
        return 0;
    }
    std::vector<std::vector<std::uint64_t>> ways(r1 + 1, std::vector<std::uint64_t>(r2 + 1, 0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i <= r1; ++i) {
        for (std::size_t j = 0; j <= r2; ++j) {
            if (i == 0 && j == 0) {
                continue;
            }
            const Letter target = w[i + j - 1];
            std::uint64_t n = 0;
            if (i > 0 && w1[i - 1] == target) {
                n += ways[i - 1][j];
            }
            if (j > 0 && w2[j - 1] == target) {
                n += ways[i][j - 1];
            }
            ways[i][j] = n;
        }
    }
    return ways[r1][r2];
}

/// Distinct words occurring in the shuffle of w1 and w2, in canonical order.
inline std::vector<Word> shuffle_support(const Word &w1, const Word &w2)
{
    std::set<Word> out;
    std::vector<Letter> buf;
    buf.reserve(w1.size() + w2.size());
    auto rec = [&](auto &&self, std::size_t i, std::size_t j) -> void {
        if (i == w1.size() && j == w2.size()) {
            out.insert(Word(buf));
            return;
        }
        if (i < w1.size()) {
            buf.push_back(w1[i]);
            self(self, i + 1, j);
            buf.pop_back();
        }
        if (j < w2.size()) {
            buf.push_back(w2[j]);
            self(self, i, j + 1);
            buf.pop_back();
        }
    };
    rec(rec, 0, 0);
    return {out.begin(), out.end()};
}

/// beta_w = (n_1 + 1)(n_1 + n_2 + 1)...(n_1 + ... + n_{r-1} + 1), the scalar
/// with B_w y = beta_w y^{|w| + 1}. Equal to 1 for one-letter words.
inline Integer beta(const Word &w)
{
    if (w.empty()) {
        throw std::invalid_argument("beta is undefined on the empty word");
    }
    Integer b = 1;
    long prefix = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        prefix += w[i];
        b *= prefix + 1;
        if (b == 0) {
            break;
        }
    }
    return b;
}

/// Sorted, deduplicated letter set.
using Support = std::vector<Letter>;

inline Support make_support(std::vector<Letter> letters)
{
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    for (auto n : letters) {
        if (n < min_letter) {
            throw std::invalid_argument("support letter below -1");
        }
    }
    return letters;
}

/// Longest word that can contribute to an x-order-K computation:
/// V^w lies in x^{ceil(r/2)} C[[x]], so r <= 2K.
inline std::size_t max_word_length(int x_order) noexcept
{
    return x_order <= 0 ? 0u : static_cast<std::size_t>(2 * x_order);
}

namespace detail
{

// Can `remaining` letters from [lo, hi] add up to `need`?
inline bool reachable(long need, std::size_t remaining, long lo, long hi) noexcept
{
    const auto r = static_cast<long>(remaining);
    return need >= lo * r && need <= hi * r;
}

// Can at most `remaining` letters from [lo, hi] add up to `need`?
inline bool reachable_within(long need, std::size_t remaining, long lo, long hi) noexcept
{
    for (std::size_t j = 0; j <= remaining; ++j) {
        if (reachable(need, j, lo, hi)) {
            return true;
        }
    }
    return false;
}

} // namespace detail

/// All non-empty words over `support` of weight n - 1 and length at most 2K.
/// These are the words entering the component phi_n at x-order K.
inline std::vector<Word> enumerate_words(int n, int x_order, const Support &support_in)
{
    const Support support = make_support(support_in);
    std::vector<Word> out;
    if (support.empty()) {
        return out;
    }
    const long target = n - 1;
    const long lo = support.front(), hi = support.back();
    const std::size_t max_len = max_word_length(x_order);
    std::vector<Letter> buf;
    for (std::size_t len = 1; len <= max_len; ++len) {
        if (!detail::reachable(target, len, lo, hi)) {
            continue;
        }
        buf.clear();
        auto rec = [&](auto &&self, long sum) -> void {
            if (buf.size() == len) {
                if (sum == target) {
                    out.emplace_back(buf);
                }
                return;
            }
            for (auto letter : support) {
                if (!detail::reachable(target - sum - letter, len - buf.size() - 1, lo, hi)) {
                    continue;
                }
                buf.push_back(letter);
                self(self, sum + letter);
                buf.pop_back();
            }
        };
        rec(rec, 0);
    }
    return out;
}

/// Size of enumerate_words(n, x_order, support), counted without listing.
inline Integer count_words(int n, int x_order, const Support &support_in)
{
    const Support support = make_support(support_in);
    Integer total = 0;
    if (support.empty()) {
        return total;
    }
    const long target = n - 1;
    const std::size_t max_len = max_word_length(x_order);
    const long lo = support.front(), hi = support.back();
    // ways[s - offset] = number of words of the current length with weight s.
    const long offset = std::min(lo, 0L) * static_cast<long>(max_len);
    const long span_len = (std::max(hi, 0L) - std::min(lo, 0L)) * static_cast<long>(max_len) + 1;
    std::vector<Integer> ways(static_cast<std::size_t>(span_len), 0);
    ways[static_cast<std::size_t>(-offset)] = 1; // empty word, weight 0
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<Integer> next(ways.size(), 0);
        for (long s = 0; s < span_len; ++s) {
            if (ways[static_cast<std::size_t>(s)] == 0) {
                continue;
            }
            for (auto letter : support) {
                const long t = s + letter;
                if (t >= 0 && t < span_len) {
                    next[static_cast<std::size_t>(t)] += ways[static_cast<std::size_t>(s)];
                }
            }
        }
        ways = std::move(next);
        const long idx = target - offset;
        if (idx >= 0 && idx < span_len) {
            total += ways[static_cast<std::size_t>(idx)];
        }
    }
    return total;
}

/// All words (including the empty one) with weight(w) + 2 r(w) <= delta.
/// Each letter contributes n_i + 2 >= 1, so the set is finite.
inline std::vector<Word> enumerate_bounded_weight(int delta)
{
    std::vector<Word> out;
    if (delta < 0) {
        return out;
    }
    std::vector<Letter> buf;
    auto rec = [&](auto &&self, int budget) -> void {
        out.emplace_back(buf);
        for (Letter n = min_letter; n + 2 <= budget; ++n) {
            buf.push_back(n);
            self(self, budget - (n + 2));
            buf.pop_back();
        }
    };
    rec(rec, delta);
    std::sort(out.begin(), out.end());
    return out;
}

/// All words of length 0..max_len over `support`, in canonical order.
inline std::vector<Word> all_words(const Support &support_in, std::size_t max_len)
{
    const Support support = make_support(support_in);
    std::vector<Word> out{Word{}};
    std::vector<Word> layer{Word{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<Word> next;
        next.reserve(layer.size() * support.size());
        for (const auto &w : layer) {
            for (auto n : support) {
                next.push_back(w + Word{n});
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

} // namespace mouldcalc
