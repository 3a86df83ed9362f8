#pragma once

/**
 * @file periodicity.hpp
 * @brief Periodicity of finite words and tail detection on stream prefixes.
 *
 * A word a_1..a_n is finite-periodic with period k when k < n, a_{i+k} = a_i
 * on the whole overlap, and no smaller shift works. Its first k symbols are
 * the finite-fundamental string. The minimal k is n minus the longest proper
 * border, so a prefix-function pass finds it in linear time.
 *
 * Eventual periodicity is a property of infinite sequences; on a finite
 * prefix we can only report the smallest (period, preperiod) pair whose
 * periodic tail repeats at least `min_reps` times inside the prefix.
 */

#include "weave/symbol.hpp"

#include <cassert>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace weave {

struct FinitePeriodicity {
    std::size_t period{};
    Word fundamental;

    bool operator==(FinitePeriodicity const&) const = default;
};

struct EventualPeriodicity {
    std::size_t preperiod{};
    std::size_t period{};
    Word fundamental;

    bool operator==(EventualPeriodicity const&) const = default;
};

namespace detail {

    // Longest proper border of the whole word (KMP failure value at n-1).
    inline std::size_t longest_border(std::span<Symbol const> word) {
        std::vector<std::size_t> fail(word.size(), 0);
        for (std::size_t i = 1; i < word.size(); ++i) {
            std::size_t b = fail[i - 1];
            while (b > 0 && word[i] != word[b]) {
                b = fail[b - 1];
            }
            if (word[i] == word[b]) {
                ++b;
            }
            fail[i] = b;
        }
        return word.empty() ? 0 : fail.back();
    }

} // namespace detail

/// Minimal period of a nonempty word, or nullopt when the word is not
/// finite-periodic. Words of length 1 never are.
inline std::optional<FinitePeriodicity> minimal_period(std::span<Symbol const> word) {
    assert(!word.empty() && "minimal_period requires a nonempty word");
    if (word.size() < 2) {
        return std::nullopt;
    }
    std::size_t const border = detail::longest_border(word);
    if (border == 0) {
        return std::nullopt;
    }
    std::size_t const period = word.size() - border;
    return FinitePeriodicity{period, Word(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(period))};
}

/// Random access into symbols emitted before the block, by position from the
/// start of the periodic run.
template <typename F>
concept Lookback = std::invocable<F const&, std::size_t>
    && std::convertible_to<std::invoke_result_t<F const&, std::size_t>, Symbol>;

/**
 * Whether appending `block` to a run of length `run_len` whose finite-fundamental
 * string is `fp.fundamental` keeps that fundamental string.
 *
 * Any period of the longer word is a period of the run, so the minimal period
 * cannot drop below fp.period; checking the shift by fp.period over the new
 * symbols is therefore enough. `lookback(j)` is only queried for
 * j in [run_len - fp.period, run_len).
 */
template <Lookback F>
bool extends_with(FinitePeriodicity const& fp, std::size_t run_len, std::span<Symbol const> block, F const& lookback) {
    std::size_t const p = fp.period;
    assert(p > 0 && p < run_len);
    for (std::size_t t = 0; t < block.size(); ++t) {
        Symbol const earlier = t >= p ? block[t - p] : static_cast<Symbol>(lookback(run_len + t - p));
        if (block[t] != earlier) {
            return false;
        }
    }
    return true;
}

/**
 * Smallest period m <= max_period, then smallest preperiod r <= max_preperiod,
 * such that prefix[j] == prefix[j + m] for every j >= r inside the prefix and
 * the tail from r holds at least min_reps * m symbols.
 */
inline std::optional<EventualPeriodicity> detect_tail(std::span<Symbol const> prefix, std::size_t max_preperiod,
                                                      std::size_t max_period, std::size_t min_reps = 3) {
    assert(min_reps >= 2);
    std::size_t const n = prefix.size();
    for (std::size_t m = 1; m <= max_period && m * min_reps <= n; ++m) {
        // Scan backwards for the last position where the shift fails.
        std::size_t r = 0;
        for (std::size_t j = n - m; j-- > 0;) {
            if (prefix[j] != prefix[j + m]) {
                r = j + 1;
                break;
            }
        }
        if (r <= max_preperiod && n - r >= min_reps * m) {
            auto const first = prefix.begin() + static_cast<std::ptrdiff_t>(r);
            return EventualPeriodicity{r, m, Word(first, first + static_cast<std::ptrdiff_t>(m))};
        }
    }
    return std::nullopt;
}

} // namespace weave
