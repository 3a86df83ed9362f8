#pragma once

// Brute-force reference implementations. These deliberately share no code
// paths with the library beyond the Symbol type.

#include "weave/symbol.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace weave::oracle {

/// Every shift h = 1..n-1, smallest first.
inline std::optional<std::pair<std::size_t, Word>> minimal_period(std::span<Symbol const> t) {
    std::size_t const n = t.size();
    for (std::size_t h = 1; h < n; ++h) {
        bool ok = true;
        for (std::size_t i = 0; i + h < n; ++i) {
            if (t[i + h] != t[i]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return std::pair{h, Word(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(h))};
        }
    }
    return std::nullopt;
}

struct Tail {
    std::size_t preperiod;
    std::size_t period;
    Word fundamental;
    bool operator==(Tail const&) const = default;
};

/// Double loop over (m, r); for each pair, checks every position forward.
inline std::optional<Tail> detect_tail(std::span<Symbol const> p, std::size_t max_pre, std::size_t max_per, std::size_t min_reps) {
    std::size_t const n = p.size();
    for (std::size_t m = 1; m <= max_per; ++m) {
        for (std::size_t r = 0; r <= max_pre && r <= n; ++r) {
            if (n - r < min_reps * m) {
                break;
            }
            bool ok = true;
            for (std::size_t j = r; j + m < n; ++j) {
                if (p[j] != p[j + m]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                return Tail{r, m, Word(p.begin() + static_cast<std::ptrdiff_t>(r), p.begin() + static_cast<std::ptrdiff_t>(r + m))};
            }
        }
    }
    return std::nullopt;
}

/// The listed index sequence 1,2,1,2,3,1,2,3,4,... (first entry is i_1).
inline std::vector<std::size_t> listed_indices(std::size_t count) {
    std::vector<std::size_t> out;
    for (std::size_t round = 2; out.size() < count; ++round) {
        for (std::size_t i = 1; i <= round && out.size() < count; ++i) {
            out.push_back(i);
        }
    }
    return out;
}

struct RefBlock {
    std::size_t k_before;
    std::size_t source;
    Word symbols;
    bool periodic_after;
    std::optional<Word> fundamental_after;
    std::optional<std::size_t> lock_block_after;
};

/**
 * Straight transcription of the four algorithm steps: keeps the whole
 * concatenation B_h + ... + B_l and re-derives its minimal period from
 * scratch with the brute-force routine above. Sources are plain callables
 * index -> next symbol.
 */
inline std::vector<RefBlock> reference_run(std::function<Symbol(std::size_t)> const& pull, std::size_t num_blocks) {
    // The diagonal schedule as listed: (1,2), (1,2,3), (1,2,3,4), ...
    std::vector<std::size_t> schedule;
    for (std::size_t n = 1; schedule.size() < num_blocks + 2; ++n) {
        for (std::size_t i = 1; i <= n + 1; ++i) {
            schedule.push_back(i);
        }
    }
    std::vector<RefBlock> out;
    std::size_t k = 1;
    bool P = false;
    Word S;
    std::size_t h = 0;
    Word run;
    for (std::size_t l = 1; l <= num_blocks; ++l) {
        std::size_t const src = schedule[k - 1];
        Word block;
        for (std::size_t j = 0; j < (std::size_t{1} << l); ++j) {
            block.push_back(pull(src));
        }
        RefBlock rec{k, src, block, false, std::nullopt, std::nullopt};
        if (!P) {
            if (auto mp = minimal_period(block)) {
                P = true;
                S = mp->second;
                h = l;
                run = block;
            } else {
                ++k;
            }
        } else {
            Word cat = run;
            cat.insert(cat.end(), block.begin(), block.end());
            auto mp = minimal_period(cat);
            if (mp && mp->second == S) {
                run = std::move(cat);
            } else {
                P = false;
                S.clear();
                run.clear();
                ++k;
            }
        }
        rec.periodic_after = P;
        if (P) {
            rec.fundamental_after = S;
            rec.lock_block_after = h;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

/// Symbols of cycle generator ground truth, position j.
inline Symbol cycle_symbol(Word const& preamble, Word const& cycle, std::size_t j) {
    return j < preamble.size() ? preamble[j] : cycle[(j - preamble.size()) % cycle.size()];
}

/// True when `s` repeated to |cycle| symbols is a rotation of `cycle`.
inline bool rotation_of_divisor_repetition(Word const& s, Word const& cycle) {
    if (s.empty() || cycle.size() % s.size() != 0) {
        return false;
    }
    std::size_t const n = cycle.size();
    for (std::size_t shift = 0; shift < n; ++shift) {
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            ok = cycle[(j + shift) % n] == s[j % s.size()];
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

} // namespace weave::oracle
