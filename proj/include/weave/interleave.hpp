#pragma once

/**
 * @file interleave.hpp
 * @brief Diagonal block interleaving of a family of sequences.
 *
 * Block l has 2^l symbols and is removed from source i_k, where i_k walks
 * the diagonal schedule 1,2,1,2,3,1,2,3,4,... . A flag records whether the
 * blocks since the last detection still share one finite-fundamental string.
 * The schedule advances (k += 1) whenever that flag ends a block false, so
 * the output settles on one source exactly when some source is eventually
 * periodic.
 */

#include "weave/periodicity.hpp"
#include "weave/source.hpp"
#include "weave/symbol.hpp"

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace weave {

constexpr std::uint64_t triangular(std::uint64_t n) { return n * (n + 1) / 2; }

/// i_k = k - T_n + 1 for T_n <= k < T_{n+1}.
constexpr std::uint64_t index_at(std::uint64_t k) {
    assert(k >= 1);
    // Largest n with T_n <= k.
    std::uint64_t n = 0;
    {
        std::uint64_t lo = 0;
        std::uint64_t hi = 1;
        while (triangular(hi) <= k) {
            hi *= 2;
        }
        while (lo + 1 < hi) {
            std::uint64_t const mid = lo + (hi - lo) / 2;
            (triangular(mid) <= k ? lo : hi) = mid;
        }
        n = lo;
    }
    return k - triangular(n) + 1;
}

constexpr std::size_t block_length(std::size_t l) {
    assert(l >= 1 && l < 63);
    return std::size_t{1} << l;
}

/// Symbols emitted by the first `blocks` blocks: 2^{L+1} - 2.
constexpr std::size_t prefix_length(std::size_t blocks) { return (std::size_t{2} << blocks) - 2; }

struct InterleaverState {
    std::size_t k{1};
    std::size_t l{1};
    bool periodic{false};
    std::optional<FinitePeriodicity> fundamental;
    std::optional<std::size_t> lock_block;
    // Length of B_h + ... + B_{l-1} while `periodic` holds.
    std::size_t run_len{};
    // Last |S| symbols of that run.
    Word tail_window;

    /// The flag is up and has already survived at least one extension
    /// check. A detection made on the most recent block is not yet a lock.
    [[nodiscard]] bool locked() const { return periodic && *lock_block + 1 < l; }

    [[nodiscard]] bool consistent() const {
        if (periodic != fundamental.has_value() || periodic != lock_block.has_value()) {
            return false;
        }
        if (!periodic) {
            return run_len == 0 && tail_window.empty();
        }
        std::size_t expected = 0;
        for (std::size_t d = *lock_block; d < l; ++d) {
            expected += block_length(d);
        }
        return run_len == expected && tail_window.size() == fundamental->period;
    }

    bool operator==(InterleaverState const&) const = default;
};

struct BlockRecord {
    std::size_t l{};
    std::size_t len{};
    std::size_t k_before{};
    std::size_t source_index{};
    Word symbols;
    bool periodic_after{};
    std::optional<Word> fundamental_after;
    std::optional<std::size_t> lock_block_after;

    bool operator==(BlockRecord const&) const = default;
};

/**
 * Applies the periodicity check for a block already drawn from source
 * index_at(state.k), then advances l. Only the block and the state are
 * consulted, so a replay from the output alone reaches the same decisions.
 */
inline void absorb_block(InterleaverState& state, std::span<Symbol const> block) {
    assert(block.size() == block_length(state.l));
    if (!state.periodic) {
        if (auto fp = minimal_period(block)) {
            std::size_t const p = fp->period;
            state.periodic = true;
            state.fundamental = std::move(fp);
            state.lock_block = state.l;
            state.run_len = block.size();
            state.tail_window.assign(block.end() - static_cast<std::ptrdiff_t>(p), block.end());
        } else {
            ++state.k;
        }
    } else {
        FinitePeriodicity const& fp = *state.fundamental;
        std::size_t const p = fp.period;
        std::size_t const window_start = state.run_len - p;
        auto const lookback = [&](std::size_t j) { return state.tail_window[j - window_start]; };
        if (extends_with(fp, state.run_len, block, lookback)) {
            // block.size() >= 2 * run_len > p, so the new window lies inside the block.
            state.run_len += block.size();
            state.tail_window.assign(block.end() - static_cast<std::ptrdiff_t>(p), block.end());
        } else {
            state.periodic = false;
            state.fundamental.reset();
            state.lock_block.reset();
            state.run_len = 0;
            state.tail_window.clear();
            ++state.k;
        }
    }
    ++state.l;
}

inline BlockRecord make_record(InterleaverState const& before, InterleaverState const& after, Word symbols) {
    BlockRecord rec;
    rec.l = before.l;
    rec.len = symbols.size();
    rec.k_before = before.k;
    rec.source_index = static_cast<std::size_t>(index_at(before.k));
    rec.symbols = std::move(symbols);
    rec.periodic_after = after.periodic;
    if (after.fundamental) {
        rec.fundamental_after = after.fundamental->fundamental;
    }
    rec.lock_block_after = after.lock_block;
    return rec;
}

/// Draws block l from source i_k and applies the periodicity check.
inline BlockRecord step(InterleaverState& state, Family& family) {
    if (state.l >= 63) {
        throw std::length_error("block number too large for a 64-bit length");
    }
    InterleaverState const before = state;
    std::size_t const source = static_cast<std::size_t>(index_at(state.k));
    Word block = family.pull(source, block_length(state.l));
    absorb_block(state, block);
    return make_record(before, state, std::move(block));
}

struct RunResult {
    Word symbols;
    std::vector<BlockRecord> trace;
    InterleaverState final_state;
};

/// Runs exactly `num_blocks` steps from the initial state and keeps everything.
inline RunResult run_prefix(Family& family, std::size_t num_blocks) {
    if (num_blocks == 0) {
        throw std::invalid_argument("run_prefix needs at least one block");
    }
    RunResult out;
    out.symbols.reserve(prefix_length(num_blocks));
    out.trace.reserve(num_blocks);
    for (std::size_t b = 0; b < num_blocks; ++b) {
        BlockRecord rec = step(out.final_state, family);
        out.symbols.insert(out.symbols.end(), rec.symbols.begin(), rec.symbols.end());
        out.trace.push_back(std::move(rec));
    }
    return out;
}

/**
 * The interleaved output as a lazy stream. Blocks are drawn only when the
 * previous one has been fully consumed; nothing but the current block and
 * the interleaver state is retained.
 */
class InterleavedStream {
public:
    explicit InterleavedStream(Family family) : family_(std::move(family)) {}

    Symbol next() {
        if (pos_ == block_.size()) {
            block_ = step(state_, family_).symbols;
            pos_ = 0;
        }
        return block_[pos_++];
    }

    [[nodiscard]] InterleaverState const& state() const { return state_; }
    [[nodiscard]] std::size_t blocks_drawn() const { return state_.l - 1; }

    // Pulls lazily: a symbol is drawn on first dereference, so taking N
    // symbols never forces the block that holds symbol N + 1.
    class iterator {
    public:
        using value_type = Symbol;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(InterleavedStream* s) : stream_(s) {}

        Symbol operator*() const {
            if (!current_) {
                current_ = stream_->next();
            }
            return *current_;
        }
        iterator& operator++() {
            if (!current_) {
                stream_->next();
            }
            current_.reset();
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(iterator const&, std::default_sentinel_t) { return false; }

    private:
        InterleavedStream* stream_{};
        mutable std::optional<Symbol> current_;
    };

    iterator begin() { return iterator(this); }
    std::default_sentinel_t end() const { return {}; }

private:
    Family family_;
    InterleaverState state_;
    Word block_;
    std::size_t pos_{};
};

inline InterleavedStream interleave(Family family) { return InterleavedStream(std::move(family)); }

} // namespace weave
