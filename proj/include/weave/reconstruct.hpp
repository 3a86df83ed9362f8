#pragma once

/**
 * @file reconstruct.hpp
 * @brief Recovering the block schedule and the inputs from an output prefix.
 *
 * Every decision the interleaver takes depends only on symbols it has
 * already emitted, so the output prefix alone fixes block boundaries, source
 * indices, and the periodicity flag trajectory.
 */

#include "weave/interleave.hpp"
#include "weave/symbol.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weave {

class MalformedPrefix : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// L such that n == 2^{L+1} - 2, if any.
inline std::optional<std::size_t> whole_blocks_in(std::size_t n) {
    for (std::size_t blocks = 1; blocks < 62; ++blocks) {
        std::size_t const len = prefix_length(blocks);
        if (len == n) {
            return blocks;
        }
        if (len > n) {
            break;
        }
    }
    return std::nullopt;
}

struct Lock {
    std::size_t source_index{};
    std::size_t lock_block{};
    Word fundamental;

    bool operator==(Lock const&) const = default;
};

struct ReplayTrace {
    std::vector<BlockRecord> records;
    std::optional<Lock> locked;
};

inline ReplayTrace replay(std::span<Symbol const> output) {
    auto const blocks = whole_blocks_in(output.size());
    if (!blocks) {
        std::size_t below = 0;
        std::size_t above = 2;
        for (std::size_t b = 1; prefix_length(b) <= output.size(); ++b) {
            below = prefix_length(b);
            above = prefix_length(b + 1);
        }
        throw MalformedPrefix("output prefix of length " + std::to_string(output.size())
                              + " does not end on a block boundary; expected a length of the form 2^(L+1)-2 such as "
                              + (below > 0 ? std::to_string(below) + " or " : std::string{}) + std::to_string(above));
    }
    ReplayTrace trace;
    trace.records.reserve(*blocks);
    InterleaverState state;
    std::size_t offset = 0;
    for (std::size_t b = 0; b < *blocks; ++b) {
        std::size_t const len = block_length(state.l);
        auto const block = output.subspan(offset, len);
        InterleaverState const before = state;
        absorb_block(state, block);
        trace.records.push_back(make_record(before, state, Word(block.begin(), block.end())));
        offset += len;
    }
    if (state.locked()) {
        trace.locked = Lock{trace.records.back().source_index, *state.lock_block, state.fundamental->fundamental};
    }
    return trace;
}

struct PeriodicTail {
    std::size_t preperiod{};
    Word fundamental;

    bool operator==(PeriodicTail const&) const = default;
};

/// Everything the output reveals about one input index.
struct RecoveredInput {
    std::size_t index{};
    Word prefix;
    std::optional<PeriodicTail> periodic_tail;

    /// Symbol j of the input, extrapolating through the periodic tail past the
    /// recovered prefix.
    [[nodiscard]] std::optional<Symbol> at(std::size_t j) const {
        if (j < prefix.size()) {
            return prefix[j];
        }
        if (!periodic_tail) {
            return std::nullopt;
        }
        auto const& s = periodic_tail->fundamental;
        return s[(j - periodic_tail->preperiod) % s.size()];
    }

    bool operator==(RecoveredInput const&) const = default;
};

inline std::vector<RecoveredInput> recover_inputs(ReplayTrace const& trace) {
    std::map<std::size_t, RecoveredInput> by_index;
    for (auto const& rec : trace.records) {
        auto& input = by_index[rec.source_index];
        input.index = rec.source_index;
        if (trace.locked && rec.source_index == trace.locked->source_index && rec.l == trace.locked->lock_block) {
            input.periodic_tail = PeriodicTail{input.prefix.size(), trace.locked->fundamental};
        }
        input.prefix.insert(input.prefix.end(), rec.symbols.begin(), rec.symbols.end());
    }
    std::vector<RecoveredInput> out;
    out.reserve(by_index.size());
    for (auto& [index, input] : by_index) {
        out.push_back(std::move(input));
    }
    return out;
}

inline std::vector<RecoveredInput> recover_inputs(std::span<Symbol const> output) { return recover_inputs(replay(output)); }

/// Re-interleaves recovered prefixes along the replayed schedule.
inline Word reassemble(std::vector<RecoveredInput> const& inputs, std::vector<BlockRecord> const& schedule) {
    std::map<std::size_t, std::pair<RecoveredInput const*, std::size_t>> cursors;
    for (auto const& input : inputs) {
        cursors[input.index] = {&input, 0};
    }
    Word out;
    for (auto const& rec : schedule) {
        auto it = cursors.find(rec.source_index);
        if (it == cursors.end()) {
            throw std::invalid_argument("schedule refers to index " + std::to_string(rec.source_index)
                                        + " with no recovered input");
        }
        auto& [input, pos] = it->second;
        if (pos + rec.len > input->prefix.size()) {
            throw std::invalid_argument("recovered prefix for index " + std::to_string(rec.source_index)
                                        + " is shorter than the schedule needs");
        }
        auto const first = input->prefix.begin() + static_cast<std::ptrdiff_t>(pos);
        out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(rec.len));
        pos += rec.len;
    }
    return out;
}

} // namespace weave
