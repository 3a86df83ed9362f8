#pragma once

#include "weave/symbol.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weave {

/// A deterministic, never-ending, pull-based stream of symbols.
class Source {
public:
    virtual ~Source() = default;
    virtual Symbol next() = 0;
};

using SourcePtr = std::unique_ptr<Source>;

/**
 * An indexed family of independent sources, indices starting at 1.
 *
 * Sources are created on first use by the factory and keep their own cursor,
 * so pulling n symbols from index i and later m more yields the same symbols
 * as pulling n + m at once.
 */
class Family {
public:
    using Factory = std::function<SourcePtr(std::size_t index)>;

    explicit Family(Factory factory) : factory_(std::move(factory)) {
        if (!factory_) {
            throw std::invalid_argument("family factory must be callable");
        }
    }

    /// Removes the next `count` symbols from source `index`.
    Word pull(std::size_t index, std::size_t count) {
        auto& slot = slot_at(index);
        Word out;
        out.reserve(count);
        for (std::size_t j = 0; j < count; ++j) {
            out.push_back(slot.source->next());
        }
        slot.consumed += count;
        return out;
    }

    [[nodiscard]] std::size_t consumed_count(std::size_t index) const {
        auto const it = slots_.find(index);
        return it == slots_.end() ? 0 : it->second.consumed;
    }

    /// Indices that have been pulled from so far, ascending.
    [[nodiscard]] std::vector<std::size_t> touched() const {
        std::vector<std::size_t> out;
        for (auto const& [index, slot] : slots_) {
            if (slot.consumed > 0) {
                out.push_back(index);
            }
        }
        return out;
    }

private:
    struct Slot {
        SourcePtr source;
        std::size_t consumed{};
    };

    Slot& slot_at(std::size_t index) {
        if (index == 0) {
            throw std::out_of_range("family indices start at 1");
        }
        auto it = slots_.find(index);
        if (it == slots_.end()) {
            SourcePtr source = factory_(index);
            if (!source) {
                throw std::runtime_error("family factory returned no source for index " + std::to_string(index));
            }
            it = slots_.emplace(index, Slot{std::move(source), 0}).first;
        }
        return it->second;
    }

    Factory factory_;
    std::map<std::size_t, Slot> slots_;
};

} // namespace weave
