#pragma once

/**
 * @file generators.hpp
 * @brief Concrete input streams: eventually periodic, aperiodic, and the
 *        continued fraction of a quadratic surd.
 */

#include "weave/source.hpp"
#include "weave/symbol.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace weave {

using BigInt = boost::multiprecision::cpp_int;

/// Emits the preamble once, then the cycle forever.
class CycleSource final : public Source {
public:
    CycleSource(Word preamble, Word cycle) : preamble_(std::move(preamble)), cycle_(std::move(cycle)) {
        if (cycle_.empty()) {
            throw std::invalid_argument("cycle generator needs a nonempty cycle");
        }
    }

    Symbol next() override {
        if (pos_ < preamble_.size()) {
            return preamble_[pos_++];
        }
        Symbol const s = cycle_[phase_];
        phase_ = (phase_ + 1) % cycle_.size();
        return s;
    }

private:
    Word preamble_;
    Word cycle_;
    std::size_t pos_{};
    std::size_t phase_{};
};

/// t_n = parity of the number of ones in n, starting at n = offset.
class ThueMorseSource final : public Source {
public:
    explicit ThueMorseSource(std::uint64_t offset = 0) : n_(offset) {}

    Symbol next() override { return static_cast<Symbol>(std::popcount(n_++) & 1); }

private:
    std::uint64_t n_;
};

/// offset + 1, offset + 2, ...
class NaturalsSource final : public Source {
public:
    explicit NaturalsSource(Symbol offset = 0) : next_(offset + 1) {}

    Symbol next() override { return next_++; }

private:
    Symbol next_;
};

/// The number (P + sqrt(D)) / Q. Q always divides D - P^2 once normalized.
struct SurdState {
    BigInt P;
    BigInt Q;
    BigInt D;

    [[nodiscard]] bool invariant_holds() const { return Q != 0 && (D - P * P) % Q == 0; }
};

inline bool is_perfect_square(BigInt const& n) {
    if (n < 0) {
        return false;
    }
    BigInt const r = boost::multiprecision::sqrt(n);
    return r * r == n;
}

/// Floor division rounding toward negative infinity.
inline BigInt floor_div(BigInt const& a, BigInt const& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

/**
 * Partial quotients of (P0 + sqrt(D)) / Q0 by the exact surd recurrence
 *   a = floor((P + sqrt D) / Q),  P <- aQ - P,  Q <- (D - P^2) / Q.
 */
class CfSurdSource final : public Source {
public:
    CfSurdSource(std::int64_t p0, std::int64_t q0, std::int64_t d) {
        if (q0 == 0) {
            throw std::invalid_argument("surd denominator Q must be nonzero");
        }
        if (d <= 0 || is_perfect_square(BigInt(d))) {
            throw std::invalid_argument("surd radicand D must be a positive non-square, got " + std::to_string(d));
        }
        state_ = SurdState{p0, q0, d};
        if (!state_.invariant_holds()) {
            // Scale numerator and denominator by |Q|: Q|Q| divides Q^2 (D - P^2).
            BigInt const scale = boost::multiprecision::abs(state_.Q);
            state_.P *= scale;
            state_.D *= scale * scale;
            state_.Q *= scale;
        }
        assert(state_.invariant_holds());
        root_ = boost::multiprecision::sqrt(state_.D);
    }

    Symbol next() override {
        auto& [P, Q, D] = state_;
        // sqrt(D) lies strictly between root_ and root_ + 1.
        BigInt a = Q > 0 ? floor_div(P + root_, Q) : -floor_div(P + root_, -Q) - 1;
        P = a * Q - P;
        Q = (D - P * P) / Q;
        assert(state_.invariant_holds());
        if (a > std::numeric_limits<Symbol>::max() || a < std::numeric_limits<Symbol>::min()) {
            throw std::overflow_error("partial quotient does not fit a symbol");
        }
        return a.convert_to<Symbol>();
    }

    [[nodiscard]] SurdState const& state() const { return state_; }

private:
    SurdState state_;
    BigInt root_;
};

struct CycleSpec {
    Word preamble;
    Word cycle;
    bool operator==(CycleSpec const&) const = default;
};

struct NaturalsSpec {
    Symbol offset{};
    bool operator==(NaturalsSpec const&) const = default;
};

struct ThueMorseSpec {
    std::uint64_t offset{};
    bool operator==(ThueMorseSpec const&) const = default;
};

struct CfSurdSpec {
    std::int64_t P{};
    std::int64_t Q{1};
    std::int64_t D{2};
    bool operator==(CfSurdSpec const&) const = default;
};

using GeneratorSpec = std::variant<CycleSpec, NaturalsSpec, ThueMorseSpec, CfSurdSpec>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline SourcePtr make_source(GeneratorSpec const& spec) {
    return std::visit(overloaded{
                          [](CycleSpec const& s) -> SourcePtr { return std::make_unique<CycleSource>(s.preamble, s.cycle); },
                          [](NaturalsSpec const& s) -> SourcePtr { return std::make_unique<NaturalsSource>(s.offset); },
                          [](ThueMorseSpec const& s) -> SourcePtr { return std::make_unique<ThueMorseSource>(s.offset); },
                          [](CfSurdSpec const& s) -> SourcePtr { return std::make_unique<CfSurdSource>(s.P, s.Q, s.D); },
                      },
                      spec);
}

/// Whether the spec produces an eventually periodic stream.
inline bool eventually_periodic(GeneratorSpec const& spec) {
    return std::holds_alternative<CycleSpec>(spec) || std::holds_alternative<CfSurdSpec>(spec);
}

/**
 * Lifts M specs to an infinite family: index i gets a fresh stream built from
 * specs[(i - 1) mod M]. Every spec is instantiated once up front so invalid
 * parameters fail here rather than mid-run.
 */
inline Family family_from_specs(std::vector<GeneratorSpec> specs) {
    if (specs.empty()) {
        throw std::invalid_argument("a family needs at least one generator spec");
    }
    for (auto const& spec : specs) {
        (void)make_source(spec);
    }
    return Family([specs = std::move(specs)](std::size_t index) { return make_source(specs[(index - 1) % specs.size()]); });
}

} // namespace weave
