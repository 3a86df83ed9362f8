#include "oracles.hpp"
#include "weave/generators.hpp"
#include "weave/interleave.hpp"
#include "weave/reconstruct.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace weave;

namespace {

std::vector<GeneratorSpec> random_family(std::mt19937_64& rng, bool with_cycle) {
    std::vector<GeneratorSpec> specs;
    std::size_t const m = 1 + rng() % 5;
    for (std::size_t j = 0; j < m; ++j) {
        specs.push_back(rng() % 2 ? GeneratorSpec{ThueMorseSpec{rng() % 300}}
                                  : GeneratorSpec{NaturalsSpec{static_cast<Symbol>(rng() % 300)}});
    }
    if (with_cycle) {
        Symbol const alphabet = 2 + static_cast<Symbol>(rng() % 4);
        Word pre(rng() % 8);
        Word cyc(1 + rng() % 6);
        for (auto& s : pre) {
            s = static_cast<Symbol>(rng() % alphabet);
        }
        for (auto& s : cyc) {
            s = static_cast<Symbol>(rng() % alphabet);
        }
        specs.insert(specs.begin() + static_cast<std::ptrdiff_t>(rng() % (specs.size() + 1)), CycleSpec{pre, cyc});
    }
    return specs;
}

} // namespace

TEST(WholeBlocks, LengthForms) {
    EXPECT_EQ(whole_blocks_in(2), 1U);
    EXPECT_EQ(whole_blocks_in(6), 2U);
    EXPECT_EQ(whole_blocks_in(14), 3U);
    EXPECT_EQ(whole_blocks_in(0), std::nullopt);
    EXPECT_EQ(whole_blocks_in(13), std::nullopt);
    EXPECT_EQ(whole_blocks_in(15), std::nullopt);
}

TEST(Replay, AllZeros) {
    auto const trace = replay(Word(14, 0));
    ASSERT_EQ(trace.records.size(), 3U);
    for (auto const& rec : trace.records) {
        EXPECT_EQ(rec.source_index, 1U);
        EXPECT_TRUE(rec.periodic_after);
        EXPECT_EQ(rec.fundamental_after, (Word{0}));
        EXPECT_EQ(rec.lock_block_after, 1U);
    }
    ASSERT_TRUE(trace.locked);
    EXPECT_EQ(*trace.locked, (Lock{1, 1, {0}}));
}

TEST(Replay, NaturalsThenSevens) {
    Word const out{1, 2, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7};
    auto const trace = replay(out);
    ASSERT_EQ(trace.records.size(), 3U);
    EXPECT_EQ(trace.records[0].source_index, 1U);
    EXPECT_EQ(trace.records[1].source_index, 2U);
    EXPECT_EQ(trace.records[2].source_index, 2U);
    ASSERT_TRUE(trace.locked);
    EXPECT_EQ(*trace.locked, (Lock{2, 2, {7}}));
}

TEST(Replay, RejectsPartialBlocks) {
    EXPECT_THROW(replay(Word(13, 0)), MalformedPrefix);
    EXPECT_THROW(replay(Word{}), MalformedPrefix);
    EXPECT_THROW(replay(Word(1, 0)), MalformedPrefix);
    try {
        replay(Word(20, 0));
        FAIL();
    } catch (MalformedPrefix const& e) {
        EXPECT_NE(std::string(e.what()).find("14 or 30"), std::string::npos) << e.what();
    }
}

TEST(Replay, FreshDetectionIsNotReportedAsLocked) {
    Family f = family_from_specs({ThueMorseSpec{}});
    auto const run = run_prefix(f, 10);
    auto const trace = replay(run.symbols);
    EXPECT_TRUE(trace.records.back().periodic_after);
    EXPECT_FALSE(trace.locked);
    for (auto const& input : recover_inputs(trace)) {
        EXPECT_FALSE(input.periodic_tail);
    }
}

TEST(RecoverInputs, Examples) {
    auto const zeros = recover_inputs(Word(14, 0));
    ASSERT_EQ(zeros.size(), 1U);
    EXPECT_EQ(zeros[0].index, 1U);
    EXPECT_EQ(zeros[0].prefix, Word(14, 0));
    EXPECT_EQ(zeros[0].periodic_tail, (PeriodicTail{0, {0}}));

    auto const mixed = recover_inputs(Word{1, 2, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7});
    ASSERT_EQ(mixed.size(), 2U);
    EXPECT_EQ(mixed[0].index, 1U);
    EXPECT_EQ(mixed[0].prefix, (Word{1, 2}));
    EXPECT_FALSE(mixed[0].periodic_tail);
    EXPECT_EQ(mixed[1].index, 2U);
    EXPECT_EQ(mixed[1].prefix, Word(12, 7));
    EXPECT_EQ(mixed[1].periodic_tail, (PeriodicTail{0, {7}}));
    EXPECT_EQ(mixed[1].at(1000), 7);
    EXPECT_EQ(mixed[0].at(2), std::nullopt);
}

TEST(ReplayFidelity, RoundTripsForwardRuns) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        auto const specs = random_family(rng, rng() % 2 == 0);
        std::size_t const blocks = 1 + rng() % 16;
        Family family = family_from_specs(specs);
        auto const run = run_prefix(family, blocks);
        auto const trace = replay(run.symbols);
        ASSERT_EQ(trace.records, run.trace) << "trial " << trial;
        ASSERT_EQ(trace.locked.has_value(), run.final_state.locked());

        auto const inputs = recover_inputs(trace);
        ASSERT_EQ(reassemble(inputs, trace.records), run.symbols);
        // Recovered prefixes are the true source prefixes.
        for (auto const& input : inputs) {
            ASSERT_EQ(input.prefix.size(), family.consumed_count(input.index));
        }
    }
}

TEST(RecoverInputs, UnlockedRunsTouchEveryScheduledIndex) {
    std::mt19937_64 rng(42);
    int unlocked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Family family = family_from_specs(random_family(rng, false));
        auto const run = run_prefix(family, 14);
        if (run.final_state.locked()) {
            continue;
        }
        ++unlocked;
        std::set<std::size_t> scheduled;
        for (auto const& rec : run.trace) {
            scheduled.insert(index_at(rec.k_before));
        }
        auto const inputs = recover_inputs(run.symbols);
        ASSERT_EQ(inputs.size(), scheduled.size());
        for (auto const& input : inputs) {
            EXPECT_TRUE(scheduled.contains(input.index));
            EXPECT_FALSE(input.periodic_tail);
        }
    }
    EXPECT_GT(unlocked, 20);
}

TEST(RecoverInputs, LockedCycleInputIsDeterminedEntirely) {
    std::mt19937_64 rng(43);
    int locked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto const specs = random_family(rng, true);
        Family family = family_from_specs(specs);
        auto const run = run_prefix(family, 14);
        if (!run.final_state.locked()) {
            continue;
        }
        auto const trace = replay(run.symbols);
        auto const inputs = recover_inputs(trace);
        auto const& lock = *trace.locked;
        auto const it = std::find_if(inputs.begin(), inputs.end(), [&](auto const& in) { return in.index == lock.source_index; });
        ASSERT_NE(it, inputs.end());
        ASSERT_TRUE(it->periodic_tail);
        auto const* cycle = std::get_if<CycleSpec>(&specs[(lock.source_index - 1) % specs.size()]);
        ASSERT_NE(cycle, nullptr) << "locked on a decoy";
        ++locked;
        // The finite description reproduces the generator far past what was observed.
        for (std::size_t j = 0; j < 4 * it->prefix.size() + 64; ++j) {
            ASSERT_EQ(*it->at(j), oracle::cycle_symbol(cycle->preamble, cycle->cycle, j)) << "trial " << trial << " j " << j;
        }
        ASSERT_TRUE(oracle::rotation_of_divisor_repetition(it->periodic_tail->fundamental, cycle->cycle));
    }
    EXPECT_GT(locked, 100);
}

TEST(Reassemble, DetectsMissingInput) {
    auto const trace = replay(Word{1, 2, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7, 7});
    auto inputs = recover_inputs(trace);
    inputs.pop_back();
    EXPECT_THROW(reassemble(inputs, trace.records), std::invalid_argument);
}
