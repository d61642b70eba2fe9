#include "test_util.hpp"

#include "fixtures.hpp"

#include <tracegist/error.hpp>
#include <tracegist/segmentation.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace tracegist;

namespace {

SegmentationConfig plain() {
    SegmentationConfig c;
    c.consolidate = false;
    c.guard_pass = false;
    return c;
}

} // namespace

TEST(Segments, CountAndSpan) {
    auto t = testutil::int_trace("x", {1, 2, 3, 4});
    auto s2 = segment_trace(t, 2);
    ASSERT_EQ(s2.size(), 3u);
    for (const auto& seg : s2) EXPECT_EQ(seg.size(), 1u);
    auto s4 = segment_trace(t, 4);
    ASSERT_EQ(s4.size(), 1u);
    EXPECT_EQ(s4[0].size(), 3u);
}

TEST(Segments, CounterHas446) {
    auto t = fixtures::counter(128, 0, 447);
    EXPECT_EQ(segment_trace(t, 2).size(), 446u);
}

TEST(Segments, OutOfRangeWidth) {
    auto t = testutil::int_trace("x", {1, 2, 3});
    for (int w : {1, 4}) {
        try {
            segment_trace(t, w);
            FAIL() << w;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Argument);
        }
    }
}

TEST(PredicateSequence, CounterFragmentSynthesizedOnce) {
    // one-symbol segments are ambiguous (1 -> 2 is also x + x); consolidation
    // settles on the predicate that holds everywhere
    auto P = build_predicate_sequence(testutil::int_trace("x", {1, 2, 3, 4}), {});
    ASSERT_EQ(P.size(), 3u);
    EXPECT_EQ(P.ids, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(P.table->prefix(0), "(= x' (+ x 1))");
    // memoization is keyed on segment content; these three differ
    EXPECT_EQ(P.synthesis_calls, 3u);
}

TEST(PredicateSequence, RepeatedSegmentsSynthesizedOnce) {
    auto P = build_predicate_sequence(testutil::int_trace("x", {1, 2, 1, 2, 1, 2}), plain());
    ASSERT_EQ(P.size(), 5u);
    EXPECT_EQ(P.ids[0], P.ids[2]);
    EXPECT_EQ(P.ids[1], P.ids[3]);
    EXPECT_EQ(P.synthesis_calls, 2u);
    SegmentationConfig off = plain();
    off.memoize = false;
    EXPECT_EQ(build_predicate_sequence(testutil::int_trace("x", {1, 2, 1, 2, 1, 2}), off).synthesis_calls, 5u);
}

TEST(PredicateSequence, ConstantTrace) {
    auto P = build_predicate_sequence(testutil::int_trace("x", {5, 5, 5}), plain());
    EXPECT_EQ(P.ids, (std::vector<int>{0, 0}));
    EXPECT_EQ(P.table->prefix(0), "(= x' x)");
}

TEST(PredicateSequence, IntegratorFragmentSharesPredicate) {
    Trace t;
    t.schema = testutil::int_schema({"ip", "op"});
    t.observations = {testutil::ints({0, 0}), testutil::ints({1, 1}), testutil::ints({1, 2})};
    SegmentationConfig c;
    c.predicate.input_vars = {0};
    auto P = build_predicate_sequence(t, c);
    ASSERT_EQ(P.size(), 2u);
    EXPECT_EQ(P.ids[0], P.ids[1]);
}

TEST(PredicateSequence, MemoizationDoesNotChangeIds) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto t = fixtures::integrator(300, seed);
        for (bool guards : {false, true}) {
            SegmentationConfig a;
            a.guard_pass = guards;
            a.predicate.input_vars = {0};
            SegmentationConfig b = a;
            b.memoize = false;
            auto pa = build_predicate_sequence(t, a);
            auto pb = build_predicate_sequence(t, b);
            ASSERT_EQ(pa.size(), pb.size());
            for (std::size_t i = 0; i < pa.size(); ++i)
                ASSERT_EQ(pa.table->prefix(pa.ids[i]), pb.table->prefix(pb.ids[i])) << "seed " << seed << " at " << i;
            EXPECT_LE(pa.synthesis_calls, pb.synthesis_calls);
        }
    }
}

TEST(PredicateSequence, ParallelMatchesSequential) {
    auto t = fixtures::integrator(400, 9);
    SegmentationConfig a;
    a.predicate.input_vars = {0};
    SegmentationConfig b = a;
    b.jobs = 4;
    EXPECT_EQ(build_predicate_sequence(t, a).ids, build_predicate_sequence(t, b).ids);
}

TEST(PredicateSequence, EverySegmentSatisfiesItsPredicate) {
    auto t = fixtures::integrator(500, 3);
    SegmentationConfig c;
    c.predicate.input_vars = {0};
    auto P = build_predicate_sequence(t, c);
    auto syms = to_symbols(t);
    ASSERT_EQ(P.size(), syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i)
        ASSERT_TRUE(eval_predicate(P.table->at(P.ids[i]), syms[i])) << i << ": " << P.table->prefix(P.ids[i]);
}

TEST(PredicateSequence, IdsAreDenseInFirstOccurrenceOrder) {
    auto P = build_predicate_sequence(fixtures::counter(6, 3), {});
    int next = 0;
    for (int id : P.ids) {
        ASSERT_LE(id, next);
        if (id == next) ++next;
    }
    EXPECT_EQ(static_cast<std::size_t>(next), P.table->size());
}

TEST(Windows, HandExamples) {
    auto ws = window_predicates({0, 1, 0, 1, 0}, 3);
    EXPECT_EQ(ws.windows, (std::vector<std::vector<int>>{{0, 1, 0}, {1, 0, 1}}));
    EXPECT_EQ(window_predicates({0, 0, 0, 0}, 3).windows, (std::vector<std::vector<int>>{{0, 0, 0}}));
}

TEST(Windows, TooWideIsAnError) {
    try {
        window_predicates({0, 1}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Argument);
    }
}

TEST(Windows, CounterHasFewWindows) {
    auto P = build_predicate_sequence(fixtures::counter(128, 0, 447), {});
    auto ws = window_predicates(P.ids, 3);
    EXPECT_LE(ws.windows.size(), 8u);
    std::set<std::vector<int>> brute;
    for (std::size_t i = 0; i + 3 <= P.ids.size(); ++i) brute.insert({P.ids.begin() + i, P.ids.begin() + i + 3});
    EXPECT_EQ(brute.size(), ws.windows.size());
}

TEST(Windows, CompleteAndBounded) {
    auto P = build_predicate_sequence(fixtures::integrator(800, 4), {});
    for (int w : {2, 3, 4}) {
        auto ws = window_predicates(P.ids, w);
        std::set<std::vector<int>> have(ws.windows.begin(), ws.windows.end());
        EXPECT_EQ(have.size(), ws.windows.size());
        for (std::size_t i = 0; i + w <= P.ids.size(); ++i)
            ASSERT_TRUE(have.count({P.ids.begin() + i, P.ids.begin() + i + w}));
        std::size_t distinct = std::set<int>(P.ids.begin(), P.ids.end()).size();
        std::size_t cap = 1;
        for (int k = 0; k < w; ++k) cap *= distinct;
        EXPECT_LE(ws.windows.size(), std::min(P.ids.size() - w + 1, cap));
        EXPECT_EQ(ws.first_window, std::vector<int>(P.ids.begin(), P.ids.begin() + w));
    }
}

TEST(Windows, NoDedupKeepsEveryOccurrence) {
    auto ws = window_predicates({0, 0, 0, 0}, 2, false);
    EXPECT_EQ(ws.windows.size(), 3u);
}
