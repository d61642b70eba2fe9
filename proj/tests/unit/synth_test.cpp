#include "brute_synth.hpp"
#include "test_util.hpp"

#include "fixtures.hpp"

#include <tracegist/expr.hpp>
#include <tracegist/synth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace tracegist;
using testutil::ints;
using testutil::sym;

namespace {

const Schema kX = testutil::int_schema({"x"});
const Schema kX12 = testutil::int_schema({"x1", "x2"});

std::vector<Example> chain(std::initializer_list<std::pair<std::int64_t, std::int64_t>> pairs) {
    std::vector<Example> ex;
    for (auto [a, b] : pairs) ex.push_back({ints({a}), ints({b})});
    return ex;
}

bool consistent(const Expr& e, const std::vector<Example>& ex, int target) {
    for (const auto& [cur, nxt] : ex)
        if (evaluate(e, cur, nullptr) != EvalValue(std::get<std::int64_t>(nxt.values[target]))) return false;
    return true;
}

} // namespace

TEST(Synthesis, SuccessorFunction) {
    auto ex = chain({{1, 2}, {2, 3}, {3, 4}});
    auto e = synthesize_next(ex, kX, 0, {});
    ASSERT_TRUE(e);
    EXPECT_EQ(to_prefix(**e, kX), "(+ x 1)");
    auto bf = brute::search(ex, 0, brute::pool_of(ex), node_count(**e));
    ASSERT_TRUE(bf.min_size);
    EXPECT_EQ(*bf.min_size, node_count(**e));
}

TEST(Synthesis, Doubling) {
    auto ex = chain({{1, 2}, {2, 4}, {4, 8}});
    auto e = synthesize_next(ex, kX, 0, {});
    ASSERT_TRUE(e);
    EXPECT_EQ(to_prefix(**e, kX), "(+ x x)");
    EXPECT_EQ(*brute::search(ex, 0, brute::pool_of(ex), 3).min_size, 3);
}

TEST(Synthesis, IdentityIsSmallest) {
    auto ex = chain({{5, 5}});
    auto e = synthesize_next(ex, kX, 0, {});
    ASSERT_TRUE(e);
    EXPECT_EQ(to_prefix(**e, kX), "x");
}

TEST(Synthesis, ConditionalUpdate) {
    std::vector<Example> ex = {{ints({1, 0}), ints({2, 0})}, {ints({2, 0}), ints({3, 0})}, {ints({3, 1}), ints({2, 0})}};
    auto e = synthesize_next(ex, kX12, 0, {});
    ASSERT_TRUE(e);
    EXPECT_TRUE(consistent(**e, ex, 0));
    // no larger than the hand-written ite(x2 = 0, x1 + 1, x1 - 1)
    EXPECT_LE(node_count(**e), 10);
    auto bf = brute::search(ex, 0, brute::pool_of(ex), node_count(**e));
    ASSERT_TRUE(bf.min_size);
    EXPECT_EQ(*bf.min_size, node_count(**e));
}

TEST(Synthesis, PoolCollectsCurrentValuesAndExtras) {
    auto t = fixtures::counter(128, 1);
    auto syms = to_symbols(t);
    std::vector<Example> ex;
    for (const auto& s : syms) ex.push_back({s.current, s.next});
    auto pool = constant_pool(ex, t.schema, {});
    EXPECT_TRUE(std::binary_search(pool.begin(), pool.end(), 128));
    EXPECT_TRUE(std::binary_search(pool.begin(), pool.end(), -1));
    EXPECT_TRUE(std::is_sorted(pool.begin(), pool.end()));
    EXPECT_EQ(std::adjacent_find(pool.begin(), pool.end()), pool.end());
}

// Randomized: the synthesizer's answer is consistent and exactly as small
// as the smallest tree the exhaustive enumerator can find.
TEST(Synthesis, MinimalAgainstExhaustiveEnumeration) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> val(-3, 5), cnt(1, 4), nv(1, 2), fn(0, 5);
    const int kMax = 6;
    int checked = 0;
    for (int round = 0; round < 120; ++round) {
        int vars = nv(rng);
        const Schema& s = vars == 1 ? kX : kX12;
        std::vector<Example> ex;
        int f = fn(rng);
        for (int i = cnt(rng); i > 0; --i) {
            std::int64_t a = val(rng), b = vars == 2 ? val(rng) : 0;
            std::int64_t out = 0;
            switch (f) {
            case 0: out = a + 1; break;
            case 1: out = a - b; break;
            case 2: out = b <= 0 ? a + 1 : a - 1; break;
            case 3: out = -a; break;
            case 4: out = a + a + b; break;
            default: out = val(rng); break;
            }
            ex.push_back({vars == 1 ? ints({a}) : ints({a, b}), vars == 1 ? ints({out}) : ints({out, b})});
        }
        // contradictory example sets have no functional answer
        bool functional = true;
        for (std::size_t i = 0; i < ex.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (ex[i].first == ex[j].first && !(ex[i].second == ex[j].second)) functional = false;
        if (!functional) continue;

        auto e = synthesize_next(ex, s, 0, {});
        auto bf = brute::search(ex, 0, brute::pool_of(ex), kMax);
        if (bf.min_size) {
            ASSERT_TRUE(e) << "round " << round;
            EXPECT_TRUE(consistent(**e, ex, 0));
            // The answer comes back canonicalized, which can fold constants
            // (x - 3 - 3 becomes x + -6) and shrink below the enumerated tree.
            int n = node_count(**e);
            EXPECT_LE(n, *bf.min_size) << "round " << round << ": " << to_prefix(**e, s);
            EXPECT_FALSE(brute::search(ex, 0, brute::pool_of(ex), n - 1).min_size) << "round " << round;
            ++checked;
        } else if (e) {
            EXPECT_TRUE(consistent(**e, ex, 0));
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(Predicates, SuccessorSegment) {
    PredicateTable table(kX);
    auto p = form_predicate({sym({1}, {2}), sym({2}, {3})}, table, {});
    EXPECT_EQ(p.key, "(= x' (+ x 1))");
}

TEST(Predicates, IdentitySegment) {
    PredicateTable table(kX);
    auto p = form_predicate({sym({5}, {5})}, table, {});
    EXPECT_EQ(p.key, "(= x' x)");
}

TEST(Predicates, CategoricalEventLabel) {
    Schema s;
    s.vars.push_back({"ev", VarKind::Categorical});
    PredicateTable table(s);
    Symbol a{Valuation{{Value(std::string("CR_ENABLE_SLOT"))}}, Valuation{{Value(std::string("CR_ADDR_DEV"))}}};
    auto p = form_predicate({a}, table, {});
    EXPECT_EQ(table.display_label(p.id, LabelMode::Event), "CR_ADDR_DEV");
    EXPECT_TRUE(eval_predicate(p, a));
    Symbol b{a.current, Valuation{{Value(std::string("CR_CONFIG_END"))}}};
    EXPECT_FALSE(eval_predicate(p, b));
}

TEST(Predicates, Evaluation) {
    PredicateTable table(kX);
    auto p = form_predicate({sym({1}, {2}), sym({2}, {3})}, table, {});
    EXPECT_TRUE(eval_predicate(p, sym({3}, {4})));
    EXPECT_FALSE(eval_predicate(p, sym({3}, {5})));
}

TEST(Predicates, ConditionalUpdateHoldsOnThirdPair) {
    PredicateTable table(kX12);
    std::vector<Symbol> seg = {sym({1, 0}, {2, 0}), sym({2, 0}, {3, 1}), sym({3, 1}, {2, 0})};
    auto p = form_predicate(seg, table, {});
    for (const auto& s : seg) EXPECT_TRUE(eval_predicate(p, s));
    EXPECT_TRUE(eval_predicate(p, sym({3, 1}, {2, 0})));
}

TEST(Predicates, InterningIsByCanonicalForm) {
    PredicateTable table(kX);
    auto x = mk_var(kX, 0, false), xp = mk_var(kX, 0, true);
    int a = table.intern(mk_binary(Op::Eq, xp, mk_binary(Op::Add, x, mk_int(1))));
    int b = table.intern(mk_binary(Op::Eq, mk_binary(Op::Add, mk_int(1), x), xp));
    EXPECT_EQ(a, b);
    EXPECT_EQ(table.size(), 1u);
}

TEST(Predicates, SoundOnRandomSegments) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> v(-4, 4), len(1, 3);
    PredicateTable table(kX12);
    for (int i = 0; i < 200; ++i) {
        std::vector<Symbol> seg;
        for (int k = len(rng); k > 0; --k) seg.push_back(sym({v(rng), v(rng)}, {v(rng), v(rng)}));
        auto p = form_predicate(seg, table, {});
        for (const auto& s : seg) ASSERT_TRUE(eval_predicate(p, s)) << p.key;
    }
}
