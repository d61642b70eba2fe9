#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

namespace tracegist::sat {

// Literal encoding: 2*var for positive, 2*var+1 for negated.
using Lit = std::uint32_t;
inline Lit pos(int v) { return static_cast<Lit>(v) << 1; }
inline Lit neg(int v) { return (static_cast<Lit>(v) << 1) | 1u; }
inline int var_of(Lit l) { return static_cast<int>(l >> 1); }
inline bool sign_of(Lit l) { return l & 1u; }
inline Lit negate(Lit l) { return l ^ 1u; }

enum class Status { Sat, Unsat, Unknown };

struct Limits {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::uint64_t max_conflicts = 0; // 0 = unlimited
};

struct Stats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t restarts = 0;
};

// Conflict-driven clause learning: two watched literals, first-UIP learning
// with local minimization, VSIDS with phase saving, Luby restarts, activity
// based learnt-clause reduction. Fully deterministic.
class Solver {
public:
    Solver();

    int new_var();
    // Branching prefers lower tiers; use tier 1 for auxiliary variables
    // that propagation determines once the tier-0 variables are fixed.
    void set_tier(int v, int tier);
    int num_vars() const { return static_cast<int>(assigns_.size()); }
    // Returns false once the formula is trivially unsatisfiable.
    bool add_clause(std::vector<Lit> lits);

    Status solve(const Limits& limits = {});
    // Valid after Sat: value of variable v.
    bool model_value(int v) const { return model_.at(v) == 1; }
    const Stats& stats() const { return stats_; }

private:
    using CRef = std::uint32_t;
    static constexpr CRef kNoReason = 0xffffffffu;
    static constexpr std::int8_t kUndef = -1;

    struct Watcher {
        CRef cref;
        Lit blocker;
    };

    // Arena layout per clause: [size | learnt<<31], activity (float bits), lits...
    std::uint32_t csize(CRef c) const { return arena_[c] & 0x7fffffffu; }
    bool clearnt(CRef c) const { return arena_[c] >> 31; }
    Lit* clits(CRef c) { return reinterpret_cast<Lit*>(&arena_[c + 2]); }
    const Lit* clits(CRef c) const { return reinterpret_cast<const Lit*>(&arena_[c + 2]); }
    float& cact(CRef c) { return *reinterpret_cast<float*>(&arena_[c + 1]); }

    CRef alloc_clause(const std::vector<Lit>& lits, bool learnt);
    void attach(CRef c);

    std::int8_t value(Lit l) const {
        std::int8_t a = assigns_[var_of(l)];
        return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(sign_of(l)));
    }
    int level(int v) const { return levels_[v]; }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(Lit l, CRef reason);
    CRef propagate();
    void analyze(CRef confl, std::vector<Lit>& out, int& bt_level);
    bool redundant(Lit l) const;
    void cancel_until(int lvl);
    Lit pick_branch();
    void reduce_db();
    Status search(std::uint64_t conflict_budget, const Limits& limits);
    bool out_of_time(const Limits& limits);

    void bump_var(int v);
    void bump_clause(CRef c);
    void heap_insert(int v);
    void heap_up(std::size_t i);
    void heap_down(std::size_t i);
    bool heap_less(int a, int b) const {
        if (tier_[a] != tier_[b]) return tier_[a] < tier_[b];
        return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
    }
    int heap_pop();

    std::vector<std::uint32_t> arena_;
    std::vector<CRef> clauses_, learnts_;
    std::vector<std::vector<Watcher>> watches_; // indexed by literal
    std::vector<std::int8_t> assigns_;
    std::vector<std::int8_t> polarity_;
    std::vector<int> levels_;
    std::vector<CRef> reasons_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<double> activity_;
    std::vector<std::uint8_t> tier_;
    double var_inc_ = 1.0;
    float cla_inc_ = 1.0f;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;

    std::vector<char> seen_;
    std::vector<std::int8_t> model_;
    bool ok_ = true;
    double max_learnts_ = 0;
    std::uint64_t wasted_ = 0; // arena words held by deleted clauses
    Stats stats_;
    std::uint64_t checks_ = 0;
};

} // namespace tracegist::sat
