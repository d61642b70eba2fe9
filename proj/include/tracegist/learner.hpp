#pragma once

#include "tracegist/automaton.hpp"
#include "tracegist/constraints.hpp"
#include "tracegist/segmentation.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tracegist {

struct Slot {
    int pid;
    int q;  // FD variable: source state
    int q2; // FD variable: target state
};

struct SlotArray {
    std::vector<Slot> slots; // window-major, w slots per window
    int w = 0;
};

struct BlockingSet {
    bool determinism = true;                 // c0
    std::set<std::vector<int>> invalid;      // forbidden l-grams
    std::optional<std::vector<int>> accepts; // whole-sequence run requirement
};

struct LearnerConfig {
    int window_pred = 2; // w'
    int window = 3;      // w
    int seq_len = 2;     // l
    int n_start = 1;
    int n_max = 32;
    std::string external_solver; // empty: internal CDCL
    double timeout_sec = 0;      // 0: no limit
    // Non-segmented mode: one window spanning P, no deduplication.
    bool segmented = true;
    // Require the candidate to accept P from its initial state.
    bool trace_acceptance = true;
    bool verify_minimality = true;

    void validate() const; // throws Error(Config)
};

struct LearnStats {
    int final_n = 0;
    std::vector<int> n_trajectory;
    std::size_t solver_calls = 0;
    std::size_t refinements = 0;
    std::size_t acceptance_refinements = 0;
    std::size_t windows = 0;
    std::size_t slots = 0;
    double ms_synthesis = 0;
    double ms_solving = 0;
    double ms_check = 0;
    bool minimality_checked = false;
    bool minimality_unsat = false;

    std::string to_json() const;
};

struct LearnResult {
    Automaton model;
    LearnStats stats;
    WindowSet windows;
    BlockingSet blocking;
};

struct EncodedInstance {
    ConstraintSystem cs;
    SlotArray slots;
};

EncodedInstance encode_instance(const WindowSet& ws, int N, const BlockingSet& blocking, int l = 2);

Automaton extract_candidate(const std::vector<int>& assignment, const SlotArray& slots, int N,
                            std::shared_ptr<const PredicateTable> table);

// S_l - P_l; empty means the candidate passes.
std::set<std::vector<int>> subsequence_check(const Automaton& m, const std::vector<int>& P, int l);

std::set<std::vector<int>> l_grams(const std::vector<int>& P, int l);

LearnResult learn(const PredicateSequence& P, const LearnerConfig& cfg);

// Re-solve at N with the given blocking set; true iff UNSAT.
bool unsat_at(const WindowSet& ws, int N, const BlockingSet& blocking, int l, const SolveOptions& opts = {});

} // namespace tracegist
