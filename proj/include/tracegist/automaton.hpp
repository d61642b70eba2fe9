#pragma once

#include "tracegist/synth.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace tracegist {

struct Transition {
    int src;
    int pred;
    int dst;
    auto operator<=>(const Transition&) const = default;
};

// All states are accepting; states are numbered 1..n_states.
struct Automaton {
    int n_states = 1;
    int initial = 1;
    std::vector<Transition> transitions; // sorted by (src, pred, dst), unique
    std::shared_ptr<const PredicateTable> table;

    void normalize(); // sort + dedup transitions
    std::set<int> used_predicates() const;
};

std::set<std::vector<int>> paths_of_length(const Automaton& m, int l);
bool contains_window_path(const Automaton& m, const std::vector<int>& window);

// Acceptance of a symbol word from the initial state (subset tracking).
bool run_word(const Automaton& m, const std::vector<Symbol>& word);
// Same, but over predicate ids instead of evaluated symbols.
bool run_ids(const Automaton& m, const std::vector<int>& ids);

bool is_predicate_deterministic(const Automaton& m);

std::string to_dot(const Automaton& m, LabelMode mode);
std::string to_json(const Automaton& m, LabelMode mode);

enum class IsoLabels {
    Exact,    // labels compared by canonical predicate text
    Renaming, // any bijection between label sets
};

struct IsoOptions {
    IsoLabels labels = IsoLabels::Exact;
    bool pin_initial = true;
};

bool isomorphic(const Automaton& a, const Automaton& b, IsoOptions opts = {});

} // namespace tracegist
