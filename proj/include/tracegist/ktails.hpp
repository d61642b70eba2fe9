#pragma once

#include "tracegist/automaton.hpp"
#include "tracegist/segmentation.hpp"

#include <map>
#include <memory>
#include <vector>

namespace tracegist {

// Prefix tree acceptor; node 0 is the root.
struct Pta {
    std::vector<std::map<int, int>> children; // label -> child

    std::size_t size() const { return children.size(); }
};

Pta build_pta(const std::vector<std::vector<int>>& sequences);

enum class TailMode {
    Pta,     // k-tails taken on the prefix tree once (Biermann-Feldman)
    Rolling, // recomputed on the merged graph after every round
};

// Traditional kTails: merge states with equal sets of outgoing label
// sequences of length <= k, then fold away nondeterminism to a fixpoint.
Automaton ktails(const Pta& pta, int k, std::shared_ptr<const PredicateTable> table, TailMode mode = TailMode::Pta);

// Event-style labels: one predicate per symbol fixing the next observation
// (x1' = v1 /\ x2' = v2 ...). This is what a classic state-merge tool sees.
PredicateSequence raw_observation_sequence(const Trace& t);

} // namespace tracegist
