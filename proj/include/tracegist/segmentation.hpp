#pragma once

#include "tracegist/synth.hpp"
#include "tracegist/trace.hpp"

#include <memory>
#include <vector>

namespace tracegist {

struct SegmentationConfig {
    int window_pred = 2; // w': observations per segment
    PredicateOptions predicate;
    bool memoize = true;
    // Relabel each segment with the most widely applicable synthesized
    // predicate that holds on it.
    bool consolidate = true;
    // Threshold guards at turning / saturation points (w' = 2 only).
    bool guard_pass = true;
    int jobs = 1;
};

struct PredicateSequence {
    std::vector<int> ids;
    std::shared_ptr<PredicateTable> table;
    // Segment i spans symbols [i, i + w' - 1).
    int window_pred = 2;
    std::size_t synthesis_calls = 0;
    double ms_synthesis = 0;

    std::size_t size() const { return ids.size(); }
};

struct WindowSet {
    int w = 0;
    std::vector<std::vector<int>> windows; // unique, first-occurrence order
    std::vector<int> first_window;
};

// Segment i covers observations v_i .. v_{i+w'-1}.
std::vector<std::vector<Symbol>> segment_trace(const Trace& t, int window_pred);

PredicateSequence build_predicate_sequence(const Trace& t, const SegmentationConfig& cfg);

// All contiguous w-slices of P; deduplicated unless `dedup` is false.
WindowSet window_predicates(const std::vector<int>& P, int w, bool dedup = true);

} // namespace tracegist
