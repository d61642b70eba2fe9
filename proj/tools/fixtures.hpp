#pragma once

#include <tracegist/automaton.hpp>
#include <tracegist/trace.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fixtures {

// Counts 1..T and back down to 1, `cycles` times (endpoints shared between
// phases). With `length`, as many cycles as needed, truncated.
tracegist::Trace counter(int T, int cycles, std::optional<std::size_t> length = std::nullopt);

// (ip, op) with op_{t+1} = clamp(op_t + ip_t, -limit, limit), ip drawn
// uniformly from {1, 0, -1}; op_1 = 0.
tracegist::Trace integrator(std::size_t length, std::uint64_t seed, int limit = 5);

struct LabeledEdge {
    int src;
    std::string label;
    int dst;
};

// The four-state USB slot protocol (xHCI slot states).
const std::vector<LabeledEdge>& usb_slot_edges();

// Random walk from state 1 emitting the label of each traversed edge.
tracegist::Trace usb_slot_walk(std::size_t length, std::uint64_t seed);

// Reference automata. Predicates are interned into `table`, whose schema
// must match the corresponding fixture.
tracegist::Automaton usb_slot_reference(std::shared_ptr<tracegist::PredicateTable> table, int initial);
tracegist::Automaton counter_reference(std::shared_ptr<tracegist::PredicateTable> table, std::int64_t T);

} // namespace fixtures
