#include "fixtures.hpp"

#include <tracegist/error.hpp>

#include <algorithm>
#include <random>

namespace fixtures {

using namespace tracegist;

Trace counter(int T, int cycles, std::optional<std::size_t> length) {
    if (T < 2) throw Error(ErrorKind::Config, "counter threshold must be >= 2");
    if (cycles < 1 && !length) throw Error(ErrorKind::Config, "counter needs cycles >= 1 or a length");
    if (length && *length < 2) throw Error(ErrorKind::Config, "length must be >= 2");
    Trace t;
    t.schema.vars.push_back({"x", VarKind::Integer});
    auto push = [&](std::int64_t v) { t.observations.push_back(Valuation{{Value(v)}}); };
    push(1);
    for (int c = 0; length ? t.length() < *length : c < cycles; ++c) {
        for (int v = 2; v <= T; ++v) push(v);
        for (int v = T - 1; v >= 1; --v) push(v);
    }
    if (length) t.observations.resize(*length);
    return t;
}

Trace integrator(std::size_t length, std::uint64_t seed, int limit) {
    if (length < 2) throw Error(ErrorKind::Config, "length must be >= 2");
    if (limit < 1) throw Error(ErrorKind::Config, "limit must be >= 1");
    Trace t;
    t.schema.vars.push_back({"ip", VarKind::Integer});
    t.schema.vars.push_back({"op", VarKind::Integer});
    std::mt19937_64 rng(seed);
    std::int64_t op = 0;
    for (std::size_t i = 0; i < length; ++i) {
        std::int64_t ip = static_cast<std::int64_t>(rng() % 3) - 1;
        t.observations.push_back(Valuation{{Value(ip), Value(op)}});
        op = std::clamp<std::int64_t>(op + ip, -limit, limit);
    }
    return t;
}

const std::vector<LabeledEdge>& usb_slot_edges() {
    static const std::vector<LabeledEdge> edges = {
        {1, "CR_ENABLE_SLOT", 2},  {2, "CR_ADDR_DEV", 3},     {3, "CR_CONFIG_END", 4}, {4, "CR_CONFIG_END", 4},
        {4, "CR_STOP_END", 3},     {4, "CR_RESET_DEVICE", 2}, {4, "CR_DISABLE_SLOT", 1},
    };
    return edges;
}

Trace usb_slot_walk(std::size_t length, std::uint64_t seed) {
    if (length < 2) throw Error(ErrorKind::Config, "length must be >= 2");
    Trace t;
    t.schema.vars.push_back({"ev", VarKind::Categorical});
    std::mt19937_64 rng(seed);
    int state = 1;
    const auto& edges = usb_slot_edges();
    while (t.length() < length) {
        std::vector<const LabeledEdge*> out;
        for (const auto& e : edges)
            if (e.src == state) out.push_back(&e);
        const LabeledEdge* e = out[rng() % out.size()];
        t.observations.push_back(Valuation{{Value(e->label)}});
        state = e->dst;
    }
    return t;
}

Automaton usb_slot_reference(std::shared_ptr<PredicateTable> table, int initial) {
    const Schema& s = table->schema();
    int ev = s.index_of("ev");
    if (ev < 0) throw Error(ErrorKind::Internal, "reference table lacks 'ev'");
    Automaton m;
    m.n_states = 4;
    m.initial = initial;
    for (const auto& e : usb_slot_edges()) {
        int p = table->intern(mk_binary(Op::Eq, mk_var(s, ev, true), mk_label(e.label)));
        m.transitions.push_back({e.src, p, e.dst});
    }
    m.table = std::move(table);
    m.normalize();
    return m;
}

Automaton counter_reference(std::shared_ptr<PredicateTable> table, std::int64_t T) {
    const Schema& s = table->schema();
    int x = s.index_of("x");
    if (x < 0) throw Error(ErrorKind::Internal, "reference table lacks 'x'");
    auto cur = mk_var(s, x, false);
    auto nxt = mk_var(s, x, true);
    auto up = mk_binary(Op::Eq, nxt, mk_binary(Op::Add, cur, mk_int(1)));
    auto down = mk_binary(Op::Eq, nxt, mk_binary(Op::Sub, cur, mk_int(1)));
    int pu = table->intern(up);
    int pd = table->intern(down);
    int top = table->intern(mk_binary(Op::And, mk_binary(Op::Ge, cur, mk_int(T)), down));
    int bottom = table->intern(mk_binary(Op::And, mk_binary(Op::Le, cur, mk_int(1)), up));
    Automaton m;
    m.n_states = 4;
    m.initial = 1;
    m.transitions = {{1, pu, 1}, {1, top, 2}, {2, pd, 3}, {3, pd, 3}, {3, bottom, 4}, {4, pu, 1}};
    m.table = std::move(table);
    m.normalize();
    return m;
}

} // namespace fixtures
