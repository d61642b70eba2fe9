#include "tracegist/ktails.hpp"

#include "tracegist/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tracegist {

Pta build_pta(const std::vector<std::vector<int>>& sequences) {
    if (sequences.empty()) throw Error(ErrorKind::Argument, "build_pta needs at least one sequence");
    Pta p;
    p.children.emplace_back();
    for (const auto& seq : sequences) {
        int node = 0;
        for (int label : seq) {
            auto it = p.children[node].find(label);
            if (it != p.children[node].end()) {
                node = it->second;
                continue;
            }
            int child = static_cast<int>(p.children.size());
            p.children[node].emplace(label, child);
            p.children.emplace_back();
            node = child;
        }
    }
    return p;
}

namespace {

class Merger {
public:
    explicit Merger(const Pta& pta) : pta_(pta), parent_(pta.size()) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    // Union keeps the lower id as representative (stable BFS-ish order).
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

    // Quotient graph: rep -> label -> set of target reps.
    std::vector<std::map<int, std::set<int>>> graph() {
        std::vector<std::map<int, std::set<int>>> g(pta_.size());
        for (std::size_t s = 0; s < pta_.size(); ++s)
            for (const auto& [label, c] : pta_.children[s]) g[find(static_cast<int>(s))][label].insert(find(c));
        return g;
    }

    // Merge nondeterministic targets until the quotient is deterministic.
    void fold() {
        for (bool changed = true; changed;) {
            changed = false;
            auto g = graph();
            for (std::size_t s = 0; s < g.size(); ++s)
                for (const auto& [label, ts] : g[s]) {
                    if (ts.size() < 2) continue;
                    int first = *ts.begin();
                    for (int t : ts) changed |= unite(first, t);
                }
        }
    }

    const Pta& pta_;
    std::vector<int> parent_;
};

using Tails = std::vector<std::vector<int>>;

void collect_tails(const std::vector<std::map<int, std::set<int>>>& g, int s, int k, std::vector<int>& prefix,
                   std::set<std::vector<int>>& out) {
    out.insert(prefix);
    if (k == 0) return;
    for (const auto& [label, ts] : g[s])
        for (int t : ts) {
            prefix.push_back(label);
            collect_tails(g, t, k - 1, prefix, out);
            prefix.pop_back();
        }
}

} // namespace

Automaton ktails(const Pta& pta, int k, std::shared_ptr<const PredicateTable> table, TailMode mode) {
    if (k < 0) throw Error(ErrorKind::Argument, "k must be >= 0");
    Merger m(pta);
    for (int round = 0;; ++round) {
        if (mode == TailMode::Pta && round == 1) {
            m.fold();
            break;
        }
        m.fold();
        auto g = m.graph();
        // BFS order of representatives from the root, lowest label first.
        std::vector<int> order;
        std::vector<char> seen(pta.size(), 0);
        order.push_back(m.find(0));
        seen[order[0]] = 1;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (const auto& [label, ts] : g[order[i]])
                for (int t : ts)
                    if (!seen[t]) {
                        seen[t] = 1;
                        order.push_back(t);
                    }
        std::map<Tails, int> first_with;
        bool merged = false;
        for (int s : order) {
            std::set<std::vector<int>> tails;
            std::vector<int> prefix;
            collect_tails(g, s, k, prefix, tails);
            Tails key(tails.begin(), tails.end());
            auto [it, fresh] = first_with.emplace(std::move(key), s);
            if (!fresh) merged |= m.unite(it->second, s);
        }
        if (!merged) break;
    }

    auto g = m.graph();
    // Number reachable representatives 1..n in BFS order.
    std::vector<int> id(pta.size(), 0);
    std::vector<int> order{m.find(0)};
    id[order[0]] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& [label, ts] : g[order[i]])
            for (int t : ts)
                if (!id[t]) {
                    id[t] = static_cast<int>(order.size()) + 1;
                    order.push_back(t);
                }
    Automaton a;
    a.n_states = static_cast<int>(order.size());
    a.initial = 1;
    a.table = std::move(table);
    for (int s : order)
        for (const auto& [label, ts] : g[s])
            for (int t : ts) a.transitions.push_back({id[s], label, id[t]});
    a.normalize();
    return a;
}

PredicateSequence raw_observation_sequence(const Trace& t) {
    PredicateSequence P;
    P.window_pred = 2;
    P.table = std::make_shared<PredicateTable>(t.schema);
    auto syms = to_symbols(t);
    P.ids.reserve(syms.size());
    for (const auto& s : syms) {
        std::vector<ExprPtr> parts;
        for (std::size_t v = 0; v < t.schema.size(); ++v) {
            const Value& x = s.next.values[v];
            ExprPtr c = std::holds_alternative<std::int64_t>(x) ? mk_int(std::get<std::int64_t>(x))
                                                                 : mk_label(std::get<std::string>(x));
            parts.push_back(mk_binary(Op::Eq, mk_var(t.schema, static_cast<int>(v), true), c));
        }
        P.ids.push_back(P.table->intern(mk_nary(Op::And, std::move(parts))));
    }
    return P;
}

} // namespace tracegist
