#include "tracegist/automaton.hpp"

#include "tracegist/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace tracegist {

void Automaton::normalize() {
    std::sort(transitions.begin(), transitions.end());
    transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
}

std::set<int> Automaton::used_predicates() const {
    std::set<int> out;
    for (const auto& t : transitions) out.insert(t.pred);
    return out;
}

std::set<std::vector<int>> paths_of_length(const Automaton& m, int l) {
    if (l < 1) throw Error(ErrorKind::Argument, "path length must be >= 1");
    // frontier: (label prefix, end state)
    std::set<std::pair<std::vector<int>, int>> frontier;
    for (const auto& t : m.transitions) frontier.insert({{t.pred}, t.dst});
    std::vector<std::vector<const Transition*>> out_of(m.n_states + 1);
    for (const auto& t : m.transitions) out_of.at(t.src).push_back(&t);
    for (int step = 1; step < l; ++step) {
        std::set<std::pair<std::vector<int>, int>> next;
        for (const auto& [seq, q] : frontier)
            for (const Transition* t : out_of[q]) {
                auto s = seq;
                s.push_back(t->pred);
                next.insert({std::move(s), t->dst});
            }
        frontier = std::move(next);
    }
    std::set<std::vector<int>> out;
    for (const auto& [seq, q] : frontier) out.insert(seq);
    return out;
}

namespace {

template <class Step>
bool run_subset(const Automaton& m, std::vector<char> cur, std::size_t len, Step&& step_ok) {
    std::vector<std::vector<const Transition*>> out_of(m.n_states + 1);
    for (const auto& t : m.transitions) out_of.at(t.src).push_back(&t);
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<char> nxt(m.n_states + 1, 0);
        bool any = false;
        for (int q = 1; q <= m.n_states; ++q) {
            if (!cur[q]) continue;
            for (const Transition* t : out_of[q])
                if (!nxt[t->dst] && step_ok(i, t->pred)) {
                    nxt[t->dst] = 1;
                    any = true;
                }
        }
        if (!any) return false;
        cur = std::move(nxt);
    }
    return true;
}

} // namespace

bool contains_window_path(const Automaton& m, const std::vector<int>& window) {
    std::vector<char> all(m.n_states + 1, 1);
    all[0] = 0;
    return run_subset(m, all, window.size(), [&](std::size_t i, int p) { return window[i] == p; });
}

bool run_word(const Automaton& m, const std::vector<Symbol>& word) {
    if (!m.table) throw Error(ErrorKind::Internal, "automaton has no predicate table");
    std::vector<char> init(m.n_states + 1, 0);
    init.at(m.initial) = 1;
    // cache evaluations per (position, predicate)
    std::map<std::pair<std::size_t, int>, bool> memo;
    return run_subset(m, init, word.size(), [&](std::size_t i, int p) {
        auto [it, fresh] = memo.try_emplace({i, p}, false);
        if (fresh) it->second = eval_predicate(m.table->at(p), word[i]);
        return it->second;
    });
}

bool run_ids(const Automaton& m, const std::vector<int>& ids) {
    std::vector<char> init(m.n_states + 1, 0);
    init.at(m.initial) = 1;
    return run_subset(m, init, ids.size(), [&](std::size_t i, int p) { return ids[i] == p; });
}

bool is_predicate_deterministic(const Automaton& m) {
    std::map<std::pair<int, int>, int> seen;
    for (const auto& t : m.transitions) {
        auto [it, fresh] = seen.try_emplace({t.src, t.pred}, t.dst);
        if (!fresh && it->second != t.dst) return false;
    }
    return true;
}

namespace {

std::string label_of(const Automaton& m, int pred, LabelMode mode) {
    if (m.table && pred >= 0 && static_cast<std::size_t>(pred) < m.table->size())
        return m.table->display_label(pred, mode);
    return "p" + std::to_string(pred);
}

std::string key_of(const Automaton& m, int pred) {
    if (m.table && pred >= 0 && static_cast<std::size_t>(pred) < m.table->size()) return m.table->prefix(pred);
    return "#" + std::to_string(pred);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string to_dot(const Automaton& m, LabelMode mode) {
    std::ostringstream os;
    os << "digraph model {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=circle];\n";
    os << "  __start [shape=point];\n";
    os << "  __start -> " << m.initial << ";\n";
    for (int q = 1; q <= m.n_states; ++q) os << "  " << q << ";\n";
    for (const auto& t : m.transitions)
        os << "  " << t.src << " -> " << t.dst << " [label=\"" << dot_escape(label_of(m, t.pred, mode)) << "\"];\n";
    os << "}\n";
    return os.str();
}

std::string to_json(const Automaton& m, LabelMode mode) {
    nlohmann::ordered_json j;
    j["n_states"] = m.n_states;
    j["initial"] = m.initial;
    auto ts = m.transitions;
    std::sort(ts.begin(), ts.end());
    j["transitions"] = nlohmann::ordered_json::array();
    for (const auto& t : ts) {
        nlohmann::ordered_json e;
        e["src"] = t.src;
        e["label"] = label_of(m, t.pred, mode);
        e["pred"] = t.pred;
        e["dst"] = t.dst;
        j["transitions"].push_back(std::move(e));
    }
    j["predicates"] = nlohmann::ordered_json::array();
    for (int p : m.used_predicates()) {
        nlohmann::ordered_json e;
        e["id"] = p;
        e["expr"] = key_of(m, p);
        e["label"] = label_of(m, p, mode);
        j["predicates"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

namespace {

struct IsoSearch {
    const Automaton& a;
    const Automaton& b;
    IsoOptions opts;
    int n;
    // adjacency as label-key multisets between state pairs
    std::vector<std::vector<std::vector<std::string>>> ea, eb;
    std::vector<int> order; // states of a in assignment order
    std::vector<int> f, used;

    IsoSearch(const Automaton& a_, const Automaton& b_, IsoOptions o) : a(a_), b(b_), opts(o), n(a_.n_states) {
        ea = table(a);
        eb = table(b);
    }

    std::vector<std::vector<std::vector<std::string>>> table(const Automaton& m) {
        std::vector<std::vector<std::vector<std::string>>> e(
            m.n_states + 1, std::vector<std::vector<std::string>>(m.n_states + 1));
        for (const auto& t : m.transitions)
            e[t.src][t.dst].push_back(opts.labels == IsoLabels::Exact ? key_of(m, t.pred) : std::string());
        for (auto& row : e)
            for (auto& cell : row) std::sort(cell.begin(), cell.end());
        return e;
    }

    bool consistent(int x, int y) const {
        if (ea[x][x] != eb[y][y]) return false;
        for (int z : order) {
            if (f[z] == 0) continue;
            if (ea[x][z] != eb[y][f[z]] || ea[z][x] != eb[f[z]][y]) return false;
        }
        return true;
    }

    bool labels_bijective() const {
        if (opts.labels == IsoLabels::Exact) return true;
        // per label: its mapped edge set; multisets must coincide
        auto edge_sets = [&](const Automaton& m, bool mapped) {
            std::map<int, std::vector<std::pair<int, int>>> by;
            for (const auto& t : m.transitions)
                by[t.pred].push_back(mapped ? std::make_pair(f[t.src], f[t.dst]) : std::make_pair(t.src, t.dst));
            std::vector<std::vector<std::pair<int, int>>> out;
            for (auto& [p, v] : by) {
                std::sort(v.begin(), v.end());
                out.push_back(v);
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        return edge_sets(a, true) == edge_sets(b, false);
    }

    bool search(std::size_t k) {
        if (k == order.size()) return labels_bijective();
        int x = order[k];
        for (int y = 1; y <= n; ++y) {
            if (used[y]) continue;
            if (opts.pin_initial && ((x == a.initial) != (y == b.initial))) continue;
            f[x] = y;
            used[y] = 1;
            if (consistent(x, y) && search(k + 1)) return true;
            f[x] = 0;
            used[y] = 0;
        }
        return false;
    }

    bool run() {
        // BFS order from the initial state, then the rest.
        std::vector<char> seen(n + 1, 0);
        std::vector<int> q{a.initial};
        seen[a.initial] = 1;
        for (std::size_t i = 0; i < q.size(); ++i)
            for (const auto& t : a.transitions)
                if (t.src == q[i] && !seen[t.dst]) {
                    seen[t.dst] = 1;
                    q.push_back(t.dst);
                }
        for (int s = 1; s <= n; ++s)
            if (!seen[s]) q.push_back(s);
        order = q;
        f.assign(n + 1, 0);
        used.assign(n + 1, 0);
        return search(0);
    }
};

} // namespace

bool isomorphic(const Automaton& a, const Automaton& b, IsoOptions opts) {
    if (a.n_states != b.n_states || a.transitions.size() != b.transitions.size()) return false;
    if (opts.labels == IsoLabels::Renaming && a.used_predicates().size() != b.used_predicates().size()) return false;
    IsoSearch s(a, b, opts);
    return s.run();
}

} // namespace tracegist
