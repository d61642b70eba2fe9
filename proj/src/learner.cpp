#include "tracegist/learner.hpp"

#include "tracegist/error.hpp"
#include "tracegist/log.hpp"

#include <chrono>
#include <map>

#include <json.hpp>

namespace tracegist {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string fmt_tuple(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

} // namespace

void LearnerConfig::validate() const {
    if (window_pred < 2) throw Error(ErrorKind::Config, "--window-pred must be >= 2");
    if (window < 1) throw Error(ErrorKind::Config, "--window must be >= 1");
    if (seq_len < 1) throw Error(ErrorKind::Config, "--seq-len must be >= 1");
    if (n_start < 1) throw Error(ErrorKind::Config, "starting state count must be >= 1");
    if (n_max < n_start) throw Error(ErrorKind::Config, "--max-states must be >= the starting state count");
    if (timeout_sec < 0) throw Error(ErrorKind::Config, "--timeout-sec must be >= 0");
}

std::string LearnStats::to_json() const {
    nlohmann::ordered_json j;
    j["final_N"] = final_n;
    j["solver_calls"] = solver_calls;
    j["refinements"] = refinements;
    j["windows"] = windows;
    j["slots"] = slots;
    j["ms_synthesis"] = ms_synthesis;
    j["ms_solving"] = ms_solving;
    j["ms_check"] = ms_check;
    j["n_trajectory"] = n_trajectory;
    j["acceptance_refinements"] = acceptance_refinements;
    j["minimality_checked"] = minimality_checked;
    j["minimality_unsat"] = minimality_unsat;
    return j.dump(2) + "\n";
}

EncodedInstance encode_instance(const WindowSet& ws, int N, const BlockingSet& blocking, int l) {
    if (N < 1) throw Error(ErrorKind::Argument, "N must be >= 1");
    EncodedInstance out;
    auto& cs = out.cs;
    cs.domain = N;
    out.slots.w = ws.w;
    for (std::size_t k = 0; k < ws.windows.size(); ++k) {
        const auto& win = ws.windows[k];
        for (std::size_t j = 0; j < win.size(); ++j) {
            std::string base = "w" + std::to_string(k) + "s" + std::to_string(j);
            int q = cs.add_var("q_" + base);
            int q2 = cs.add_var("q'_" + base);
            if (j > 0) cs.eqs.push_back({out.slots.slots.back().q2, q});
            out.slots.slots.push_back({win[j], q, q2});
        }
    }
    const auto& slots = out.slots.slots;
    if (!slots.empty()) cs.fixed.push_back({slots[0].q, 1});

    std::map<int, std::vector<int>> by_pid;
    for (std::size_t i = 0; i < slots.size(); ++i) by_pid[slots[i].pid].push_back(static_cast<int>(i));

    if (blocking.determinism)
        for (const auto& [pid, idx] : by_pid)
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = a + 1; b < idx.size(); ++b) {
                    const Slot& x = slots[idx[a]];
                    const Slot& y = slots[idx[b]];
                    cs.implications.push_back({{Atom::eq(x.q, y.q)}, Atom::eq(x.q2, y.q2)});
                }

    // Each forbidden tuple is instantiated over every chain of matching slots.
    for (const auto& tup : blocking.invalid) {
        if (static_cast<int>(tup.size()) != l) continue;
        std::vector<const std::vector<int>*> lists;
        bool feasible = true;
        for (int pid : tup) {
            auto it = by_pid.find(pid);
            if (it == by_pid.end()) {
                feasible = false;
                break;
            }
            lists.push_back(&it->second);
        }
        if (!feasible) continue;
        std::vector<int> pick(tup.size());
        auto rec = [&](auto&& self, std::size_t k) -> void {
            if (k == tup.size()) {
                ForbidPatternConstraint f;
                for (std::size_t t = 0; t + 1 < pick.size(); ++t)
                    f.atoms.push_back(Atom::eq(slots[pick[t]].q2, slots[pick[t + 1]].q));
                cs.forbids.push_back(std::move(f));
                return;
            }
            for (int s : *lists[k]) {
                pick[k] = s;
                self(self, k + 1);
            }
        };
        if (tup.size() >= 2) rec(rec, 0);
    }

    if (blocking.accepts) {
        AcceptsWordConstraint a;
        a.start = 1;
        a.word = *blocking.accepts;
        for (const auto& s : slots) a.relation.push_back({s.q, s.pid, s.q2});
        cs.accepts.push_back(std::move(a));
    }
    return out;
}

Automaton extract_candidate(const std::vector<int>& assignment, const SlotArray& slots, int N,
                            std::shared_ptr<const PredicateTable> table) {
    Automaton m;
    m.n_states = N;
    m.initial = 1;
    m.table = std::move(table);
    for (const auto& s : slots.slots) m.transitions.push_back({assignment.at(s.q), s.pid, assignment.at(s.q2)});
    m.normalize();
    return m;
}

std::set<std::vector<int>> l_grams(const std::vector<int>& P, int l) {
    std::set<std::vector<int>> out;
    for (std::size_t i = 0; i + l <= P.size(); ++i) out.emplace(P.begin() + i, P.begin() + i + l);
    return out;
}

std::set<std::vector<int>> subsequence_check(const Automaton& m, const std::vector<int>& P, int l) {
    auto S = paths_of_length(m, l);
    auto Pl = l_grams(P, l);
    std::set<std::vector<int>> bad;
    for (const auto& s : S)
        if (!Pl.count(s)) bad.insert(s);
    return bad;
}

bool unsat_at(const WindowSet& ws, int N, const BlockingSet& blocking, int l, const SolveOptions& opts) {
    if (N < 1) return true;
    auto inst = encode_instance(ws, N, blocking, l);
    auto r = solve(inst.cs, opts);
    if (r.status == SolveStatus::Timeout) throw Error(ErrorKind::Timeout, "solver timed out during minimality check");
    return r.status == SolveStatus::Unsat;
}

LearnResult learn(const PredicateSequence& P, const LearnerConfig& cfg) {
    cfg.validate();
    const auto& ids = P.ids;
    if (ids.empty()) throw Error(ErrorKind::Config, "empty predicate sequence");
    const int w = cfg.segmented ? cfg.window : static_cast<int>(ids.size());
    if (static_cast<std::size_t>(w) > ids.size())
        throw Error(ErrorKind::Config, "--window (" + std::to_string(w) + ") exceeds |P| = " +
                                           std::to_string(ids.size()));

    const auto t_start = Clock::now();
    SolveOptions sopts;
    sopts.external_solver = cfg.external_solver;
    if (cfg.timeout_sec > 0)
        sopts.deadline = t_start + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(cfg.timeout_sec));

    LearnResult res;
    res.windows = window_predicates(ids, w, cfg.segmented);
    auto& st = res.stats;
    st.windows = res.windows.windows.size();
    st.slots = st.windows * static_cast<std::size_t>(w);
    st.ms_synthesis = P.ms_synthesis;
    auto& blocking = res.blocking;

    int N = cfg.n_start;
    st.n_trajectory.push_back(N);
    for (;;) {
        if (N > cfg.n_max) {
            throw Error(ErrorKind::NMaxExceeded,
                        "no model with at most " + std::to_string(cfg.n_max) + " states (windows=" +
                            std::to_string(st.windows) + ", invalid sequences=" +
                            std::to_string(blocking.invalid.size()) + ", solver calls=" +
                            std::to_string(st.solver_calls) + ")");
        }
        auto t0 = Clock::now();
        auto inst = encode_instance(res.windows, N, blocking, cfg.seq_len);
        auto r = solve(inst.cs, sopts);
        auto t1 = Clock::now();
        st.ms_solving += ms_between(t0, t1);
        ++st.solver_calls;
        if (r.status == SolveStatus::Timeout)
            throw Error(ErrorKind::Timeout, "solver timed out at N=" + std::to_string(N));
        if (r.status == SolveStatus::Unsat) {
            log_debug("N=" + std::to_string(N) + " unsat");
            ++N;
            st.n_trajectory.push_back(N);
            continue;
        }
        Automaton cand = extract_candidate(r.assignment, inst.slots, N, P.table);
        auto bad = subsequence_check(cand, ids, cfg.seq_len);
        bool rejects = false;
        if (bad.empty() && cfg.trace_acceptance && !blocking.accepts) rejects = !run_ids(cand, ids);
        st.ms_check += ms_between(t1, Clock::now());
        if (!bad.empty()) {
            ++st.refinements;
            for (const auto& b : bad) {
                log_debug("N=" + std::to_string(N) + " blocking " + fmt_tuple(b));
                blocking.invalid.insert(b);
            }
            continue;
        }
        if (rejects) {
            log_debug("N=" + std::to_string(N) + " candidate rejects the trace; adding run constraint");
            ++st.acceptance_refinements;
            blocking.accepts = ids;
            continue;
        }
        res.model = std::move(cand);
        break;
    }
    st.final_n = N;

    if (cfg.verify_minimality && N > cfg.n_start) {
        auto t0 = Clock::now();
        st.minimality_checked = true;
        st.minimality_unsat = unsat_at(res.windows, N - 1, blocking, cfg.seq_len, sopts);
        st.ms_solving += ms_between(t0, Clock::now());
        ++st.solver_calls;
        if (!st.minimality_unsat) log_warn("minimality re-check at N-1 was satisfiable");
    }
    return res;
}

} // namespace tracegist
