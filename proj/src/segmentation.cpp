#include "tracegist/segmentation.hpp"

#include "tracegist/error.hpp"
#include "tracegist/log.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <set>

namespace tracegist {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Unique {
    std::vector<int> seg_of_pos;      // position -> unique segment index
    std::vector<std::size_t> first;   // unique index -> first position
    std::vector<std::size_t> count;   // multiplicity
};

Unique dedup_segments(const std::vector<std::vector<Symbol>>& segs, bool memoize) {
    Unique u;
    u.seg_of_pos.resize(segs.size());
    std::map<std::vector<Symbol>, int> seen;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        int idx;
        if (memoize) {
            auto [it, fresh] = seen.try_emplace(segs[i], static_cast<int>(u.first.size()));
            idx = it->second;
            if (fresh) {
                u.first.push_back(i);
                u.count.push_back(0);
            }
        } else {
            idx = static_cast<int>(u.first.size());
            u.first.push_back(i);
            u.count.push_back(0);
        }
        u.seg_of_pos[i] = idx;
        ++u.count[idx];
    }
    return u;
}

std::vector<ExprPtr> synthesize_all(const std::vector<std::vector<Symbol>>& segs, const Unique& u,
                                    const Schema& schema, const SegmentationConfig& cfg) {
    std::vector<ExprPtr> out(u.first.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) out[k] = form_predicate_expr(segs[u.first[k]], schema, cfg.predicate);
    };
    int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || out.size() < 2) {
        work(0, out.size());
        return out;
    }
    std::vector<std::future<void>> fs;
    std::size_t chunk = (out.size() + jobs - 1) / jobs;
    for (std::size_t lo = 0; lo < out.size(); lo += chunk)
        fs.push_back(std::async(std::launch::async, work, lo, std::min(out.size(), lo + chunk)));
    for (auto& f : fs) f.get();
    return out;
}

bool holds_on(const Expr& p, const std::vector<Symbol>& seg) {
    for (const auto& s : seg) {
        try {
            if (!eval_predicate(p, s)) return false;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Overflow) throw;
            return false;
        }
    }
    return true;
}

// Per unique segment: the vocabulary predicate (by raw id) with the widest
// support among those that hold on it. Ties go to the lower id.
std::vector<int> consolidate(const std::vector<std::vector<Symbol>>& segs, const Unique& u,
                             const std::vector<int>& raw_of_unique, const PredicateTable& table) {
    std::set<int> vocab(raw_of_unique.begin(), raw_of_unique.end());
    const std::size_t U = u.first.size();
    std::map<int, std::vector<bool>> holds;
    std::map<int, std::size_t> support;
    for (int p : vocab) {
        auto& h = holds[p];
        h.resize(U);
        std::size_t sup = 0;
        for (std::size_t k = 0; k < U; ++k) {
            h[k] = raw_of_unique[k] == p || holds_on(*table.at(p).expr, segs[u.first[k]]);
            if (h[k]) sup += u.count[k];
        }
        support[p] = sup;
    }
    std::vector<int> out(U);
    for (std::size_t k = 0; k < U; ++k) {
        int best = raw_of_unique[k];
        for (int p : vocab) {
            if (!holds[p][k]) continue;
            if (support[p] > support[best] || (support[p] == support[best] && p < best)) best = p;
        }
        out[k] = best;
    }
    return out;
}

// Threshold guards for one-symbol segments. For a tracked integer variable
// with observed range [lo, hi], a symbol sitting at lo or hi is guarded when
// a neighbour with a different predicate never occurs at that value
// (turning point) or when its own predicate only occurs at the bounds
// (saturation).
std::vector<ExprPtr> guard_pass(const std::vector<Symbol>& syms, const std::vector<int>& P,
                                 const PredicateTable& table, const std::vector<int>& inputs) {
    const Schema& schema = table.schema();
    const std::size_t n = P.size();
    std::vector<std::vector<ExprPtr>> guards(n);
    for (std::size_t v = 0; v < schema.size(); ++v) {
        if (schema.vars[v].kind != VarKind::Integer) continue;
        if (std::find(inputs.begin(), inputs.end(), static_cast<int>(v)) != inputs.end()) continue;
        auto cur = [&](std::size_t i) { return std::get<std::int64_t>(syms[i].current.values[v]); };
        std::int64_t lo = cur(0), hi = cur(0);
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, cur(i));
            hi = std::max(hi, cur(i));
        }
        if (!syms.empty()) {
            auto last = std::get<std::int64_t>(syms.back().next.values[v]);
            lo = std::min(lo, last);
            hi = std::max(hi, last);
        }
        if (lo == hi) continue;
        std::map<int, std::set<std::int64_t>> range;
        for (std::size_t i = 0; i < n; ++i) range[P[i]].insert(cur(i));
        auto only_bounds = [&](int p) {
            for (auto x : range[p])
                if (x != lo && x != hi) return false;
            return true;
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t x = cur(i);
            if (x != lo && x != hi) continue;
            bool turning = false;
            for (std::size_t j : {i - 1, i + 1}) {
                if (j >= n || P[j] == P[i]) continue; // i-1 wraps for i = 0
                if (!range[P[j]].count(x)) turning = true;
            }
            if (!turning && !only_bounds(P[i])) continue;
            auto var = mk_var(schema, static_cast<int>(v), false);
            guards[i].push_back(x == hi ? mk_binary(Op::Ge, var, mk_int(hi)) : mk_binary(Op::Le, var, mk_int(lo)));
        }
    }
    std::vector<ExprPtr> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (guards[i].empty()) continue;
        auto parts = guards[i];
        parts.push_back(table.at(P[i]).expr);
        out[i] = mk_nary(Op::And, std::move(parts));
    }
    return out;
}

} // namespace

std::vector<std::vector<Symbol>> segment_trace(const Trace& t, int window_pred) {
    const std::size_t n = t.length();
    if (window_pred < 2 || static_cast<std::size_t>(window_pred) > n)
        throw Error(ErrorKind::Argument, "window-pred must lie in [2, trace length]");
    auto syms = to_symbols(t);
    const std::size_t k = n + 1 - window_pred;
    std::vector<std::vector<Symbol>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.emplace_back(syms.begin() + i, syms.begin() + i + (window_pred - 1));
    return out;
}

PredicateSequence build_predicate_sequence(const Trace& t, const SegmentationConfig& cfg) {
    auto t0 = Clock::now();
    auto segs = segment_trace(t, cfg.window_pred);
    Unique u = dedup_segments(segs, cfg.memoize);
    auto exprs = synthesize_all(segs, u, t.schema, cfg);

    PredicateTable raw(t.schema);
    std::vector<int> raw_of_unique(exprs.size());
    for (std::size_t k = 0; k < exprs.size(); ++k) raw_of_unique[k] = raw.intern(exprs[k]);
    log_debug("synthesized " + std::to_string(exprs.size()) + " segments, " + std::to_string(raw.size()) +
              " distinct predicates");

    std::vector<int> chosen = cfg.consolidate ? consolidate(segs, u, raw_of_unique, raw) : raw_of_unique;
    std::vector<int> P(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) P[i] = chosen[u.seg_of_pos[i]];

    std::vector<ExprPtr> guarded;
    if (cfg.guard_pass && cfg.window_pred == 2) guarded = guard_pass(to_symbols(t), P, raw, cfg.predicate.input_vars);

    // Dense ids in order of first occurrence.
    PredicateSequence out;
    out.window_pred = cfg.window_pred;
    out.table = std::make_shared<PredicateTable>(t.schema);
    out.ids.resize(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        const ExprPtr& e = (!guarded.empty() && guarded[i]) ? guarded[i] : raw.at(P[i]).expr;
        out.ids[i] = out.table->intern(e);
    }
    out.synthesis_calls = exprs.size();
    out.ms_synthesis = ms_since(t0);
    return out;
}

WindowSet window_predicates(const std::vector<int>& P, int w, bool dedup) {
    if (w < 1 || static_cast<std::size_t>(w) > P.size())
        throw Error(ErrorKind::Argument, "window length must lie in [1, |P|]");
    if (w == 1) log_warn("window length 1 captures no sequential behaviour");
    WindowSet ws;
    ws.w = w;
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i + w <= P.size(); ++i) {
        std::vector<int> win(P.begin() + i, P.begin() + i + w);
        if (dedup && !seen.insert(win).second) continue;
        ws.windows.push_back(std::move(win));
    }
    ws.first_window.assign(P.begin(), P.begin() + w);
    return ws;
}

} // namespace tracegist
