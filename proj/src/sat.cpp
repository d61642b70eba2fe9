#include "tracegist/sat.hpp"

#include <algorithm>
#include <cstring>

namespace tracegist::sat {

namespace {

constexpr std::uint32_t kDeleted = 1u << 30;

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
}

} // namespace

Solver::Solver() = default;

int Solver::new_var() {
    int v = num_vars();
    assigns_.push_back(kUndef);
    polarity_.push_back(0);
    levels_.push_back(0);
    reasons_.push_back(kNoReason);
    activity_.push_back(0.0);
    tier_.push_back(0);
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
}

void Solver::set_tier(int v, int tier) {
    tier_.at(v) = static_cast<std::uint8_t>(tier);
    if (heap_pos_[v] >= 0) {
        heap_up(static_cast<std::size_t>(heap_pos_[v]));
        heap_down(static_cast<std::size_t>(heap_pos_[v]));
    }
}

Solver::CRef Solver::alloc_clause(const std::vector<Lit>& lits, bool learnt) {
    CRef c = static_cast<CRef>(arena_.size());
    arena_.push_back(static_cast<std::uint32_t>(lits.size()) | (learnt ? 0x80000000u : 0u));
    float act = 0.0f;
    std::uint32_t bits;
    std::memcpy(&bits, &act, sizeof bits);
    arena_.push_back(bits);
    arena_.insert(arena_.end(), lits.begin(), lits.end());
    return c;
}

void Solver::attach(CRef c) {
    const Lit* l = clits(c);
    watches_[l[0]].push_back({c, l[1]});
    watches_[l[1]].push_back({c, l[0]});
}

bool Solver::add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (i + 1 < lits.size() && var_of(lits[i]) == var_of(lits[i + 1])) return true; // tautology
        auto v = value(lits[i]);
        if (v == 1) return true;
        if (v == 0) continue;
        kept.push_back(lits[i]);
    }
    if (kept.empty()) return ok_ = false;
    if (kept.size() == 1) {
        enqueue(kept[0], kNoReason);
        if (propagate() != kNoReason) ok_ = false;
        return ok_;
    }
    CRef c = alloc_clause(kept, false);
    clauses_.push_back(c);
    attach(c);
    return true;
}

void Solver::enqueue(Lit l, CRef reason) {
    int v = var_of(l);
    assigns_[v] = sign_of(l) ? 0 : 1;
    levels_[v] = decision_level();
    reasons_[v] = reason;
    trail_.push_back(l);
}

Solver::CRef Solver::propagate() {
    CRef confl = kNoReason;
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        Lit false_lit = negate(p);
        auto& ws = watches_[false_lit];
        ++stats_.propagations;
        std::size_t i = 0, j = 0;
        const std::size_t n = ws.size();
        while (i < n) {
            Watcher w = ws[i++];
            if (arena_[w.cref] & kDeleted) continue;
            if (value(w.blocker) == 1) {
                ws[j++] = w;
                continue;
            }
            Lit* c = clits(w.cref);
            if (c[0] == false_lit) std::swap(c[0], c[1]);
            Lit first = c[0];
            if (first != w.blocker && value(first) == 1) {
                ws[j++] = {w.cref, first};
                continue;
            }
            const std::uint32_t sz = csize(w.cref);
            bool moved = false;
            for (std::uint32_t k = 2; k < sz; ++k) {
                if (value(c[k]) != 0) {
                    std::swap(c[1], c[k]);
                    watches_[c[1]].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[j++] = {w.cref, first};
            if (value(first) == 0) {
                confl = w.cref;
                qhead_ = trail_.size();
                while (i < n) ws[j++] = ws[i++];
            } else {
                enqueue(first, w.cref);
            }
        }
        ws.resize(j);
        if (confl != kNoReason) break;
    }
    return confl;
}

bool Solver::redundant(Lit l) const {
    CRef r = reasons_[var_of(l)];
    if (r == kNoReason) return false;
    const Lit* c = clits(r);
    for (std::uint32_t k = 1; k < csize(r); ++k) {
        int v = var_of(c[k]);
        if (!seen_[v] && levels_[v] > 0) return false;
    }
    return true;
}

void Solver::analyze(CRef confl, std::vector<Lit>& out, int& bt_level) {
    out.clear();
    out.push_back(0); // slot for the asserting literal
    int path = 0;
    Lit p = 0;
    bool have_p = false;
    std::size_t idx = trail_.size();
    do {
        if (clearnt(confl)) bump_clause(confl);
        const Lit* c = clits(confl);
        for (std::uint32_t k = have_p ? 1 : 0; k < csize(confl); ++k) {
            Lit q = c[k];
            int v = var_of(q);
            if (seen_[v] || levels_[v] == 0) continue;
            bump_var(v);
            seen_[v] = 1;
            if (levels_[v] >= decision_level()) ++path;
            else out.push_back(q);
        }
        while (!seen_[var_of(trail_[--idx])]) {
        }
        p = trail_[idx];
        have_p = true;
        confl = reasons_[var_of(p)];
        seen_[var_of(p)] = 0;
        --path;
    } while (path > 0);
    out[0] = negate(p);

    // local minimization: drop literals implied by the rest of the clause
    std::vector<Lit> all(out);
    std::size_t j = 1;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!redundant(out[i])) out[j++] = out[i];
    out.resize(j);

    bt_level = 0;
    if (out.size() > 1) {
        std::size_t best = 1;
        for (std::size_t i = 2; i < out.size(); ++i)
            if (levels_[var_of(out[i])] > levels_[var_of(out[best])]) best = i;
        std::swap(out[1], out[best]);
        bt_level = levels_[var_of(out[1])];
    }
    for (Lit l : all) seen_[var_of(l)] = 0;
}

void Solver::cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[lvl]);) {
        int v = var_of(trail_[i]);
        polarity_[v] = assigns_[v];
        assigns_[v] = kUndef;
        reasons_[v] = kNoReason;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
    while (!heap_.empty()) {
        int v = heap_pop();
        if (assigns_[v] == kUndef) return polarity_[v] ? pos(v) : neg(v);
    }
    return 0xffffffffu;
}

void Solver::bump_var(int v) {
    if ((activity_[v] += var_inc_) > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void Solver::bump_clause(CRef c) {
    if ((cact(c) += cla_inc_) > 1e20f) {
        for (CRef l : learnts_) cact(l) *= 1e-20f;
        cla_inc_ *= 1e-20f;
    }
}

void Solver::heap_insert(int v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
    int v = heap_[i];
    while (i > 0) {
        std::size_t parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = static_cast<int>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
    int v = heap_[i];
    const std::size_t n = heap_.size();
    for (;;) {
        std::size_t l = 2 * i + 1;
        if (l >= n) break;
        std::size_t r = l + 1;
        std::size_t best = (r < n && heap_less(heap_[r], heap_[l])) ? r : l;
        if (!heap_less(heap_[best], v)) break;
        heap_[i] = heap_[best];
        heap_pos_[heap_[i]] = static_cast<int>(i);
        i = best;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
}

int Solver::heap_pop() {
    int top = heap_[0];
    heap_pos_[top] = -1;
    int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_pos_[last] = 0;
        heap_down(0);
    }
    return top;
}

void Solver::reduce_db() {
    std::vector<CRef> order(learnts_);
    std::stable_sort(order.begin(), order.end(), [&](CRef a, CRef b) { return cact(a) < cact(b); });
    std::size_t target = order.size() / 2, dropped = 0;
    std::vector<CRef> keep;
    keep.reserve(learnts_.size());
    for (CRef c : order) {
        const Lit* l = clits(c);
        bool locked = reasons_[var_of(l[0])] == c && value(l[0]) == 1;
        if (dropped < target && csize(c) > 2 && !locked) {
            arena_[c] |= kDeleted;
            wasted_ += csize(c) + 2;
            ++dropped;
        }
    }
    for (CRef c : learnts_)
        if (!(arena_[c] & kDeleted)) keep.push_back(c);
    learnts_.swap(keep);
}

bool Solver::out_of_time(const Limits& limits) {
    if (limits.max_conflicts && stats_.conflicts >= limits.max_conflicts) return true;
    if (!limits.deadline) return false;
    return std::chrono::steady_clock::now() >= *limits.deadline;
}

Status Solver::search(std::uint64_t conflict_budget, const Limits& limits) {
    std::uint64_t conflicts_here = 0;
    std::vector<Lit> learnt;
    for (;;) {
        CRef confl = propagate();
        if (confl != kNoReason) {
            ++stats_.conflicts;
            ++conflicts_here;
            if (decision_level() == 0) return Status::Unsat;
            int bt = 0;
            analyze(confl, learnt, bt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], kNoReason);
            } else {
                CRef c = alloc_clause(learnt, true);
                learnts_.push_back(c);
                attach(c);
                bump_clause(c);
                enqueue(learnt[0], c);
            }
            var_inc_ /= 0.95;
            cla_inc_ /= 0.999f;
            if ((stats_.conflicts & 255) == 0 && out_of_time(limits)) return Status::Unknown;
            continue;
        }
        if (conflicts_here >= conflict_budget) {
            cancel_until(0);
            return Status::Unknown;
        }
        if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) reduce_db();
        if ((++checks_ & 4095) == 0 && out_of_time(limits)) return Status::Unknown;
        Lit next = pick_branch();
        if (next == 0xffffffffu) {
            model_.assign(assigns_.begin(), assigns_.end());
            return Status::Sat;
        }
        ++stats_.decisions;
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(next, kNoReason);
    }
}

Status Solver::solve(const Limits& limits) {
    model_.clear();
    if (!ok_) return Status::Unsat;
    max_learnts_ = std::max(5000.0, static_cast<double>(clauses_.size()) / 3.0);
    for (int round = 0;; ++round) {
        auto budget = static_cast<std::uint64_t>(luby(2.0, round) * 100);
        Status s = search(budget, limits);
        if (s == Status::Sat) {
            cancel_until(0);
            return s;
        }
        if (s == Status::Unsat) {
            ok_ = false;
            return s;
        }
        ++stats_.restarts;
        max_learnts_ *= 1.05;
        if (out_of_time(limits)) {
            cancel_until(0);
            return Status::Unknown;
        }
    }
}

} // namespace tracegist::sat
