#include "tracegist/synth.hpp"

#include "tracegist/error.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <unordered_set>

namespace tracegist {

namespace {

// Bottom-up, size-stratified enumeration with observational-equivalence
// pruning. Candidates of one size are generated in grammar order, so the
// first hit is the smallest expression and ties resolve deterministically.
class Enumerator {
public:
    Enumerator(const std::vector<Example>& ex, const Schema& schema, int target, const SynthesisBudget& budget)
        : ex_(ex), schema_(schema), target_(target), budget_(budget), k_(ex.size()) {
        want_.reserve(k_);
        for (const auto& e : ex) want_.push_back(std::get<std::int64_t>(e.second.values.at(target)));
    }

    std::optional<ExprPtr> run() {
        const int max = budget_.max_ast_nodes;
        ints_.assign(max + 1, {});
        bools_.assign(max + 1, {});
        for (int s = 1; s <= max; ++s) {
            if (s == 1) leaves();
            else grow(s);
            if (found_) return found_;
            if (exhausted_) return std::nullopt;
        }
        return std::nullopt;
    }

private:
    using IntSig = std::vector<std::int64_t>;
    using BoolSig = std::vector<std::uint8_t>;
    struct IntC {
        ExprPtr e;
        bool hv;
        IntSig sig;
    };
    struct BoolC {
        ExprPtr e;
        BoolSig sig;
    };

    bool stop() const { return found_.has_value() || exhausted_; }

    template <class Sig>
    static std::string key_of(const Sig& sig, bool hv) {
        std::string k(sig.size() * sizeof(sig[0]) + 1, '\0');
        std::memcpy(k.data(), sig.data(), sig.size() * sizeof(sig[0]));
        k.back() = hv ? 1 : 0;
        return k;
    }

    bool tick() {
        if (++generated_ > budget_.max_candidates) exhausted_ = true;
        return !exhausted_;
    }

    template <class Make>
    void offer_int(int size, bool hv, IntSig sig, Make make) {
        if (!tick()) return;
        if (hv && sig == want_) {
            found_ = make();
            return;
        }
        if (!iseen_.insert(key_of(sig, hv)).second) return;
        ints_[size].push_back({make(), hv, std::move(sig)});
    }

    template <class Make>
    void offer_bool(int size, BoolSig sig, Make make) {
        if (!tick()) return;
        // constant conditions never help an ite
        bool all = std::all_of(sig.begin(), sig.end(), [](auto b) { return b; });
        bool none = std::none_of(sig.begin(), sig.end(), [](auto b) { return b; });
        if (all || none) return;
        if (!bseen_.insert(key_of(sig, true)).second) return;
        bools_[size].push_back({make(), std::move(sig)});
    }

    // Variables (target first) precede constants: with a single example,
    // op + ip and op + 1 tie, and only the former generalizes.
    void leaves() {
        std::vector<int> vars{target_};
        for (std::size_t i = 0; i < schema_.size(); ++i)
            if (static_cast<int>(i) != target_ && schema_.vars[i].kind == VarKind::Integer)
                vars.push_back(static_cast<int>(i));
        for (int v : vars) {
            IntSig sig;
            for (const auto& e : ex_) sig.push_back(std::get<std::int64_t>(e.first.values[v]));
            offer_int(1, true, std::move(sig), [&] { return mk_var(schema_, v, false); });
            if (stop()) return;
        }
        for (std::int64_t c : constant_pool(ex_, schema_, budget_)) {
            offer_int(1, false, IntSig(k_, c), [&] { return mk_int(c); });
            if (stop()) return;
        }
    }

    void grow(int s) {
        // unary negation
        for (std::size_t i = 0; i < ints_[s - 1].size() && !stop(); ++i) {
            const auto& a = ints_[s - 1][i];
            if (!a.hv) continue;
            IntSig sig(k_);
            bool ok = true;
            for (std::size_t j = 0; j < k_ && ok; ++j) ok = !__builtin_sub_overflow(0, a.sig[j], &sig[j]);
            if (ok) offer_int(s, true, std::move(sig), [&] { return mk_unary(Op::Neg, a.e); });
        }
        arith(s, Op::Add);
        arith(s, Op::Sub);
        comparisons(s);
        if (s == 3) label_atoms();
        connectives(s);
        ites(s);
    }

    void arith(int s, Op op) {
        const bool comm = op == Op::Add;
        for (int sa = 1; sa <= s - 2 && !stop(); ++sa) {
            int sb = s - 1 - sa;
            if (comm && sa > sb) break;
            const auto& A = ints_[sa];
            const auto& B = ints_[sb];
            for (std::size_t i = 0; i < A.size() && !stop(); ++i) {
                for (std::size_t j = (comm && sa == sb) ? i : 0; j < B.size() && !stop(); ++j) {
                    const auto& a = A[i];
                    const auto& b = B[j];
                    if (!a.hv && !b.hv) continue;
                    IntSig sig(k_);
                    bool ok = true;
                    for (std::size_t t = 0; t < k_ && ok; ++t)
                        ok = comm ? !__builtin_add_overflow(a.sig[t], b.sig[t], &sig[t])
                                  : !__builtin_sub_overflow(a.sig[t], b.sig[t], &sig[t]);
                    if (ok) offer_int(s, true, std::move(sig), [&] { return mk_binary(op, a.e, b.e); });
                }
            }
        }
    }

    void comparisons(int s) {
        for (Op op : {Op::Eq, Op::Le, Op::Ge}) {
            const bool comm = op == Op::Eq;
            for (int sa = 1; sa <= s - 2 && !stop(); ++sa) {
                int sb = s - 1 - sa;
                if (comm && sa > sb) break;
                const auto& A = ints_[sa];
                const auto& B = ints_[sb];
                for (std::size_t i = 0; i < A.size() && !stop(); ++i) {
                    for (std::size_t j = (comm && sa == sb) ? i + 1 : 0; j < B.size() && !stop(); ++j) {
                        const auto& a = A[i];
                        const auto& b = B[j];
                        if (!a.hv && !b.hv) continue;
                        BoolSig sig(k_);
                        for (std::size_t t = 0; t < k_; ++t)
                            sig[t] = op == Op::Eq ? a.sig[t] == b.sig[t]
                                     : op == Op::Le ? a.sig[t] <= b.sig[t]
                                                    : a.sig[t] >= b.sig[t];
                        offer_bool(s, std::move(sig), [&] { return mk_binary(op, a.e, b.e); });
                    }
                }
            }
        }
    }

    void label_atoms() {
        for (std::size_t v = 0; v < schema_.size() && !stop(); ++v) {
            if (schema_.vars[v].kind != VarKind::Categorical) continue;
            std::set<std::string> labels;
            for (const auto& e : ex_) labels.insert(std::get<std::string>(e.first.values[v]));
            for (const auto& l : labels) {
                BoolSig sig(k_);
                for (std::size_t t = 0; t < k_; ++t) sig[t] = std::get<std::string>(ex_[t].first.values[v]) == l;
                offer_bool(3, std::move(sig), [&] {
                    return mk_binary(Op::Eq, mk_var(schema_, static_cast<int>(v), false), mk_label(l));
                });
                if (stop()) return;
            }
        }
    }

    void connectives(int s) {
        for (std::size_t i = 0; i < bools_[s - 1].size() && !stop(); ++i) {
            const auto& a = bools_[s - 1][i];
            BoolSig sig(k_);
            for (std::size_t t = 0; t < k_; ++t) sig[t] = !a.sig[t];
            offer_bool(s, std::move(sig), [&] { return mk_unary(Op::Not, a.e); });
        }
        for (Op op : {Op::And, Op::Or}) {
            for (int sa = 1; sa <= s - 2 && !stop(); ++sa) {
                int sb = s - 1 - sa;
                if (sa > sb) break;
                const auto& A = bools_[sa];
                const auto& B = bools_[sb];
                for (std::size_t i = 0; i < A.size() && !stop(); ++i)
                    for (std::size_t j = sa == sb ? i + 1 : 0; j < B.size() && !stop(); ++j) {
                        BoolSig sig(k_);
                        for (std::size_t t = 0; t < k_; ++t)
                            sig[t] = op == Op::And ? (A[i].sig[t] && B[j].sig[t]) : (A[i].sig[t] || B[j].sig[t]);
                        offer_bool(s, std::move(sig), [&] { return mk_binary(op, A[i].e, B[j].e); });
                    }
            }
        }
    }

    void ites(int s) {
        for (int sc = 3; sc <= s - 3 && !stop(); ++sc) {
            for (int sa = 1; sa <= s - 1 - sc - 1 && !stop(); ++sa) {
                int sb = s - 1 - sc - sa;
                for (const auto& c : bools_[sc]) {
                    for (const auto& a : ints_[sa]) {
                        for (const auto& b : ints_[sb]) {
                            if (stop()) return;
                            IntSig sig(k_);
                            for (std::size_t t = 0; t < k_; ++t) sig[t] = c.sig[t] ? a.sig[t] : b.sig[t];
                            offer_int(s, true, std::move(sig), [&] { return mk_ite(c.e, a.e, b.e); });
                        }
                    }
                }
            }
        }
    }

    const std::vector<Example>& ex_;
    const Schema& schema_;
    int target_;
    const SynthesisBudget& budget_;
    std::size_t k_;
    IntSig want_;
    std::vector<std::vector<IntC>> ints_;
    std::vector<std::vector<BoolC>> bools_;
    std::unordered_set<std::string> iseen_, bseen_;
    std::size_t generated_ = 0;
    bool exhausted_ = false;
    std::optional<ExprPtr> found_;
};

bool is_event_atom(const Expr& e) {
    return e.op == Op::Eq && e.kids[0]->op == Op::Var && e.kids[0]->primed && e.kids[0]->type == Type::Label &&
           e.kids[1]->op == Op::LabelConst;
}

} // namespace

std::vector<std::int64_t> constant_pool(const std::vector<Example>& examples, const Schema& schema,
                                        const SynthesisBudget& budget) {
    std::set<std::int64_t> pool(budget.constant_pool_extras.begin(), budget.constant_pool_extras.end());
    for (const auto& e : examples)
        for (std::size_t i = 0; i < schema.size(); ++i)
            if (schema.vars[i].kind == VarKind::Integer) pool.insert(std::get<std::int64_t>(e.first.values[i]));
    return {pool.begin(), pool.end()};
}

std::optional<ExprPtr> synthesize_next(const std::vector<Example>& examples, const Schema& schema, int target_var,
                                       const SynthesisBudget& budget) {
    if (examples.empty()) throw Error(ErrorKind::Argument, "synthesize_next needs at least one example");
    if (budget.max_ast_nodes < 1) throw Error(ErrorKind::Config, "max_ast_nodes must be >= 1");
    if (target_var < 0 || static_cast<std::size_t>(target_var) >= schema.size() ||
        schema.vars[target_var].kind != VarKind::Integer)
        throw Error(ErrorKind::Argument, "synthesis target must be an integer variable");
    Enumerator en(examples, schema, target_var, budget);
    auto r = en.run();
    if (r) return canonicalize(*r);
    return std::nullopt;
}

int PredicateTable::intern(const ExprPtr& expr) {
    ExprPtr c = canonicalize(expr);
    std::string key = to_prefix(*c, schema_);
    std::lock_guard<std::mutex> lk(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(preds_.size());
    preds_.push_back({id, c, key});
    index_.emplace(std::move(key), id);
    return id;
}

std::string PredicateTable::display_label(int id, LabelMode mode) const {
    const Expr& e = *preds_.at(id).expr;
    if (mode == LabelMode::Event) {
        if (is_event_atom(e)) return e.kids[1]->label;
        if (e.op == Op::Or || e.op == Op::And) {
            bool all = std::all_of(e.kids.begin(), e.kids.end(), [](const ExprPtr& k) { return is_event_atom(*k); });
            if (all) {
                std::string out;
                for (std::size_t i = 0; i < e.kids.size(); ++i) {
                    if (i) out += e.op == Op::Or ? "|" : "&";
                    out += e.kids[i]->kids[1]->label;
                }
                return out;
            }
        }
    }
    return to_infix(e, schema_);
}

ExprPtr form_predicate_expr(const std::vector<Symbol>& segment, const Schema& schema, const PredicateOptions& opts) {
    if (segment.empty()) throw Error(ErrorKind::Argument, "empty segment");
    std::vector<Example> ex;
    ex.reserve(segment.size());
    for (const auto& s : segment) ex.emplace_back(s.current, s.next);

    struct Clause {
        ExprPtr e;
        bool identity;
    };
    std::vector<Clause> clauses;
    for (std::size_t v = 0; v < schema.size(); ++v) {
        const int vi = static_cast<int>(v);
        if (std::find(opts.input_vars.begin(), opts.input_vars.end(), vi) != opts.input_vars.end()) continue;
        auto primed = mk_var(schema, vi, true);
        if (schema.vars[v].kind == VarKind::Integer) {
            if (auto r = synthesize_next(ex, schema, vi, opts.budget)) {
                const Expr& x = **r;
                bool identity = x.op == Op::Var && x.var == vi && !x.primed;
                clauses.push_back({mk_binary(Op::Eq, primed, *r), identity});
                continue;
            }
            // table fallback: disjunction of the observed transitions
            std::set<std::pair<std::int64_t, std::int64_t>> pairs;
            for (const auto& e : ex)
                pairs.emplace(std::get<std::int64_t>(e.first.values[v]), std::get<std::int64_t>(e.second.values[v]));
            std::vector<ExprPtr> alts;
            for (auto [a, b] : pairs)
                alts.push_back(mk_binary(Op::And, mk_binary(Op::Eq, mk_var(schema, vi, false), mk_int(a)),
                                         mk_binary(Op::Eq, primed, mk_int(b))));
            clauses.push_back({mk_nary(Op::Or, std::move(alts)), false});
        } else {
            std::set<std::string> nexts;
            for (const auto& e : ex) nexts.insert(std::get<std::string>(e.second.values[v]));
            std::vector<ExprPtr> alts;
            for (const auto& l : nexts) alts.push_back(mk_binary(Op::Eq, primed, mk_label(l)));
            clauses.push_back({mk_nary(Op::Or, std::move(alts)), false});
        }
    }
    bool any_change = std::any_of(clauses.begin(), clauses.end(), [](const Clause& c) { return !c.identity; });
    std::vector<ExprPtr> conj;
    for (auto& c : clauses)
        if (!(c.identity && any_change)) conj.push_back(c.e);
    return canonicalize(mk_nary(Op::And, std::move(conj)));
}

Predicate form_predicate(const std::vector<Symbol>& segment, PredicateTable& table, const PredicateOptions& opts) {
    int id = table.intern(form_predicate_expr(segment, table.schema(), opts));
    return table.at(id);
}

bool eval_predicate(const Expr& p, const Symbol& s) {
    return std::get<bool>(evaluate(p, s.current, &s.next));
}

std::vector<int> resolve_vars(const Schema& schema, const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const auto& n : names) {
        int i = schema.index_of(n);
        if (i < 0) throw Error(ErrorKind::Config, "unknown variable '" + n + "'");
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace tracegist
