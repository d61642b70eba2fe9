#pragma once

#include "tracegist/expr.hpp"
#include "tracegist/trace.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tracegist {

struct SynthesisBudget {
    int max_ast_nodes = 15;
    std::vector<std::int64_t> constant_pool_extras{-1, 0, 1};
    // Enumerated candidates before giving up; bounds the ite blow-up.
    std::size_t max_candidates = 250000;
};

using Example = std::pair<Valuation, Valuation>;

// Integers available as leaves: current-side values of the examples plus
// the budget extras, ascending and deduplicated.
std::vector<std::int64_t> constant_pool(const std::vector<Example>& examples, const Schema& schema,
                                        const SynthesisBudget& budget);

// Smallest expression over current variables reproducing the target's next
// value on every example, or nullopt when the budget runs out.
std::optional<ExprPtr> synthesize_next(const std::vector<Example>& examples, const Schema& schema, int target_var,
                                       const SynthesisBudget& budget);

enum class LabelMode { Full, Event };

struct Predicate {
    int id = -1;
    ExprPtr expr;
    std::string key; // prefix form of the canonical expression
};

// Interns canonical predicate expressions. Thread-safe for intern().
class PredicateTable {
public:
    explicit PredicateTable(Schema schema) : schema_(std::move(schema)) {}
    PredicateTable(const PredicateTable&) = delete;
    PredicateTable& operator=(const PredicateTable&) = delete;

    int intern(const ExprPtr& expr); // canonicalizes first
    const Predicate& at(int id) const { return preds_.at(id); }
    std::size_t size() const { return preds_.size(); }
    const Schema& schema() const { return schema_; }

    std::string display_label(int id, LabelMode mode) const;
    std::string prefix(int id) const { return preds_.at(id).key; }

private:
    Schema schema_;
    std::vector<Predicate> preds_;
    std::unordered_map<std::string, int> index_;
    mutable std::mutex mu_;
};

struct PredicateOptions {
    SynthesisBudget budget;
    // Schema indices of environment-driven variables: they get no clause.
    std::vector<int> input_vars;
};

// Canonical predicate expression for a segment (pure; does not intern).
ExprPtr form_predicate_expr(const std::vector<Symbol>& segment, const Schema& schema, const PredicateOptions& opts);

Predicate form_predicate(const std::vector<Symbol>& segment, PredicateTable& table, const PredicateOptions& opts);

bool eval_predicate(const Expr& p, const Symbol& s);
inline bool eval_predicate(const Predicate& p, const Symbol& s) { return eval_predicate(*p.expr, s); }

// Resolve "a,b" style variable lists to schema indices (throws Config on unknown names).
std::vector<int> resolve_vars(const Schema& schema, const std::vector<std::string>& names);

} // namespace tracegist
