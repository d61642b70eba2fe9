#pragma once

#include "tracegist/trace.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tracegist {

// Node kinds, listed in the fixed total order used to sort operands.
enum class Op : std::uint8_t {
    BoolConst,
    Var,
    IntConst,
    LabelConst,
    Neg,
    Add,
    Sub,
    Eq,
    Le,
    Ge,
    Not,
    And,
    Or,
    Ite,
};

enum class Type : std::uint8_t { Int, Bool, Label };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Op op;
    Type type;
    int var = -1;          // schema index (Var)
    bool primed = false;   // x' vs x (Var)
    std::int64_t ival = 0; // IntConst, BoolConst (0/1)
    std::string label;     // LabelConst
    std::vector<ExprPtr> kids;
};

// Builders. Types are checked; ill-typed combinations throw Error(Internal).
ExprPtr mk_var(const Schema& s, int index, bool primed);
ExprPtr mk_int(std::int64_t v);
ExprPtr mk_bool(bool v);
ExprPtr mk_label(std::string v);
ExprPtr mk_unary(Op op, ExprPtr a);
ExprPtr mk_binary(Op op, ExprPtr a, ExprPtr b);
ExprPtr mk_nary(Op op, std::vector<ExprPtr> kids); // And / Or
ExprPtr mk_ite(ExprPtr c, ExprPtr a, ExprPtr b);

int node_count(const Expr& e);
bool mentions_var(const Expr& e);

// Total order on ASTs (-1, 0, 1).
int compare(const Expr& a, const Expr& b);
bool structurally_equal(const Expr& a, const Expr& b);

ExprPtr canonicalize(const ExprPtr& e);

// Evaluation result: integer, boolean or label.
using EvalValue = std::variant<std::int64_t, bool, std::string>;

// Evaluate under {x -> cur, x' -> nxt}. `nxt` may be null when the
// expression mentions no primed variable. Integer overflow throws
// Error(Overflow).
EvalValue evaluate(const Expr& e, const Valuation& cur, const Valuation* nxt);

// Parenthesized prefix form, e.g. "(= x' (+ x 1))". Stable across runs.
std::string to_prefix(const Expr& e, const Schema& s);
// Human-oriented infix form, e.g. "x' = x + 1".
std::string to_infix(const Expr& e, const Schema& s);

} // namespace tracegist
