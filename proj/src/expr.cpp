#include "tracegist/expr.hpp"

#include "tracegist/error.hpp"

#include <algorithm>

namespace tracegist {

namespace {

std::shared_ptr<Expr> make(Op op, Type t, std::vector<ExprPtr> kids = {}) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->type = t;
    e->kids = std::move(kids);
    return e;
}

[[noreturn]] void ill_typed(const char* what) {
    throw Error(ErrorKind::Internal, std::string("ill-typed expression: ") + what);
}

bool is_const(const Expr& e) {
    return e.op == Op::IntConst || e.op == Op::BoolConst || e.op == Op::LabelConst;
}

bool is_primed_var(const Expr& e) { return e.op == Op::Var && e.primed; }

bool checked_add(std::int64_t a, std::int64_t b, std::int64_t& r) { return !__builtin_add_overflow(a, b, &r); }
bool checked_sub(std::int64_t a, std::int64_t b, std::int64_t& r) { return !__builtin_sub_overflow(a, b, &r); }

void flatten(Op op, const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->op == op) {
        for (const auto& k : e->kids) flatten(op, k, out);
    } else {
        out.push_back(e);
    }
}

ExprPtr canon_add(const ExprPtr& a, const ExprPtr& b) {
    std::vector<ExprPtr> terms;
    flatten(Op::Add, a, terms);
    flatten(Op::Add, b, terms);
    std::int64_t sum = 0;
    std::vector<ExprPtr> rest;
    for (auto& t : terms) {
        std::int64_t r;
        if (t->op == Op::IntConst && checked_add(sum, t->ival, r)) sum = r;
        else rest.push_back(t);
    }
    std::stable_sort(rest.begin(), rest.end(), [](const ExprPtr& x, const ExprPtr& y) {
        // leftover (overflowing) constants stay behind the variable terms
        bool cx = x->op == Op::IntConst, cy = y->op == Op::IntConst;
        if (cx != cy) return cy;
        return compare(*x, *y) < 0;
    });
    if (rest.empty()) return mk_int(sum);
    ExprPtr acc = rest[0];
    for (std::size_t i = 1; i < rest.size(); ++i) acc = make(Op::Add, Type::Int, {acc, rest[i]});
    if (sum != 0) acc = make(Op::Add, Type::Int, {acc, mk_int(sum)});
    return acc;
}

ExprPtr canon_cmp(Op op, ExprPtr a, ExprPtr b);

ExprPtr canon_eq(ExprPtr a, ExprPtr b) {
    if (is_const(*a) && is_const(*b)) return mk_bool(structurally_equal(*a, *b));
    if (structurally_equal(*a, *b)) return mk_bool(true);
    bool pa = is_primed_var(*a), pb = is_primed_var(*b);
    if (pa != pb) {
        if (pb) std::swap(a, b);
    } else if (compare(*b, *a) < 0) {
        std::swap(a, b);
    }
    return make(Op::Eq, Type::Bool, {a, b});
}

ExprPtr canon_cmp(Op op, ExprPtr a, ExprPtr b) {
    if (a->op == Op::IntConst && b->op == Op::IntConst)
        return mk_bool(op == Op::Le ? a->ival <= b->ival : a->ival >= b->ival);
    if (structurally_equal(*a, *b)) return mk_bool(true);
    Op flip = op == Op::Le ? Op::Ge : Op::Le;
    if (a->op == Op::IntConst) return make(flip, Type::Bool, {b, a});
    if (b->op != Op::IntConst && op == Op::Ge) return make(Op::Le, Type::Bool, {b, a});
    return make(op, Type::Bool, {a, b});
}

ExprPtr canon_bool_nary(Op op, const std::vector<ExprPtr>& kids) {
    const bool unit = op == Op::And; // identity element
    std::vector<ExprPtr> flat;
    for (const auto& k : kids) flatten(op, k, flat);
    std::vector<ExprPtr> rest;
    for (auto& k : flat) {
        if (k->op == Op::BoolConst) {
            if ((k->ival != 0) != unit) return mk_bool(!unit);
            continue;
        }
        rest.push_back(k);
    }
    std::sort(rest.begin(), rest.end(), [](const ExprPtr& x, const ExprPtr& y) { return compare(*x, *y) < 0; });
    rest.erase(std::unique(rest.begin(), rest.end(),
                           [](const ExprPtr& x, const ExprPtr& y) { return structurally_equal(*x, *y); }),
               rest.end());
    if (rest.empty()) return mk_bool(unit);
    if (rest.size() == 1) return rest[0];
    return make(op, Type::Bool, std::move(rest));
}

ExprPtr canon_node(const Expr& e, std::vector<ExprPtr> k);

ExprPtr canon_not(const ExprPtr& a) {
    switch (a->op) {
    case Op::BoolConst: return mk_bool(a->ival == 0);
    case Op::Not: return a->kids[0];
    case Op::Le: // !(a <= b)  ==  a >= b + 1
        return canon_cmp(Op::Ge, a->kids[0], canon_add(a->kids[1], mk_int(1)));
    case Op::Ge:
        return canon_cmp(Op::Le, a->kids[0], canon_add(a->kids[1], mk_int(-1)));
    default: return make(Op::Not, Type::Bool, {a});
    }
}

ExprPtr canon_node(const Expr& e, std::vector<ExprPtr> k) {
    switch (e.op) {
    case Op::BoolConst:
    case Op::Var:
    case Op::IntConst:
    case Op::LabelConst: return std::make_shared<Expr>(e);
    case Op::Neg: {
        const auto& a = k[0];
        if (a->op == Op::IntConst && a->ival != INT64_MIN) return mk_int(-a->ival);
        if (a->op == Op::Neg) return a->kids[0];
        return make(Op::Neg, Type::Int, {a});
    }
    case Op::Add: return canon_add(k[0], k[1]);
    case Op::Sub: {
        const auto& a = k[0];
        const auto& b = k[1];
        std::int64_t r;
        if (a->op == Op::IntConst && b->op == Op::IntConst && checked_sub(a->ival, b->ival, r)) return mk_int(r);
        if (b->op == Op::IntConst && b->ival != INT64_MIN) return canon_add(a, mk_int(-b->ival));
        return make(Op::Sub, Type::Int, {a, b});
    }
    case Op::Eq: return canon_eq(k[0], k[1]);
    case Op::Le:
    case Op::Ge: return canon_cmp(e.op, k[0], k[1]);
    case Op::Not: return canon_not(k[0]);
    case Op::And:
    case Op::Or: return canon_bool_nary(e.op, k);
    case Op::Ite: {
        auto c = k[0], a = k[1], b = k[2];
        if (c->op == Op::Not) {
            c = c->kids[0];
            std::swap(a, b);
        }
        if (c->op == Op::BoolConst) return c->ival ? a : b;
        if (structurally_equal(*a, *b)) return a;
        return make(Op::Ite, a->type, {c, a, b});
    }
    }
    return nullptr;
}

std::string quote_label(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

const char* op_token(Op op) {
    switch (op) {
    case Op::Neg:
    case Op::Sub: return "-";
    case Op::Add: return "+";
    case Op::Eq: return "=";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Ite: return "ite";
    default: return "?";
    }
}

int precedence(const Expr& e) {
    switch (e.op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Eq:
    case Op::Le:
    case Op::Ge: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Neg: return 6;
    default: return 7;
    }
}

std::string infix(const Expr& e, const Schema& s);

std::string wrap(const Expr& e, const Schema& s, int min_prec) {
    std::string r = infix(e, s);
    return precedence(e) < min_prec ? "(" + r + ")" : r;
}

std::string infix(const Expr& e, const Schema& s) {
    switch (e.op) {
    case Op::BoolConst: return e.ival ? "true" : "false";
    case Op::Var: return s.vars.at(e.var).name + (e.primed ? "'" : "");
    case Op::IntConst: return std::to_string(e.ival);
    case Op::LabelConst: return e.label;
    case Op::Neg: return "-" + wrap(*e.kids[0], s, 7);
    case Op::Add: {
        const Expr& r = *e.kids[1];
        if (r.op == Op::IntConst && r.ival < 0 && r.ival != INT64_MIN)
            return wrap(*e.kids[0], s, 5) + " - " + std::to_string(-r.ival);
        return wrap(*e.kids[0], s, 5) + " + " + wrap(r, s, 6);
    }
    case Op::Sub: return wrap(*e.kids[0], s, 5) + " - " + wrap(*e.kids[1], s, 6);
    case Op::Eq:
    case Op::Le:
    case Op::Ge: return wrap(*e.kids[0], s, 5) + " " + op_token(e.op) + " " + wrap(*e.kids[1], s, 5);
    case Op::Not: return "!" + wrap(*e.kids[0], s, 4);
    case Op::And:
    case Op::Or: {
        std::string out;
        const char* sep = e.op == Op::And ? " /\\ " : " \\/ ";
        int p = precedence(e) + 1;
        // guards read better ahead of the update they enable
        std::vector<const Expr*> kids;
        for (const auto& k : e.kids) kids.push_back(k.get());
        std::stable_partition(kids.begin(), kids.end(),
                              [](const Expr* k) { return k->op == Op::Le || k->op == Op::Ge; });
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) out += sep;
            out += wrap(*kids[i], s, p);
        }
        return out;
    }
    case Op::Ite:
        return "ite(" + infix(*e.kids[0], s) + ", " + infix(*e.kids[1], s) + ", " + infix(*e.kids[2], s) + ")";
    }
    return "?";
}

} // namespace

ExprPtr mk_var(const Schema& s, int index, bool primed) {
    if (index < 0 || static_cast<std::size_t>(index) >= s.size()) ill_typed("variable index");
    auto e = make(Op::Var, s.vars[index].kind == VarKind::Integer ? Type::Int : Type::Label);
    e->var = index;
    e->primed = primed;
    return e;
}

ExprPtr mk_int(std::int64_t v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::IntConst;
    e->type = Type::Int;
    e->ival = v;
    return e;
}

ExprPtr mk_bool(bool v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::BoolConst;
    e->type = Type::Bool;
    e->ival = v ? 1 : 0;
    return e;
}

ExprPtr mk_label(std::string v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::LabelConst;
    e->type = Type::Label;
    e->label = std::move(v);
    return e;
}

ExprPtr mk_unary(Op op, ExprPtr a) {
    if (op == Op::Neg) {
        if (a->type != Type::Int) ill_typed("neg");
        return make(op, Type::Int, {std::move(a)});
    }
    if (op == Op::Not) {
        if (a->type != Type::Bool) ill_typed("not");
        return make(op, Type::Bool, {std::move(a)});
    }
    ill_typed("unary op");
}

ExprPtr mk_binary(Op op, ExprPtr a, ExprPtr b) {
    switch (op) {
    case Op::Add:
    case Op::Sub:
        if (a->type != Type::Int || b->type != Type::Int) ill_typed("arith");
        return make(op, Type::Int, {std::move(a), std::move(b)});
    case Op::Eq:
        if (a->type != b->type) ill_typed("eq");
        return make(op, Type::Bool, {std::move(a), std::move(b)});
    case Op::Le:
    case Op::Ge:
        if (a->type != Type::Int || b->type != Type::Int) ill_typed("compare");
        return make(op, Type::Bool, {std::move(a), std::move(b)});
    case Op::And:
    case Op::Or: return mk_nary(op, {std::move(a), std::move(b)});
    default: ill_typed("binary op");
    }
}

ExprPtr mk_nary(Op op, std::vector<ExprPtr> kids) {
    if (op != Op::And && op != Op::Or) ill_typed("nary op");
    for (const auto& k : kids)
        if (k->type != Type::Bool) ill_typed("connective");
    if (kids.empty()) return mk_bool(op == Op::And);
    if (kids.size() == 1) return kids[0];
    return make(op, Type::Bool, std::move(kids));
}

ExprPtr mk_ite(ExprPtr c, ExprPtr a, ExprPtr b) {
    if (c->type != Type::Bool || a->type != b->type) ill_typed("ite");
    Type t = a->type;
    return make(Op::Ite, t, {std::move(c), std::move(a), std::move(b)});
}

int node_count(const Expr& e) {
    int n = 1;
    for (const auto& k : e.kids) n += node_count(*k);
    return n;
}

bool mentions_var(const Expr& e) {
    if (e.op == Op::Var) return true;
    for (const auto& k : e.kids)
        if (mentions_var(*k)) return true;
    return false;
}

int compare(const Expr& a, const Expr& b) {
    if (a.op != b.op) return a.op < b.op ? -1 : 1;
    if (a.type != b.type) return a.type < b.type ? -1 : 1;
    if (a.var != b.var) return a.var < b.var ? -1 : 1;
    if (a.primed != b.primed) return a.primed ? -1 : 1; // x' before x
    if (a.ival != b.ival) return a.ival < b.ival ? -1 : 1;
    if (int c = a.label.compare(b.label)) return c < 0 ? -1 : 1;
    if (a.kids.size() != b.kids.size()) return a.kids.size() < b.kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (int c = compare(*a.kids[i], *b.kids[i])) return c;
    return 0;
}

bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

ExprPtr canonicalize(const ExprPtr& e) {
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    for (const auto& k : e->kids) kids.push_back(canonicalize(k));
    return canon_node(*e, std::move(kids));
}

EvalValue evaluate(const Expr& e, const Valuation& cur, const Valuation* nxt) {
    auto ival = [&](const ExprPtr& k) { return std::get<std::int64_t>(evaluate(*k, cur, nxt)); };
    auto bval = [&](const ExprPtr& k) { return std::get<bool>(evaluate(*k, cur, nxt)); };
    switch (e.op) {
    case Op::BoolConst: return e.ival != 0;
    case Op::IntConst: return e.ival;
    case Op::LabelConst: return e.label;
    case Op::Var: {
        if (e.primed && !nxt) throw Error(ErrorKind::Internal, "primed variable without next valuation");
        const Value& v = (e.primed ? *nxt : cur).values.at(e.var);
        if (auto p = std::get_if<std::int64_t>(&v)) return *p;
        return std::get<std::string>(v);
    }
    case Op::Neg: {
        std::int64_t a = ival(e.kids[0]), r;
        if (checked_sub(0, a, r)) return r;
        throw Error(ErrorKind::Overflow, "integer overflow in negation");
    }
    case Op::Add: {
        std::int64_t r;
        if (checked_add(ival(e.kids[0]), ival(e.kids[1]), r)) return r;
        throw Error(ErrorKind::Overflow, "integer overflow in addition");
    }
    case Op::Sub: {
        std::int64_t r;
        if (checked_sub(ival(e.kids[0]), ival(e.kids[1]), r)) return r;
        throw Error(ErrorKind::Overflow, "integer overflow in subtraction");
    }
    case Op::Eq: return evaluate(*e.kids[0], cur, nxt) == evaluate(*e.kids[1], cur, nxt);
    case Op::Le: return ival(e.kids[0]) <= ival(e.kids[1]);
    case Op::Ge: return ival(e.kids[0]) >= ival(e.kids[1]);
    case Op::Not: return !bval(e.kids[0]);
    case Op::And:
        for (const auto& k : e.kids)
            if (!bval(k)) return false;
        return true;
    case Op::Or:
        for (const auto& k : e.kids)
            if (bval(k)) return true;
        return false;
    case Op::Ite: return bval(e.kids[0]) ? evaluate(*e.kids[1], cur, nxt) : evaluate(*e.kids[2], cur, nxt);
    }
    throw Error(ErrorKind::Internal, "unknown node");
}

std::string to_prefix(const Expr& e, const Schema& s) {
    switch (e.op) {
    case Op::BoolConst: return e.ival ? "true" : "false";
    case Op::Var: return s.vars.at(e.var).name + (e.primed ? "'" : "");
    case Op::IntConst: return std::to_string(e.ival);
    case Op::LabelConst: return quote_label(e.label);
    default: break;
    }
    std::string out = "(";
    out += op_token(e.op);
    for (const auto& k : e.kids) {
        out += ' ';
        out += to_prefix(*k, s);
    }
    out += ')';
    return out;
}

std::string to_infix(const Expr& e, const Schema& s) { return infix(e, s); }

} // namespace tracegist
