#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace tracegist {

// Atom over finite-domain variables: either v = u or v = c.
struct Atom {
    enum Kind { VarEq, ValEq } kind = VarEq;
    int v = 0;
    int u = 0; // VarEq: other variable; ValEq: constant in 1..N

    static Atom eq(int v, int u) { return {VarEq, v, u}; }
    static Atom val(int v, int c) { return {ValEq, v, c}; }
};

struct EqConstraint {
    int v, u;
};
struct FixedEqConstraint {
    int v, c;
};
// premise (conjunction) => conclusion
struct ImplicationConstraint {
    std::vector<Atom> premise;
    Atom conclusion;
};
// The atoms must not all hold at once.
struct ForbidPatternConstraint {
    std::vector<Atom> atoms;
};
// Global: the relation {(q_j, label_j, q'_j)} must admit a run from `start`
// that spells `word`.
struct AcceptsWordConstraint {
    struct Edge {
        int src_var, label, dst_var;
    };
    std::vector<Edge> relation;
    int start = 1;
    std::vector<int> word;
};

struct ConstraintSystem {
    int domain = 1; // N: every variable ranges over 1..N
    std::vector<std::string> var_names;
    std::vector<EqConstraint> eqs;
    std::vector<FixedEqConstraint> fixed;
    std::vector<ImplicationConstraint> implications;
    std::vector<ForbidPatternConstraint> forbids;
    std::vector<AcceptsWordConstraint> accepts;

    int add_var(std::string name);
    int num_vars() const { return static_cast<int>(var_names.size()); }
    void validate() const; // throws Error(Config) on dangling ids / constants
};

enum class SolveStatus { Sat, Unsat, Timeout };

struct SolveResult {
    SolveStatus status = SolveStatus::Unsat;
    std::vector<int> assignment; // var -> 1..N (Sat only)
};

struct SolveOptions {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Empty: internal CDCL. Otherwise an executable that takes a DIMACS file
    // argument and prints "s SATISFIABLE"/"s UNSATISFIABLE" and "v" lines.
    std::string external_solver;
};

// Does `assignment` satisfy every constraint? (Direct check, no encoding.)
bool check_assignment(const ConstraintSystem& cs, const std::vector<int>& assignment);

// One-hot CNF. Variable v with value s maps to DIMACS variable v*N + s.
struct Cnf {
    int num_vars = 0;
    int fd_vars = 0;
    int domain = 1;
    std::vector<std::vector<int>> clauses; // DIMACS literals
};

Cnf encode_cnf(const ConstraintSystem& cs);
std::string to_dimacs(const ConstraintSystem& cs);
std::string to_dimacs(const Cnf& cnf);

SolveResult solve(const ConstraintSystem& cs, const SolveOptions& opts = {});

// Exhaustive reference: enumerates all N^vars assignments.
SolveResult solve_exhaustive(const ConstraintSystem& cs);

} // namespace tracegist
