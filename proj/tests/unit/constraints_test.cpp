#include "random_systems.hpp"

#include <tracegist/constraints.hpp>
#include <tracegist/error.hpp>
#include <tracegist/sat.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace tracegist;

namespace {

std::vector<std::string> body_lines(const std::string& dimacs) {
    std::vector<std::string> out;
    std::istringstream in(dimacs);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != 'c') out.push_back(line);
    return out;
}

} // namespace

TEST(Solve, UnconstrainedSingleState) {
    ConstraintSystem cs;
    cs.domain = 1;
    cs.add_var("q1");
    cs.add_var("q1'");
    auto r = solve(cs);
    ASSERT_EQ(r.status, SolveStatus::Sat);
    EXPECT_EQ(r.assignment, (std::vector<int>{1, 1}));
}

TEST(Solve, DisequalityOverOneStateIsUnsat) {
    ConstraintSystem cs;
    cs.domain = 1;
    int a = cs.add_var("q1"), b = cs.add_var("q1'");
    cs.forbids.push_back({{Atom::eq(a, b)}});
    EXPECT_EQ(solve(cs).status, SolveStatus::Unsat);
    cs.domain = 2;
    auto r = solve(cs);
    ASSERT_EQ(r.status, SolveStatus::Sat);
    EXPECT_NE(r.assignment[0], r.assignment[1]);
}

TEST(Solve, ChainedEqualitiesAndFixedValues) {
    ConstraintSystem cs;
    cs.domain = 3;
    for (int i = 0; i < 4; ++i) cs.add_var("v" + std::to_string(i));
    cs.eqs = {{0, 1}, {1, 2}};
    cs.fixed = {{0, 3}};
    cs.implications.push_back({{Atom::val(2, 3)}, Atom::val(3, 2)});
    auto r = solve(cs);
    ASSERT_EQ(r.status, SolveStatus::Sat);
    EXPECT_EQ(r.assignment, (std::vector<int>{3, 3, 3, 2}));
    EXPECT_TRUE(check_assignment(cs, r.assignment));
}

TEST(Dimacs, OneVariableTwoValues) {
    ConstraintSystem cs;
    cs.domain = 2;
    cs.add_var("q");
    auto text = to_dimacs(cs);
    EXPECT_EQ(text.rfind("c ", 0), 0u); // numbering documented up front
    EXPECT_EQ(body_lines(text), (std::vector<std::string>{"p cnf 2 2", "1 2 0", "-1 -2 0"}));
}

TEST(Dimacs, EqualityTakesFourClausesAtTwoValues) {
    ConstraintSystem cs;
    cs.domain = 2;
    cs.add_var("a");
    cs.add_var("b");
    std::size_t base = encode_cnf(cs).clauses.size();
    cs.eqs.push_back({0, 1});
    EXPECT_EQ(encode_cnf(cs).clauses.size(), base + 4);
}

TEST(Validate, RejectsDanglingReferences) {
    ConstraintSystem cs;
    cs.domain = 2;
    cs.add_var("a");
    cs.fixed.push_back({0, 3});
    EXPECT_THROW(cs.validate(), Error);
    cs.fixed = {{1, 1}};
    EXPECT_THROW(cs.validate(), Error);
}

TEST(Solve, DeadlineInThePastTimesOutOrFinishes) {
    std::mt19937_64 rng(3);
    auto cs = randsys::random_system(rng);
    SolveOptions o;
    o.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    try {
        auto r = solve(cs, o);
        if (r.status != SolveStatus::Timeout) EXPECT_EQ(r.status, solve_exhaustive(cs).status);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Timeout);
    }
}

TEST(Differential, InternalAgreesWithEnumeration) {
    std::mt19937_64 rng(99);
    int sat = 0, unsat = 0;
    for (int i = 0; i < 400; ++i) {
        auto cs = randsys::random_system(rng);
        auto a = solve(cs);
        auto b = solve_exhaustive(cs);
        ASSERT_EQ(a.status, b.status) << "system " << i << "\n" << to_dimacs(cs);
        if (a.status == SolveStatus::Sat) {
            ASSERT_TRUE(check_assignment(cs, a.assignment));
            ++sat;
        } else {
            ++unsat;
        }
    }
    EXPECT_GT(sat, 40);
    EXPECT_GT(unsat, 40);
}

TEST(Cdcl, PigeonholeIsUnsat) {
    // 5 pigeons, 4 holes
    sat::Solver s;
    int var[5][4];
    for (auto& row : var)
        for (int& v : row) v = s.new_var();
    for (auto& row : var) {
        std::vector<sat::Lit> c;
        for (int v : row) c.push_back(sat::pos(v));
        s.add_clause(c);
    }
    for (int h = 0; h < 4; ++h)
        for (int p = 0; p < 5; ++p)
            for (int q = p + 1; q < 5; ++q) s.add_clause({sat::neg(var[p][h]), sat::neg(var[q][h])});
    EXPECT_EQ(s.solve(), sat::Status::Unsat);
    EXPECT_GT(s.stats().conflicts, 0u);
}

TEST(Cdcl, RandomThreeSatModelsCheck) {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 50; ++round) {
        sat::Solver s;
        const int n = 30;
        for (int i = 0; i < n; ++i) s.new_var();
        std::vector<std::vector<sat::Lit>> clauses;
        std::uniform_int_distribution<int> v(0, n - 1), sgn(0, 1);
        for (int c = 0; c < 120; ++c) {
            std::vector<sat::Lit> cl;
            for (int k = 0; k < 3; ++k) cl.push_back(sgn(rng) ? sat::pos(v(rng)) : sat::neg(v(rng)));
            clauses.push_back(cl);
            s.add_clause(cl);
        }
        if (s.solve() == sat::Status::Sat) {
            for (const auto& cl : clauses) {
                bool ok = false;
                for (auto l : cl) ok |= s.model_value(sat::var_of(l)) != sat::sign_of(l);
                ASSERT_TRUE(ok) << "round " << round;
            }
        }
    }
}
