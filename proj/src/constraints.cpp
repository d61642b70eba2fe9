#include "tracegist/constraints.hpp"

#include "tracegist/error.hpp"
#include "tracegist/log.hpp"
#include "tracegist/sat.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace tracegist {

int ConstraintSystem::add_var(std::string name) {
    var_names.push_back(std::move(name));
    return num_vars() - 1;
}

void ConstraintSystem::validate() const {
    if (domain < 1) throw Error(ErrorKind::Config, "domain size must be >= 1");
    const int n = num_vars();
    auto var_ok = [&](int v) {
        if (v < 0 || v >= n) throw Error(ErrorKind::Config, "constraint references undeclared variable");
    };
    auto const_ok = [&](int c) {
        if (c < 1 || c > domain) throw Error(ErrorKind::Config, "constant outside domain 1..N");
    };
    auto atom_ok = [&](const Atom& a) {
        var_ok(a.v);
        if (a.kind == Atom::VarEq) var_ok(a.u);
        else const_ok(a.u);
    };
    for (const auto& e : eqs) {
        var_ok(e.v);
        var_ok(e.u);
    }
    for (const auto& f : fixed) {
        var_ok(f.v);
        const_ok(f.c);
    }
    for (const auto& i : implications) {
        for (const auto& a : i.premise) atom_ok(a);
        atom_ok(i.conclusion);
    }
    for (const auto& f : forbids)
        for (const auto& a : f.atoms) atom_ok(a);
    for (const auto& a : accepts) {
        const_ok(a.start);
        for (const auto& e : a.relation) {
            var_ok(e.src_var);
            var_ok(e.dst_var);
        }
    }
}

namespace {

bool atom_holds(const Atom& a, const std::vector<int>& x) {
    return a.kind == Atom::VarEq ? x[a.v] == x[a.u] : x[a.v] == a.u;
}

bool accepts_holds(const AcceptsWordConstraint& c, const std::vector<int>& x, int N) {
    std::vector<char> cur(N + 1, 0);
    cur[c.start] = 1;
    for (int label : c.word) {
        std::vector<char> nxt(N + 1, 0);
        bool any = false;
        for (const auto& e : c.relation)
            if (e.label == label && cur[x[e.src_var]]) {
                nxt[x[e.dst_var]] = 1;
                any = true;
            }
        if (!any) return false;
        cur.swap(nxt);
    }
    return true;
}

} // namespace

bool check_assignment(const ConstraintSystem& cs, const std::vector<int>& x) {
    if (static_cast<int>(x.size()) != cs.num_vars()) return false;
    for (int v : x)
        if (v < 1 || v > cs.domain) return false;
    for (const auto& e : cs.eqs)
        if (x[e.v] != x[e.u]) return false;
    for (const auto& f : cs.fixed)
        if (x[f.v] != f.c) return false;
    for (const auto& i : cs.implications) {
        bool prem = true;
        for (const auto& a : i.premise) prem = prem && atom_holds(a, x);
        if (prem && !atom_holds(i.conclusion, x)) return false;
    }
    for (const auto& f : cs.forbids) {
        bool all = true;
        for (const auto& a : f.atoms) all = all && atom_holds(a, x);
        if (all) return false;
    }
    for (const auto& a : cs.accepts)
        if (!accepts_holds(a, x, cs.domain)) return false;
    return true;
}

namespace {

class Encoder {
public:
    explicit Encoder(const ConstraintSystem& cs) : cs_(cs), N_(cs.domain) {
        cnf_.domain = N_;
        cnf_.fd_vars = cs.num_vars();
        cnf_.num_vars = cs.num_vars() * N_;
    }

    Cnf run() {
        for (int v = 0; v < cs_.num_vars(); ++v) {
            std::vector<int> alo;
            for (int s = 1; s <= N_; ++s) alo.push_back(lit(v, s));
            add(alo);
            for (int a = 1; a <= N_; ++a)
                for (int b = a + 1; b <= N_; ++b) add({-lit(v, a), -lit(v, b)});
        }
        for (const auto& f : cs_.fixed) add({lit(f.v, f.c)});
        for (const auto& e : cs_.eqs) {
            if (e.v == e.u) continue;
            for (int s = 1; s <= N_; ++s) {
                add({-lit(e.v, s), lit(e.u, s)});
                add({-lit(e.u, s), lit(e.v, s)});
            }
        }
        for (const auto& i : cs_.implications) implication(i);
        for (const auto& f : cs_.forbids) {
            std::vector<int> prefix;
            expand(f.atoms, 0, prefix, [&](const std::vector<int>& c) { add(c); });
        }
        for (const auto& a : cs_.accepts) accepts(a);
        return std::move(cnf_);
    }

private:
    int lit(int v, int s) const { return v * N_ + s; }
    int fresh() { return ++cnf_.num_vars; }
    void add(std::vector<int> c) { cnf_.clauses.push_back(std::move(c)); }

    // Calls `emit` with the negated literals of every way the conjunction
    // can hold.
    template <class Emit>
    void expand(const std::vector<Atom>& atoms, std::size_t k, std::vector<int>& prefix, Emit&& emit) {
        if (k == atoms.size()) {
            emit(prefix);
            return;
        }
        const Atom& a = atoms[k];
        if (a.kind == Atom::ValEq) {
            prefix.push_back(-lit(a.v, a.u));
            expand(atoms, k + 1, prefix, emit);
            prefix.pop_back();
            return;
        }
        if (a.v == a.u) {
            expand(atoms, k + 1, prefix, emit);
            return;
        }
        for (int s = 1; s <= N_; ++s) {
            prefix.push_back(-lit(a.v, s));
            prefix.push_back(-lit(a.u, s));
            expand(atoms, k + 1, prefix, emit);
            prefix.pop_back();
            prefix.pop_back();
        }
    }

    void implication(const ImplicationConstraint& i) {
        const Atom& c = i.conclusion;
        if (c.kind == Atom::VarEq && c.v == c.u) return;
        std::vector<int> prefix;
        expand(i.premise, 0, prefix, [&](const std::vector<int>& pre) {
            if (c.kind == Atom::ValEq) {
                auto cl = pre;
                cl.push_back(lit(c.v, c.u));
                add(std::move(cl));
                return;
            }
            for (int t = 1; t <= N_; ++t) {
                auto cl = pre;
                cl.push_back(-lit(c.v, t));
                cl.push_back(lit(c.u, t));
                add(std::move(cl));
            }
        });
    }

    void accepts(const AcceptsWordConstraint& a) {
        std::set<int> labels(a.word.begin(), a.word.end());
        // d[label][s][t]: the transition (s, label, t) is realized by some edge
        std::map<int, std::vector<int>> d;
        for (int p : labels) {
            auto& dv = d[p];
            dv.resize((N_ + 1) * (N_ + 1));
            std::vector<const AcceptsWordConstraint::Edge*> edges;
            for (const auto& e : a.relation)
                if (e.label == p) edges.push_back(&e);
            for (int s = 1; s <= N_; ++s)
                for (int t = 1; t <= N_; ++t) {
                    int dd = fresh();
                    dv[s * (N_ + 1) + t] = dd;
                    std::vector<int> support{-dd};
                    for (const auto* e : edges) {
                        // y <-> (src = s /\ dst = t), and y -> d: once the
                        // relation is fixed the run propagates by units.
                        int y = fresh();
                        add({-y, lit(e->src_var, s)});
                        add({-y, lit(e->dst_var, t)});
                        add({-lit(e->src_var, s), -lit(e->dst_var, t), y});
                        add({-y, dd});
                        support.push_back(y);
                    }
                    add(std::move(support));
                }
        }
        const std::size_t L = a.word.size();
        std::vector<std::vector<int>> r(L + 1, std::vector<int>(N_ + 1));
        for (std::size_t i = 0; i <= L; ++i) {
            std::vector<int> alo;
            for (int s = 1; s <= N_; ++s) alo.push_back(r[i][s] = fresh());
            add(alo);
            for (int s = 1; s <= N_; ++s)
                for (int t = s + 1; t <= N_; ++t) add({-r[i][s], -r[i][t]});
        }
        add({r[0][a.start]});
        for (std::size_t i = 0; i < L; ++i) {
            const auto& dv = d[a.word[i]];
            for (int s = 1; s <= N_; ++s) {
                std::vector<int> some{-r[i][s]};
                for (int t = 1; t <= N_; ++t) {
                    int dd = dv[s * (N_ + 1) + t];
                    some.push_back(dd);
                    add({-r[i][s], -r[i + 1][t], dd});
                }
                add(std::move(some));
            }
        }
    }

    const ConstraintSystem& cs_;
    int N_;
    Cnf cnf_;
};

std::vector<int> decode(const Cnf& cnf, const std::vector<char>& truth) {
    std::vector<int> x(cnf.fd_vars, 1);
    for (int v = 0; v < cnf.fd_vars; ++v)
        for (int s = 1; s <= cnf.domain; ++s)
            if (truth[v * cnf.domain + s]) {
                x[v] = s;
                break;
            }
    return x;
}

SolveResult solve_internal(const Cnf& cnf, const SolveOptions& opts) {
    sat::Solver S;
    for (int i = 0; i < cnf.num_vars; ++i) S.new_var();
    for (int i = cnf.fd_vars * cnf.domain; i < cnf.num_vars; ++i) S.set_tier(i, 1);
    for (const auto& c : cnf.clauses) {
        std::vector<sat::Lit> lits;
        lits.reserve(c.size());
        for (int l : c) lits.push_back(l > 0 ? sat::pos(l - 1) : sat::neg(-l - 1));
        if (!S.add_clause(std::move(lits))) return {SolveStatus::Unsat, {}};
    }
    sat::Limits lim;
    lim.deadline = opts.deadline;
    sat::Status st = S.solve(lim);
    const auto& ss = S.stats();
    log_debug("cdcl: vars=" + std::to_string(cnf.num_vars) + " clauses=" + std::to_string(cnf.clauses.size()) +
              " decisions=" + std::to_string(ss.decisions) + " conflicts=" + std::to_string(ss.conflicts));
    switch (st) {
    case sat::Status::Unsat: return {SolveStatus::Unsat, {}};
    case sat::Status::Unknown: return {SolveStatus::Timeout, {}};
    case sat::Status::Sat: break;
    }
    std::vector<char> truth(cnf.num_vars + 1, 0);
    for (int v = 1; v <= cnf.num_vars; ++v) truth[v] = S.model_value(v - 1);
    return {SolveStatus::Sat, decode(cnf, truth)};
}

SolveResult solve_external(const Cnf& cnf, const SolveOptions& opts) {
    char path[] = "/tmp/tracegist-XXXXXX.cnf";
    int fd = mkstemps(path, 4);
    if (fd < 0) throw Error(ErrorKind::Io, "cannot create temporary DIMACS file");
    {
        std::string text = to_dimacs(cnf);
        std::size_t off = 0;
        while (off < text.size()) {
            ssize_t w = ::write(fd, text.data() + off, text.size() - off);
            if (w <= 0) {
                ::close(fd);
                ::unlink(path);
                throw Error(ErrorKind::Io, "cannot write temporary DIMACS file");
            }
            off += static_cast<std::size_t>(w);
        }
        ::close(fd);
    }
    std::string cmd = "'" + opts.external_solver + "' '" + path + "' 2>/dev/null";
    if (opts.deadline) {
        auto left = std::chrono::duration_cast<std::chrono::seconds>(*opts.deadline - std::chrono::steady_clock::now())
                        .count();
        cmd = "timeout " + std::to_string(std::max<long long>(1, left)) + " " + cmd;
    }
    log_debug("external solver: " + cmd);
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) {
        ::unlink(path);
        throw Error(ErrorKind::Io, "cannot launch external solver");
    }
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int rc = ::pclose(p);
    ::unlink(path);
    int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;

    std::istringstream in(out);
    std::string line;
    int status = 0; // 10 sat, 20 unsat
    std::vector<char> truth(cnf.num_vars + 1, 0);
    while (std::getline(in, line)) {
        if (line.rfind("s ", 0) == 0) {
            if (line.find("UNSATISFIABLE") != std::string::npos) status = 20;
            else if (line.find("SATISFIABLE") != std::string::npos) status = 10;
        } else if (line.rfind("v ", 0) == 0) {
            std::istringstream vs(line.substr(2));
            long l;
            while (vs >> l)
                if (l > 0 && l <= cnf.num_vars) truth[l] = 1;
        }
    }
    if (status == 0 && (code == 10 || code == 20)) status = code;
    if (status == 20) return {SolveStatus::Unsat, {}};
    if (status == 10) return {SolveStatus::Sat, decode(cnf, truth)};
    if (code == 124) return {SolveStatus::Timeout, {}};
    throw Error(ErrorKind::Io, "external solver produced no verdict (exit " + std::to_string(code) + ")");
}

} // namespace

Cnf encode_cnf(const ConstraintSystem& cs) {
    cs.validate();
    return Encoder(cs).run();
}

std::string to_dimacs(const Cnf& cnf) {
    std::ostringstream os;
    os << "c tracegist one-hot encoding\n";
    os << "c fd variables: " << cnf.fd_vars << ", domain 1.." << cnf.domain << "\n";
    os << "c fd var v (0-based) takes value s  <=>  literal v*" << cnf.domain << "+s is true\n";
    os << "c variables above " << cnf.fd_vars * cnf.domain << " are auxiliary\n";
    os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
    for (const auto& c : cnf.clauses) {
        for (int l : c) os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

std::string to_dimacs(const ConstraintSystem& cs) { return to_dimacs(encode_cnf(cs)); }

SolveResult solve(const ConstraintSystem& cs, const SolveOptions& opts) {
    Cnf cnf = encode_cnf(cs);
    SolveResult r = opts.external_solver.empty() ? solve_internal(cnf, opts) : solve_external(cnf, opts);
    if (r.status == SolveStatus::Sat && !check_assignment(cs, r.assignment))
        throw Error(ErrorKind::Internal, "solver returned an assignment that violates the system");
    return r;
}

SolveResult solve_exhaustive(const ConstraintSystem& cs) {
    cs.validate();
    const int n = cs.num_vars();
    std::vector<int> x(n, 1);
    for (;;) {
        if (check_assignment(cs, x)) return {SolveStatus::Sat, x};
        int i = 0;
        while (i < n && x[i] == cs.domain) x[i++] = 1;
        if (i == n) return {SolveStatus::Unsat, {}};
        ++x[i];
    }
}

} // namespace tracegist
