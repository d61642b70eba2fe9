#!/usr/bin/env python3
"""Run a DIMACS file through python-sat and print competition-style output.

Usage: pysat_dimacs.py FILE.cnf [solver-name]
Exit codes follow the SAT competition convention: 10 SAT, 20 UNSAT.
"""
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    if len(sys.argv) < 2:
        print("usage: pysat_dimacs.py FILE.cnf [solver]", file=sys.stderr)
        return 1
    name = sys.argv[2] if len(sys.argv) > 2 else "cadical153"
    cnf = CNF(from_file=sys.argv[1])
    with Solver(name=name, bootstrap_with=cnf.clauses) as s:
        if not s.solve():
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    print("s SATISFIABLE")
    print("v " + " ".join(str(l) for l in model) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
