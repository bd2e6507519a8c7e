"""Smoke test for the lcsat Python bindings.

Uses an installed `lcsat` module if there is one, otherwise loads the
library built by `cargo build -p lcsat-python` from target/.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys


def load():
    try:
        import lcsat

        return lcsat
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        for name in ("liblcsat.so", "liblcsat.dylib", "lcsat.dll"):
            path = root / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("lcsat", str(path))
                spec = importlib.util.spec_from_loader("lcsat", loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("lcsat not installed and no cargo build found; run `cargo build -p lcsat-python` first")


def main():
    lcsat = load()

    chain = lcsat.CspInstance.chain(2, 2)
    assert chain.num_vars == 8
    assert not chain.closure_is_empty(2)
    assert chain.closure_is_empty(3)

    cnf = chain.direct_encode()
    assert len(cnf) == 49 and cnf.num_vars == 16
    assert cnf.refute(2) is None
    trace = cnf.refute(3)
    assert trace and trace[0].startswith("STEP 1:")

    out = cnf.solve(scheme="decision", seed=1)
    assert out["result"] == "UNSAT" and out["restarts"] > 0

    again = lcsat.Cnf.from_dimacs(cnf.to_dimacs())
    assert again.clauses == cnf.clauses

    small = lcsat.Cnf(3, [[1, 2], [-1, 3], [-3, -2]])
    res = small.solve(restart="never")
    assert res["result"] == "SAT"
    model = set(res["model"])
    assert all(any(l in model for l in c) for c in small.clauses)

    db = lcsat.Cnf(6, [[1, 2], [3, 4], [5, 6], [-1, -2], [-3, -4], [-5, -6], [-1, -3], [-2, -5], [-2, -4, -6]])
    assert db.is_absorbed([-3, -5])
    assert not db.is_absorbed([-2, -4])

    assert lcsat.bounds(8, 2, 3, 1)["thm4"] == 322560

    unit = lcsat.CspInstance.chain(1, 3)
    sat_free = unit.support_encode().solve()
    assert sat_free["result"] == "UNSAT" and sat_free["decisions"] == 0

    rows = lcsat.bench_chain(2, 2, [0, 1, 2], scheme="decision")
    assert [r["seed"] for r in rows] == [0, 1, 2]
    assert all(r["verdict"] == "UNSAT" and r["clause_count"] == 49 for r in rows)

    try:
        lcsat.CspInstance.chain(0, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid chain accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
