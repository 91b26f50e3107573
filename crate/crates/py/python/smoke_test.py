"""Smoke test for the evframe extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`,
then run from the repository root: `python crates/py/python/smoke_test.py`.
"""

import os
import sys

import evframe

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", ".."))


def main() -> int:
    assert "CHAIN3" in evframe.builtin_algebras()
    assert "oracle-compare" in evframe.operations()
    assert evframe.normalize("S K K S") == "S"
    assert evframe.normalize("S (S K K) (S K K) (S (S K K) (S K K))", 50) is None

    rec = evframe.run_check("validate-frame", frame="DIAMOND4")
    assert evframe.is_verified(rec), rec

    rec = evframe.run_check(
        "check-separated",
        frame="CHAIN3",
        topology="dnn",
        object=os.path.join(ROOT, "suites", "objects", "fuzzy.toml"),
    )
    assert rec["verdict"] == "counterexample", rec
    assert any("j(a∼b) = 1" in line for line in rec["lines"]), rec

    rec = evframe.run_check(
        "check-dne",
        frame="cps",
        props="regression",
        bounds="basis=S,K leaves=2 fuel=10000 pool_basis=S,K,Z0 pool=3 psi=3",
    )
    assert rec["verdict"] == "verified", rec

    code, text = evframe.run_suite(os.path.join(ROOT, "suites", "broken.toml"))
    assert code == 1, text
    records = evframe.parse_report(text)
    assert records[0]["verdict"] == "counterexample"
    assert "inc" in evframe.explain(text, "zero-topology")

    try:
        evframe.run_check("validate-frame", frame="NOPE")
    except ValueError as e:
        assert "NOPE" in str(e)
    else:
        raise AssertionError("unknown frame accepted")

    print("evframe smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
