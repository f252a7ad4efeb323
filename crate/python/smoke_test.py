"""Smoke test for the Python bindings.

Build first with `cargo build --release -p hopfring-py`, then run
`python3 python/smoke_test.py`. Set HOPFRING_LIB to point at a different build.
"""

import importlib.machinery
import importlib.util
import json
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    candidates = [os.environ.get("HOPFRING_LIB")] + [
        str(ROOT / "target" / profile / "libhopfring.so") for profile in ("release", "debug")
    ]
    for path in filter(None, candidates):
        if Path(path).exists():
            loader = importlib.machinery.ExtensionFileLoader("hopfring", path)
            spec = importlib.util.spec_from_file_location("hopfring", path, loader=loader)
            mod = importlib.util.module_from_spec(spec)
            loader.exec_module(mod)
            return mod
    sys.exit("libhopfring.so not found; run `cargo build --release -p hopfring-py`")


def main():
    hr = load()

    assert hr.adem_reduce("Q5 Q1") == [(-1, "Q4 Q2")]
    assert hr.adem_reduce("Q1") == [(1, "Q1")]
    assert hr.adem_reduce("Q1 Q5", drop_negative=True) == []
    try:
        hr.adem_reduce("Q5 X1")
    except ValueError as e:
        assert "position 3" in str(e)
    else:
        raise AssertionError("parse error not raised")

    assert hr.basis("invariants", 1, 4) == ["(0,1)"]
    assert hr.basis("cokernel", 1, 7) == []
    for d in range(20):
        assert len(hr.basis("B", 2, d, k=1)) == len(hr.basis("R", 2, d, k=1))

    assert hr.string_forward([0, 2, 1, 3, 1, 3]) == "Q74 bQ26 bQ10"
    # E(0,2) = Q2[1]
    assert hr.e_product([(0, 2)]) == [("Q2([1])", 1)]

    try:
        hr.e_product([(1, 7), (1, 29)], level=6, budget=20)
    except OverflowError:
        pass
    else:
        raise AssertionError("budget overflow not raised")

    assert "e-relations" in hr.suites()
    reports = json.loads(hr.verify("bijection", degree=20))
    assert reports[0]["suite"] == "bijection"
    assert all(c["status"] == "pass" for c in reports[0]["checks"])

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
