#!/usr/bin/env python3
"""Smoke test for the semistable_py extension module.

Builds nothing itself: run `cargo build --release -p semistable-py` first,
then `python3 python/smoke_test.py`. The script locates the compiled
cdylib under target/, stages it under an importable name, and exercises
the main types and operations.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    names = ["libsemistable_py.so", "semistable_py.so", "libsemistable_py.dylib"]
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build --release -p semistable-py")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="semistable_py_"))
    target = stage / "semistable_py.so"
    shutil.copy2(built, target)
    spec = importlib.util.spec_from_file_location("semistable_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    sp = load_module()

    # J(n) values and exponents
    assert sp.jn(0) == {"factored": "1", "value": 1}
    assert sp.jn(1) == {"factored": "2", "value": 2}
    assert sp.jn(2) == {"factored": "2^3 * 3", "value": 24}
    assert sp.jn(4)["value"] == 5760
    assert sp.s(4, 2) == 7 and sp.s(4, 3) == 2 and sp.s(4, 5) == 1

    # classical-group order criteria against known facts
    assert sp.mult_order(5, 8) == 2
    assert sp.mult_order(2, 5) == 4
    assert sp.sp_group_order(1, 3)["value"] == 24
    assert sp.sp_group_order(1, 5)["value"] == 120
    assert sp.sp_has_element_of_order(1, 2, 2, 5)  # order 4 in Sp_2(F_5)
    assert not sp.sp_has_element_of_order(1, 2, 3, 5)  # no order 8
    assert sp.gl_has_element_of_order(4, 5, 1, 2)
    assert not sp.gl_has_element_of_order(1, 2, 2, 7)
    assert sp.sp_order_spectrum(1, 5) == [1, 2, 3, 4, 5, 6, 10]
    assert sp.cyclotomic_poly(8) == [1, 0, 0, 0, 1]
    assert sp.cyclotomic_poly(12) == [1, 0, -1, 0, 1]

    # Smith normal form: U A V = D with the documented diagonal
    out = sp.snf([[2, 4], [6, 8]])
    assert out["d"] == [[2, 0], [0, 4]]

    # perfectization: pure scaling case
    out = sp.perfectize([[0, 3], [-3, 0]], 3)
    assert out["gram"] == [[0, 1], [-1, 0]]
    assert out["precision"] is None

    # ...and a case that needs the equivariant splitting
    gram = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 3], [0, 0, -3, 0]]
    neg_id = [[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    out = sp.perfectize(gram, 3, generators=[neg_id])
    assert out["precision"] is not None
    assert out["ring"].startswith("Z/3")

    # the reduction-data pipeline end to end
    good = sp.ReductionData(d=1, p=0, t=0, a=1, t_v=0, a_v=0, deg_lambda=1)
    assert not good.is_semistable()
    assert good.m == 2 and good.q_bound == 3
    assert good.n()["value"] == 12
    assert good.admissible_orders() == [1, 2, 3, 4, 6]
    assert good.safe_primes(20) == [5, 7, 11, 13, 17, 19]
    report = good.report()
    assert report["N"]["factored"] == "2^2 * 3"
    assert any(f["code"] == "cyclic_kummer_recipe" for f in report["advice"])

    mult = sp.ReductionData(d=1, p=0, t=1, a=0, t_v=0, a_v=0, deg_lambda=1)
    assert mult.n()["value"] == 2
    assert mult.admissible_orders() == [1, 2]

    semistable_input = sp.ReductionData(d=2, p=3, t=1, a=1, t_v=1, a_v=1)
    assert semistable_input.is_semistable()
    assert semistable_input.n()["value"] == 1

    # invalid data is rejected at construction
    try:
        sp.ReductionData(d=2, p=0, t=0, a=1, t_v=0, a_v=0)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid reduction data was accepted")

    # quick oracle suites through the bindings
    outcomes = sp.verify(quick=True)
    failed = [o["name"] for o in outcomes if not o["passed"]]
    assert not failed, f"verification suites failed: {failed}"

    print(f"smoke test passed ({len(outcomes)} verification suites green)")


if __name__ == "__main__":
    main()
