"""Smoke test for the gapkit_py extension module.

Build and install first:  cd crates/py && maturin develop  (or maturin build + pip install)
"""

import json

import gapkit_py as gk


def check_generate_and_solve():
    for label, seed in (("yes", 1), ("no", 2)):
        inst = gk.generate("svp01", 8, dim=8, label=label, seed=seed)
        assert inst.kind == "lattice01", inst.kind
        fast = gk.solve(inst)
        ref = gk.oracle(inst)
        assert fast["label"] == ref["label"] == label.upper(), (fast, ref)
        assert fast["counters"]["candidates_materialized"] == 62


def check_round_trip():
    inst = gk.generate("bcp", 16, dim=3, seed=5)
    again = gk.Instance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    assert json.loads(inst.to_json())["kind"] == "bcp"
    assert gk.solve(inst, "pruned")["label"] == gk.oracle(inst)["label"]


def check_pipeline():
    cnf = gk.generate("cnf", 10, seed=3)
    verdict = gk.solve(cnf)
    assert verdict["label"] == gk.oracle(cnf)["label"]
    parts, recombination, provenance = gk.reduce(cnf, "ksat-bsq")
    assert recombination == "SINGLE" and len(parts) == 1
    (bcp,), _, _ = gk.reduce(parts[0], "bsq-bcp")
    assert bcp.kind == "bcp"


def check_params():
    assert gk.implied_gap(3) == "2"
    assert gk.implied_gap(4) == "5/3"
    assert gk.batch_size(1025, "2", "1/2", "1/4")["ell"] == 33


def check_gadget():
    gadget = json.dumps({
        "d": 1,
        "f": [2, 0],
        "g": [1, 3],
        "space": {"kind": "linf", "scale": 3, "points": [["0"], ["1"], ["2"], ["3"]]},
    })
    report = gk.gadget_gap(gadget)
    assert report["gap"] == "3", report
    assert gk.gadget_holds(gadget)


def check_errors():
    try:
        gk.generate("svp01", 4, p="l7")
    except ValueError:
        pass
    else:
        raise AssertionError("bad norm accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("check_"):
            fn()
            print(f"{name[6:]}: ok")
