"""Smoke test for the pyltlzinc extension module.

Build and install first:  pip install ./crates/python
Then run:                 python python/smoke_test.py
"""

import math
import os
import tempfile

import pyltlzinc as lz


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok: {what}")


def main():
    check(lz.parse_formula("G (p -> X q)") == "G (p -> X q)", "formula round trip")
    check(lz.satisfies("p U q", ["p", "q"], [0b01, 0b10]), "trace semantics")

    dfa = lz.Dfa.from_formula("G (p <-> X X q)", ["p", "q"])
    check(dfa.num_states == 8, "task1 automaton has 8 states")
    check(lz.Dfa.from_json(dfa.to_json()) == dfa, "DFA JSON round trip")

    task = lz.Task.builtin("task6")
    check(task.dfa.num_states == 4, "task6 automaton has 4 states")
    check(len(task.guards()) > 0, "guard table")

    ds = task.generate(seed=7, train=20, val=20, test=20)
    check(len(ds) == 60, "dataset size")
    for s in ds.samples("train"):
        accepted = s["states"][-1] in task.dfa.accepting
        assert accepted == bool(s["label"]), s
        assert task.dfa.run(s["letters"]) == s["states"], s
    check(True, "labels and states replay on the automaton")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "task6.csv")
        ds.write(path)
        again = lz.Dataset.read(path, verify=True)
        check(again.spec_hash == ds.spec_hash and len(again) == len(ds), "dataset CSV round trip")

    for kind in lz.Engine.kinds():
        engine = lz.Engine(kind, task.dfa)
        ev = lz.evaluate(ds, engine)
        m = ev["metrics"]
        assert m["sc_acc"] == 1.0 and m["nsp_acc"] == 1.0, (kind, m)
    check(True, "perfect oracle gives perfect accuracy on every engine")

    engine = lz.Engine("exact", task.dfa)
    b, mass = engine.step(engine.initial(), [0.5] * len(task.atoms))
    check(abs(sum(b) - 1.0) < 1e-9 and abs(mass - 1.0) < 1e-9, "exact step is stochastic")

    noisy = lz.evaluate(ds, lz.Engine("fuzzy-p", task.dfa), oracle="flip", p=0.2, seed=3, task=ds.task())
    check(noisy["metrics"]["avg_acc"] <= 1.0, "noisy oracle evaluation")
    try:
        lz.evaluate(ds, engine, task=task)
    except ValueError:
        check(True, "mismatched task is rejected")
    else:
        raise SystemExit("FAIL: mismatched task accepted")

    check(abs(lz.apply_temperature(0.9, 2.0) - 0.75) < 1e-12, "temperature scaling")
    check(abs(lz.semantic_loss([1.0, 0.0], [1, 0])) < 1e-12, "semantic loss of exact predictions")
    cal = lz.calibrate_temperature([(0.6, True)] * 20)
    check(cal["temperature"] < 1.0 and math.isfinite(cal["nll"]), "calibration sharpens")

    try:
        lz.Engine("magic", task.dfa)
    except ValueError as e:
        check("fuzzy-p" in str(e), "unknown engine raises ValueError")
    else:
        raise SystemExit("FAIL: unknown engine accepted")

    print("all smoke tests passed")


if __name__ == "__main__":
    main()
