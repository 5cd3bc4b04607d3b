"""Acceptance criteria 1-13, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line (shown even
without ``-s``).  Run standalone with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from functools import lru_cache
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ksharp.compiler import CompileBudgetExceeded, compile, compile_cnf  # noqa: E402
from ksharp.formula import (and_, box, dag_size, diamond, implies, modal_depth, not_,  # noqa: E402
                            parse, prop, subformulas, to_text)
from ksharp.generate import random_corpus, random_formula, random_fragment_formula  # noqa: E402
from ksharp.gnn import accepted, classify, load_gnn  # noqa: E402
from ksharp.graph import (LabeledGraph, balanced_star, q_heavy_star, check, evaluate,  # noqa: E402
                          example_graph, holds)
from ksharp.ilp import LinearSystem, feasible  # noqa: E402
from ksharp.sat import SolverMode, is_tree, sat, valid, witness_depth  # noqa: E402
from ksharp.translate import size_bound, translate, tune  # noqa: E402
from ksharp.verify import verify_p1, verify_p2, verify_p3, verify_p4  # noqa: E402
from oracles import (brute_force_ilp, count_atoms_per_level, integer_box_bound,  # noqa: E402
                     tree_model_exists)

_capsys = None


@pytest.fixture(autouse=True)
def _grab(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    if _capsys is not None:
        with _capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def _max_degree(pg) -> int:
    g = pg.graph
    return max((len(g.successors(v)) for v in g.vertices), default=0)


@lru_cache(maxsize=None)
def suite():
    """500 random formulas (size <= 25, md <= 3, |c| <= 8), 50 graphs each."""
    rng = random.Random(2024)
    out = []
    for _ in range(500):
        f = random_formula(rng, rng.randint(1, 25), rng.randint(0, 3), coef=8)
        out.append((f, random_corpus(rng, 50, n_max=8, degree=3)))
    return out


def test_criterion_01_example_graph():
    pg = example_graph()
    f = parse("p & #(!p) >= 2 & #(#(p) >= 1) <= 1")
    best = float("inf")
    for _ in range(50):
        t = time.perf_counter()
        ok = check(pg.graph, pg.point, f)
        best = min(best, time.perf_counter() - t)
    report(1, ok and best < 1e-3, f"holds={ok}, best of 50 = {best * 1e6:.0f} us")


def test_criterion_02_modal_depth_fixture():
    # The chained comparison is the conjunction of its two links.
    f = parse("[p & #(q) <= 4] <= #(#(p) >= 2) <= 4")
    hand = {parse(t) for t in ["p & #(q) <= 4", "p", "#(q) <= 4", "q", "#(p) >= 2",
                               "[p & #(q) <= 4] <= #(#(p) >= 2)", "#(#(p) >= 2) <= 4"]} | {f}
    md = modal_depth(f)
    ok = md == 2 and subformulas(f) == hand
    report(2, ok, f"md={md}, |sub|={len(subformulas(f))} (hand expansion {len(hand)})")


def test_criterion_03_compile_equivalence():
    t = time.time()
    bad = cnf_checked = cnf_skipped = graphs = 0
    for f, corpus in suite():
        net = compile(f)
        try:
            net2 = compile_cnf(f)
        except CompileBudgetExceeded:
            net2 = None
            cnf_skipped += 1
        for g in corpus:
            truth = evaluate(g, f)
            graphs += 1
            bad += int((accepted(g, net) != truth).any())
            if net2 is not None:
                bad += int((accepted(g, net2) != truth).any())
        cnf_checked += net2 is not None
    dt = time.time() - t
    report(3, bad == 0 and dt < 300,
           f"{len(suite())} formulas x 50 graphs ({graphs} graphs), {bad} mismatches, "
           f"compile_cnf on {cnf_checked} (over budget {cnf_skipped}), {dt:.1f}s")


def test_criterion_04_example_gnn():
    net = load_gnn(resources.files("ksharp") / "data" / "example_gnn.json")
    f = parse("p & 8 <= 3*#(q)")
    ref, tr = compile(f), translate(net)
    rng = random.Random(4)
    corpus = random_corpus(rng, 200, n_max=8, degree=5, props=("p", "q"))
    for k in range(7):
        vs = ["c"] + [f"l{i}" for i in range(k)]
        labels = {"c": {"p"}, **{f"l{i}": {"q"} for i in range(k)}}
        corpus.append(LabeledGraph(("p", "q"), vs, [("c", f"l{i}") for i in range(k)], labels))
    bad = accepted_count = 0
    for g in corpus:
        a = accepted(g, net)
        accepted_count += int(a.sum())
        bad += int((a != accepted(g, ref)).any() or (a != evaluate(g, tr)).any()
                   or (a != evaluate(g, f)).any())
    report(4, bad == 0 and accepted_count > 0,
           f"{len(corpus)} graphs, {bad} mismatches, {accepted_count} accepted vertices")


def test_criterion_05_translate_roundtrip():
    bad = over = 0
    worst = 0.0
    for f, corpus in suite():
        net = compile(f)
        tr = translate(net)
        size, bound = dag_size(tr), size_bound(net)
        worst = max(worst, size / bound)
        over += size > bound
        bad += sum(int((evaluate(g, tr) != evaluate(g, f)).any()) for g in corpus)
    report(5, bad == 0 and over == 0,
           f"{bad} mismatches, {over} over the size bound, max size/bound = {worst:.3f}")


def test_criterion_06_sat_soundness():
    n_sat = n_unsat = bad = 0
    for f, _ in suite():
        res = sat(f)
        if res.sat:
            n_sat += 1
            pg = res.witness
            ok = holds(pg, f) and is_tree(pg) and witness_depth(pg) <= modal_depth(f)
            bad += not ok
        else:
            n_unsat += 1
    report(6, bad == 0, f"{n_sat} SAT witnesses checked, {bad} bad; {n_unsat} UNSAT")


def test_criterion_07_sat_completeness():
    branching = 4
    rng = random.Random(7)
    t = time.time()
    n = n_models = bad = 0
    while n < 300:
        f = random_formula(rng, rng.randint(2, 16), 2, coef=3)
        if count_atoms_per_level(f) > 3:
            continue
        n += 1
        exists = tree_model_exists(f, ["p", "q", "r"], branching)
        bounded = sat(f, SolverMode.bounded_degree(branching))
        general = sat(f)
        n_models += exists
        if bounded.sat != exists or (exists and not general.sat):
            bad += 1
        elif general.sat and _max_degree(general.witness) <= branching and not exists:
            bad += 1
    dt = time.time() - t
    report(7, bad == 0 and dt < 600,
           f"{n} formulas ({n_models} with a model of branching <= {branching}), "
           f"{bad} disagreements, {dt:.1f}s")


def test_criterion_08_validity_fixtures():
    p, q = prop("p"), prop("q")
    checks = {
        "#p + #!p = #q + #!q valid": valid(parse("#(p) + #(!p) = #(q) + #(!q)")),
        "K axiom valid": valid(implies(box(implies(p, q)), implies(box(p), box(q)))),
        "T axiom not valid": not valid(implies(box(p), p)),
        "p & !p unsat": not sat(parse("p & !p")),
    }
    rng = random.Random(8)
    graded_ok = True
    for k in range(1, 5):
        graded_ok &= not sat(and_(diamond(p, k), not_(diamond(p, k - 1))))
        res = sat(and_(diamond(p, k), not_(diamond(p, k + 1))))
        g, u = res.witness.graph, res.witness.point
        graded_ok &= sum("p" in g.labels[v] for v in g.successors(u)) == k
        for graph in random_corpus(rng, 20, degree=5):
            counts = [sum("p" in graph.labels[v] for v in graph.successors(u))
                      for u in graph.vertices]
            graded_ok &= list(evaluate(graph, diamond(p, k))) == [c >= k for c in counts]
    checks["graded embedding"] = graded_ok
    failed = [k for k, v in checks.items() if not v]
    report(8, not failed, f"{len(checks) - len(failed)}/{len(checks)} fixtures"
           + (f"; failed: {failed}" if failed else ""))


def test_criterion_09_fragment_modes():
    unsat3 = not sat(parse("#(true) >= 3"), SolverMode.bounded_degree(2))
    rng = random.Random(9)
    bd_bad = auto_bad = 0
    for _ in range(100):
        f = random_fragment_formula(rng, rng.randint(2, 10), 2)
        g = sat(f).sat
        bd_bad += sat(f, SolverMode.bounded_degree(2)).sat != g
        auto_bad += sat(f, SolverMode.auto_fragment()).sat != g
    report(9, unsat3 and bd_bad == 0 and auto_bad == 0,
           f"#true>=3 unsat under degree 2: {unsat3}; "
           f"BoundedDegree(2) disagreements {bd_bad}/100, AutoFragment {auto_bad}/100")


def test_criterion_10_ilp_oracle():
    rng = random.Random(10)
    bad = n_feasible = 0
    for _ in range(1000):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        rows = [(tuple(rng.randint(-8, 8) for _ in range(n)), rng.randint(-8, 8))
                for _ in range(m)]
        system = LinearSystem([f"x{i}" for i in range(n)])
        for coefs, k in rows:
            system.add(list(coefs), k)
        got = feasible(system)
        expect = brute_force_ilp(rows, n, integer_box_bound(rows, n))
        if (got is None) != (expect is None):
            bad += 1
        elif got is not None:
            n_feasible += 1
            x = [got[f"x{i}"] for i in range(n)]
            bad += not all(sum(c * v for c, v in zip(coefs, x)) + k >= 0 for coefs, k in rows)
    report(10, bad == 0, f"1000 systems, {n_feasible} feasible, {bad} disagreements")


def test_criterion_11_star_graphs():
    f = parse("#(p) >= #(q)")
    results = [(n, holds(balanced_star(n), f), holds(q_heavy_star(n), f)) for n in (1, 2, 3)]
    ok = all(a and not b for _, a, b in results)
    report(11, ok, "; ".join(f"n={n}: A {a}, B {b}" for n, a, b in results))


def test_criterion_12_verification_problems():
    rng = random.Random(12)
    p1_fail = 0
    for _ in range(50):
        f = random_formula(rng, rng.randint(1, 25), rng.randint(0, 3), coef=8)
        p1_fail += not verify_p1(compile(f), f)
    split_bad = p4_bad = p4_count = 0
    for _ in range(100):
        net = compile(random_formula(rng, rng.randint(1, 10), rng.randint(0, 2), coef=4))
        f = random_formula(rng, rng.randint(1, 10), rng.randint(0, 2), coef=4)
        split_bad += verify_p1(net, f) != (verify_p2(net, f) and verify_p3(net, f))
        res = verify_p4(net, f)
        if res.sat:
            p4_count += 1
            pg = res.witness
            p4_bad += not (classify(net, pg.graph, pg.point) and check(pg.graph, pg.point, f))
    report(12, p1_fail == 0 and split_bad == 0 and p4_bad == 0,
           f"P1(compile f, f) failures {p1_fail}/50; P1 != P2 and P3 on {split_bad}/100; "
           f"{p4_count} P4 witnesses, {p4_bad} bad")


def test_criterion_13_tuning():
    rng = random.Random(13)
    bad = 0
    for _ in range(50):
        net = compile(random_formula(rng, rng.randint(1, 12), rng.randint(0, 2)))
        f = random_formula(rng, rng.randint(1, 12), rng.randint(0, 2))
        tuned = tune(net, f)
        for g in random_corpus(rng, 20):
            bad += int((accepted(g, tuned) != (accepted(g, net) & evaluate(g, f))).any())
    report(13, bad == 0, f"50 pairs x 20 graphs, {bad} mismatches")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
