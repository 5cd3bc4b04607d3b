import random

import pytest

from ksharp.ilp import (IlpBudgetExceeded, IlpStats, LinearSystem, feasible,
                        solution_bound)
from oracles import brute_force_ilp, integer_box_bound


def system(rows, n):
    s = LinearSystem([f"x{i}" for i in range(n)])
    for coefs, k in rows:
        s.add(list(coefs), k)
    return s


def test_trivial():
    assert feasible(LinearSystem()) == {}
    s = LinearSystem(["x"])
    s.add({"x": 1}, -3)
    assert feasible(s) == {"x": 3}
    s.add({"x": -1}, 2)
    assert feasible(s) is None


def test_integrality_gap():
    # 2x = 1 has a rational but no integer solution.
    s = LinearSystem(["x"])
    s.add_eq({"x": 2}, -1)
    assert feasible(s) is None
    s = LinearSystem(["x", "y"])
    s.add_eq({"x": 3, "y": -3}, -1)
    assert feasible(s) is None


def test_pin_zero_and_dump():
    s = LinearSystem(["a", "b"])
    s.add({"a": 1, "b": 1}, -2)
    s.pin_zero("a")
    sol = feasible(s)
    assert sol == {"a": 0, "b": 2}
    assert "1*a + 1*b + -2 >= 0" in s.dump() and "a = 0" in s.dump()


def test_budget():
    # Needs branching; a zero node budget cannot decide it.
    s = LinearSystem(["x", "y"])
    s.add_eq({"x": 2, "y": 2}, -3)
    with pytest.raises(IlpBudgetExceeded):
        feasible(s, node_limit=0)


def test_add_variable_extends_rows():
    s = LinearSystem(["x"])
    s.add({"x": 1}, 0)
    s.add_variable("y")
    s.add({"y": 1}, -1)
    assert feasible(s) == {"x": 0, "y": 1}


def test_random_against_brute_force():
    rng = random.Random(11)
    for _ in range(200):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        rows = [(tuple(rng.randint(-5, 5) for _ in range(n)), rng.randint(-5, 5))
                for _ in range(m)]
        box = integer_box_bound(rows, n)
        expect = brute_force_ilp(rows, n, box)
        stats = IlpStats()
        got = feasible(system(rows, n), stats=stats)
        assert (got is None) == (expect is None)
        if got is not None:
            assert system(rows, n).satisfied_by(got)
            assert all(v <= solution_bound(n, rows) for v in got.values())


def test_spec_examples():
    s = LinearSystem(["x"])
    s.add({"x": 1}, -1)
    s.add({"x": -1}, 2)
    assert feasible(s)["x"] in (1, 2)
    s = LinearSystem(["a", "b"])
    s.add({"a": 1, "b": 1}, -3)
    s.add({"a": -1, "b": -1}, 2)
    assert feasible(s) is None
    # #p - #q = 0 over the surviving types of the #p + #!p = #q + #!q example
    # (word order p, !p, q, !q): #p = x1010 + x1001, #q = x1010 + x0110.
    words = ["1010", "1001", "0110", "0101"]
    s = LinearSystem(words)
    s.add_eq({"1001": 1, "0110": -1}, 0)
    assert feasible(s) == {w: 0 for w in words}


def test_scaling_invariance():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 3)
        rows = [(tuple(rng.randint(-6, 6) for _ in range(n)), rng.randint(-6, 6))
                for _ in range(rng.randint(1, 3))]
        scaled = [(tuple(3 * c for c in a), 3 * k) for a, k in rows]
        assert (feasible(system(rows, n)) is None) == (feasible(system(scaled, n)) is None)


def test_no_variables():
    s = LinearSystem()
    s.add([], 0)
    assert feasible(s) == {}
    s.add([], -1)
    assert feasible(s) is None


def test_box_bound_exact_for_small_systems():
    rows = [((2, 0, 0, -1), 0), ((-4, 5, 6, 4), -5), ((4, 4, -3, -4), 1), ((2, -6, 2, 1), -1)]
    assert solution_bound(4, rows) == integer_box_bound(rows, 4)
    assert feasible(system(rows, 4)) is not None
