"""Seeded random formulas and graphs for property tests and demos."""

from __future__ import annotations

import random
from typing import Sequence

from .formula import (CNT, IND, Formula, LinExpr, and_, geq, not_, or_, prop)
from .graph import LabeledGraph, PointedGraph

PROPS = ("p", "q", "r")


def random_formula(rng: random.Random, size: int = 12, md: int = 2, coef: int = 8,
                   props: Sequence[str] = PROPS, max_terms: int = 2,
                   indicators: bool = True) -> Formula:
    """A formula of at most about ``size`` nodes and modal depth at most ``md``."""

    def go(budget: int, depth: int) -> Formula:
        if budget <= 1:
            return prop(rng.choice(props))
        kinds = ["not", "and", "or"]
        if depth > 0 or indicators:
            kinds += ["geq", "geq"]
        k = rng.choice(kinds)
        if k == "not":
            return not_(go(budget - 1, depth))
        if k in ("and", "or"):
            left = rng.randint(1, max(1, budget - 2))
            a, b = go(left, depth), go(budget - 1 - left, depth)
            return and_(a, b) if k == "and" else or_(a, b)
        n_terms = rng.randint(1, max_terms)
        share = max(1, (budget - 1) // n_terms)
        terms = []
        for _ in range(n_terms):
            if depth > 0 and (not indicators or rng.random() < 0.7):
                terms.append(((CNT, go(share, depth - 1)), rng.choice(_nonzero(coef))))
            elif indicators:
                terms.append(((IND, go(share, depth)), rng.choice(_nonzero(coef))))
        return geq(LinExpr.make(rng.randint(-coef, coef), terms))

    return go(size, md)


def _nonzero(bound: int) -> list[int]:
    return [c for c in range(-bound, bound + 1) if c]


def random_fragment_formula(rng: random.Random, size: int = 8, md: int = 2,
                            props: Sequence[str] = PROPS) -> Formula:
    """Boolean combination of atoms ``#a <= #b`` (``#b - #a >= 0``)."""

    def go(budget: int, depth: int) -> Formula:
        if budget <= 1 or (depth == 0 and budget <= 2):
            return prop(rng.choice(props))
        k = rng.choice(["not", "and", "or"] + (["cmp", "cmp"] if depth > 0 else []))
        if k == "not":
            return not_(go(budget - 1, depth))
        if k in ("and", "or"):
            left = rng.randint(1, max(1, budget - 2))
            a, b = go(left, depth), go(budget - 1 - left, depth)
            return and_(a, b) if k == "and" else or_(a, b)
        half = max(1, (budget - 1) // 2)
        a, b = go(half, depth - 1), go(half, depth - 1)
        if a is b:
            b = not_(b)
        return geq(LinExpr.make(0, [((CNT, b), 1), ((CNT, a), -1)]))

    return go(size, md)


def random_graph(rng: random.Random, n_max: int = 8, degree: int = 3,
                 props: Sequence[str] = PROPS, p_label: float = 0.5) -> LabeledGraph:
    """Directed graph on 1..n_max vertices, out-degree at most ``degree``, self loops allowed."""
    n = rng.randint(1, n_max)
    vertices = list(range(n))
    edges = []
    for u in vertices:
        k = rng.randint(0, min(degree, n))
        edges.extend((u, v) for v in rng.sample(vertices, k))
    labels = {u: frozenset(p for p in props if rng.random() < p_label) for u in vertices}
    return LabeledGraph(tuple(props), vertices, edges, labels)


def random_corpus(rng: random.Random, count: int = 50, **kw) -> list[LabeledGraph]:
    return [random_graph(rng, **kw) for _ in range(count)]


def pointed_corpus(graphs: Sequence[LabeledGraph]) -> list[PointedGraph]:
    return [PointedGraph(g, u) for g in graphs for u in g.vertices]
