"""Aggregate-combine GNNs with sum aggregation, truncated ReLU and a linear classifier.

A layer maps the state ``x`` to ``sigma(x(u) C + (sum of x(v) over successors v) A + b)``
with ``sigma(t) = min(max(t, 0), 1)`` componentwise, using the row-vector
convention.  The classifier accepts ``u`` iff ``sum_i a_i x_L(u)_i >= 0``.
All weights are exact rationals and evaluation never rounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

import numpy as np
from scipy import sparse

from .graph import LabeledGraph

_I64_SAFE = 2 ** 62


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("weights must be exact: use ints, Fractions or 'n/d' strings")
    return Fraction(x)


def _matrix(rows, d: int, what: str) -> tuple:
    m = tuple(tuple(_frac(x) for x in row) for row in rows)
    if len(m) != d or any(len(row) != d for row in m):
        raise ValueError(f"{what} must be {d}x{d}")
    return m


@dataclass(frozen=True, eq=False)
class Layer:
    C: tuple
    A: tuple
    b: tuple

    @classmethod
    def make(cls, C, A, b, d: int | None = None) -> Layer:
        d = len(b) if d is None else d
        bias = tuple(_frac(x) for x in b)
        if len(bias) != d:
            raise ValueError(f"bias must have length {d}")
        return cls(_matrix(C, d, "C"), _matrix(A, d, "A"), bias)

    @property
    def dimension(self) -> int:
        return len(self.b)

    def is_integral(self) -> bool:
        return self._integral

    @cached_property
    def _integral(self) -> bool:
        return all(x.denominator == 1 for x in self._entries())

    def _entries(self):
        for row in self.C:
            yield from row
        for row in self.A:
            yield from row
        yield from self.b

    @cached_property
    def _int_arrays(self):
        C = sparse.csr_matrix(np.array([[int(x) for x in row] for row in self.C],
                                       dtype=np.int64).reshape(self.dimension, self.dimension))
        A = sparse.csr_matrix(np.array([[int(x) for x in row] for row in self.A],
                                       dtype=np.int64).reshape(self.dimension, self.dimension))
        b = np.array([int(x) for x in self.b], dtype=np.int64)
        return C, A, b

    @cached_property
    def _obj_arrays(self):
        d = self.dimension
        C = np.empty((d, d), dtype=object)
        A = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                C[i, j] = self.C[i][j]
                A[i, j] = self.A[i][j]
        b = np.empty(d, dtype=object)
        b[:] = self.b
        return C, A, b

    def activation_bound(self, max_degree: int) -> int:
        """Upper bound on |pre-activation| when inputs lie in [0, 1]."""
        c_abs, a_abs, b_abs = self._column_norms
        return max((b + c + max_degree * a for b, c, a in zip(b_abs, c_abs, a_abs)),
                   default=0) + 1

    @cached_property
    def _column_norms(self):
        d = self.dimension
        c_abs = [sum(abs(self.C[i][j]) for i in range(d)) for j in range(d)]
        a_abs = [sum(abs(self.A[i][j]) for i in range(d)) for j in range(d)]
        return c_abs, a_abs, [abs(x) for x in self.b]


@dataclass(frozen=True, eq=False)
class Gnn:
    propositions: tuple
    dimension: int
    layers: tuple
    cls: tuple

    def __post_init__(self):
        object.__setattr__(self, "propositions", tuple(self.propositions))
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "cls", tuple(_frac(x) for x in self.cls))
        d = self.dimension
        if len(self.propositions) > d:
            raise ValueError("more propositions than state dimensions")
        if len(self.cls) != d:
            raise ValueError(f"cls must have length {d}")
        for layer in self.layers:
            if layer.dimension != d:
                raise ValueError("layer dimension mismatch")

    def is_integral(self) -> bool:
        """Integer weights keep every reachable state in {0, 1}."""
        return all(layer.is_integral() for layer in set(self.layers))

    @property
    def size(self) -> int:
        return len(self.layers) * 2 * self.dimension ** 2 + self.dimension


# ---------------------------------------------------------------- reference semantics

State = dict


def initial_state(graph: LabeledGraph, net: Gnn) -> State:
    """``x0(u) = (l(u)(p_1), ..., l(u)(p_k), 0, ..., 0)``."""
    pad = (Fraction(0),) * (net.dimension - len(net.propositions))
    return {u: tuple(Fraction(int(p in graph.labels[u])) for p in net.propositions) + pad
            for u in graph.vertices}


def _sigma(x: Fraction) -> Fraction:
    return min(max(x, Fraction(0)), Fraction(1))


def apply_layer(graph: LabeledGraph, state: State, layer: Layer) -> State:
    """One layer, computed vertex by vertex with exact rationals."""
    d = layer.dimension
    nxt = {}
    for u in graph.vertices:
        x = state[u]
        y = [Fraction(0)] * d
        for v in graph.successors(u):
            y = [a + b for a, b in zip(y, state[v])]
        out = []
        for col in range(d):
            t = layer.b[col]
            for i in range(d):
                t += x[i] * layer.C[i][col] + y[i] * layer.A[i][col]
            out.append(_sigma(t))
        nxt[u] = tuple(out)
    return nxt


def run(graph: LabeledGraph, net: Gnn) -> State:
    """Final state ``x_L`` as a map vertex -> tuple of Fractions."""
    x = run_matrix(graph, net)
    return {u: tuple(Fraction(v) for v in x[i]) for i, u in enumerate(graph.vertices)}


def run_reference(graph: LabeledGraph, net: Gnn) -> State:
    state = initial_state(graph, net)
    for layer in net.layers:
        state = apply_layer(graph, state, layer)
    return state


# ---------------------------------------------------------------- fast exact path

def _x0_matrix(graph: LabeledGraph, net: Gnn, dtype) -> np.ndarray:
    n, d = len(graph.vertices), net.dimension
    x = np.zeros((n, d), dtype=dtype)
    if dtype is object:
        x[:] = 0
    for i, u in enumerate(graph.vertices):
        lab = graph.labels[u]
        for j, p in enumerate(net.propositions):
            if p in lab:
                x[i, j] = 1
    return x


def run_matrix(graph: LabeledGraph, net: Gnn) -> np.ndarray:
    """Final state as an ``n x d`` array (rows follow ``graph.vertices``).

    Integer nets run on int64 sparse products; anything else on Fraction
    object arrays.  Both are exact.
    """
    deg = graph.degree()
    fast = net.is_integral() and all(layer.activation_bound(deg) < _I64_SAFE
                                     for layer in set(net.layers))
    if fast:
        x = _x0_matrix(graph, net, np.int64)
        adj = graph.adjacency()
        for layer in net.layers:
            C, A, b = layer._int_arrays
            agg = adj @ x
            pre = np.asarray(x @ C) + np.asarray(agg @ A) + b
            x = np.clip(pre, 0, 1)
        return x
    x = _x0_matrix(graph, net, object)
    n = len(graph.vertices)
    succ_idx = [[graph.index[v] for v in graph.successors(u)] for u in graph.vertices]
    for layer in net.layers:
        C, A, b = layer._obj_arrays
        agg = np.empty_like(x)
        for i in range(n):
            row = np.array([Fraction(0)] * net.dimension, dtype=object)
            for j in succ_idx[i]:
                row = row + x[j]
            agg[i] = row
        pre = x.dot(C) + agg.dot(A) + b
        x = np.vectorize(_sigma, otypes=[object])(pre) if pre.size else pre
    return x


def accepted(graph: LabeledGraph, net: Gnn) -> np.ndarray:
    """Bool array: which vertices the classifier accepts."""
    x = run_matrix(graph, net)
    scale = lcm(*(a.denominator for a in net.cls)) if net.cls else 1
    a = [int(c * scale) for c in net.cls]
    if x.dtype != object and sum(abs(c) for c in a) < _I64_SAFE:
        return (x @ np.array(a, dtype=np.int64)) >= 0
    return np.array([sum(Fraction(ai) * Fraction(xi) for ai, xi in zip(a, row)) >= 0
                     for row in x], dtype=bool)


def classify(net: Gnn, graph: LabeledGraph, u) -> bool:
    """Whether the net accepts the pointed graph ``(graph, u)``."""
    return bool(accepted(graph, net)[graph.index[u]])


# ---------------------------------------------------------------- JSON

def _enc(x: Fraction) -> str:
    return str(x)


def gnn_to_json(net: Gnn) -> dict:
    return {
        "propositions": list(net.propositions),
        "dimension": net.dimension,
        "aggregation": "sum",
        "layers": [{"C": [[_enc(x) for x in row] for row in layer.C],
                    "A": [[_enc(x) for x in row] for row in layer.A],
                    "b": [_enc(x) for x in layer.b]} for layer in net.layers],
        "cls": [_enc(x) for x in net.cls],
    }


def gnn_from_json(data: dict) -> Gnn:
    agg = data.get("aggregation", "sum")
    if agg != "sum":
        raise ValueError(f"unsupported aggregation {agg!r}: only 'sum' is allowed")
    d = int(data["dimension"])
    layers = [Layer.make(l["C"], l["A"], l["b"], d) for l in data["layers"]]
    return Gnn(tuple(data["propositions"]), d, tuple(layers), tuple(data["cls"]))


def load_gnn(path) -> Gnn:
    with open(path) as fh:
        return gnn_from_json(json.load(fh))


def save_gnn(net: Gnn, path) -> None:
    with open(path, "w") as fh:
        json.dump(gnn_to_json(net), fh)


def make_gnn(propositions: Sequence[str], layers: Sequence[tuple], cls) -> Gnn:
    """Convenience constructor from ``(C, A, b)`` triples."""
    d = len(cls)
    return Gnn(tuple(propositions), d,
               tuple(Layer.make(C, A, b, d) for C, A, b in layers), tuple(cls))
