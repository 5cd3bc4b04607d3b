"""Labeled directed graphs and the K# model checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .formula import AND, CNT, GEQ, IND, NOT, OR, PROP, Formula, LinExpr, topological


@dataclass(frozen=True)
class LabeledGraph:
    """A finite directed graph whose vertices carry sets of true propositions.

    ``edges`` is a set, so parallel edges cannot occur; self-loops are fine.
    Propositions outside ``propositions`` are false everywhere.
    """

    propositions: tuple
    vertices: tuple
    edges: frozenset
    labels: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "propositions", tuple(self.propositions))
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        object.__setattr__(self, "labels",
                           {v: frozenset(self.labels.get(v, ())) for v in self.vertices})
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        for u, v in self.edges:
            if u not in vset or v not in vset:
                raise ValueError(f"edge {(u, v)!r} references an unknown vertex")
        known = set(self.propositions)
        for v, lab in self.labels.items():
            if not lab <= known:
                raise ValueError(f"vertex {v!r} labeled with undeclared "
                                 f"propositions {sorted(lab - known)}")
        succ = {v: [] for v in self.vertices}
        for u, v in sorted(self.edges, key=lambda e: (self.index[e[0]], self.index[e[1]])):
            succ[u].append(v)
        object.__setattr__(self, "_succ", {v: tuple(s) for v, s in succ.items()})

    @property
    def index(self) -> dict:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_index", idx)
        return idx

    def successors(self, u) -> tuple:
        return self._succ[u]

    def holds(self, u, name: str) -> bool:
        return name in self.labels[u]

    def degree(self) -> int:
        return max((len(s) for s in self._succ.values()), default=0)

    def adjacency(self) -> sparse.csr_matrix:
        """Sparse 0/1 matrix with ``adj[i, j] = 1`` iff there is an edge i -> j."""
        adj = self.__dict__.get("_adj")
        if adj is None:
            idx = self.index
            n = len(self.vertices)
            rows = [idx[u] for u, _ in self.edges]
            cols = [idx[v] for _, v in self.edges]
            adj = sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                                    shape=(n, n))
            object.__setattr__(self, "_adj", adj)
        return adj

    def point(self, u) -> PointedGraph:
        return PointedGraph(self, u)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


@dataclass(frozen=True)
class PointedGraph:
    graph: LabeledGraph
    point: object

    def __post_init__(self):
        if self.point not in self.graph.index:
            raise ValueError(f"point {self.point!r} is not a vertex")


# ---------------------------------------------------------------- semantics

class _Checker:
    """Memoized evaluation on one graph; the memo lives as long as this object."""

    def __init__(self, graph: LabeledGraph):
        self.g = graph
        self.memo: dict = {}

    def check(self, u, f: Formula) -> bool:
        key = (f.id, u)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        k = f.kind
        if k == PROP:
            val = self.g.holds(u, f.name)
        elif k == NOT:
            val = not self.check(u, f.args[0])
        elif k == AND:
            val = self.check(u, f.args[0]) and self.check(u, f.args[1])
        elif k == OR:
            val = self.check(u, f.args[0]) or self.check(u, f.args[1])
        else:
            val = self.value(u, f.expr) >= 0
        self.memo[key] = val
        return val

    def value(self, u, e: LinExpr) -> int:
        total = e.const
        for (kind, f), c in e.terms:
            if kind == IND:
                total += c * int(self.check(u, f))
            else:
                total += c * sum(1 for v in self.g.successors(u) if self.check(v, f))
        return total


def check(graph: LabeledGraph, u, f: Formula) -> bool:
    """Whether ``f`` holds at vertex ``u`` of ``graph``."""
    return _Checker(graph).check(u, f)


def eval_expr(graph: LabeledGraph, u, e: LinExpr) -> int:
    """Integer value of ``e`` at ``u``."""
    return _Checker(graph).value(u, e)


def holds(pg: PointedGraph, f: Formula) -> bool:
    return check(pg.graph, pg.point, f)


_I64_SAFE = 2 ** 62


def evaluate(graph: LabeledGraph, f: Formula) -> np.ndarray:
    """Truth value of ``f`` at every vertex at once, as a bool array.

    Works bottom-up over the DAG so each shared node is evaluated once per
    graph, not once per path.  Agrees with :func:`check` everywhere.
    """
    n = len(graph.vertices)
    adj = graph.adjacency()
    deg = max(graph.degree(), 1)
    vals: dict[int, np.ndarray] = {}
    for g in topological(f):
        k = g.kind
        if k == PROP:
            vals[g.id] = np.array([g.name in graph.labels[v] for v in graph.vertices],
                                  dtype=bool)
        elif k == NOT:
            vals[g.id] = ~vals[g.args[0].id]
        elif k == AND:
            vals[g.id] = vals[g.args[0].id] & vals[g.args[1].id]
        elif k == OR:
            vals[g.id] = vals[g.args[0].id] | vals[g.args[1].id]
        else:
            e = g.expr
            bound = abs(e.const) + sum(abs(c) for _, c in e.terms) * deg
            dtype = np.int64 if bound < _I64_SAFE else object
            total = np.full(n, e.const, dtype=dtype)
            for (kind, h), c in e.terms:
                x = vals[h.id].astype(np.int64)
                if kind == CNT:
                    x = adj @ x
                total = total + (x.astype(dtype) * c)
            vals[g.id] = np.asarray(total >= 0, dtype=bool)
    return vals[f.id]


def satisfying(graph: LabeledGraph, f: Formula) -> set:
    truth = evaluate(graph, f)
    return {v for v, t in zip(graph.vertices, truth) if t}


def semantics_subset(corpus: Iterable[PointedGraph], f: Formula, g: Formula) -> bool:
    """True iff every corpus member satisfying ``f`` also satisfies ``g``.

    A finite-corpus proxy for semantic inclusion, not a decision procedure.
    """
    for pg in corpus:
        checker = _Checker(pg.graph)
        if checker.check(pg.point, f) and not checker.check(pg.point, g):
            return False
    return True


# ---------------------------------------------------------------- building

def disjoint_union(graphs: Iterable[LabeledGraph]) -> tuple[LabeledGraph, list[dict]]:
    """Union of graphs with vertices renamed ``(i, v)``; also returns the renamings."""
    props, vertices, edges, labels, maps = set(), [], [], {}, []
    for i, g in enumerate(graphs):
        ren = {v: (i, v) for v in g.vertices}
        maps.append(ren)
        props.update(g.propositions)
        vertices.extend(ren[v] for v in g.vertices)
        edges.extend((ren[a], ren[b]) for a, b in g.edges)
        labels.update({ren[v]: g.labels[v] for v in g.vertices})
    return LabeledGraph(tuple(sorted(props)), vertices, edges, labels), maps


def relabel(graph: LabeledGraph, mapping: Mapping) -> LabeledGraph:
    return LabeledGraph(graph.propositions, [mapping[v] for v in graph.vertices],
                        [(mapping[a], mapping[b]) for a, b in graph.edges],
                        {mapping[v]: graph.labels[v] for v in graph.vertices})


def with_propositions(graph: LabeledGraph, names: Iterable[str]) -> LabeledGraph:
    props = tuple(sorted(set(graph.propositions) | set(names)))
    return LabeledGraph(props, graph.vertices, graph.edges, graph.labels)


def example_graph() -> PointedGraph:
    """Four vertices: the point ``u`` (p) has an unlabeled successor ``a`` and a
    ``q``-successor ``b``; ``a`` has a ``p``-successor ``c``."""
    g = LabeledGraph(("p", "q"), ("u", "a", "b", "c"),
                     [("u", "a"), ("u", "b"), ("a", "c")],
                     {"u": {"p"}, "b": {"q"}, "c": {"p"}})
    return PointedGraph(g, "u")


def balanced_star(n: int) -> PointedGraph:
    """Star with ``n`` p-leaves and ``n`` q-leaves around ``w``."""
    return _star(n, n, "w")


def q_heavy_star(n: int) -> PointedGraph:
    """Star with ``n`` p-leaves and ``n + 1`` q-leaves around ``w'``."""
    return _star(n, n + 1, "w'")


def _star(n_p: int, n_q: int, center: str) -> PointedGraph:
    us = [f"u{i}" for i in range(1, n_p + 1)]
    vs = [f"v{i}" for i in range(1, n_q + 1)]
    labels = {u: {"p"} for u in us}
    labels.update({v: {"q"} for v in vs})
    g = LabeledGraph(("p", "q"), [center] + us + vs,
                     [(center, x) for x in us + vs], labels)
    return PointedGraph(g, center)


# ---------------------------------------------------------------- JSON

def graph_to_json(graph: LabeledGraph | PointedGraph) -> dict:
    point = None
    if isinstance(graph, PointedGraph):
        graph, point = graph.graph, graph.point
    data = {
        "propositions": list(graph.propositions),
        "vertices": [str(v) for v in graph.vertices],
        "edges": sorted([str(a), str(b)] for a, b in graph.edges),
        "labels": {str(v): sorted(graph.labels[v]) for v in graph.vertices
                   if graph.labels[v]},
    }
    if point is not None:
        data["point"] = str(point)
    return data


def graph_from_json(data: dict) -> LabeledGraph | PointedGraph:
    """Load the graph format; returns a :class:`PointedGraph` when ``point`` is set."""
    for key in ("vertices", "edges"):
        if key not in data:
            raise ValueError(f"graph JSON lacks {key!r}")
    labels = data.get("labels", {})
    props = data.get("propositions")
    if props is None:
        props = sorted({p for lab in labels.values() for p in lab})
    g = LabeledGraph(tuple(props), data["vertices"],
                     [tuple(e) for e in data["edges"]], labels)
    if "point" in data:
        return PointedGraph(g, data["point"])
    return g


def load_graph(path) -> LabeledGraph | PointedGraph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


def save_graph(graph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(graph), fh, indent=2)
