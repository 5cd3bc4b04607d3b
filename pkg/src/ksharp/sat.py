"""Satisfiability of K# formulas.

For each Hintikka set of the formula, the counting atoms ``#psi_1 .. #psi_n``
of its inequalities are replaced by sums of type counters ``x_w``, one per
word ``w`` in {0,1}^n, where ``x_w`` counts the successors satisfying
``conj_w``.  Types whose ``conj_w`` is unsatisfiable (decided recursively)
are pinned to zero, and the resulting integer program is handed to the ILP
oracle.  A solution yields a tree model: the root carries the valuation of
the Hintikka set and gets ``x_w`` copies of a model of ``conj_w``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

from .formula import (AND, CNT, GEQ, IND, NOT, OR, PROP, TRUE, Formula, LinExpr,
                      _nnf, big_and, count_atoms, is_false_const, is_true_const,
                      modal_depth, nnf, not_, propositions, simplify, topological)
from .graph import LabeledGraph, PointedGraph, check
from .ilp import DEFAULT_NODE_LIMIT, IlpBudgetExceeded, IlpStats, LinearSystem, feasible

DEFAULT_MAX_COUNT_ATOMS = 12


class BudgetExceeded(RuntimeError):
    """The search gave up; the formula is neither shown SAT nor UNSAT."""


class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"


@dataclass(frozen=True)
class SolverMode:
    """``general``, ``degree`` (every vertex has at most ``degree`` successors)
    or ``auto`` (the #a <= #b fragment, solved with a per-level degree bound)."""

    kind: str = "general"
    degree: int | None = None

    @classmethod
    def general(cls) -> SolverMode:
        return cls("general")

    @classmethod
    def bounded_degree(cls, k: int) -> SolverMode:
        if k < 0:
            raise ValueError("degree bound must be nonnegative")
        return cls("degree", k)

    @classmethod
    def auto_fragment(cls) -> SolverMode:
        return cls("auto")

    @classmethod
    def parse(cls, text: str) -> SolverMode:
        if text == "general":
            return cls.general()
        if text == "auto":
            return cls.auto_fragment()
        if text.startswith("degree:"):
            return cls.bounded_degree(int(text.split(":", 1)[1]))
        raise ValueError(f"unknown solver mode {text!r}")


GENERAL = SolverMode.general()


@dataclass
class SolverStats:
    sat_calls: int = 0
    memo_hits: int = 0
    hintikka_sets: int = 0
    ilp_calls: int = 0
    ilp_nodes: int = 0
    max_depth: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SatResult:
    verdict: Verdict
    witness: PointedGraph | None = None
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    def __bool__(self) -> bool:
        return self.sat


# ---------------------------------------------------------------- Hintikka sets

@dataclass(frozen=True)
class HintikkaSet:
    members: frozenset
    bindings: tuple  # ((psi, bool), ...) sorted by psi.id

    def binding(self) -> dict:
        return {psi: val for psi, val in self.bindings}

    def valuation(self) -> frozenset:
        return frozenset(g.name for g in self.members if g.kind == PROP)

    def inequalities(self) -> list[Formula]:
        return sorted((g for g in self.members if g.kind == GEQ), key=lambda g: g.id)

    def linear_constraints(self) -> list[LinExpr]:
        """Inequalities with indicators replaced by their bound 0/1 values."""
        bound = self.binding()
        out = []
        for g in self.inequalities():
            const = g.expr.const
            terms = []
            for (kind, h), c in g.expr.terms:
                if kind == IND:
                    const += c * int(bound[h])
                else:
                    terms.append(((kind, h), c))
            out.append(LinExpr.make(const, terms))
        return out

    def _elements(self) -> frozenset:
        return self.members | frozenset(("bind", psi.id, v) for psi, v in self.bindings)


def _neg(g: Formula) -> Formula:
    """NNF of the negation of an NNF formula."""
    return _nnf(g, False)


def _pure_value(g: Formula, bound: dict):
    """Value of an indicator-only inequality once all its indicators are bound."""
    total = g.expr.const
    for (kind, h), c in g.expr.terms:
        if kind != IND or h not in bound:
            return None
        total += c * int(bound[h])
    return total


def _candidates(root: Formula, prune: bool) -> Iterator[tuple[frozenset, dict]]:
    """Saturated consistent sets, depth first; may include non-minimal ones."""

    def conflict(members: set, g: Formula) -> bool:
        if g.kind == GEQ and is_false_const(g):
            return True
        return _neg(g) in members

    def arith_violation(members: set, bound: dict) -> bool:
        for g in members:
            if g.kind == GEQ:
                v = _pure_value(g, bound)
                if v is not None and v < 0:
                    return True
        return False

    def go(todo: list, members: set, bound: dict):
        while todo:
            g = todo.pop()
            if g in members:
                continue
            if conflict(members, g):
                return
            members.add(g)
            k = g.kind
            if k == AND:
                todo.extend(reversed(g.args))
            elif k == OR:
                a, b = g.args
                if a in members or b in members:
                    continue
                for choice in (a, b):
                    yield from go(todo + [choice], set(members), dict(bound))
                return
            elif k == GEQ:
                pending = [h for (kind, h), _ in g.expr.terms if kind == IND and h not in bound]
                if pending:
                    h = pending[0]
                    # Revisit g after binding h (it is already a member, so
                    # re-push and let the membership test skip it).
                    for val in (True, False):
                        nb = dict(bound)
                        nb[h] = val
                        nm = set(members)
                        nm.discard(g)
                        yield from go(todo + [g, h if val else _neg(h)], nm, nb)
                    return
                if prune and arith_violation(members, bound):
                    return
        if prune and arith_violation(members, bound):
            return
        yield frozenset(members), bound

    yield from go([root], set(), {})


def _hset(members: frozenset, bound: dict) -> HintikkaSet:
    return HintikkaSet(members, tuple(sorted(bound.items(), key=lambda t: t[0].id)))


def _minimal(cands) -> list[HintikkaSet]:
    sets = []
    seen = set()
    for members, bound in cands:
        hs = _hset(members, bound)
        key = hs._elements()
        if key not in seen:
            seen.add(key)
            sets.append(hs)
    elems = [h._elements() for h in sets]
    return [h for h, e in zip(sets, elems) if not any(o < e for o in elems)]


def hintikka_sets(f: Formula, prune: bool = False) -> Iterator[HintikkaSet]:
    """The Hintikka sets of ``f`` (put in NNF first), in a fixed order.

    With ``prune`` the sets whose indicator-only inequalities evaluate to
    false are dropped early; they could never be realized anyway.
    """
    yield from _minimal(_candidates(nnf(f), prune))


def conj(w: str | Sequence[int], psis: Sequence[Formula]) -> Formula:
    """``psi_i`` where ``w_i = 1`` and ``!psi_i`` where ``w_i = 0``, conjoined in order."""
    bits = [int(c) for c in w]
    if len(bits) != len(psis):
        raise ValueError("word length differs from the number of formulas")
    return big_and(psi if bit else not_(psi) for bit, psi in zip(bits, psis))


def _literal(f: Formula, positive: bool):
    """``(name, polarity)`` if ``f`` (or its negation) is a literal, else None."""
    if f.kind == PROP:
        return f.name, positive
    if f.kind == NOT and f.args[0].kind == PROP:
        return f.args[0].name, not positive
    return None


# ---------------------------------------------------------------- the procedure

@dataclass(frozen=True)
class _Tree:
    labels: frozenset
    children: tuple  # ((subtree, multiplicity), ...)


class Solver:
    """One satisfiability run; memoizes verdicts per formula node."""

    def __init__(self, mode: SolverMode = GENERAL,
                 max_count_atoms: int = DEFAULT_MAX_COUNT_ATOMS,
                 ilp_node_limit: int = DEFAULT_NODE_LIMIT):
        self.mode = mode
        self.max_count_atoms = max_count_atoms
        self.ilp_node_limit = ilp_node_limit
        self.stats = SolverStats()
        self.memo: dict[int, _Tree | None] = {}

    def solve(self, f: Formula) -> SatResult:
        if self.mode.kind == "auto":
            check_fragment(f)
        tree = self._sat(f, 0)
        if tree is None:
            return SatResult(Verdict.UNSAT, None, self.stats)
        witness = materialize(tree, propositions(f))
        if not check(witness.graph, witness.point, f):
            raise AssertionError("witness does not satisfy the formula")
        return SatResult(Verdict.SAT, witness, self.stats)

    def _degree_bound(self, n_atoms: int) -> int | None:
        if self.mode.kind == "degree":
            return self.mode.degree
        if self.mode.kind == "auto":
            return n_atoms * n_atoms + n_atoms
        return None

    def _sat(self, f: Formula, depth: int) -> _Tree | None:
        if f.id in self.memo:
            self.stats.memo_hits += 1
            return self.memo[f.id]
        self.stats.sat_calls += 1
        self.stats.max_depth = max(self.stats.max_depth, depth)
        g = nnf(simplify(f))
        bound = self._degree_bound(len(count_atoms(g)))
        inconclusive = None
        result = None
        tried: list[frozenset] = []
        for members, bnd in _candidates(g, prune=True):
            hs = _hset(members, bnd)
            key = hs._elements()
            # A superset of a set already tried cannot do better.
            if any(t <= key for t in tried):
                continue
            tried.append(key)
            self.stats.hintikka_sets += 1
            try:
                result = self._try(hs, depth, bound)
            except BudgetExceeded as err:
                inconclusive = err
                continue
            if result is not None:
                break
        if result is None and inconclusive is not None:
            raise inconclusive
        self.memo[f.id] = result
        return result

    def _try(self, hs: HintikkaSet, depth: int, degree: int | None) -> _Tree | None:
        constraints = [e for e in hs.linear_constraints() if not e.is_constant()]
        if any(e.const < 0 for e in hs.linear_constraints() if e.is_constant()):
            return None
        psis: list[Formula] = sorted({h for e in constraints for h in e.atoms(CNT)},
                                     key=lambda h: h.id)
        n = len(psis)
        if n > self.max_count_atoms:
            raise BudgetExceeded(f"{n} counting atoms at one level "
                                 f"(limit {self.max_count_atoms})")
        if n == 0:
            return _Tree(hs.valuation(), ())
        live: dict[str, _Tree] = {}
        unknown = None
        lits = [(_literal(p, True), _literal(p, False)) for p in psis]
        for bits in product((0, 1), repeat=n):
            w = "".join(map(str, bits))
            seen: dict = {}
            clash = False
            for bit, (pos_lit, neg_lit) in zip(bits, lits):
                lit = pos_lit if bit else neg_lit
                if lit is None:
                    continue
                name, pol = lit
                if seen.get(name, pol) != pol:
                    clash = True
                    break
                seen[name] = pol
            if clash:
                continue
            try:
                sub = self._sat(conj(w, psis), depth + 1)
            except BudgetExceeded as err:
                unknown = err
                continue
            if sub is not None:
                live[w] = sub
        system = LinearSystem(list(live))
        index = {h.id: i for i, h in enumerate(psis)}
        for e in constraints:
            coefs = {w: 0 for w in live}
            for (_, h), c in e.terms:
                i = index[h.id]
                for w in live:
                    if w[i] == "1":
                        coefs[w] += c
            system.add(coefs, e.const)
        if degree is not None:
            system.add({w: -1 for w in live}, degree)
        self.stats.ilp_calls += 1
        ilp_stats = IlpStats()
        try:
            assignment = feasible(system, self.ilp_node_limit, ilp_stats)
        except IlpBudgetExceeded as err:
            raise BudgetExceeded(str(err)) from err
        finally:
            self.stats.ilp_nodes += ilp_stats.nodes
        if assignment is None:
            if unknown is not None:
                raise unknown
            return None
        children = tuple((live[w], x) for w, x in sorted(assignment.items()) if x > 0)
        return _Tree(hs.valuation(), children)


def materialize(tree: _Tree, props: Sequence[str] = ()) -> PointedGraph:
    """Unfold a witness tree into a graph with vertices ``v0`` (the point), ``v1``, ..."""
    vertices, edges, labels = [], [], {}
    stack = [(tree, None)]
    while stack:
        node, parent = stack.pop()
        v = f"v{len(vertices)}"
        vertices.append(v)
        labels[v] = node.labels
        if parent is not None:
            edges.append((parent, v))
        for child, mult in reversed(node.children):
            stack.extend([(child, v)] * mult)
    names = sorted(set(props).union(*labels.values()))
    return PointedGraph(LabeledGraph(tuple(names), vertices, edges, labels), "v0")


def in_fragment(f: Formula) -> bool:
    """Every inequality is ``#a - #b >= 0`` (i.e. ``#b <= #a``) or a constant."""
    for g in topological(f):
        if g.kind != GEQ:
            continue
        e = g.expr
        if e.is_constant():
            continue
        if e.const != 0 or len(e.terms) != 2:
            return False
        if sorted(c for _, c in e.terms) != [-1, 1] or any(k != CNT for (k, _), _ in e.terms):
            return False
    return True


def check_fragment(f: Formula) -> None:
    if not in_fragment(f):
        raise ValueError("formula is outside the #a <= #b fragment")


def sat(f: Formula, mode: SolverMode = GENERAL, **budget) -> SatResult:
    """Decide satisfiability; the witness of a SAT verdict is a checked tree model.

    Raises :class:`BudgetExceeded` when a resource limit stopped the search.
    """
    return Solver(mode, **budget).solve(f)


def valid(f: Formula, mode: SolverMode = GENERAL, **budget) -> bool:
    """``f`` holds in every pointed graph (of the mode's class)."""
    return sat(not_(f), mode, **budget).verdict is Verdict.UNSAT


def witness_depth(pg: PointedGraph) -> int:
    """Height of the tree below the point (the witness is a tree)."""
    g = pg.graph
    best, stack = 0, [(pg.point, 0)]
    while stack:
        v, d = stack.pop()
        best = max(best, d)
        stack.extend((w, d + 1) for w in g.successors(v))
    return best


def is_tree(pg: PointedGraph) -> bool:
    g = pg.graph
    indeg = {v: 0 for v in g.vertices}
    for _, b in g.edges:
        indeg[b] += 1
    if indeg[pg.point] != 0 or any(indeg[v] != 1 for v in g.vertices if v != pg.point):
        return False
    reached, stack = set(), [pg.point]
    while stack:
        v = stack.pop()
        reached.add(v)
        stack.extend(g.successors(v))
    return len(reached) == len(g.vertices)
