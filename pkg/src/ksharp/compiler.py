"""Compile K# formulas into equivalent GNNs.

:func:`compile` gives one state component per subformula and one layer per
subformula.  :func:`compile_cnf` first rewrites every propositional level
into CNF so that the number of layers only depends on the modal depth.

Both nets use a final extra component that is pinned to 1 from the first
layer on; the classifier is ``x_root - x_one >= 0``.
"""

from __future__ import annotations

from itertools import product

from .formula import (AND, CNT, GEQ, IND, NOT, OR, PROP, Formula, LinExpr, and_,
                      big_and, big_or, geq, is_false_const, is_true_const, not_,
                      or_, propositions, topological)
from .gnn import Gnn, Layer


class CompileBudgetExceeded(RuntimeError):
    """The CNF rewriting grew beyond the configured clause budget."""


def _check_integral(e: LinExpr):
    for _, c in e.terms:
        if not isinstance(c, int):
            raise ValueError(f"non-integer coefficient {c!r}")


def compile(f: Formula) -> Gnn:  # noqa: A001 - mirrors the operation name
    """One component and one layer per subformula, props first."""
    subs = topological(f)
    props = [g for g in subs if g.kind == PROP]
    props.sort(key=lambda g: g.name)
    others = [g for g in subs if g.kind != PROP]
    order = props + others
    pos = {g.id: i for i, g in enumerate(order)}
    L = len(order)
    d = L + 1
    one = L
    C = [[0] * d for _ in range(d)]
    A = [[0] * d for _ in range(d)]
    b = [0] * d
    for g in order:
        col = pos[g.id]
        k = g.kind
        if k == PROP:
            C[col][col] = 1
        elif k == NOT:
            C[pos[g.args[0].id]][col] -= 1
            b[col] = 1
        elif k in (OR, AND):
            for h in g.args:
                C[pos[h.id]][col] += 1
            b[col] = -1 if k == AND else 0
        else:
            e = g.expr
            _check_integral(e)
            # c0 + sum >= 0  is  -c0 <= sum, whose bias is -(-c0) + 1.
            for (kind, h), coef in e.terms:
                target = C if kind == IND else A
                target[pos[h.id]][col] += coef
            b[col] = e.const + 1
    b[one] = 1
    layer = Layer.make(C, A, b, d)
    cls = [0] * d
    cls[pos[f.id]] += 1
    cls[one] -= 1
    return Gnn(tuple(g.name for g in props), d, (layer,) * L, tuple(cls))


# ---------------------------------------------------------------- CNF variant

DEFAULT_CLAUSE_BUDGET = 4096


def eliminate_indicators(f: Formula, budget: int = DEFAULT_CLAUSE_BUDGET) -> Formula:
    """Equivalent formula without 1_g atoms.

    An inequality mentioning indicators 1_g1..1_gm is split over the 2^m
    truth assignments of g1..gm.
    """
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g.id)
        if hit is not None:
            return hit
        k = g.kind
        if k == PROP:
            out = g
        elif k == NOT:
            out = not_(go(g.args[0]))
        elif k in (AND, OR):
            a, c = (go(h) for h in g.args)
            out = and_(a, c) if k == AND else or_(a, c)
        else:
            e = g.expr
            counts = [((CNT, go(h)), c) for (kind, h), c in e.terms if kind == CNT]
            inds = [(go(h), c) for (kind, h), c in e.terms if kind == IND]
            if len(inds) > 16 or 2 ** len(inds) > budget:
                raise CompileBudgetExceeded(f"{len(inds)} indicators in one inequality")
            cases = []
            for bits in product((True, False), repeat=len(inds)):
                const = e.const + sum(c for (h, c), bit in zip(inds, bits) if bit)
                lits = [h if bit else not_(h) for (h, _), bit in zip(inds, bits)]
                cases.append(big_and(lits + [geq(LinExpr.make(const, counts))]))
            out = big_or(cases)
        memo[g.id] = out
        return out

    return go(f)


def to_cnf(f: Formula, budget: int = DEFAULT_CLAUSE_BUDGET) -> frozenset:
    """Clause set for the top propositional level of an indicator-free ``f``.

    Literals are ``(atom, polarity)`` where atoms are propositions or
    inequalities over counts.  Constant atoms are folded away, so the empty
    clause set is true and a set holding the empty clause is false.
    """
    memo: dict = {}

    def go(g: Formula, pos: bool) -> frozenset:
        key = (g.id, pos)
        hit = memo.get(key)
        if hit is not None:
            return hit
        k = g.kind
        if k == NOT:
            out = go(g.args[0], not pos)
        elif k in (AND, OR):
            left, right = go(g.args[0], pos), go(g.args[1], pos)
            if (k == AND) == pos:
                out = left | right
            else:
                if len(left) * len(right) > budget:
                    raise CompileBudgetExceeded("CNF distribution exceeds the clause budget")
                out = frozenset(_tidy(a | c) for a in left for c in right)
                out = frozenset(c for c in out if c is not None)
        elif k == GEQ and (is_true_const(g) or is_false_const(g)):
            true = is_true_const(g) == pos
            out = frozenset() if true else frozenset([frozenset()])
        else:
            out = frozenset([frozenset([(g, pos)])])
        if len(out) > budget:
            raise CompileBudgetExceeded("CNF exceeds the clause budget")
        memo[key] = out
        return out

    return go(f, True)


def _tidy(clause: frozenset):
    atoms = {}
    for atom, pol in clause:
        if atoms.get(atom, pol) != pol:
            return None  # tautology
        atoms[atom] = pol
    return clause


class _Builder:
    """Allocates state components and fills the single replicated layer."""

    def __init__(self, props: list[str], budget: int):
        self.budget = budget
        self.cols: list[dict] = []
        self.keys: dict = {}
        self.height: list[int] = []
        self.prop_col = {p: self._new(("prop", p), 0, {"C": {}, "b": 0}) for p in props}
        for p, col in self.prop_col.items():
            self.cols[col]["C"][col] = 1
        self.one = self._new(("one",), 1, {"C": {}, "b": 1})
        self.zero = None

    def _new(self, key, height: int, spec: dict) -> int:
        col = len(self.cols)
        spec.setdefault("A", {})
        self.cols.append(spec)
        self.keys[key] = col
        self.height.append(height)
        return col

    def zero_col(self) -> int:
        if self.zero is None:
            self.zero = self._new(("zero",), 0, {"C": {}, "b": 0})
        return self.zero

    def formula(self, f: Formula) -> int:
        return self.cnf(to_cnf(f, self.budget))

    def cnf(self, clauses: frozenset) -> int:
        if not clauses:
            return self.one
        if frozenset() in clauses:
            return self.zero_col()
        if len(clauses) == 1:
            return self.clause(next(iter(clauses)))
        key = ("cnf", clauses)
        if key in self.keys:
            return self.keys[key]
        members = sorted({self.clause(c) for c in clauses})
        spec = {"C": {m: 1 for m in members}, "b": -len(members) + 1}
        return self._new(key, 1 + max(self.height[m] for m in members), spec)

    def clause(self, clause: frozenset) -> int:
        lits = sorted(((self.atom(a), pol) for a, pol in clause), key=lambda t: t)
        if len(lits) == 1 and lits[0][1]:
            return lits[0][0]
        key = ("clause", clause)
        if key in self.keys:
            return self.keys[key]
        C = {}
        for col, pol in lits:
            C[col] = C.get(col, 0) + (1 if pol else -1)
        spec = {"C": C, "b": sum(1 for _, pol in lits if not pol)}
        return self._new(key, 1 + max(self.height[c] for c, _ in lits), spec)

    def atom(self, g: Formula) -> int:
        if g.kind == PROP:
            return self.prop_col[g.name]
        key = ("ineq", g.id)
        if key in self.keys:
            return self.keys[key]
        e = g.expr
        _check_integral(e)
        A: dict[int, int] = {}
        heights = [0]
        for (kind, h), coef in e.terms:
            assert kind == CNT, "indicators must be eliminated first"
            col = self.formula(h)
            if col == self.zero:
                continue
            A[col] = A.get(col, 0) + coef
            heights.append(self.height[col])
        spec = {"C": {}, "A": A, "b": e.const + 1}
        return self._new(key, 1 + max(heights), spec)

    def build(self, root: int, props: list[str]) -> Gnn:
        d = len(self.cols)
        C = [[0] * d for _ in range(d)]
        A = [[0] * d for _ in range(d)]
        b = [0] * d
        for col, spec in enumerate(self.cols):
            for i, v in spec["C"].items():
                C[i][col] += v
            for i, v in spec["A"].items():
                A[i][col] += v
            b[col] = spec["b"]
        layer = Layer.make(C, A, b, d)
        L = max(self.height[root], self.height[self.one])
        cls = [0] * d
        cls[root] += 1
        cls[self.one] -= 1
        return Gnn(tuple(props), d, (layer,) * L, tuple(cls))


def compile_cnf(f: Formula, budget: int = DEFAULT_CLAUSE_BUDGET) -> Gnn:
    """Depth-compressed compilation: O(md(f)) layers.

    Raises :class:`CompileBudgetExceeded` when the CNF of some level needs
    more than ``budget`` clauses.
    """
    props = propositions(f)
    g = eliminate_indicators(f, budget)
    builder = _Builder(props, budget)
    root = builder.formula(g)
    return builder.build(root, props)
