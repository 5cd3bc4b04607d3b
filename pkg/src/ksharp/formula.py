"""Formulas of K#: hash-consed DAG nodes, linear expressions, parsing and printing.

Formulas are interned in a :class:`FormulaStore`.  Building the same formula
twice returns the very same object, so identity comparison is structural
comparison and every node carries a stable integer id.  Children are always
created before their parents, hence ``child.id < parent.id``.

Concrete syntax::

    p  q_1          propositions
    true  false
    !f  f & g  f | g  f -> g  f <-> g
    E >= E  E <= E  E = E  E > E  E < E
    [f]             the indicator 1_f (1 if f holds here, else 0)
    #(f)            number of successors where f holds
    <>^k f          at least k successors satisfy f  (#(f) >= k)
    [] f            every successor satisfies f      (#(!f) <= 0)
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

PROP = "prop"
NOT = "not"
OR = "or"
AND = "and"
GEQ = "geq"

IND = "ind"
CNT = "cnt"


class Formula:
    """A node of the shared formula DAG.

    Never instantiate directly; use :func:`prop`, :func:`geq`, the operators
    ``~ & |`` or :func:`parse`.
    """

    __slots__ = ("kind", "args", "id", "__weakref__")

    def __init__(self, kind: str, args: tuple, node_id: int):
        self.kind = kind
        self.args = args
        self.id = node_id

    # Interned: identity is equality, the default object hash is fine.

    def __invert__(self) -> Formula:
        return not_(self)

    def __and__(self, other: Formula) -> Formula:
        return and_(self, other)

    def __or__(self, other: Formula) -> Formula:
        return or_(self, other)

    def __rshift__(self, other: Formula) -> Formula:
        return implies(self, other)

    @property
    def name(self) -> str:
        assert self.kind == PROP
        return self.args[0]

    @property
    def expr(self) -> LinExpr:
        assert self.kind == GEQ
        return self.args[0]

    @property
    def children(self) -> tuple:
        """Direct formula children, including those under 1_f and #f."""
        if self.kind == PROP:
            return ()
        if self.kind == GEQ:
            return tuple(atom[1] for atom, _ in self.args[0].terms)
        return self.args

    def __repr__(self) -> str:
        return f"<Formula #{self.id} {to_text(self)}>"

    def __str__(self) -> str:
        return to_text(self)

    def __reduce__(self):
        # Re-intern on unpickling so sharing survives a round trip.
        return (from_dag, (to_dag(self),))


class FormulaStore:
    """Append-only intern table for formula nodes."""

    def __init__(self):
        self._table: dict = {}
        self._nodes: list[Formula] = []
        self._lock = threading.Lock()

    def make(self, kind: str, args: tuple) -> Formula:
        key = (kind, args)
        node = self._table.get(key)
        if node is not None:
            return node
        with self._lock:
            node = self._table.get(key)
            if node is None:
                node = Formula(kind, args, len(self._nodes))
                self._nodes.append(node)
                self._table[key] = node
        return node

    def __len__(self) -> int:
        return len(self._nodes)

    def __getitem__(self, node_id: int) -> Formula:
        return self._nodes[node_id]


STORE = FormulaStore()


def _atom_key(atom):
    kind, f = atom
    return (f.id, kind)


@dataclass(frozen=True)
class LinExpr:
    """``const + sum(coef * atom)`` with atoms ``(IND, f)`` or ``(CNT, f)``.

    Always normalized: one term per atom, no zero coefficients, terms sorted
    by (formula id, kind).  Build with :meth:`make` or the helpers below.
    """

    const: int = 0
    terms: tuple = ()

    @classmethod
    def make(cls, const: int = 0, terms: Iterable = ()) -> LinExpr:
        merged: dict = {}
        for atom, coef in terms:
            merged[atom] = merged.get(atom, 0) + coef
        normal = sorted(((a, k) for a, k in merged.items() if k != 0),
                        key=lambda t: _atom_key(t[0]))
        return cls(int(const), tuple(normal))

    @classmethod
    def constant(cls, c: int) -> LinExpr:
        return cls(int(c), ())

    @classmethod
    def indicator(cls, f: Formula, coef: int = 1) -> LinExpr:
        return cls.make(0, [((IND, f), coef)])

    @classmethod
    def count(cls, f: Formula, coef: int = 1) -> LinExpr:
        return cls.make(0, [((CNT, f), coef)])

    def __add__(self, other) -> LinExpr:
        if isinstance(other, int):
            return LinExpr(self.const + other, self.terms)
        return LinExpr.make(self.const + other.const, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> LinExpr:
        return self * -1

    def __sub__(self, other) -> LinExpr:
        return self + (-other)

    def __rsub__(self, other) -> LinExpr:
        return (-self) + other

    def __mul__(self, k: int) -> LinExpr:
        if not isinstance(k, int):
            raise TypeError("linear expressions scale by integers only")
        return LinExpr.make(self.const * k, [(a, c * k) for a, c in self.terms])

    __rmul__ = __mul__

    def atoms(self, kind: str | None = None) -> list[Formula]:
        return [a[1] for a, _ in self.terms if kind is None or a[0] == kind]

    def is_constant(self) -> bool:
        return not self.terms

    def __ge__(self, other) -> Formula:
        return geq(self - other)

    def __le__(self, other) -> Formula:
        return geq(other - self)

    def __gt__(self, other) -> Formula:
        return geq(self - other - 1)

    def __lt__(self, other) -> Formula:
        return geq(other - self - 1)

    def __str__(self) -> str:
        return _fmt_expr(self)


# ---------------------------------------------------------------- builders

def prop(name: str) -> Formula:
    return STORE.make(PROP, (name,))


def not_(f: Formula) -> Formula:
    return STORE.make(NOT, (f,))


def or_(f: Formula, g: Formula) -> Formula:
    return STORE.make(OR, (f, g))


def and_(f: Formula, g: Formula) -> Formula:
    return STORE.make(AND, (f, g))


def geq(e: LinExpr | int) -> Formula:
    """The atom ``e >= 0``."""
    if isinstance(e, int):
        e = LinExpr.constant(e)
    return STORE.make(GEQ, (e,))


def implies(f: Formula, g: Formula) -> Formula:
    return or_(not_(f), g)


def iff(f: Formula, g: Formula) -> Formula:
    return and_(implies(f, g), implies(g, f))


def big_and(fs: Iterable[Formula]) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else and_(out, f)
    return TRUE if out is None else out


def big_or(fs: Iterable[Formula]) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else or_(out, f)
    return FALSE if out is None else out


def ind(f: Formula) -> LinExpr:
    return LinExpr.indicator(f)


def cnt(f: Formula) -> LinExpr:
    return LinExpr.count(f)


def diamond(f: Formula, k: int = 1) -> Formula:
    """Graded diamond: at least ``k`` successors satisfy ``f``."""
    return geq(cnt(f) - k)


def box(f: Formula) -> Formula:
    """No successor violates ``f``."""
    return geq(-cnt(not_(f)))


TRUE = geq(0)
FALSE = geq(-1)


def is_true_const(f: Formula) -> bool:
    return f.kind == GEQ and f.expr.is_constant() and f.expr.const >= 0


def is_false_const(f: Formula) -> bool:
    return f.kind == GEQ and f.expr.is_constant() and f.expr.const < 0


# ---------------------------------------------------------------- structure

def topological(f: Formula) -> list[Formula]:
    """All nodes reachable from ``f`` (through expressions too), children first."""
    seen = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if g.id in seen:
            continue
        seen[g.id] = g
        stack.extend(g.children)
    return [seen[i] for i in sorted(seen)]


def subformulas(f: Formula) -> set[Formula]:
    """The subformula closure, including formulas under 1_g and #g."""
    return set(topological(f))


@lru_cache(maxsize=None)
def modal_depth(f: Formula) -> int:
    if f.kind == PROP:
        return 0
    if f.kind == GEQ:
        return expr_depth(f.expr)
    return max(modal_depth(g) for g in f.args)


def expr_depth(e: LinExpr) -> int:
    depth = 0
    for (kind, g), _ in e.terms:
        depth = max(depth, modal_depth(g) + (1 if kind == CNT else 0))
    return depth


def propositions(f: Formula) -> list[str]:
    """Sorted proposition names occurring anywhere in ``f``."""
    return sorted({g.name for g in topological(f) if g.kind == PROP})


def dag_size(f: Formula) -> int:
    """Number of distinct nodes plus expression terms (the shared size)."""
    return sum(1 + (len(g.expr.terms) if g.kind == GEQ else 0)
               for g in topological(f))


@lru_cache(maxsize=None)
def tree_size(f: Formula) -> int:
    """Size of the unshared syntax tree; may be exponential in :func:`dag_size`."""
    if f.kind == PROP:
        return 1
    if f.kind == GEQ:
        return 1 + sum(1 + tree_size(a[1]) for a, _ in f.expr.terms)
    return 1 + sum(tree_size(g) for g in f.args)


def count_atoms(f: Formula) -> list[Formula]:
    """Bodies ``g`` of the ``#g`` atoms at the root level of ``f``.

    Formulas under an indicator stay at the root level; formulas under a
    count are one level down and are not searched.
    """
    found: dict[int, Formula] = {}
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.id in seen:
            continue
        seen.add(g.id)
        if g.kind == GEQ:
            for (kind, h), _ in g.expr.terms:
                if kind == CNT:
                    found[h.id] = h
                else:
                    stack.append(h)
        elif g.kind != PROP:
            stack.extend(g.args)
    return [found[i] for i in sorted(found)]


# ---------------------------------------------------------------- rewriting

def nnf(f: Formula) -> Formula:
    """Negation normal form; negations end up on propositions only.

    ``!(E >= 0)`` becomes ``-E - 1 >= 0`` (expressions are integer valued).
    Formulas inside 1_g and #g are normalized too.
    """
    return _nnf(f, True)


@lru_cache(maxsize=None)
def _nnf(f: Formula, positive: bool) -> Formula:
    k = f.kind
    if k == PROP:
        return f if positive else not_(f)
    if k == NOT:
        return _nnf(f.args[0], not positive)
    if k in (AND, OR):
        a, b = (_nnf(g, positive) for g in f.args)
        if (k == AND) == positive:
            return and_(a, b)
        return or_(a, b)
    e = _map_atoms(f.expr, nnf)
    return geq(e) if positive else geq(-e - 1)


def _map_atoms(e: LinExpr, fn) -> LinExpr:
    return LinExpr.make(e.const, [((kind, fn(g)), c) for (kind, g), c in e.terms])


MAX_SHANNON = 4


def simplify(f: Formula) -> Formula:
    """Cheap semantics-preserving clean-up used before satisfiability search.

    Folds constant atoms through the Boolean connectives and turns
    inequalities over at most a few indicators (and no counts) into plain
    Boolean combinations of the indicated formulas.
    """
    return _simplify(f)


@lru_cache(maxsize=None)
def _simplify(f: Formula) -> Formula:
    k = f.kind
    if k == PROP:
        return f
    if k == NOT:
        g = _simplify(f.args[0])
        if is_true_const(g):
            return FALSE
        if is_false_const(g):
            return TRUE
        if g.kind == NOT:
            return g.args[0]
        return not_(g)
    if k == AND:
        a, b = (_simplify(g) for g in f.args)
        if is_false_const(a) or is_false_const(b):
            return FALSE
        if is_true_const(a) or a is b:
            return b
        if is_true_const(b):
            return a
        return and_(a, b)
    if k == OR:
        a, b = (_simplify(g) for g in f.args)
        if is_true_const(a) or is_true_const(b):
            return TRUE
        if is_false_const(a) or a is b:
            return b
        if is_false_const(b):
            return a
        return or_(a, b)
    e = _map_atoms(f.expr, _simplify)
    # Indicators of constant formulas are constants.
    const = e.const
    terms = []
    for (kind, g), c in e.terms:
        if kind == IND and is_true_const(g):
            const += c
        elif kind == IND and is_false_const(g):
            continue
        elif kind == CNT and is_false_const(g):
            continue
        else:
            terms.append(((kind, g), c))
    e = LinExpr.make(const, terms)
    if e.is_constant():
        return TRUE if e.const >= 0 else FALSE
    if all(kind == IND for (kind, _), _ in e.terms) and len(e.terms) <= MAX_SHANNON:
        return _shannon(e.const, list(e.terms))
    return geq(e)


def _shannon(const: int, terms: list) -> Formula:
    if not terms:
        return TRUE if const >= 0 else FALSE
    lo = const + sum(min(c, 0) for _, c in terms)
    hi = const + sum(max(c, 0) for _, c in terms)
    if lo >= 0:
        return TRUE
    if hi < 0:
        return FALSE
    ((_, g), c), rest = terms[0], terms[1:]
    when_true = _shannon(const + c, rest)
    when_false = _shannon(const, rest)
    if when_true is when_false:
        return when_true
    if is_true_const(when_true) and is_false_const(when_false):
        return g
    if is_false_const(when_true) and is_true_const(when_false):
        return _simplify(not_(g))
    if is_true_const(when_true):
        return or_(g, when_false)
    if is_false_const(when_true):
        return and_(_simplify(not_(g)), when_false)
    if is_true_const(when_false):
        return or_(_simplify(not_(g)), when_true)
    if is_false_const(when_false):
        return and_(g, when_true)
    return or_(and_(g, when_true), and_(_simplify(not_(g)), when_false))


# ---------------------------------------------------------------- printing

def to_text(f: Formula) -> str:
    """Render ``f`` in the concrete syntax; ``parse(to_text(f)) is f``."""
    return _fmt(f)


def _fmt(f: Formula) -> str:
    k = f.kind
    if k == PROP:
        return f.name
    if k == NOT:
        g = f.args[0]
        inner = _fmt(g)
        return "!" + (inner if g.kind in (PROP, NOT) else f"({inner})")
    if k in (AND, OR):
        op = " & " if k == AND else " | "
        a, b = f.args
        left = _fmt(a) if a.kind in (PROP, NOT) or a.kind == k else f"({_fmt(a)})"
        right = _fmt(b) if b.kind in (PROP, NOT) else f"({_fmt(b)})"
        return left + op + right
    e = f.expr
    if not e.terms:
        if e.const == 0:
            return "true"
        if e.const == -1:
            return "false"
    if all(c < 0 for _, c in e.terms):
        lhs = LinExpr(0, tuple((a, -c) for a, c in e.terms))
        return f"{_fmt_expr(lhs)} <= {e.const}"
    lhs = LinExpr(0, e.terms)
    return f"{_fmt_expr(lhs)} >= {-e.const}"


def _fmt_atom(atom) -> str:
    kind, g = atom
    return f"#({_fmt(g)})" if kind == CNT else f"[{_fmt(g)}]"


def _fmt_expr(e: LinExpr) -> str:
    parts = []
    for atom, c in e.terms:
        body = _fmt_atom(atom) if abs(c) == 1 else f"{abs(c)}*{_fmt_atom(atom)}"
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(f"{sign} {body}")
    if e.const or not parts:
        if not parts:
            parts.append(str(e.const))
        else:
            parts.append(f"{'-' if e.const < 0 else '+'} {abs(e.const)}")
    return " ".join(parts)


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|<>|\[\]|>=|<=|[=<>!&|()\[\]#+\-*^])
""", re.VERBOSE)

_CMP_OPS = (">=", "<=", "=", ">", "<")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self._expr_memo: dict[int, tuple] = {}

    def peek(self, offset: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "op" and val == value

    def expect(self, value: str):
        if not self.at(value):
            _, val, pos = self.peek()
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)
        self.i += 1

    def fail(self, what: str):
        _, val, pos = self.peek()
        raise ParseError(f"expected {what}, found {val or 'end of input'!r}", pos)

    # formula := imp
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            return implies(left, self.formula())
        if self.at("<->"):
            self.i += 1
            return iff(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.i += 1
            f = or_(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.literal()
        while self.at("&"):
            self.i += 1
            f = and_(f, self.literal())
        return f

    def literal(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "!":
            self.i += 1
            return not_(self.literal())
        if kind == "op" and val == "<>":
            self.i += 1
            k = 1
            if self.at("^"):
                self.i += 1
                k = self.integer()
            return diamond(self.literal(), k)
        if kind == "op" and val == "[]":
            self.i += 1
            return box(self.literal())
        if kind == "ident":
            self.i += 1
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            return prop(val)
        if kind == "op" and val == "(":
            start = self.i
            try:
                return self.comparison()
            except ParseError:
                self.i = start
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.comparison()

    def comparison(self) -> Formula:
        # Chains such as ``a <= b <= c`` read as ``a <= b & b <= c``.
        left = self.expr()
        kind, val, _ = self.peek()
        if kind != "op" or val not in _CMP_OPS:
            self.fail("comparison operator")
        f = None
        while kind == "op" and val in _CMP_OPS:
            self.i += 1
            right = self.expr()
            g = _compare(left, val, right)
            f = g if f is None else and_(f, g)
            left = right
            kind, val, _ = self.peek()
        return f

    def integer(self) -> int:
        kind, val, _ = self.peek()
        if kind != "int":
            self.fail("integer")
        self.i += 1
        return int(val)

    def expr(self) -> LinExpr:
        start = self.i
        memo = self._expr_memo.get(start)
        if memo is not None:
            result, end = memo
            if isinstance(result, ParseError):
                raise result
            self.i = end
            return result
        try:
            e = self.term()
            while self.at("+") or self.at("-"):
                sign = 1 if self.peek()[1] == "+" else -1
                self.i += 1
                e = e + self.term() * sign
        except ParseError as err:
            self._expr_memo[start] = (err, start)
            raise
        self._expr_memo[start] = (e, self.i)
        return e

    def term(self) -> LinExpr:
        if self.at("-"):
            self.i += 1
            return -self.term()
        kind, val, _ = self.peek()
        if kind == "int":
            self.i += 1
            c = int(val)
            if self.at("*"):
                self.i += 1
                return self.atom() * c
            return LinExpr.constant(c)
        return self.atom()

    def atom(self) -> LinExpr:
        kind, val, _ = self.peek()
        if kind == "int":
            self.i += 1
            return LinExpr.constant(int(val))
        if self.at("["):
            self.i += 1
            f = self.formula()
            self.expect("]")
            return ind(f)
        if self.at("#"):
            self.i += 1
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return cnt(f)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expression")


def _compare(left: LinExpr, op: str, right: LinExpr) -> Formula:
    if op == ">=":
        return left >= right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == "<":
        return left < right
    return and_(left >= right, left <= right)


def parse(text: str) -> Formula:
    """Parse a formula from its concrete syntax."""
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return f


# ---------------------------------------------------------------- DAG JSON

def to_dag(f: Formula) -> dict:
    """Shared-DAG dump: ``{"nodes": [...], "root": id}`` with local ids."""
    order = topological(f)
    local = {g.id: i for i, g in enumerate(order)}
    nodes = []
    for g in order:
        node = {"id": local[g.id], "kind": g.kind}
        if g.kind == PROP:
            node["name"] = g.name
        elif g.kind == GEQ:
            node["const"] = g.expr.const
            node["terms"] = [{"atom": kind, "formula": local[h.id], "coef": c}
                             for (kind, h), c in g.expr.terms]
        else:
            node["children"] = [local[h.id] for h in g.args]
        nodes.append(node)
    return {"nodes": nodes, "root": local[f.id]}


def from_dag(data: dict) -> Formula:
    built: dict[int, Formula] = {}
    for node in data["nodes"]:
        kind = node["kind"]
        if kind == PROP:
            g = prop(node["name"])
        elif kind == GEQ:
            g = geq(LinExpr.make(int(node["const"]),
                                 [((t["atom"], built[t["formula"]]), int(t["coef"]))
                                  for t in node["terms"]]))
        elif kind == NOT:
            g = not_(built[node["children"][0]])
        elif kind in (AND, OR):
            a, b = (built[c] for c in node["children"])
            g = and_(a, b) if kind == AND else or_(a, b)
        else:
            raise ValueError(f"unknown node kind {kind!r}")
        built[node["id"]] = g
    return built[data["root"]]


def dumps_dag(f: Formula) -> str:
    return json.dumps(to_dag(f))


def loads_dag(text: str) -> Formula:
    return from_dag(json.loads(text))


def iter_words(n: int) -> Iterator[str]:
    """All words of {0,1}^n in lexicographic order."""
    for bits in product("01", repeat=n):
        yield "".join(bits)
