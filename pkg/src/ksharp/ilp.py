"""Integer feasibility over nonnegative integer variables.

Branch and bound on the LP relaxation; the relaxation is solved with an
exact rational (Fraction) two-phase-style simplex using Bland's rule, so no
answer ever depends on floating point tolerances.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, floor, gcd, isqrt
from typing import Hashable, Sequence

DEFAULT_NODE_LIMIT = 20000


class IlpBudgetExceeded(RuntimeError):
    """Branch and bound hit its node limit before reaching a verdict."""


@dataclass
class LinearSystem:
    """Constraints ``sum(c_i * x_i) + const >= 0`` over integers ``x_i >= 0``."""

    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    fixed_zero: set = field(default_factory=set)

    def __post_init__(self):
        self._pos = {v: i for i, v in enumerate(self.variables)}

    def add_variable(self, var: Hashable) -> None:
        if var not in self._pos:
            self._pos[var] = len(self.variables)
            self.variables.append(var)
            self.constraints = [(coefs + (0,), k) for coefs, k in self.constraints]

    def add(self, coefs: dict | Sequence[int], const: int) -> None:
        """Add ``sum(coefs[v] * v) + const >= 0``."""
        if isinstance(coefs, dict):
            vec = [0] * len(self.variables)
            for v, c in coefs.items():
                vec[self._pos[v]] += int(c)
        else:
            vec = [int(c) for c in coefs]
            if len(vec) != len(self.variables):
                raise ValueError("coefficient vector length mismatch")
        self.constraints.append((tuple(vec), int(const)))

    def add_eq(self, coefs: dict | Sequence[int], const: int) -> None:
        self.add(coefs, const)
        if isinstance(coefs, dict):
            self.add({v: -c for v, c in coefs.items()}, -const)
        else:
            self.add([-c for c in coefs], -const)

    def pin_zero(self, var: Hashable) -> None:
        self.fixed_zero.add(var)

    def satisfied_by(self, assignment: dict) -> bool:
        x = [assignment.get(v, 0) for v in self.variables]
        if any(not isinstance(xi, int) or xi < 0 for xi in x):
            return False
        if any(assignment.get(v, 0) != 0 for v in self.fixed_zero):
            return False
        return all(sum(c * xi for c, xi in zip(coefs, x)) + k >= 0
                   for coefs, k in self.constraints)

    def dump(self) -> str:
        """One constraint per line, ``c1*x1 + c2*x2 + k >= 0``."""
        lines = []
        for coefs, k in self.constraints:
            parts = [f"{c}*{v}" for v, c in zip(self.variables, coefs) if c]
            parts.append(str(k))
            lines.append(" + ".join(parts) + " >= 0")
        lines.extend(f"{v} = 0" for v in self.variables if v in self.fixed_zero)
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.dump()


def solution_bound(n: int, rows: list) -> int:
    """Every feasible system has a solution with entries at most this value.

    With slacks the system becomes ``Ax = b`` with ``m`` rows and ``n + m``
    columns; an integer solution then exists within ``(n+m) (m a)^(2m+1)``
    where ``a`` bounds all coefficients (Papadimitriou 1981).
    """
    m = max(len(rows), 1)
    a = max([1] + [abs(c) for coefs, k in rows for c in coefs] + [abs(k) for _, k in rows])
    return min((n + m) * (m * a) ** (2 * m + 1), hadamard_bound(n, rows))


def hadamard_bound(n: int, rows: list) -> int:
    """``(n+1) * Delta`` with ``Delta`` bounding every subdeterminant of ``[A | b]``.

    An integral system with an integral solution has one with all entries at
    most ``(n+1) Delta`` (Cook, Gerards, Schrijver, Tardos 1986).  Delta is
    computed exactly for small systems and bounded by the product of the
    largest row norms (Hadamard) otherwise.
    """
    return (n + 1) * _delta(rows)


# Largest number of square minors worth evaluating exactly.
MAX_MINORS = 4000


def _delta(rows: list) -> int:
    mat = [list(coefs) + [k] for coefs, k in rows]
    m = len(mat)
    w = len(mat[0]) if mat else 0
    work = sum(comb(m, r) * comb(w, r) for r in range(1, min(m, w) + 1))
    if work <= MAX_MINORS:
        best = 1
        for r in range(1, min(m, w) + 1):
            for rs in combinations(range(m), r):
                for cs in combinations(range(w), r):
                    best = max(best, abs(_det([[mat[i][j] for j in cs] for i in rs])))
        return best
    sq = sorted((sum(c * c for c in row) for row in mat), reverse=True)
    prod = 1
    for s in sq[:w]:
        prod *= max(s, 1)
    return isqrt(prod) + 1


def _det(a: list) -> int:
    """Integer determinant by fraction-free elimination."""
    a = [row[:] for row in a]
    n, sign, prev = len(a), 1, 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------- LP relaxation

def _lp_point(rows: list, n: int) -> list | None:
    """A point ``y >= 0`` (Fractions) with ``a.y >= r`` for all ``(a, r)``, or None.

    Phase one of the simplex method: slack ``s`` per row, an artificial
    variable for each row not satisfied at the origin, minimize their sum.
    """
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * n
    art_rows = [i for i, (_, r) in enumerate(rows) if r > 0]
    n_art = len(art_rows)
    width = n + m + n_art
    tab = []
    basis = []
    art_col = {}
    for i, (a, r) in enumerate(rows):
        row = [Fraction(0)] * (width + 1)
        if r > 0:
            for j in range(n):
                row[j] = Fraction(a[j])
            row[n + i] = Fraction(-1)
            col = n + m + len(art_col)
            art_col[i] = col
            row[col] = Fraction(1)
            row[-1] = Fraction(r)
            basis.append(col)
        else:
            for j in range(n):
                row[j] = Fraction(-a[j])
            row[n + i] = Fraction(1)
            row[-1] = Fraction(-r)
            basis.append(n + i)
        tab.append(row)
    if n_art == 0:
        return [Fraction(0)] * n
    # Objective row: minimize sum of artificials, expressed in nonbasic terms.
    obj = [Fraction(0)] * (width + 1)
    for i in art_rows:
        for j in range(width + 1):
            obj[j] -= tab[i][j]
    for col in art_col.values():
        obj[col] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            break  # cannot happen: phase one is bounded below by zero
        piv = tab[leave][enter]
        prow = [x / piv for x in tab[leave]]
        tab[leave] = prow
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], prow)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = enter
    if obj[-1] != 0:
        return None
    y = [Fraction(0)] * n
    for i, col in enumerate(basis):
        if col < n:
            y[col] = tab[i][-1]
    return y


# ---------------------------------------------------------------- branch and bound

def _tighten(coefs: tuple, k: int):
    """Divide by the coefficient gcd and round the constant down (exact on integers)."""
    g = 0
    for c in coefs:
        g = gcd(g, c)
    if g > 1:
        return tuple(c // g for c in coefs), k // g
    return coefs, k


@dataclass
class IlpStats:
    nodes: int = 0
    lp_calls: int = 0


def feasible(sys: LinearSystem, node_limit: int = DEFAULT_NODE_LIMIT,
             stats: IlpStats | None = None) -> dict | None:
    """A satisfying assignment ``{var: int}``, or None when none exists.

    Raises :class:`IlpBudgetExceeded` when ``node_limit`` branch-and-bound
    nodes were not enough; that is never reported as infeasible.
    """
    stats = stats if stats is not None else IlpStats()
    live = [i for i, v in enumerate(sys.variables) if v not in sys.fixed_zero]
    n = len(live)
    rows = []
    seen = set()
    for coefs, k in sys.constraints:
        vec = tuple(coefs[i] for i in live)
        if not any(vec):
            if k < 0:
                return None
            continue
        vec, k = _tighten(vec, k)
        if (vec, k) not in seen:
            seen.add((vec, k))
            rows.append((vec, k))
    result = _branch_and_bound(rows, n, node_limit, stats)
    if result is None:
        return None
    assignment = {v: 0 for v in sys.variables}
    for i, val in zip(live, result):
        assignment[sys.variables[i]] = val
    if not sys.satisfied_by(assignment):
        raise AssertionError("ILP solution failed exact re-verification")
    return assignment


def _propagate(rows: list, lo: list, hi: list) -> bool:
    """Tighten integer bounds in place from ``a.x + k >= 0``; False if empty."""
    for _ in range(20):
        changed = False
        for a, k in rows:
            top = sum(c * (hi[i] if c > 0 else lo[i]) for i, c in enumerate(a) if c)
            if top + k < 0:
                return False
            for j, c in enumerate(a):
                if not c:
                    continue
                # c * x_j >= -k - (top without x_j's own contribution)
                need = -k - (top - c * (hi[j] if c > 0 else lo[j]))
                if c > 0:
                    v = -((-need) // c)
                    if v > lo[j]:
                        lo[j], changed = v, True
                else:
                    v = (-need) // (-c)
                    if v < hi[j]:
                        hi[j], changed = v, True
                if lo[j] > hi[j]:
                    return False
        if not changed:
            return True
    return True


def _branch_and_bound(rows: list, n: int, node_limit: int, stats: IlpStats) -> list | None:
    if all(k >= 0 for _, k in rows):
        return [0] * n
    bound = solution_bound(n, rows)
    # A node is a box lo <= x <= hi plus the set of variables branched down
    # on (only those upper bounds enter the LP, which keeps it small when
    # there are thousands of variables).  Boxes with the smallest lower
    # corner go first: depth first search can dive along an unbounded ray
    # while a small solution sits elsewhere.
    heap = [(0, 0, [0] * n, [bound] * n, frozenset())]
    tick = 0
    while heap:
        stats.nodes += 1
        if stats.nodes > node_limit:
            raise IlpBudgetExceeded(f"branch and bound exceeded {node_limit} nodes")
        _, _, lo, hi, capped = heapq.heappop(heap)
        if not _propagate(rows, lo, hi):
            continue
        # Shift x = lo + y, y >= 0, and turn branched upper bounds into rows.
        lp_rows = []
        for a, k in rows:
            r = -k - sum(c * l for c, l in zip(a, lo))
            lp_rows.append((a, r))
        for j in sorted(capped):
            e = [0] * n
            e[j] = -1
            lp_rows.append((tuple(e), -(hi[j] - lo[j])))
        stats.lp_calls += 1
        y = _lp_point(lp_rows, n)
        if y is None:
            continue
        x = [l + v for l, v in zip(lo, y)]
        frac = [(abs(v - floor(v) - Fraction(1, 2)), j) for j, v in enumerate(x)
                if v.denominator != 1]
        if not frac:
            return [int(v) for v in x]
        _, j = min(frac)
        v = x[j]
        if floor(v) >= lo[j]:
            down_hi = list(hi)
            down_hi[j] = min(hi[j], floor(v))
            tick += 1
            heapq.heappush(heap, (sum(lo), tick, list(lo), down_hi, capped | {j}))
        if ceil(v) <= hi[j]:
            up_lo = list(lo)
            up_lo[j] = ceil(v)
            tick += 1
            heapq.heappush(heap, (sum(up_lo), tick, up_lo, list(hi), capped))
    return None
