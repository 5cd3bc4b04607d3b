"""Translate GNNs back into K# formulas, and tune a GNN with a formula."""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import lcm

from .compiler import compile
from .formula import CNT, FALSE, IND, Formula, LinExpr, and_, geq, prop
from .gnn import Gnn


class NonBooleanStateWarning(UserWarning):
    """The net has non-integer weights, so states may leave {0, 1}.

    The translation reads every state component as a truth value; on such
    nets it can disagree with the net itself.
    """


def _scaled(const: Fraction, terms: list) -> LinExpr:
    """Clear denominators of ``const + sum(coef * atom) >= 0`` (sign preserving)."""
    m = lcm(const.denominator, *(c.denominator for _, c in terms))
    return LinExpr.make(int(const * m), [(atom, int(c * m)) for atom, c in terms])


def layer_formulas(net: Gnn) -> list[list[Formula]]:
    """Formulas representing each state component, one list per layer (layer 0 first)."""
    k = len(net.propositions)
    phis = [prop(p) for p in net.propositions] + [FALSE] * (net.dimension - k)
    out = [phis]
    d = net.dimension
    for layer in net.layers:
        nxt = []
        for col in range(d):
            terms = []
            for i in range(d):
                if layer.C[i][col]:
                    terms.append(((IND, phis[i]), layer.C[i][col]))
                if layer.A[i][col]:
                    terms.append(((CNT, phis[i]), layer.A[i][col]))
            # sigma(t) = 1 exactly when t >= 1 on integer-valued inputs.
            nxt.append(geq(_scaled(layer.b[col] - 1, terms)))
        phis = nxt
        out.append(phis)
    return out


def translate(net: Gnn) -> Formula:
    """A formula holding exactly at the pointed graphs the net accepts.

    The result is a shared DAG of polynomial size in the net; its unfolded
    tree can be exponentially larger.
    """
    if not net.is_integral():
        warnings.warn("net has non-integer weights; translation assumes "
                      "0/1 states and may disagree with the net",
                      NonBooleanStateWarning, stacklevel=2)
    phis = layer_formulas(net)[-1]
    terms = [((IND, phi), a) for phi, a in zip(phis, net.cls) if a]
    return geq(_scaled(Fraction(0), terms))


def size_bound(net: Gnn) -> int:
    """Upper bound on :func:`ksharp.formula.dag_size` of ``translate(net)``."""
    L, d = len(net.layers), net.dimension
    return 2 * (L * d * (d + 1) + 1) + 2 * d + 2


def tune(net: Gnn, f: Formula) -> Gnn:
    """A net accepting what ``net`` accepts, restricted to models of ``f``."""
    return compile(and_(translate(net), f))
