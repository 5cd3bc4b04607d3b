"""Verification questions about a GNN, reduced to K# satisfiability.

With ``tr`` the translation of the net:

* P1: does the net accept exactly the models of ``f``?  valid(tr <-> f)
* P2: does every accepted graph satisfy ``f``?           valid(tr -> f)
* P3: is every model of ``f`` accepted?                 valid(f -> tr)
* P4: is some model of ``f`` accepted?                  sat(f & tr)
"""

from __future__ import annotations

import warnings

from .formula import Formula, and_, iff, implies
from .gnn import Gnn, classify
from .graph import check
from .sat import GENERAL, SatResult, SolverMode, sat, valid
from .translate import NonBooleanStateWarning, translate


def translate_checked(net: Gnn) -> tuple[Formula, bool]:
    """``translate(net)`` plus whether the Boolean-state caveat applies."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonBooleanStateWarning)
        tr = translate(net)
    return tr, any(issubclass(w.category, NonBooleanStateWarning) for w in caught)


def _tr(net: Gnn) -> Formula:
    tr, caveat = translate_checked(net)
    if caveat:
        warnings.warn("net has non-integer weights; verdict assumes 0/1 states",
                      NonBooleanStateWarning, stacklevel=3)
    return tr


def verify_p1(net: Gnn, f: Formula, mode: SolverMode = GENERAL, **budget) -> bool:
    return valid(iff(_tr(net), f), mode, **budget)


def verify_p2(net: Gnn, f: Formula, mode: SolverMode = GENERAL, **budget) -> bool:
    return valid(implies(_tr(net), f), mode, **budget)


def verify_p3(net: Gnn, f: Formula, mode: SolverMode = GENERAL, **budget) -> bool:
    return valid(implies(f, _tr(net)), mode, **budget)


def verify_p4(net: Gnn, f: Formula, mode: SolverMode = GENERAL, **budget) -> SatResult:
    """``sat(f & tr)``; a witness is re-checked against the net and the model checker."""
    result = sat(and_(f, _tr(net)), mode, **budget)
    if result.sat:
        pg = result.witness
        if not (classify(net, pg.graph, pg.point) and check(pg.graph, pg.point, f)):
            raise AssertionError("P4 witness is not accepted by the net and a model of f")
    return result


PROBLEMS = {"p1": verify_p1, "p2": verify_p2, "p3": verify_p3, "p4": verify_p4}
