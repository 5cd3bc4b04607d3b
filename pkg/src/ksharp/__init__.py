"""K# logic and its exact correspondence with graph neural networks."""

from .compiler import CompileBudgetExceeded, compile, compile_cnf
from .formula import (FALSE, TRUE, Formula, LinExpr, ParseError, and_, big_and, big_or,
                      box, cnt, diamond, geq, iff, implies, ind, modal_depth, nnf, not_,
                      or_, parse, prop, simplify, subformulas, to_text)
from .gnn import Gnn, Layer, accepted, classify, load_gnn, make_gnn, run, save_gnn
from .graph import (LabeledGraph, PointedGraph, balanced_star, check, evaluate, example_graph,
                    holds, load_graph, q_heavy_star, save_graph)
from .ilp import IlpBudgetExceeded, LinearSystem, feasible
from .sat import (BudgetExceeded, HintikkaSet, SatResult, SolverMode, Verdict, conj,
                  hintikka_sets, sat, valid)
from .translate import NonBooleanStateWarning, size_bound, translate, tune
from .verify import verify_p1, verify_p2, verify_p3, verify_p4

__version__ = "0.1.0"
