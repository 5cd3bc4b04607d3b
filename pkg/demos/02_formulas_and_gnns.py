"""
From formulas to GNNs and back
==============================

Every K# formula compiles to an aggregate-combine GNN that accepts exactly
its models, and every such GNN with integer weights translates back to a
formula.  We check both directions on the four-component example net for
p & 8 <= 3 * #q.
"""

import random
from importlib import resources

from ksharp import (accepted, compile, compile_cnf, evaluate, load_gnn, parse, simplify,
                    size_bound, translate)
from ksharp.formula import dag_size
from ksharp.generate import random_corpus

net = load_gnn(resources.files("ksharp") / "data" / "example_gnn.json")
f = parse("p & 8 <= 3*#(q)")
print(f"example net: dimension {net.dimension}, {len(net.layers)} layers")

# Compile the formula ourselves: one component per subformula plus a
# component pinned to 1 that the classifier compares against.
mine = compile(f)
print(f"compiled:    dimension {mine.dimension}, {len(mine.layers)} layers")
print(f"CNF variant: {len(compile_cnf(f).layers)} layers")

# The translation is a shared DAG; its size stays polynomial in the net.
tr = translate(net)
print(f"translation has {dag_size(tr)} nodes (bound {size_bound(net)})")

corpus = random_corpus(random.Random(0), 300, props=("p", "q"), degree=5)
same = all((accepted(g, net) == accepted(g, mine)).all()
           and (accepted(g, net) == evaluate(g, tr)).all() for g in corpus)
print("net, compiled net and translation agree on 300 random graphs:", same)

# Compiling and translating back gives the formula again after clean-up.
g = parse("#(p) >= #(q) | !r")
print("round trip:", simplify(translate(compile(g))) is simplify(g))
