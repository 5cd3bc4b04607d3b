"""
Verifying a GNN
===============

Questions about what a GNN accepts become validity questions about its
translation tr:

  P1  tr <-> f valid     the net accepts exactly the models of f
  P2  tr -> f valid      everything accepted satisfies f
  P3  f -> tr valid      every model of f is accepted
  P4  f & tr satisfiable some model of f is accepted (with an example)
"""

import random
from importlib import resources

from ksharp import (accepted, classify, evaluate, load_gnn, parse, tune, verify_p1,
                    verify_p2, verify_p3, verify_p4)
from ksharp.generate import random_corpus

net = load_gnn(resources.files("ksharp") / "data" / "example_gnn.json")

# 3 * #q >= 8 forces at least three q-successors, but not four.
print("P2 #q >= 3:", verify_p2(net, parse("#(q) >= 3")))
print("P2 #q >= 4:", verify_p2(net, parse("#(q) >= 4")))
print("P3 p:      ", verify_p3(net, parse("p")))
print("P1 formula:", verify_p1(net, parse("p & 3*#(q) >= 8")))

# A concrete accepted graph whose point also satisfies !r & #(p) >= 1.
res = verify_p4(net, parse("!r & #(p) >= 1"))
pg = res.witness
print("P4 example accepted by the net:", classify(net, pg.graph, pg.point))
print("   successors:", [sorted(pg.graph.labels[v]) for v in pg.graph.successors(pg.point)])

# Tuning: a net accepting what the old one accepts, but only where f holds.
f = parse("#(p) <= 0")
tuned = tune(net, f)
corpus = random_corpus(random.Random(1), 200, props=("p", "q"), degree=5)
ok = all((accepted(g, tuned) == (accepted(g, net) & evaluate(g, f))).all() for g in corpus)
print(f"tuned net ({len(tuned.layers)} layers) = net and f on 200 graphs:", ok)
print("P2 on the tuned net:", verify_p2(tuned, f))
