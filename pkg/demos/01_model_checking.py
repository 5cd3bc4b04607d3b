"""
Model checking K# formulas
==========================

Formulas talk about a vertex, its propositions and how many successors
satisfy a subformula.  This walks through the small pointed graph with four
vertices and the two star graphs that separate #p >= #q from first-order
logic.
"""

from ksharp import balanced_star, q_heavy_star, check, evaluate, example_graph, holds, parse

# The point u carries p; it has two successors without p, one of which has
# a p-successor of its own.
pg = example_graph()
f = parse("p & #(!p) >= 2 & #(#(p) >= 1) <= 1")
print("formula:", f)
print("holds at the point:", holds(pg, f))

# evaluate() returns the truth value at every vertex at once.
g = pg.graph
for v, t in zip(g.vertices, evaluate(g, parse("#(true) >= 1"))):
    print(f"  {v} has a successor: {bool(t)}")

# The star A_n has n p-leaves and n q-leaves, B_n one more q-leaf.
more_p = parse("#(p) >= #(q)")
for n in (1, 2, 3):
    print(f"n={n}:  A_n {holds(balanced_star(n), more_p)}   B_n {holds(q_heavy_star(n), more_p)}")

# Vertices can be checked one by one too.
a = balanced_star(2)
print("leaves with p:", [v for v in a.graph.vertices if check(a.graph, v, parse("p"))])
