"""
Satisfiability and validity
===========================

The solver enumerates Hintikka sets, turns counting atoms into integer
variables (one per type of successor) and asks an exact ILP oracle.  SAT
answers come with a tree model that is model-checked before returning.
"""

from ksharp import SolverMode, box, implies, parse, prop, sat, valid
from ksharp.graph import graph_to_json

# Three p-successors, two q-successors, none with both, at most five in all.
f = parse("#(p) >= 3 & #(q) >= 2 & #(p & q) <= 0 & #(true) <= 5")
res = sat(f)
print(f, "->", res.verdict.value)
g = res.witness.graph
print("witness edges:", sorted(g.edges))
print("witness labels:", {v: sorted(l) for v, l in g.labels.items() if l})

# One successor fewer and it is impossible.
print("with #true <= 4:", sat(parse("#(p) >= 3 & #(q) >= 2 & #(p & q) <= 0 & #(true) <= 4")).verdict.value)

# Every vertex has as many successors as it has, counted two ways.
print("#p + #!p = #q + #!q valid:", valid(parse("#(p) + #(!p) = #(q) + #(!q)")))

# Ordinary modal logic sits inside: box(a) is #(!a) <= 0.
p, q = prop("p"), prop("q")
print("K axiom valid:", valid(implies(box(implies(p, q)), implies(box(p), box(q)))))
print("T axiom valid:", valid(implies(box(p), p)))

# Restricting the degree changes the answer.
print("#true >= 3, degree <= 2:", sat(parse("#(true) >= 3"), SolverMode.bounded_degree(2)).verdict.value)

print("statistics:", res.stats.as_dict())
print(graph_to_json(res.witness))
