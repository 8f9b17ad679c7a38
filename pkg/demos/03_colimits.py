"""
Colimits of functor graphs
==========================

A functor graph assigns a free module to every vertex and a matrix to every
edge.  Its colimit is the sum of the vertex modules modulo the relations
v ~ F(a)v.  With a terminal set only the terminal vertices carry generators.
"""

# %%
import os

from bnskein import io
from bnskein.colimit import colim_bruteforce, colim_terminal, pushout_quotient_invariants

HERE = os.path.dirname(os.path.abspath(__file__)) if "__file__" in globals() else "."
obj = io.load_json(os.path.join(HERE, "data", "functor_graph.json"))
G, A, objects, terminal = io.parse_functor_graph(obj, base_dir=os.path.join(HERE, "data"))
print("vertices:", sorted(G.vertices), " terminal:", terminal)

# %%
# The two computations agree; over ℤ a torsion summand survives.
for ring in "qz":
    pres, inv = colim_terminal(G, terminal, ring)
    print(ring, "terminal:", inv, " brute force:", colim_bruteforce(G, ring)[1])

# %%
# Pushouts of d_n∘𝔨^τ against d_m∘𝔨^{g+τ}
# --------------------------------------
# The quotient is V^{⊗n}/(d_n∘𝔨^τ) plus a free V^{⊗m}.
n, m, tau, g = 2, 1, 1, 1
f = A.d_n(n, inp="x", outs=["a0", "a1"]) @ A.handle_map("x", tau)
h = A.d_n(m, inp="x", outs=["b0"]) @ A.handle_map("x", g + tau)
print("pushout quotient:", pushout_quotient_invariants(f, h, "q"))
