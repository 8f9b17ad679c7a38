"""
Local modules from tunneling graphs
===================================

Vertices of a tunneling graph are incompressible surfaces (components with
genus and boundary), edges are tunneling invariants: a partition of the
components on both sides plus an excess handle count τ for every part.
"""

# %%
import os

from bnskein import builtin, io
from bnskein.skein import (
    Component,
    Part,
    SurfaceVertex,
    TunnelingEdge,
    TunnelingGraph,
    compile_edge,
    connected_graph,
    local_connected_closed_form,
    present,
)

HERE = os.path.dirname(os.path.abspath(__file__)) if "__file__" in globals() else "."
K = builtin("khovanov")

# %%
# Two connected surfaces bounding the same curve, related by one tunnel.
for tau in (1, 2):
    S = SurfaceVertex("S", [Component("c", 1, {"a"})])
    S1 = SurfaceVertex("S1", [Component("c", 0, {"a"})])
    e = TunnelingEdge("S", "S1", [Part({"c"}, {"c"}, tau)], id="e")
    T = TunnelingGraph(K, ("a",), [S, S1], [e])
    r, F_src, F_dst = compile_edge(K, e, S, S1)
    print(f"τ={tau}: dim = {present(T).invariants.free_rank}")

# %%
# A surface that splits into two components on the other side.
T = io.parse_graph(io.load_json(os.path.join(HERE, "data", "split_surface.json")))
res = present(T)
print(res.report("q"))

# %%
# Chains of connected surfaces
# ----------------------------
# For connected surfaces ordered by genus the module has a closed form.
T = connected_graph(K, [0, 1, 2], {(0, 1): 1, (0, 2): 2, (1, 2): 3})
print("closed form:", local_connected_closed_form(T), " presentation:", present(T).invariants)
