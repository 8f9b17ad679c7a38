"""
Parallel surfaces in Σ×I
========================

Incompressible surfaces in Σ×I are parallel copies of Σ.  Tubing two
adjacent copies together gives the tunneling edges S_{k+2} → S_k; permuting
copies gives loops.  The resulting module is compared with a quotient of
the tensor algebra.
"""

# %%
from bnskein import builtin
from bnskein.skein import sigma_I_dimensions, sigma_I_graph, tensor_algebra_oracle

K = builtin("khovanov")
T = sigma_I_graph(K, 1, 0, 4)
print("vertices:", [v.id for v in T.vertices])
print("edges:", [e.id for e in T.edges])
print("loops:", len(T.loops))

# %%
for A in (K, builtin("homology_s2")):
    for g in range(3):
        print(f"{A.name:12s} g={g}  presentation {sigma_I_dimensions(A, g, 4)}"
              f"  oracle {tensor_algebra_oracle(A, g, 4)}")
