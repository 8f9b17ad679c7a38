"""
The graded module (SV)₋
=======================

Symmetric powers of V with the sign relations are computed in two ways:
as a quotient by a homogeneous ideal, and by a rewriting system.
"""

# %%
from bnskein import builtin
from bnskein.skein import unorientable_dimensions, unorientable_module

for name in ("khovanov", "homology_s2"):
    A = builtin(name)
    print(name, "ideal:", unorientable_dimensions(A, 4, "ideal"),
          "rewrite:", unorientable_dimensions(A, 4, "rewrite"))

# %%
# Tensoring with V^{⊗n} multiplies each dimension by rank(V)^n; over ℤ torsion may appear.
K = builtin("khovanov")
for inv in unorientable_module(K, 2, 3, "z"):
    print(inv)
