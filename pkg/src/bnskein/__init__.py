"""Exact algebra for Bar-Natan skein modules.

Submodules
----------
exactalg    exact scalars, sparse matrices, rank, Smith normal form
frobenius   commutative Frobenius algebras and the handle operator
tensorcat   the categories V(J), elementary morphisms, glueing
comb2cat    decorated cobordisms and 2D TQFT evaluation
colimit     colimits of functor graphs, terminal-set presentations
skein       tunneling graphs, local modules, Σ×I, (SV)₋
io, cli     JSON formats and the ``python -m bnskein`` driver
"""

from .exactalg import QQ, ZZ, ModuleInvariants, Poly, SparseMatrix, StructuralError, poly_ring
from .frobenius import BUILTIN_NAMES, FrobeniusAlgebra, builtin
from .linmap import LinMap

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "ZZ",
    "ModuleInvariants",
    "Poly",
    "SparseMatrix",
    "StructuralError",
    "poly_ring",
    "BUILTIN_NAMES",
    "FrobeniusAlgebra",
    "builtin",
    "LinMap",
]
