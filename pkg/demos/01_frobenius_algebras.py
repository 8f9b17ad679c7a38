"""
Frobenius algebras and the handle operator
==========================================

A commutative Frobenius algebra is the algebraic shadow of a 2D TQFT.  This
script builds the standard rank-two algebras, checks their axioms and looks
at the handle element 𝔨 = m∘Δ(1).
"""

# %%
# Built-in algebras
# -----------------
from bnskein import BUILTIN_NAMES, builtin
from bnskein.frobenius import format_tensor

for name in BUILTIN_NAMES:
    A = builtin(name)
    rep = A.verify_axioms()
    print(f"{name:20s} rank={A.rank} axioms ok={rep.passed}  𝔨={A.handle_element()}")

# %%
# On V_K = ℤ[x]/(x²) the handle element is 2x, so 𝔨² = 0.  The universal
# quadratic algebra ℤ[h,t][x]/(x² − hx − t) has 𝔨 = 2x − h, which is not
# nilpotent.
K = builtin("khovanov")
U = builtin("universal_quadratic")
print("V_K: 𝔨² = 0 ?", K.handle_map("0", 2).is_zero())
for p in range(1, 4):
    print(f"U: 𝔨^{p}(1) =", U.handle_apply(U.one(), p))

# %%
# The comultiplication of U is not typed in: it is recovered by inverting
# the Gram matrix of the pairing ε∘m.
print("Δ(1) =", format_tensor(U, U.comultiply(U.one())))
print("Δ(x) =", format_tensor(U, U.comultiply(U.basis_element(1))))

# %%
# Iterated comultiplication and the identity m_n∘d_n = 𝔨^{n−1}
# -----------------------------------------------------------
outs = ["o0", "o1", "o2"]
d3 = K.d_n(3, inp="x", outs=outs)
m3 = K.m_n(3, ins=outs, out="x")
print("m_3∘d_3 == 𝔨²:", m3 @ d3 == K.handle_map("x", 2))

# %%
# Specializing h = t = 0 recovers V_K.
U0 = U.specialize({"h": 0, "t": 0})
print("U(0,0) ≅ V_K:", U0.structurally_equal(K))
