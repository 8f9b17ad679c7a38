"""
Evaluating a 2D TQFT on decorated cobordisms
============================================

A decorated cobordism records only which boundary circles share a component
and the genus of each component.  Composition must add the genus created
by glueing along several circles at once.
"""

# %%
import os

from bnskein import builtin, io
from bnskein.comb2cat import DecoratedCobordism, compose, tqft_eval

HERE = os.path.dirname(os.path.abspath(__file__)) if "__file__" in globals() else "."
DATA = os.path.join(HERE, "data")

pants = io.parse_cobordism(io.load_json(os.path.join(DATA, "pants.json")))
copants = io.parse_cobordism(io.load_json(os.path.join(DATA, "copants.json")))

# %%
# Glueing the pants to the copants along both circles gives a torus with two
# boundary circles: one component, genus one.
T = compose(copants, pants)
print(T)
K = builtin("khovanov")
print("Z(T) == 𝔨 :", tqft_eval(T, K).relabel(cod_map={"b": "a"}) == K.handle_map("a"))

# %%
# Closed surfaces
# ---------------
U = builtin("universal_quadratic")
for g in range(4):
    S = DecoratedCobordism.from_components([], [], [("s", g, [], [])])
    print(f"genus {g}:  V_K -> {tqft_eval(S, K).scalar_value()},  U -> {tqft_eval(S, U).scalar_value()}")
