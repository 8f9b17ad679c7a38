from itertools import product

import pytest

from bnskein.exactalg import StructuralError
from bnskein.frobenius import builtin
from bnskein.linmap import LinMap
from bnskein.tensorcat import (
    BimoduleMorphism,
    BimoduleObject,
    Handle,
    Kill,
    Permute,
    Split,
    TensorObject,
    TensorVector,
    act,
    apply_elementary,
    glue_classes,
    glue_morphisms,
    glue_objects,
    projection_map,
    realize,
)

from _random_data import random_bimodule, random_morphism, random_path, rng_for

K = builtin("khovanov")
U = builtin("universal_quadratic")


def _all_vectors(A, obj):
    """Basis vectors of V^{⊗K} as TensorVectors."""
    return [TensorVector(obj, {k: A.ring.one}) for k in product(range(A.rank), repeat=len(obj.K))]


def _boundary_basis(A, J):
    return [{k: A.ring.one} for k in product(range(A.rank), repeat=len(J))]


def test_tensor_object_validation():
    with pytest.raises(StructuralError):
        TensorObject(["a"], ["k"], {})
    with pytest.raises(StructuralError):
        TensorObject(["a"], ["k"], {"a": "z"})
    obj = TensorObject(["a", "b"], ["k", "l", "m"], {"a": "k", "b": "k"})
    assert obj.closed() == ("l", "m")
    assert obj.preimage("k") == {"a", "b"}


def test_split_one_closed_factor():
    # the empty-boundary object with one factor, split: that is Δ
    obj = TensorObject([], ["k"], {})
    new, m = apply_elementary(K, obj, Split("k", "l"))
    assert new.K == ("k", "l")
    assert m == K.comul_map("k", "k", "l")


def test_handle_then_kill_on_sphere():
    # ε(𝔨·1) = 2 for V_K: the torus
    obj = TensorObject([], ["k"], {})
    _, m = realize(K, [Handle("k")], obj)
    _, e = apply_elementary(K, obj, Kill("k"))
    assert (e @ m @ K.unit_map("k")).scalar_value() == 2


def test_elementary_errors():
    obj = TensorObject(["a"], ["k", "l"], {"a": "k"})
    with pytest.raises(StructuralError):
        apply_elementary(K, obj, Kill("k"))
    with pytest.raises(StructuralError):
        apply_elementary(K, obj, Permute({"k": "l", "l": "k"}))
    with pytest.raises(StructuralError):
        apply_elementary(K, obj, Split("k", "l"))
    with pytest.raises(StructuralError):
        apply_elementary(K, obj, Split("l", "m", {"a"}))
    with pytest.raises(StructuralError, match="step 1"):
        realize(K, [Handle("k"), Kill("k")], obj)


def test_split_then_merge_is_handle():
    obj = TensorObject(["a"], ["k"], {"a": "k"})
    new, s = apply_elementary(K, obj, Split("k", "l", {"a"}))
    merge = K.mul_map("k", "l", "k")
    assert merge @ s == K.handle_map("k")


@pytest.mark.parametrize("A", [K, U], ids=["khovanov", "universal_quadratic"])
def test_split_side_independence(A):
    # moving a set M to the new factor equals moving the complement, up to swapping names
    obj = TensorObject(["a", "b", "c"], ["k"], {"a": "k", "b": "k", "c": "k"})
    o1, m1 = apply_elementary(A, obj, Split("k", "l", {"a"}))
    o2, m2 = apply_elementary(A, obj, Split("k", "l", {"b", "c"}))
    swap = {"k": "l", "l": "k"}
    assert m1 == m2.relabel(cod_map=swap)
    assert o1.phi == {j: swap[k] for j, k in o2.phi.items()}


@pytest.mark.parametrize("A", [K, U], ids=["khovanov", "universal_quadratic"])
def test_realized_maps_are_boundary_linear(A):
    rng = rng_for(17)
    for trial in range(25):
        J = [f"j{i}" for i in range(rng.randint(0, 3))]
        src = random_bimodule(rng, J, []).as_tensor_object()
        path = random_path(rng, A, src, rng.randint(1, 4))
        dst, m = realize(A, path, src)
        for v in _boundary_basis(A, src.J):
            for w in _all_vectors(A, src)[:4]:
                lhs = m.apply(act(A, v, w).terms)
                rhs = act(A, v, TensorVector(dst, m.apply(w.terms))).terms
                assert lhs == rhs


def test_act_rejects_wrong_boundary_key():
    obj = TensorObject(["a"], ["k"], {"a": "k"})
    with pytest.raises(StructuralError):
        act(K, {(0, 0): 1}, TensorVector(obj, {(0,): 1}))


def test_bimodule_tensor_object_roundtrip():
    b = BimoduleObject(["a"], ["a", "b"], ["k", "l"], {"a": "k"}, {"a": "k", "b": "l"})
    t = b.as_tensor_object()
    assert t.J == ("in:a", "out:a", "out:b")
    assert BimoduleObject.from_tensor_object(t, b.J1, b.J2) == b


def test_glue_classes_join_through_middle():
    cls, members = glue_classes(["k", "l"], {"x": "k", "y": "l"}, ["m"], {"x": "m", "y": "m"}, ["x", "y"])
    assert members == {"0/k+0/l+1/m": ("0/k", "0/l", "1/m")}
    assert cls["0/l"] == "0/k+0/l+1/m"


def test_glue_objects_mismatched_middle():
    a = BimoduleObject(["x"], ["y"], ["k"], {"x": "k"}, {"y": "k"})
    with pytest.raises(StructuralError):
        glue_objects(K, a, a)


def test_projection_is_multiplication():
    P = projection_map(K, {"c": ("0/k", "1/k")})
    assert P == K.mul_map("0/k", "1/k", "c")


def test_glue_identity_to_identity():
    rng = rng_for(2)
    for _ in range(10):
        bottom = random_bimodule(rng, ["a"], ["x", "y"])
        top = random_bimodule(rng, ["x", "y"], ["b"], prefix="m")
        h = glue_morphisms(K, BimoduleMorphism.identity(K, top), BimoduleMorphism.identity(K, bottom))
        assert h.src == h.dst
        assert h.map.is_identity()


@pytest.mark.parametrize("A", [K, U], ids=["khovanov", "universal_quadratic"])
def test_glue_functoriality(A):
    rng = rng_for(23)
    for trial in range(20):
        bottom = random_bimodule(rng, ["a"], ["x", "y"])
        top = random_bimodule(rng, ["x", "y"], ["b"], prefix="m")
        f1 = random_morphism(rng, A, bottom, tag="f")
        f2 = random_morphism(rng, A, f1.dst, tag="F")
        g1 = random_morphism(rng, A, top, tag="g")
        g2 = random_morphism(rng, A, g1.dst, tag="G")
        whole = glue_morphisms(A, g2.compose(g1), f2.compose(f1))
        parts = glue_morphisms(A, g2, f2).compose(glue_morphisms(A, g1, f1))
        assert whole.src == parts.src and whole.dst == parts.dst
        assert whole.map == parts.map


def test_glue_split_across_middle_is_handle():
    # a tube split on the bottom, glued to a tube on top: the two pieces meet
    # again through the middle circles, so the glued map multiplies by 𝔨
    bottom = BimoduleObject(["a"], ["x", "y"], ["k"], {"a": "k"}, {"x": "k", "y": "k"})
    top = BimoduleObject(["x", "y"], ["b"], ["m"], {"x": "m", "y": "m"}, {"b": "m"})
    f = BimoduleMorphism.from_path(K, bottom, [Split("k", "n", {"out:y"})])
    h = glue_morphisms(K, BimoduleMorphism.identity(K, top), f)
    src_name, = h.src.K
    dst_name, = h.dst.K
    assert h.map.relabel(cod_map={dst_name: src_name}) == K.handle_map(src_name)


def test_bimodule_morphism_checks():
    a = BimoduleObject(["x"], [], ["k"], {"x": "k"}, {})
    b = BimoduleObject([], ["x"], ["k"], {}, {"x": "k"})
    with pytest.raises(StructuralError):
        BimoduleMorphism(a, b, LinMap.identity(K.ring, K.rank, ("k",)))
