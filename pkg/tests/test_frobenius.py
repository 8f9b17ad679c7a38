import random
from itertools import permutations

import pytest
import sympy

from bnskein.exactalg import QQ, ZZ, StructuralError, poly_ring
from bnskein.frobenius import (
    BUILTIN_NAMES,
    DegeneratePairingError,
    FrobeniusAlgebra,
    builtin,
    derive_comul,
)

R = poly_ring("h", "t")


def labels(prefix, n):
    return tuple(f"{prefix}{i}" for i in range(n))


@pytest.fixture(params=BUILTIN_NAMES)
def algebra(request):
    return builtin(request.param)


def test_builtins_pass_axioms(algebra):
    rep = algebra.verify_axioms()
    assert rep.passed, rep.failures


def test_khovanov_handle_is_2x():
    K = builtin("khovanov")
    assert K.handle_element().coords == (0, 2)
    assert K.handle_apply(K.one(), 2).is_zero()


def test_homology_s2_handle():
    H = builtin("homology_s2")
    # Δ(b) = 1⊗b + b⊗1 for b the unit, so 𝔨 = 2·(point class)
    assert H.handle_element().coords == (2, 0)


def test_universal_quadratic_derived_comultiplication():
    U = builtin("universal_quadratic")
    h, t = R.parse("h"), R.parse("t")
    assert U.comul_derived
    # Δ(1) = 1⊗x + x⊗1 − h·1⊗1,  Δ(x) = x⊗x + t·1⊗1
    assert U.comul[0] == {(0, 1): 1, (1, 0): 1, (0, 0): -h}
    assert U.comul[1] == {(1, 1): 1, (0, 0): t}
    assert U.handle_element().coords == (-h, R.parse("2"))


def test_derived_comul_matches_sympy_gram_inverse():
    # structure x^2 = 3 + 2x over QQ, ε = (1, 1): solve the Gram system with sympy
    mul = [[[1, 0], [0, 1]], [[0, 1], [3, 2]]]
    counit = [1, 1]
    comul = derive_comul(QQ, [[[QQ.coerce(c) for c in v] for v in row] for row in mul],
                         [QQ.coerce(c) for c in counit])
    G = sympy.Matrix(2, 2, lambda i, j: sum(mul[i][j][k] * counit[k] for k in range(2)))
    Gi = G.inv()
    for v in range(2):
        expect = {}
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    c = Gi[i, j] * mul[v][i][k]
                    if c:
                        expect[(k, j)] = expect.get((k, j), 0) + c
        assert {jk: sympy.Rational(c.numerator, c.denominator) for jk, c in comul[v].items()} == \
            {jk: c for jk, c in expect.items() if c}


def test_degenerate_pairing():
    # ε = 0 on the trivial algebra
    with pytest.raises(DegeneratePairingError):
        FrobeniusAlgebra(ZZ, ["1"], [[[1]]], [0], [1])
    # over ZZ, ε(1) = 2 gives a non-unit Gram determinant
    with pytest.raises(DegeneratePairingError):
        FrobeniusAlgebra(ZZ, ["1"], [[[1]]], [2], [1])
    FrobeniusAlgebra(QQ, ["1"], [[[1]]], [2], [1])


def test_perturbed_comultiplication_reported():
    K = builtin("khovanov")
    comul = [dict(d) for d in K.comul]
    comul[0][(0, 0)] = 1
    A = FrobeniusAlgebra(ZZ, K.basis, K.mul, K.counit, K.unit, comul=comul, verify=False)
    rep = A.verify_axioms()
    assert not rep.passed
    # ε(1) = 0, so the counit law survives; Δ no longer commutes with m
    assert "frobenius" in rep.failed_axioms()
    assert "counit" not in rep.failed_axioms()
    with pytest.raises(StructuralError):
        FrobeniusAlgebra(ZZ, K.basis, K.mul, K.counit, K.unit, comul=comul)


def test_shape_errors():
    with pytest.raises(StructuralError):
        FrobeniusAlgebra(ZZ, ["1", "x"], [[[1, 0], [0, 1]]], [0, 1], [1, 0])
    with pytest.raises(StructuralError):
        FrobeniusAlgebra(ZZ, ["1", "x"], [[[1, 0], [0, 1]], [[0, 1], [0]]], [0, 1], [1, 0])


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("nope")


@pytest.mark.parametrize("n", range(1, 6))
def test_eps_n_d_n_identity(algebra, n):
    d = algebra.d_n(n, inp="x", outs=labels("o", n))
    e = algebra.eps_n(n, ins=labels("o", n), out="x")
    assert (e @ d).is_identity()


@pytest.mark.parametrize("n", range(1, 6))
def test_m_n_d_n_is_handle_power(algebra, n):
    d = algebra.d_n(n, inp="x", outs=labels("o", n))
    m = algebra.m_n(n, ins=labels("o", n), out="x")
    assert m @ d == algebra.handle_map("x", n - 1)


def test_d_zero_is_counit_and_m_zero_is_unit(algebra):
    assert algebra.d_n(0, inp="x") == algebra.counit_map("x")
    assert algebra.m_n(0, out="x") == algebra.unit_map("x")


@pytest.mark.parametrize("n,a,i", [(2, 2, 0), (2, 3, 1), (3, 2, 1), (3, 3, 2), (1, 4, 0), (4, 2, 3)])
def test_operadic_composition_of_d(algebra, n, a, i):
    outer = labels("o", n)
    inner = labels("q", a)
    d = algebra.d_n(n, inp="x", outs=outer)
    rest = algebra.identity([o for o in outer if o != outer[i]])
    step = algebra.d_n(a, inp=outer[i], outs=inner).tensor(rest)
    full = [o for o in outer if o != outer[i]] + list(inner)
    assert step @ d == algebra.d_n(n + a - 1, inp="x", outs=full)


@pytest.mark.parametrize("n", range(2, 5))
def test_d_n_symmetric(algebra, n):
    outs = labels("o", n)
    d = algebra.d_n(n, inp="x", outs=outs)
    for perm in permutations(outs):
        assert d.relabel(cod_map=dict(zip(outs, perm))) == d


def test_handle_via_pairing(algebra):
    # 𝔨 = (𝔭 ⊗ Id)(Δ ⊗ Id)Δ(1) with 𝔭 = ε∘m
    one = algebra.unit_map("a")
    d1 = algebra.comul_map("a", "a", "b")
    d2 = algebra.comul_map("a", "a", "c").tensor(algebra.identity(["b"]))
    pair = (algebra.counit_map("a") @ algebra.mul_map("a", "c", "a")).tensor(algebra.identity(["b"]))
    got = pair @ d2 @ d1 @ one
    assert got == (algebra.handle_map("b") @ algebra.unit_map("b"))


def test_khovanov_handle_squared_vanishes():
    K = builtin("khovanov")
    assert algebra_power_zero(K, 2)
    assert not algebra_power_zero(K, 1)


def test_universal_quadratic_handle_not_nilpotent():
    U = builtin("universal_quadratic")
    assert not algebra_power_zero(U, 6)


def algebra_power_zero(A, p):
    return A.handle_map("0", p).is_zero()


def test_specialize_universal_quadratic():
    U = builtin("universal_quadratic")
    K0 = U.specialize({"h": 0, "t": 0})
    K = builtin("khovanov")
    assert K0.mul == K.mul and K0.comul == K.comul and K0.counit == K.counit
    assert K0.verify_axioms().passed


def test_specialize_random_points_pass_axioms():
    U = builtin("universal_quadratic")
    rng = random.Random(5)
    for _ in range(5):
        pt = {"h": rng.randint(-3, 3), "t": rng.randint(-3, 3)}
        assert U.specialize(pt).verify_axioms().passed


def test_over_rationals(algebra):
    if algebra.ring.kind == "poly_int":
        pytest.skip("polynomial coefficients")
    B = algebra.over(QQ)
    assert B.verify_axioms().passed
    assert B.handle_map("0", 2).is_zero() == algebra.handle_map("0", 2).is_zero()
