import random

import pytest

from bnskein.colimit import pushout_quotient_invariants, pushout_relation
from bnskein.exactalg import Lattice, ModuleInvariants, Span, StructuralError
from bnskein.frobenius import builtin
from bnskein.skein import (
    Component,
    LoopEdge,
    Part,
    SurfaceVertex,
    TunnelingEdge,
    TunnelingGraph,
    ValidationError,
    compile_edge,
    connected_graph,
    default_order,
    genus_sequence,
    local_connected_closed_form,
    present,
    quotient_by_handle,
    sigma_I_dimensions,
    sigma_I_graph,
    tensor_algebra_oracle,
    unorientable_dimensions,
    unorientable_module,
)

from _skein_cases import (
    case_11,
    case_12,
    case_21,
    case_22_nondescending,
    case_22_one_part,
    one,
    pair_graph,
    random_connected,
    two,
)

K = builtin("khovanov")
H = builtin("homology_s2")
U = builtin("universal_quadratic")


def _edge_maps(A, T, e=None):
    e = e or T.edges[0]
    return compile_edge(A, e, T.vertex(e.src), T.vertex(e.dst))


def _direct(A, T):
    _, fs, fd = _edge_maps(A, T)
    return pushout_quotient_invariants(fs, fd)


# --- compile_edge ------------------------------------------------------------


def test_equal_genera_tau_zero_is_identity():
    T = pair_graph(K, one(1), one(1), [Part({"c"}, {"c"}, 0)])
    r, fs, fd = _edge_maps(K, T)
    assert r == 1
    assert fs.relabel(dom_map={"p0": "c"}).is_identity()
    assert fd.relabel(dom_map={"p0": "c"}).is_identity()


def test_genus_difference_one_tau_one():
    # smaller-genus side gets 𝔨^2 = 0 on V_K, the other 𝔨
    T = pair_graph(K, one(1), one(0), [Part({"c"}, {"c"}, 1)])
    _, fs, fd = _edge_maps(K, T)
    assert fd.is_zero()
    assert fs.relabel(dom_map={"p0": "c"}) == K.handle_map("c")


def test_two_to_one_equal_genus():
    for tau in range(3):
        T = pair_graph(K, two(0, 0), one(0), [Part({"c1", "c2"}, {"c"}, tau)])
        _, fs, fd = _edge_maps(K, T)
        assert fs == K.d_n(2, inp="p0", outs=["c1", "c2"]) @ K.handle_map("p0", tau)
        assert fd == K.handle_map("p0", tau).relabel(cod_map={"p0": "c"})


def test_compile_edge_symmetry():
    rng = random.Random(6)
    for A in (K, H, U):
        for _ in range(10):
            T = case_22_nondescending(A, rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2), rng.randint(1, 2))
            e = T.edges[0]
            rev = TunnelingEdge(e.dst, e.src, [Part(p.dst, p.src, p.tau) for p in e.parts], id="rev")
            r1, fs, fd = compile_edge(A, e, T.vertex(e.src), T.vertex(e.dst))
            r2, gs, gd = compile_edge(A, rev, T.vertex(e.dst), T.vertex(e.src))
            assert r1 == r2 and (gs, gd) == (fd, fs)


@pytest.mark.parametrize("tau", [2, 3])
def test_khovanov_vanishing(tau):
    for T in (case_11(K, tau, 1), case_21(K, tau), case_12(K, tau, 2), case_22_one_part(K, tau)):
        _, fs, fd = _edge_maps(K, T)
        assert fs.is_zero() and fd.is_zero()


@pytest.mark.parametrize("A", [K, H], ids=["khovanov", "homology_s2"])
def test_stabilization_containment(A):
    builders = [
        lambda t: case_11(A, t, 1), lambda t: case_21(A, t), lambda t: case_12(A, t, 1),
        lambda t: case_22_one_part(A, t), lambda t: case_22_nondescending(A, t, t, 1, 1),
    ]
    for build in builders:
        for tau in range(3):
            base = pushout_relation(*_edge_maps(A, build(tau))[1:])
            up = pushout_relation(*_edge_maps(A, build(tau + 1))[1:])
            for space in (Span(base.rows), Lattice(base.rows)):
                for c in base.cols:
                    space.add(base.column(c))
                assert all(space.contains(up.column(c)) for c in up.cols)


# --- validation ----------------------------------------------------------------


def test_part_boundary_mismatch():
    T = pair_graph(K, two(0, 0), two(0, 0), [Part({"c1"}, {"c2"}, 0), Part({"c2"}, {"c1"}, 0)])
    with pytest.raises(ValidationError, match="part 0"):
        T.validate()


def test_parts_must_partition():
    T = pair_graph(K, two(0, 0), one(0), [Part({"c1"}, {"c"}, 0)])
    with pytest.raises(ValidationError):
        T.validate()


def test_empty_part_and_bad_tau():
    S = [Component("c", 0, {"a", "b"}), Component("z", 1)]
    T = pair_graph(K, S, one(0), [Part({"c"}, {"c"}, 0), Part(set(), set(), 0), Part({"z"}, set(), 0)])
    with pytest.raises(ValidationError, match="both sides empty"):
        T.validate()
    with pytest.raises(ValidationError):
        Part({"c"}, {"c"}, -1)


def test_vertex_boundary_must_be_alpha():
    T = TunnelingGraph(K, ("a", "b"), [SurfaceVertex("S", [Component("c", 0, {"a"})])])
    with pytest.raises(ValidationError):
        T.validate()
    with pytest.raises(ValidationError):
        SurfaceVertex("S", [Component("c", 0, {"a"}), Component("d", 0, {"a"})])


def test_loop_validation():
    S = [Component("c", 0, {"a"}), Component("s", 1), Component("t", 1), Component("u", 2)]
    T = TunnelingGraph(K, ("a",), [SurfaceVertex("S", S)], loops=[LoopEdge("S", {"s": "t", "t": "s"})])
    T.validate()
    T.loops = [LoopEdge("S", {"s": "u", "u": "s"}, id="bad")]
    with pytest.raises(ValidationError, match="genus"):
        T.validate()
    T.loops = [LoopEdge("S", {"s": "c", "c": "s"}, id="bad")]
    with pytest.raises(ValidationError, match="boundary"):
        T.validate()


# --- present -------------------------------------------------------------------


def test_single_vertex_is_tensor_power():
    T = TunnelingGraph(K, ("a",), [SurfaceVertex("S", [Component("c", 3, {"a"})])])
    assert present(T).invariants == ModuleInvariants(2)
    T = TunnelingGraph(K, ("a", "b"), [SurfaceVertex("S", two(0, 1))])
    assert present(T).invariants == ModuleInvariants(4)


@pytest.mark.parametrize("dg", [0, 1])
def test_two_connected_surfaces(dg):
    assert present(case_11(K, 1, dg)).invariants.free_rank == 3
    assert present(case_11(K, 2, dg)).invariants.free_rank == 4


@pytest.mark.parametrize("dg", [0, 1])
def test_split_surface_cases(dg):
    for build in (case_21, case_12):
        assert present(build(K, 1, dg)).invariants.free_rank == 5
        assert present(build(K, 2, dg)).invariants.free_rank == 6


def test_two_by_two_single_part():
    assert present(case_22_one_part(K, 0)).invariants.free_rank == 6
    assert present(case_22_one_part(K, 1)).invariants.free_rank == 7
    # 𝔨² = 0 on V_K: for τ ≥ 2 both maps vanish and nothing is identified
    assert present(case_22_one_part(K, 2)).invariants.free_rank == 8


def test_present_matches_direct_pushout():
    for A in (K, H):
        for t1 in range(3):
            for t2 in range(3):
                for d1 in (0, 1):
                    for d2 in (1, 2):
                        T = case_22_nondescending(A, t1, t2, d1, d2)
                        assert present(T).invariants == _direct(A, T)
                        assert present(T, "z").invariants == pushout_quotient_invariants(*_edge_maps(A, T)[1:], "z")


def test_present_order_independent():
    T = case_22_nondescending(K, 1, 0, 1, 1)
    assert present(T, order=["S", "S2"]).invariants == present(T, order=["S2", "S"]).invariants
    with pytest.raises(ValidationError):
        present(T, order=["S"])


def test_present_polynomial_over_integers_rejected():
    with pytest.raises(StructuralError):
        present(case_11(U, 1), "z")


def test_genus_sequence_examples():
    assert genus_sequence([5]) == (5,)
    assert genus_sequence([1, 2]) == (3, 1, 2)
    assert genus_sequence([0, 0, 0]) == (0,) * 7
    assert len(genus_sequence([1, 2, 3, 4])) == 2 ** 4 - 1
    # label-independent: the same multiset gives the same sequence
    assert genus_sequence([2, 1, 3]) == genus_sequence([3, 2, 1]) == (6, 3, 4, 5, 1, 2, 3)


def test_default_order_by_genus_sequence():
    T = pair_graph(K, one(2), one(0), [Part({"c"}, {"c"}, 1)])
    assert default_order(T) == ["S2", "S"]


# --- connected surfaces --------------------------------------------------------


def test_quotient_by_handle_khovanov():
    assert quotient_by_handle(K, 0) == ModuleInvariants(0)
    assert quotient_by_handle(K, 1) == ModuleInvariants(1)
    assert quotient_by_handle(K, 2) == ModuleInvariants(2)
    # over Z: V/2x·V = Z ⊕ Z/2
    assert quotient_by_handle(K, 1, "z") == ModuleInvariants(1, (2,))


def test_local_connected_examples():
    T = connected_graph(K, [1], {})
    assert local_connected_closed_form(T) == ModuleInvariants(2) == present(T).invariants
    T = connected_graph(K, [0, 1], {(0, 1): 1})
    assert local_connected_closed_form(T).free_rank == 3
    T = connected_graph(K, [0, 1, 2], {(0, 1): 1, (0, 2): 2, (1, 2): 3})
    assert local_connected_closed_form(T).free_rank == 5
    assert present(T, order=["S0", "S1", "S2"]).invariants.free_rank == 5


def test_local_connected_rejects_disconnected():
    T = TunnelingGraph(K, ("a", "b"), [SurfaceVertex("S", two(0, 0))])
    with pytest.raises(ValidationError):
        local_connected_closed_form(T)


@pytest.mark.parametrize("shape", ["chain", "tree"])
def test_local_connected_random(shape):
    rng = random.Random(40 if shape == "chain" else 41)
    for A in (K, U.specialize({"h": 0, "t": 0})):
        for _ in range(15):
            T, order = random_connected(rng, A, shape)
            assert local_connected_closed_form(T, order) == present(T, order=order).invariants


# --- Σ×I ---------------------------------------------------------------------


def test_sigma_I_small_cases():
    for g in range(3):
        T = sigma_I_graph(K, g, 0, 0)
        assert [v.id for v in T.vertices] == ["S0"] and present(T).invariants == ModuleInvariants(1)
        T = sigma_I_graph(K, g, 1, 1)
        assert present(T).invariants == ModuleInvariants(2)


def test_sigma_I_graph_shape():
    T = sigma_I_graph(K, 1, 0, 4)
    assert sorted(v.id for v in T.vertices) == ["S0", "S2", "S4"]
    assert sorted(e.id for e in T.edges) == ["t2_0", "t4_0", "t4_1", "t4_2"]
    assert len([lp for lp in T.loops if lp.vertex == "S4"]) == 23
    T.validate()


def test_oracle_small_degrees():
    for A in (K, H):
        dims = tensor_algebra_oracle(A, 1, 1)
        assert dims == [1, A.rank]


@pytest.mark.parametrize("A", [K, H], ids=["khovanov", "homology_s2"])
def test_sigma_I_pipeline_vs_oracle(A):
    for g in range(3):
        assert sigma_I_dimensions(A, g, 4) == tensor_algebra_oracle(A, g, 4)


def test_oracle_needs_field():
    with pytest.raises(StructuralError):
        tensor_algebra_oracle(U, 1, 2)


# --- (SV)₋ -------------------------------------------------------------------


@pytest.mark.parametrize("A", [K, H], ids=["khovanov", "homology_s2"])
def test_unorientable_routes_agree(A):
    assert unorientable_dimensions(A, 5, "ideal") == unorientable_dimensions(A, 5, "rewrite")


def test_unorientable_low_degrees():
    # cut 0: the empty monomial; cut 1: 1, e_1, e_x; no relation reaches below degree 2
    assert unorientable_dimensions(K, 1) == [1, 3]


def test_unorientable_tensor_factor():
    assert unorientable_module(K, 2, 0) == [ModuleInvariants(4)]
    dims = unorientable_dimensions(K, 3)
    assert [m.free_rank for m in unorientable_module(K, 1, 3)] == [2 * d for d in dims]


def test_unorientable_unknown_method():
    with pytest.raises(ValueError):
        unorientable_dimensions(K, 2, "magic")
