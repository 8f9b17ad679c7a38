"""Decorated surface cobordisms and their 2D TQFT evaluation.

A :class:`DecoratedCobordism` records only combinatorics: which input and
output circles lie on which component, and the genus of each component.
Composition glues along the shared circles; a component of the composite
gets the genera of its pieces plus the cycle rank of the glueing graph
restricted to it (Euler characteristic additivity).

Two-morphisms are rewrite steps (:class:`DeltaK`, :class:`KK`,
:class:`EpsK`, :class:`Pi`) acting on cobordisms; they map to the
elementary morphisms of :mod:`bnskein.tensorcat`.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass

from .exactalg import StructuralError, inverse
from .linmap import LinMap
from .tensorcat import (
    BimoduleObject,
    Handle,
    Kill,
    Permute,
    Split,
    glue_classes,
)

__all__ = [
    "DecoratedCobordism",
    "DeltaK",
    "KK",
    "EpsK",
    "Pi",
    "identity",
    "compose",
    "apply_two_step",
    "whisker",
    "Whiskered",
    "to_tensor",
    "step_to_map",
    "tqft_eval",
    "tqft_tilde",
    "inclusions",
    "dualize",
    "gram_map",
    "random_cobordism",
    "cycle_rank",
]


class DecoratedCobordism:
    """Triple (phi1: J1 → K, phi2: J2 → K, psi: K → genus)."""

    __slots__ = ("J1", "J2", "K", "phi1", "phi2", "psi")

    def __init__(self, J1, J2, K, phi1, phi2, psi):
        self.J1 = tuple(sorted(J1))
        self.J2 = tuple(sorted(J2))
        self.K = tuple(sorted(K))
        self.phi1 = dict(phi1)
        self.phi2 = dict(phi2)
        self.psi = dict(psi)
        if len(set(self.K)) != len(self.K):
            raise StructuralError("duplicate component labels")
        if set(self.phi1) != set(self.J1):
            raise StructuralError("phi1 must be total on the inputs")
        if set(self.phi2) != set(self.J2):
            raise StructuralError("phi2 must be total on the outputs")
        if set(self.psi) != set(self.K):
            raise StructuralError("psi must be total on the components")
        ks = set(self.K)
        for j, k in list(self.phi1.items()) + list(self.phi2.items()):
            if k not in ks:
                raise StructuralError(f"boundary {j!r} maps to unknown component {k!r}")
        for k, g in self.psi.items():
            if not isinstance(g, int) or isinstance(g, bool) or g < 0:
                raise StructuralError(f"genus of {k!r} must be a nonnegative integer")

    @classmethod
    def from_components(cls, inputs, outputs, components):
        """Build from ``[(id, genus, in_labels, out_labels), ...]``."""
        phi1, phi2, psi = {}, {}, {}
        for cid, g, ins, outs in components:
            psi[cid] = g
            for j in ins:
                if j in phi1:
                    raise StructuralError(f"input {j!r} on two components")
                phi1[j] = cid
            for j in outs:
                if j in phi2:
                    raise StructuralError(f"output {j!r} on two components")
                phi2[j] = cid
        return cls(inputs, outputs, psi.keys(), phi1, phi2, psi)

    def ins(self, k):
        return tuple(sorted(j for j, v in self.phi1.items() if v == k))

    def outs(self, k):
        return tuple(sorted(j for j, v in self.phi2.items() if v == k))

    def is_closed(self, k):
        return not self.ins(k) and not self.outs(k)

    def components(self):
        return [(k, self.psi[k], self.ins(k), self.outs(k)) for k in self.K]

    def canonical(self):
        """Label-free description: sorted (ins, outs, genus) per component."""
        return (self.J1, self.J2, tuple(sorted((self.ins(k), self.outs(k), self.psi[k]) for k in self.K)))

    def isomorphic(self, other):
        return self.canonical() == other.canonical()

    def relabel(self, mapping):
        f = lambda k: mapping.get(k, k)  # noqa: E731
        return DecoratedCobordism(self.J1, self.J2, [f(k) for k in self.K],
                                  {j: f(k) for j, k in self.phi1.items()},
                                  {j: f(k) for j, k in self.phi2.items()},
                                  {f(k): g for k, g in self.psi.items()})

    def __eq__(self, other):
        return isinstance(other, DecoratedCobordism) and (
            self.J1, self.J2, self.K, sorted(self.phi1.items()), sorted(self.phi2.items()),
            sorted(self.psi.items()),
        ) == (other.J1, other.J2, other.K, sorted(other.phi1.items()), sorted(other.phi2.items()),
              sorted(other.psi.items()))

    __hash__ = None

    def __repr__(self):
        comps = ", ".join(f"{k}:g{g} {list(i)}->{list(o)}" for k, g, i, o in self.components())
        return f"DecoratedCobordism({list(self.J1)} -> {list(self.J2)}; {comps})"


def identity(J):
    """Cylinders over every label of J."""
    J = tuple(sorted(J))
    return DecoratedCobordism(J, J, J, {j: j for j in J}, {j: j for j in J}, {j: 0 for j in J})


def cycle_rank(members, circles):
    """Cycle rank of a connected glueing graph with the given vertex and edge counts."""
    return circles - members + 1


def compose(top, bottom):
    """``top ∘ bottom``: glue bottom's outputs to top's inputs."""
    if top.J1 != bottom.J2:
        raise StructuralError(f"cannot compose: outputs {list(bottom.J2)} vs inputs {list(top.J1)}")
    class_of, members = glue_classes(bottom.K, bottom.phi2, top.K, top.phi1, bottom.J2)
    circles = {}
    for j in bottom.J2:
        c = class_of["0/" + bottom.phi2[j]]
        circles[c] = circles.get(c, 0) + 1
    psi = {}
    for name, mem in members.items():
        total = 0
        for m in mem:
            side, k = m.split("/", 1)
            total += (bottom if side == "0" else top).psi[k]
        psi[name] = total + cycle_rank(len(mem), circles.get(name, 0))
    phi1 = {j: class_of["0/" + k] for j, k in bottom.phi1.items()}
    phi2 = {j: class_of["1/" + k] for j, k in top.phi2.items()}
    return DecoratedCobordism(bottom.J1, top.J2, members.keys(), phi1, phi2, psi)


# ---------------------------------------------------------------------------
# two-morphisms


@dataclass(frozen=True)
class DeltaK:
    """Cut component ``k`` into ``k`` (genus ``g_keep``) and ``new`` (genus ``g_new``).

    ``moved`` lists boundary labels, written ``in:j`` / ``out:j``, that move to
    the new component.
    """

    k: str
    new: str
    g_keep: int
    g_new: int
    moved: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "moved", frozenset(self.moved))


@dataclass(frozen=True)
class KK:
    """Compress one handle of component ``k``."""

    k: str


@dataclass(frozen=True)
class EpsK:
    """Cap off a closed sphere component ``k``."""

    k: str


@dataclass(frozen=True)
class Pi:
    """Swap two closed components of equal genus."""

    k1: str
    k2: str


def _boundary_of(C, k):
    return {f"in:{j}" for j in C.ins(k)} | {f"out:{j}" for j in C.outs(k)}


def apply_two_step(C, s):
    """Cobordism reached from C by the step ``s``."""
    if isinstance(s, DeltaK):
        if s.k not in C.psi:
            raise StructuralError(f"DeltaK: unknown component {s.k!r}")
        if s.new in C.psi:
            raise StructuralError(f"DeltaK: label {s.new!r} already used")
        if s.g_keep < 0 or s.g_new < 0 or s.g_keep + s.g_new != C.psi[s.k]:
            raise StructuralError(f"DeltaK: genera {s.g_keep}+{s.g_new} != {C.psi[s.k]}")
        if not s.moved <= _boundary_of(C, s.k):
            raise StructuralError("DeltaK: moved labels are not boundary of the component")
        phi1 = {j: (s.new if f"in:{j}" in s.moved else k) for j, k in C.phi1.items()}
        phi2 = {j: (s.new if f"out:{j}" in s.moved else k) for j, k in C.phi2.items()}
        psi = dict(C.psi)
        psi[s.k] = s.g_keep
        psi[s.new] = s.g_new
        return DecoratedCobordism(C.J1, C.J2, psi.keys(), phi1, phi2, psi)
    if isinstance(s, KK):
        if C.psi.get(s.k, 0) <= 0:
            raise StructuralError(f"KK: component {s.k!r} has no handle")
        psi = dict(C.psi)
        psi[s.k] -= 1
        return DecoratedCobordism(C.J1, C.J2, C.K, C.phi1, C.phi2, psi)
    if isinstance(s, EpsK):
        if s.k not in C.psi or not C.is_closed(s.k) or C.psi[s.k] != 0:
            raise StructuralError(f"EpsK: {s.k!r} is not a closed sphere")
        psi = {k: g for k, g in C.psi.items() if k != s.k}
        return DecoratedCobordism(C.J1, C.J2, psi.keys(), C.phi1, C.phi2, psi)
    if isinstance(s, Pi):
        for k in (s.k1, s.k2):
            if k not in C.psi or not C.is_closed(k):
                raise StructuralError(f"Pi: {k!r} is not a closed component")
        if C.psi[s.k1] != C.psi[s.k2]:
            raise StructuralError("Pi: genera differ")
        return C.relabel({s.k1: s.k2, s.k2: s.k1})
    raise StructuralError(f"not a two-step: {s!r}")


def to_tensor(C):
    """Forget the genera."""
    return BimoduleObject(C.J1, C.J2, C.K, C.phi1, C.phi2)


def step_to_map(s):
    if isinstance(s, DeltaK):
        return Split(s.k, s.new, s.moved)
    if isinstance(s, KK):
        return Handle(s.k)
    if isinstance(s, EpsK):
        return Kill(s.k)
    if isinstance(s, Pi):
        return Permute({s.k1: s.k2, s.k2: s.k1})
    raise StructuralError(f"not a two-step: {s!r}")


@dataclass
class Whiskered:
    """A step transported to a composite.

    ``before`` and ``after`` are the composites before and after the original
    step; ``rename`` maps labels produced by applying ``step`` to ``before``
    onto the component labels of ``after``.
    """

    step: object
    before: DecoratedCobordism
    after: DecoratedCobordism
    rename: dict


def whisker(s, C, D, side="top"):
    """Transport the step ``s`` on ``C`` to the composite with ``D``.

    ``side="top"`` means the composite is ``D ∘ C``; ``"bottom"`` means ``C ∘ D``.
    """
    C2 = apply_two_step(C, s)
    if side == "top":
        before, after, tag = compose(D, C), compose(D, C2), "0/"
        cls_b = glue_classes(C.K, C.phi2, D.K, D.phi1, C.J2)[0]
        cls_a = glue_classes(C2.K, C2.phi2, D.K, D.phi1, C2.J2)[0]
    elif side == "bottom":
        before, after, tag = compose(C, D), compose(C2, D), "1/"
        cls_b = glue_classes(D.K, D.phi2, C.K, C.phi1, D.J2)[0]
        cls_a = glue_classes(D.K, D.phi2, C2.K, C2.phi1, D.J2)[0]
    else:
        raise ValueError("side must be 'top' or 'bottom'")
    if isinstance(s, DeltaK):
        k = cls_b[tag + s.k]
        ka, kb = cls_a[tag + s.k], cls_a[tag + s.new]
        if ka == kb:
            step = KK(k)
            rename = {k: ka}
        else:
            moved = _boundary_of(after, kb)
            step = DeltaK(k, kb, after.psi[ka], after.psi[kb], moved)
            rename = {k: ka}
    elif isinstance(s, KK):
        step = KK(cls_b[tag + s.k])
        rename = {step.k: cls_a[tag + s.k]}
    elif isinstance(s, EpsK):
        step = EpsK(cls_b[tag + s.k])
        rename = {}
    elif isinstance(s, Pi):
        step = Pi(cls_b[tag + s.k1], cls_b[tag + s.k2])
        rename = {step.k1: cls_a[tag + s.k1], step.k2: cls_a[tag + s.k2]}
    else:
        raise StructuralError(f"not a two-step: {s!r}")
    # every untouched class keeps its members, hence its name, except classes
    # whose members were renamed by the step
    for name_b, name_a in _untouched(before, after).items():
        rename.setdefault(name_b, name_a)
    return Whiskered(step, before, after, rename)


def _untouched(before, after):
    return {k: k for k in before.K if k in after.psi}


# ---------------------------------------------------------------------------
# TQFT


def _component_map(algebra, ins, outs, k, genus, handles=True):
    m = algebra.m_n(len(ins), ins=ins, out=k)
    if handles and genus:
        m = algebra.handle_map(k, genus) @ m
    return algebra.d_n(len(outs), inp=k, outs=outs) @ m


def tqft_eval(C, algebra, handles=True):
    """The TQFT map V^{⊗J1} → V^{⊗J2}: ⊗_k d_{b(k)} ∘ 𝔨^{ψ(k)} ∘ m_{a(k)}."""
    # input and output labels may coincide, so build with tagged labels
    total = LinMap.identity(algebra.ring, algebra.rank, ())
    for k in C.K:
        ins = tuple("i" + j for j in C.ins(k))
        outs = tuple("o" + j for j in C.outs(k))
        total = total.tensor(_component_map(algebra, ins, outs, "k" + k, C.psi[k], handles))
    return total.relabel({"i" + j: j for j in C.J1}, {"o" + j: j for j in C.J2})


def tqft_tilde(C, algebra):
    """The genus-blind variant: tqft_eval with 𝔨 replaced by the identity."""
    return tqft_eval(C, algebra, handles=False)


def inclusions(C, algebra):
    """``(j1, j2)``: the maps V^{⊗J_i} → V^{⊗K} given by acting on 1."""
    j1 = LinMap.identity(algebra.ring, algebra.rank, ())
    j2 = LinMap.identity(algebra.ring, algebra.rank, ())
    for k in C.K:
        j1 = j1.tensor(algebra.m_n(len(C.ins(k)), ins=C.ins(k), out=k))
        j2 = j2.tensor(algebra.m_n(len(C.outs(k)), ins=C.outs(k), out=k))
    return j1, j2


def gram_map(algebra, labels, inverse_form=False):
    """The pairing 𝔭 = ε∘m on every factor, as a map V^{⊗L} → V^{⊗L}."""
    g = algebra.gram()
    if inverse_form:
        g = inverse(g, algebra.ring)
    r = algebra.rank
    cols = {(j,): {(i,): g[i][j] for i in range(r) if g[i][j]} for j in range(r)}
    total = LinMap.identity(algebra.ring, algebra.rank, ())
    for lab in labels:
        total = total.tensor(LinMap.from_columns(algebra.ring, r, (lab,), (lab,), cols))
    return total


def dualize(L, algebra):
    """Adjoint of L: V^{⊗X} → V^{⊗Y} for the pairing: G_X⁻¹ Lᵀ G_Y."""
    lt = LinMap(L.ring, L.dim, L.cod, L.dom, L.mat.T)
    return gram_map(algebra, L.dom, inverse_form=True) @ lt @ gram_map(algebra, L.cod)


# ---------------------------------------------------------------------------
# random instances


def random_cobordism(rng, J1, J2, max_components=4, max_genus=3, closed_prob=0.15, prefix="c"):
    """Random cobordism J1 → J2 with at most ``max_components`` components."""
    rng = rng if isinstance(rng, _random.Random) else _random.Random(rng)
    J1, J2 = list(J1), list(J2)
    nb = len(J1) + len(J2)
    ncomp = rng.randint(1 if nb else 0, max(1, min(max_components, nb or 1)))
    labels = [f"{prefix}{i}" for i in range(ncomp)]
    phi1 = {j: rng.choice(labels) for j in J1}
    phi2 = {j: rng.choice(labels) for j in J2}
    used = set(phi1.values()) | set(phi2.values())
    K = [k for k in labels if k in used]
    while len(K) < max_components and rng.random() < closed_prob:
        K.append(f"{prefix}{len(labels)}")
        labels.append(K[-1])
    psi = {k: rng.randint(0, max_genus) for k in K}
    return DecoratedCobordism(J1, J2, K, phi1, phi2, psi)
