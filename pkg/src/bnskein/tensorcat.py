"""The module categories V(J) and the algebraic glueing functor.

An object is a map ``φ: J → K`` of finite label sets; it stands for the
``V^{⊗J}``-module ``V^{⊗K}`` where a boundary factor ``j`` acts by
multiplication on the component factor ``φ(j)``.  Morphisms are generated by
four elementary kinds (split, handle, kill, permute) and are realized
eagerly as :class:`~bnskein.linmap.LinMap` matrices keyed on component
labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .exactalg import StructuralError
from .linmap import LinMap

__all__ = [
    "TensorObject",
    "TensorVector",
    "Split",
    "Handle",
    "Kill",
    "Permute",
    "ElementaryMorphism",
    "apply_elementary",
    "realize",
    "act",
    "BimoduleObject",
    "BimoduleMorphism",
    "GlueResult",
    "glue_classes",
    "glue_objects",
    "glue_morphisms",
    "projection_map",
    "permutation_map",
    "LinMap",
]


def _freeze(d):
    return tuple(sorted(d.items()))


class TensorObject:
    """A map ``phi: J → K`` of label sets."""

    __slots__ = ("J", "K", "phi")

    def __init__(self, J, K, phi):
        self.J = tuple(sorted(J))
        self.K = tuple(sorted(K))
        self.phi = dict(phi)
        if len(set(self.J)) != len(self.J) or len(set(self.K)) != len(self.K):
            raise StructuralError("duplicate labels")
        if set(self.phi) != set(self.J):
            raise StructuralError(f"phi must be total on J: {sorted(self.phi)} vs {list(self.J)}")
        bad = [j for j, k in self.phi.items() if k not in self.K]
        if bad:
            raise StructuralError(f"phi sends {bad[0]!r} outside K")

    def image(self):
        return set(self.phi.values())

    def preimage(self, k):
        return frozenset(j for j, v in self.phi.items() if v == k)

    def closed(self):
        """Component labels not hit by any boundary label."""
        im = self.image()
        return tuple(k for k in self.K if k not in im)

    def __eq__(self, other):
        return isinstance(other, TensorObject) and (self.J, self.K, _freeze(self.phi)) == (
            other.J, other.K, _freeze(other.phi))

    def __hash__(self):
        return hash((self.J, self.K, _freeze(self.phi)))

    def __repr__(self):
        return f"TensorObject(J={list(self.J)}, K={list(self.K)}, phi={dict(sorted(self.phi.items()))})"


@dataclass
class TensorVector:
    """Element of V^{⊗K}: sparse map from K-keys (sorted K) to scalars."""

    obj: TensorObject
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.obj.K)
        self.terms = {tuple(k): v for k, v in self.terms.items() if v}
        for k in self.terms:
            if len(k) != n:
                raise StructuralError(f"multi-index {k} has wrong length for K={self.obj.K}")


# ---------------------------------------------------------------------------
# elementary morphisms


@dataclass(frozen=True)
class Split:
    """Δ on factor ``r``; boundary labels in ``moved`` follow the new factor ``new``."""

    r: str
    new: str
    moved: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "moved", frozenset(self.moved))


@dataclass(frozen=True)
class Handle:
    """Multiplication by 𝔨 on factor ``r``."""

    r: str
    power: int = 1


@dataclass(frozen=True)
class Kill:
    """ε on a closed factor ``k``."""

    k: str


@dataclass(frozen=True)
class Permute:
    """Permutation of closed factors: the factor at label ``a`` moves to ``mapping[a]``."""

    mapping: tuple

    def __init__(self, mapping):
        items = mapping.items() if isinstance(mapping, dict) else mapping
        object.__setattr__(self, "mapping", tuple(sorted((a, b) for a, b in items if a != b)))

    def as_dict(self):
        return dict(self.mapping)


ElementaryMorphism = (Split, Handle, Kill, Permute)


def permutation_map(algebra, labels, mapping):
    """Identity on ``labels`` with output labels renamed by ``mapping``."""
    return LinMap.identity(algebra.ring, algebra.rank, tuple(sorted(labels))).relabel(cod_map=mapping)


def apply_elementary(algebra, obj, e):
    """Codomain object and realized matrix of an elementary morphism."""
    rest = lambda drop: LinMap.identity(  # noqa: E731
        algebra.ring, algebra.rank, tuple(k for k in obj.K if k not in drop))
    if isinstance(e, Split):
        if e.r not in obj.K:
            raise StructuralError(f"split: {e.r!r} is not a component")
        if e.new in obj.K:
            raise StructuralError(f"split: new label {e.new!r} already used")
        pre = obj.preimage(e.r)
        if not e.moved <= pre:
            raise StructuralError(f"split: moved labels {sorted(e.moved - pre)} are not in the preimage of {e.r!r}")
        phi = dict(obj.phi)
        for j in e.moved:
            phi[j] = e.new
        new_obj = TensorObject(obj.J, obj.K + (e.new,), phi)
        return new_obj, algebra.comul_map(e.r, e.r, e.new).tensor(rest({e.r}))
    if isinstance(e, Handle):
        if e.r not in obj.K:
            raise StructuralError(f"handle: {e.r!r} is not a component")
        return obj, algebra.handle_map(e.r, e.power).tensor(rest({e.r}))
    if isinstance(e, Kill):
        if e.k not in obj.K:
            raise StructuralError(f"kill: {e.k!r} is not a component")
        if e.k in obj.image():
            raise StructuralError(f"kill: {e.k!r} carries boundary labels")
        new_obj = TensorObject(obj.J, tuple(k for k in obj.K if k != e.k), obj.phi)
        return new_obj, algebra.counit_map(e.k).tensor(rest({e.k}))
    if isinstance(e, Permute):
        m = e.as_dict()
        closed = set(obj.closed())
        if set(m) != set(m.values()):
            raise StructuralError("permute: mapping is not a permutation")
        if not set(m) <= closed:
            raise StructuralError(f"permute: moves non-closed labels {sorted(set(m) - closed)}")
        return obj, permutation_map(algebra, obj.K, m)
    raise StructuralError(f"not an elementary morphism: {e!r}")


def realize(algebra, path, start):
    """Compose the realizations of ``path`` (applied first to last)."""
    obj = start
    total = LinMap.identity(algebra.ring, algebra.rank, start.K)
    for i, e in enumerate(path):
        try:
            obj, m = apply_elementary(algebra, obj, e)
        except StructuralError as exc:
            raise StructuralError(f"step {i}: {exc}") from None
        total = m @ total
    return obj, total


def act(algebra, v, w):
    """Action of ``v ∈ V^{⊗J}`` (dict J-key -> scalar) on a TensorVector."""
    obj = w.obj
    kpos = {k: i for i, k in enumerate(obj.K)}
    targets = [kpos[obj.phi[j]] for j in obj.J]
    out = {}
    for jkey, a in v.items():
        if len(jkey) != len(obj.J):
            raise StructuralError(f"boundary multi-index {jkey} does not match J={obj.J}")
        if not a:
            continue
        for kkey, b in w.terms.items():
            # multiply each boundary factor into its component, one at a time
            vecs = {kkey: a * b}
            for jb, pos in zip(jkey, targets):
                nxt = {}
                for key, c in vecs.items():
                    for idx, m in enumerate(algebra.mul[jb][key[pos]]):
                        if m:
                            nk = key[:pos] + (idx,) + key[pos + 1:]
                            nxt[nk] = nxt.get(nk, 0) + c * m
                vecs = nxt
            for key, c in vecs.items():
                out[key] = out.get(key, 0) + c
    return TensorVector(obj, out)


# ---------------------------------------------------------------------------
# bimodule objects and glueing


class BimoduleObject:
    """Pair of maps ``phi1: J1 → K`` and ``phi2: J2 → K``."""

    __slots__ = ("J1", "J2", "K", "phi1", "phi2")

    def __init__(self, J1, J2, K, phi1, phi2):
        self.J1 = tuple(sorted(J1))
        self.J2 = tuple(sorted(J2))
        self.K = tuple(sorted(K))
        self.phi1 = dict(phi1)
        self.phi2 = dict(phi2)
        if set(self.phi1) != set(self.J1) or set(self.phi2) != set(self.J2):
            raise StructuralError("phi1/phi2 must be total")
        if not set(self.phi1.values()) | set(self.phi2.values()) <= set(self.K):
            raise StructuralError("boundary maps land outside K")

    def as_tensor_object(self):
        """The underlying V(J) object with J = {"in:j"} ∪ {"out:j"}."""
        phi = {f"in:{j}": k for j, k in self.phi1.items()}
        phi.update({f"out:{j}": k for j, k in self.phi2.items()})
        return TensorObject(phi.keys(), self.K, phi)

    @classmethod
    def from_tensor_object(cls, obj, J1, J2):
        phi1 = {j: obj.phi[f"in:{j}"] for j in J1}
        phi2 = {j: obj.phi[f"out:{j}"] for j in J2}
        return cls(J1, J2, obj.K, phi1, phi2)

    def __eq__(self, other):
        return isinstance(other, BimoduleObject) and (
            self.J1, self.J2, self.K, _freeze(self.phi1), _freeze(self.phi2)
        ) == (other.J1, other.J2, other.K, _freeze(other.phi1), _freeze(other.phi2))

    def __hash__(self):
        return hash((self.J1, self.J2, self.K, _freeze(self.phi1), _freeze(self.phi2)))

    def __repr__(self):
        return (f"BimoduleObject(J1={list(self.J1)}, J2={list(self.J2)}, K={list(self.K)}, "
                f"phi1={dict(sorted(self.phi1.items()))}, phi2={dict(sorted(self.phi2.items()))})")


@dataclass
class BimoduleMorphism:
    """A realized morphism ``src → dst`` (same J1, J2)."""

    src: BimoduleObject
    dst: BimoduleObject
    map: LinMap

    def __post_init__(self):
        if (self.src.J1, self.src.J2) != (self.dst.J1, self.dst.J2):
            raise StructuralError("morphism changes the boundary")
        if self.map.dom != self.src.K or self.map.cod != self.dst.K:
            raise StructuralError("matrix labels do not match the objects")

    @classmethod
    def from_path(cls, algebra, src, path):
        obj, m = realize(algebra, path, src.as_tensor_object())
        return cls(src, BimoduleObject.from_tensor_object(obj, src.J1, src.J2), m)

    @classmethod
    def identity(cls, algebra, obj):
        return cls(obj, obj, LinMap.identity(algebra.ring, algebra.rank, obj.K))

    def compose(self, other):
        """``self ∘ other``."""
        if other.dst != self.src:
            raise StructuralError("morphisms are not composable")
        return BimoduleMorphism(other.src, self.dst, self.map @ other.map)


def glue_classes(bottom_K, bottom_phi2, top_K, top_phi1, middle):
    """Merge ``0/k`` (bottom) and ``1/k`` (top) along ``bottom_phi2(j) ~ top_phi1(j)``.

    Returns ``(class_of, members)``: tagged label -> class name, and class
    name -> sorted tuple of tagged members.  Class names are the sorted
    members joined by ``+``.
    """
    middle = tuple(middle)
    if set(bottom_phi2) != set(middle) or set(top_phi1) != set(middle):
        raise StructuralError("middle boundary sets do not match")
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in bottom_K:
        parent["0/" + k] = "0/" + k
    for k in top_K:
        parent["1/" + k] = "1/" + k
    for j in middle:
        a, b = find("0/" + bottom_phi2[j]), find("1/" + top_phi1[j])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    class_of, members = {}, {}
    for g in groups.values():
        g = tuple(sorted(g))
        name = "+".join(g)
        members[name] = g
        for x in g:
            class_of[x] = name
    return class_of, members


@dataclass
class GlueResult:
    obj: BimoduleObject
    projection: LinMap
    class_of: dict
    members: dict


def projection_map(algebra, members):
    """Multiply the factors of each class: V^{⊗members} → V^{⊗classes}."""
    total = LinMap.identity(algebra.ring, algebra.rank, ())
    for name in sorted(members):
        total = total.tensor(algebra.m_n(len(members[name]), ins=members[name], out=name))
    return total


def _section(algebra, members):
    """Right inverse of the projection: value into the first member, units elsewhere."""
    total = LinMap.identity(algebra.ring, algebra.rank, ())
    for name in sorted(members):
        first, *others = members[name]
        part = LinMap.identity(algebra.ring, algebra.rank, (name,)).relabel(cod_map={name: first})
        for o in others:
            part = part.tensor(algebra.unit_map(o))
        total = total.tensor(part)
    return total


def glue_objects(algebra, top, bottom):
    """Glue ``top`` (over J2, J3) onto ``bottom`` (over J1, J2)."""
    if top.J1 != bottom.J2:
        raise StructuralError(f"cannot glue: middle sets {list(bottom.J2)} and {list(top.J1)} differ")
    class_of, members = glue_classes(bottom.K, bottom.phi2, top.K, top.phi1, bottom.J2)
    phi1 = {j: class_of["0/" + k] for j, k in bottom.phi1.items()}
    phi2 = {j: class_of["1/" + k] for j, k in top.phi2.items()}
    obj = BimoduleObject(bottom.J1, top.J2, members.keys(), phi1, phi2)
    return GlueResult(obj, projection_map(algebra, members), class_of, members)


def _tag(m, tag):
    return m.relabel({k: tag + k for k in m.dom}, {k: tag + k for k in m.cod})


def glue_morphisms(algebra, g, f, check=True):
    """The morphism through which ``P_Y ∘ (g ⊗ f)`` factors.

    ``f`` is a morphism in V(J1, J2) (bottom), ``g`` in V(J2, J3) (top).
    """
    X = glue_objects(algebra, g.src, f.src)
    Y = glue_objects(algebra, g.dst, f.dst)
    gf = _tag(g.map, "1/").tensor(_tag(f.map, "0/"))
    top_path = Y.projection @ gf
    h = top_path @ _section(algebra, X.members)
    if check and h @ X.projection != top_path:
        raise StructuralError("P∘(g⊗f) does not factor through the glued source")
    return BimoduleMorphism(X.obj, Y.obj, h)


def all_keys(algebra, labels):
    return list(product(range(algebra.rank), repeat=len(labels)))
