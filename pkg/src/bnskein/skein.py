"""Bar-Natan modules from tunneling graphs.

A tunneling graph has incompressible surfaces as vertices (components with
genus and boundary circles) and tunneling invariants as edges.  Each edge is
compiled to a span ``F(src) ← V^{⊗parts} → F(dst)``: per part the side with
the smaller total genus gets ``d ∘ 𝔨^{τ+|Δg|}``, the other side ``d ∘ 𝔨^τ``.
The resulting functor graph is handed to :mod:`bnskein.colimit`.

Also here: closed forms for local modules of connected surfaces, the family
of surfaces in Σ×I with its tensor-algebra oracle, the unorientable module
(SV)₋, and genus sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations
from fractions import Fraction

from .colimit import FunctorGraph, colim_terminal
from .exactalg import ModuleInvariants, Span, SparseMatrix, StructuralError, cokernel_invariants
from .linmap import LinMap
from .tensorcat import TensorObject, permutation_map

__all__ = [
    "ValidationError",
    "Component",
    "SurfaceVertex",
    "Part",
    "TunnelingEdge",
    "LoopEdge",
    "TunnelingGraph",
    "compile_edge",
    "functor_graph",
    "present",
    "PresentResult",
    "genus_sequence",
    "quotient_by_handle",
    "local_connected_closed_form",
    "connected_graph",
    "sigma_I_graph",
    "sigma_I_dimensions",
    "tensor_algebra_oracle",
    "unorientable_module",
    "unorientable_dimensions",
]


class ValidationError(StructuralError):
    """Tunneling-graph input violates an invariant."""


@dataclass(frozen=True)
class Component:
    label: str
    genus: int
    boundary: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        if not isinstance(self.genus, int) or self.genus < 0:
            raise ValidationError(f"component {self.label!r}: genus must be a nonnegative integer")

    @property
    def closed(self):
        return not self.boundary


@dataclass
class SurfaceVertex:
    id: str
    components: list

    def __post_init__(self):
        self.components = [c if isinstance(c, Component) else Component(*c) for c in self.components]
        labels = [c.label for c in self.components]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"vertex {self.id!r}: duplicate component labels")
        seen = set()
        for c in self.components:
            if c.boundary & seen:
                raise ValidationError(f"vertex {self.id!r}: boundary circles on two components")
            seen |= c.boundary

    def comp(self, label):
        for c in self.components:
            if c.label == label:
                return c
        raise ValidationError(f"vertex {self.id!r} has no component {label!r}")

    @property
    def labels(self):
        return tuple(sorted(c.label for c in self.components))

    def boundary(self):
        return frozenset().union(*(c.boundary for c in self.components)) if self.components else frozenset()

    def total_genus(self):
        return sum(c.genus for c in self.components)

    def tensor_object(self, alpha):
        phi = {j: c.label for c in self.components for j in c.boundary}
        return TensorObject(alpha, self.labels, phi)


@dataclass
class Part:
    src: frozenset
    dst: frozenset
    tau: int = 0

    def __post_init__(self):
        self.src, self.dst = frozenset(self.src), frozenset(self.dst)
        if not isinstance(self.tau, int) or self.tau < 0:
            raise ValidationError("tau must be a nonnegative integer")


@dataclass
class TunnelingEdge:
    src: str
    dst: str
    parts: list
    id: str = None

    def __post_init__(self):
        self.parts = [p if isinstance(p, Part) else Part(*p) for p in self.parts]


@dataclass
class LoopEdge:
    vertex: str
    permutation: dict
    id: str = None


@dataclass
class TunnelingGraph:
    algebra: object
    boundary: tuple
    vertices: list
    edges: list = field(default_factory=list)
    loops: list = field(default_factory=list)
    algebra_ref: object = None

    def __post_init__(self):
        self.boundary = tuple(sorted(self.boundary))
        for i, e in enumerate(self.edges):
            if e.id is None:
                e.id = f"e{i}"
        for i, lp in enumerate(self.loops):
            if lp.id is None:
                lp.id = f"l{i}"

    def vertex(self, vid):
        for v in self.vertices:
            if v.id == vid:
                return v
        raise ValidationError(f"unknown vertex {vid!r}")

    def validate(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate vertex ids")
        alpha = frozenset(self.boundary)
        for v in self.vertices:
            if v.boundary() != alpha:
                raise ValidationError(f"vertex {v.id!r}: boundary {sorted(v.boundary())} != {sorted(alpha)}")
        eids = [e.id for e in self.edges] + [lp.id for lp in self.loops]
        if len(set(eids)) != len(eids):
            raise ValidationError("duplicate edge ids")
        for e in self.edges:
            _validate_edge(e, self.vertex(e.src), self.vertex(e.dst))
        for lp in self.loops:
            v = self.vertex(lp.vertex)
            m = lp.permutation
            if set(m) != set(m.values()):
                raise ValidationError(f"loop {lp.id!r}: not a permutation")
            for a, b in m.items():
                ca, cb = v.comp(a), v.comp(b)
                if not (ca.closed and cb.closed):
                    raise ValidationError(f"loop {lp.id!r}: permutes a component with boundary")
                if ca.genus != cb.genus:
                    raise ValidationError(f"loop {lp.id!r}: genus of {a!r} and {b!r} differ")
        return self


def _validate_edge(e, src, dst):
    cover_s, cover_d = [], []
    for i, p in enumerate(e.parts):
        where = f"edge {e.id!r} part {i}"
        if not p.src and not p.dst:
            raise ValidationError(f"{where}: both sides empty")
        for lab in p.src:
            src.comp(lab)
        for lab in p.dst:
            dst.comp(lab)
        bs = frozenset().union(*(src.comp(x).boundary for x in p.src)) if p.src else frozenset()
        bd = frozenset().union(*(dst.comp(x).boundary for x in p.dst)) if p.dst else frozenset()
        if bs != bd:
            raise ValidationError(f"{where}: boundary {sorted(bs)} on the source side but {sorted(bd)} on the target side")
        cover_s += list(p.src)
        cover_d += list(p.dst)
    if sorted(cover_s) != list(src.labels):
        raise ValidationError(f"edge {e.id!r}: parts do not partition the components of {src.id!r}")
    if sorted(cover_d) != list(dst.labels):
        raise ValidationError(f"edge {e.id!r}: parts do not partition the components of {dst.id!r}")


# ---------------------------------------------------------------------------
# compilation


def compile_edge(algebra, e, src, dst):
    """``(r, F_src, F_dst)`` with ``F_src: V^{⊗r} → F(src)`` and ``F_dst: V^{⊗r} → F(dst)``."""
    _validate_edge(e, src, dst)
    one = LinMap.identity(algebra.ring, algebra.rank, ())
    f_src, f_dst = one, one
    for i, p in enumerate(e.parts):
        c = f"p{i}"
        gs = sum(src.comp(x).genus for x in p.src)
        gd = sum(dst.comp(x).genus for x in p.dst)
        extra_s = p.tau + (gd - gs if gs < gd else 0)
        extra_d = p.tau + (gs - gd if gd < gs else 0)
        f_src = f_src.tensor(algebra.d_n(len(p.src), inp=c, outs=sorted(p.src)) @ algebra.handle_map(c, extra_s))
        f_dst = f_dst.tensor(algebra.d_n(len(p.dst), inp=c, outs=sorted(p.dst)) @ algebra.handle_map(c, extra_d))
    return len(e.parts), f_src, f_dst


def center_object(e, src, alpha):
    phi = {}
    for i, p in enumerate(e.parts):
        for x in p.src:
            for j in src.comp(x).boundary:
                phi[j] = f"p{i}"
    return TensorObject(alpha, [f"p{i}" for i in range(len(e.parts))], phi)


def genus_sequence(S):
    """Total genus, then the sorted genera of all unions of |S|-1, |S|-2, ..., 1 components."""
    genera = [c.genus for c in S.components] if isinstance(S, SurfaceVertex) else list(S)
    out = [sum(genera)]
    for size in range(len(genera) - 1, 0, -1):
        out += sorted(sum(sub) for sub in combinations(genera, size))
    return tuple(out)


def functor_graph(T, ring="q"):
    """Surfaces and edge centers as a :class:`FunctorGraph` (plus the surface ids)."""
    T.validate()
    A = T.algebra
    G = FunctorGraph(ring)
    for v in T.vertices:
        G.add_vertex(v.id, v.tensor_object(T.boundary), A)
    for e in T.edges:
        src, dst = T.vertex(e.src), T.vertex(e.dst)
        _, fs, fd = compile_edge(A, e, src, dst)
        cid = f"center:{e.id}"
        G.add_vertex(cid, center_object(e, src, T.boundary), A)
        G.add_edge(f"{e.id}:src", cid, e.src, fs)
        G.add_edge(f"{e.id}:dst", cid, e.dst, fd)
    for lp in T.loops:
        v = T.vertex(lp.vertex)
        G.add_edge(lp.id, v.id, v.id, permutation_map(A, v.labels, lp.permutation))
    return G


@dataclass
class PresentResult:
    presentation: object
    invariants: ModuleInvariants
    order: list

    def report(self, ring_name):
        p = self.presentation
        return {
            "ring": ring_name,
            "generators": [{"vertex": v, "rank": r} for v, r, _ in p.blocks],
            "relation_count": p.relation_count,
            "free_rank": self.invariants.free_rank,
            "torsion": list(self.invariants.torsion),
        }


def default_order(T):
    """Vertices sorted by genus sequence (ties by id)."""
    return [v.id for v in sorted(T.vertices, key=lambda v: (genus_sequence(v), v.id))]


def present(T, ring="q", order=None):
    """Presentation and invariants of the Bar-Natan module of a tunneling graph."""
    if ring in ("z", "Z") and T.algebra.ring.kind == "poly_int":
        raise StructuralError("integer invariants need an integer algebra")
    G = functor_graph(T, ring)
    order = list(order) if order is not None else default_order(T)
    if sorted(order) != sorted(v.id for v in T.vertices):
        raise ValidationError("order must list every surface exactly once")
    pres, inv = colim_terminal(G, order, ring)
    return PresentResult(pres, inv, order)


# ---------------------------------------------------------------------------
# local modules of connected surfaces


def quotient_by_handle(algebra, power, ring="q"):
    """Invariants of V/𝔨^power."""
    if power == 0:
        return ModuleInvariants(0)
    m = algebra.handle_map("0", power).mat
    return cokernel_invariants(m, m.rows, ring)


def connected_graph(algebra, genera, taus, boundary=("a",)):
    """Tunneling graph of connected surfaces ``S0, S1, ...`` with edges ``(i, j) -> τ``.

    Every surface is a single component bounding all of ``boundary``.
    """
    verts = [SurfaceVertex(f"S{i}", [Component("c", g, frozenset(boundary))]) for i, g in enumerate(genera)]
    edges = [TunnelingEdge(f"S{i}", f"S{j}", [Part({"c"}, {"c"}, t)], id=f"e{i}_{j}")
             for (i, j), t in sorted(taus.items())]
    return TunnelingGraph(algebra, tuple(boundary), verts, edges)


def local_connected_closed_form(T, order=None, ring="q"):
    """⊕_S V/𝔨^{ρ(S)} with ρ(S) = min τ over edges to lower-ordered surfaces.

    The first surface (and any surface without lower neighbours) contributes V.
    """
    T.validate()
    for v in T.vertices:
        if len(v.components) != 1:
            raise ValidationError(f"vertex {v.id!r} is not a connected surface")
    order = list(order) if order is not None else [v.id for v in T.vertices]
    pos = {v: i for i, v in enumerate(order)}
    rho = {v: None for v in order}
    for e in T.edges:
        if len(e.parts) != 1:
            raise ValidationError(f"edge {e.id!r} between connected surfaces must have one part")
        lo, hi = sorted((e.src, e.dst), key=pos.get)
        if lo == hi:
            continue
        t = e.parts[0].tau
        rho[hi] = t if rho[hi] is None else min(rho[hi], t)
    total = ModuleInvariants(0)
    full = ModuleInvariants(T.algebra.rank)
    for v in order:
        total = total + (full if rho[v] is None else quotient_by_handle(T.algebra, rho[v], ring))
    return total


# ---------------------------------------------------------------------------
# Σ×I


def sigma_I_graph(algebra, genus, parity, max_k):
    """Parallel copies of a closed genus-``genus`` surface, k ≡ parity (mod 2), k ≤ max_k.

    Edges go from S_{k+2} to S_k, one per position of the adjacent pair that is
    tubed together; loops realize all permutations of the parallel copies.
    """
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    ks = [k for k in range(parity, max_k + 1, 2)]
    lab = lambda i: f"c{i}"  # noqa: E731
    verts = [SurfaceVertex(f"S{k}", [Component(lab(i), genus) for i in range(k)]) for k in ks]
    edges, loops = [], []
    for k in ks:
        if k + 2 > max_k:
            continue
        for i in range(k + 1):
            parts = [Part({lab(i), lab(i + 1)}, set(), 0)]
            for j in range(k):
                parts.append(Part({lab(j if j < i else j + 2)}, {lab(j)}, 0))
            edges.append(TunnelingEdge(f"S{k + 2}", f"S{k}", parts, id=f"t{k + 2}_{i}"))
    for k in ks:
        for n, perm in enumerate(permutations(range(k))):
            if list(perm) == list(range(k)):
                continue
            loops.append(LoopEdge(f"S{k}", {lab(i): lab(p) for i, p in enumerate(perm)}, id=f"pi{k}_{n}"))
    return TunnelingGraph(algebra, (), verts, edges, loops)


def sigma_I_dimensions(algebra, genus, max_degree):
    """Dimension of the Σ×I module truncated at each degree 0..max_degree."""
    return [present(sigma_I_graph(algebra, genus, d % 2, d), "q").invariants.free_rank
            for d in range(max_degree + 1)]


def _field_check(algebra):
    if algebra.ring.kind == "poly_int":
        raise StructuralError("this computation needs field scalars (use an integer or rational algebra)")


def tensor_algebra_oracle(algebra, genus, max_degree):
    """Dimensions of T(V)/R cut at each degree ``d``.

    At cut ``d`` the space is ⊕_{k ≤ d, k ≡ d} V^{⊗k} and R is spanned by
    ``w1⊗Δ(v)⊗w2 − ε(𝔨^{2g} v)·w1⊗w2`` and ``w − σw`` for adjacent
    transpositions σ, computed directly on positional words.
    """
    _field_check(algebra)
    r = algebra.rank
    kpow = algebra.handle_element()
    for _ in range(2 * genus - 1):
        kpow = algebra.multiply(kpow, algebra.handle_element())
    if genus == 0:
        scal = list(algebra.counit)
    else:
        scal = [algebra.counit_value(algebra.multiply(kpow, algebra.basis_element(i))) for i in range(r)]
    dims = []
    for d in range(max_degree + 1):
        degrees = list(range(d % 2, d + 1, 2))
        keys = [w for k in degrees for w in _words(r, k)]
        span = Span(keys)
        for k in degrees:
            for w in _words(r, k):
                for i in range(k - 1):
                    sw = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                    if sw != w:
                        span.add({w: 1, sw: -1})
            if k + 2 > d:
                continue
            for w in _words(r, k):
                for i in range(k + 1):
                    for v in range(r):
                        vec = {}
                        for (a, b), c in algebra.comul[v].items():
                            key = w[:i] + (a, b) + w[i:]
                            vec[key] = vec.get(key, 0) + c
                        if scal[v]:
                            vec[w] = vec.get(w, 0) - scal[v]
                        span.add({x: y for x, y in vec.items() if y})
        dims.append(len(keys) - span.dimension)
    return dims


def _words(r, k):
    if k == 0:
        return [()]
    return [w + (i,) for w in _words(r, k - 1) for i in range(r)]


# ---------------------------------------------------------------------------
# unorientable module (SV)₋


def _monomials(r, max_deg, parity=None):
    out = []
    for d in range(max_deg + 1):
        if parity is not None and d % 2 != parity:
            continue
        out += list(combinations_with_replacement(range(r), d))
    return out


def _sym_relations(algebra):
    """Per basis vector v: symmetrized Δ(v) − ε(𝔨v) as dict monomial -> coefficient."""
    kv = algebra.handle_element()
    rels = []
    for v in range(algebra.rank):
        vec = {}
        for (a, b), c in algebra.comul[v].items():
            m = tuple(sorted((a, b)))
            vec[m] = vec.get(m, 0) + c
        s = algebra.counit_value(algebra.multiply(kv, algebra.basis_element(v)))
        if s:
            vec[()] = vec.get((), 0) - s
        rels.append({m: c for m, c in vec.items() if c})
    return rels


def _times(mono, rel):
    return {tuple(sorted(mono + m)): c for m, c in rel.items()}


def _ideal_matrix(algebra, D):
    monos = _monomials(algebra.rank, D)
    cols, data = [], {}
    for rel in _sym_relations(algebra):
        if not rel:
            continue
        for m in _monomials(algebra.rank, D - 2):
            key = (len(cols),)
            cols.append(key)
            data[key] = _times(m, rel)
    return SparseMatrix(monos, cols, data)


def _rewrite_dimension(algebra, D):
    """Dimension via rewrite rules: leading monomial (degree, then lex) → tail."""
    rules = {}
    order = lambda m: (len(m), m)  # noqa: E731

    def reduce(vec):
        vec = {m: Fraction(c) for m, c in vec.items() if c}
        while True:
            heads = [m for m in vec if m in rules]
            if not heads:
                return vec
            m = max(heads, key=order)
            c = vec.pop(m)
            for t, v in rules[m].items():
                s = vec.get(t, 0) + c * v
                if s:
                    vec[t] = s
                else:
                    vec.pop(t, None)

    for rel in _sym_relations(algebra):
        for m in _monomials(algebra.rank, D - 2):
            vec = reduce(_times(m, rel))
            if not vec:
                continue
            head = max(vec, key=order)
            lead = vec.pop(head)
            tail = {t: -v / lead for t, v in vec.items()}
            # keep every rule fully reduced so heads never reappear in tails
            for h, body in rules.items():
                if head in body:
                    c = body.pop(head)
                    for t, v in tail.items():
                        s = body.get(t, 0) + c * v
                        if s:
                            body[t] = s
                        else:
                            body.pop(t, None)
            rules[head] = tail
    return len(_monomials(algebra.rank, D)) - len(rules)


def unorientable_dimensions(algebra, max_degree, method="ideal"):
    """Dimension of (SV)₋ cut at each degree 0..max_degree."""
    _field_check(algebra)
    out = []
    for D in range(max_degree + 1):
        if method == "ideal":
            mat = _ideal_matrix(algebra, D)
            out.append(cokernel_invariants(mat, mat.rows, "q").free_rank)
        elif method == "rewrite":
            out.append(_rewrite_dimension(algebra, D))
        else:
            raise ValueError(f"unknown method {method!r}")
    return out


def unorientable_module(algebra, n, max_degree, ring="q"):
    """Invariants of (SV)₋ ⊗ V^{⊗n}, cut at each degree 0..max_degree."""
    if ring in ("z", "Z") and algebra.ring.kind == "poly_int":
        raise StructuralError("integer invariants need an integer algebra")
    factor = algebra.rank ** n
    out = []
    for D in range(max_degree + 1):
        mat = _ideal_matrix(algebra, D)
        out.append(cokernel_invariants(mat, mat.rows, ring).tensor_free(factor))
    return out
