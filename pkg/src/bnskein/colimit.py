"""Colimits of functors from finite directed multigraphs to free modules.

The colimit of ``F`` is the direct sum of the vertex modules modulo
``v - F(a)v`` for every edge ``a``.  Given a terminal vertex set ``T`` (every
vertex has a path into ``T``) the same module is presented with generators at
``T`` only, and relations ``G(a)v - G(a')v`` for pairs of paths ``a: c → t``,
``a': c → t'``.  Paths are enumerated backwards from ``T``; a path is only
extended while it contributes a new relation, which makes the enumeration
reach a fixpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .exactalg import (
    Lattice,
    Span,
    SparseMatrix,
    StructuralError,
    cokernel_invariants,
)
from .linmap import LinMap, tensor_keys

__all__ = [
    "FunctorGraph",
    "Edge",
    "Presentation",
    "colim_bruteforce",
    "colim_terminal",
    "pushout_relation",
    "pushout_quotient_invariants",
    "delete_left_invertible",
    "SpanPair",
    "Reduction",
    "pullback_reduce",
    "colim_spans",
    "NotTerminalError",
]


class NotTerminalError(StructuralError):
    """Some vertex has no directed path into the proposed terminal set."""


def _matrix(m):
    return m.mat if isinstance(m, LinMap) else m


@dataclass
class Edge:
    id: str
    src: str
    dst: str
    map: SparseMatrix


class FunctorGraph:
    """Finite directed multigraph with free modules at vertices and matrices on edges."""

    def __init__(self, ring="q"):
        self.ring = ring
        self.vertices = {}
        self.labels = {}
        self.edges = []

    def add_vertex(self, vid, module, algebra=None):
        """``module``: a rank, a list of basis keys, or a TensorObject (needs ``algebra``)."""
        if vid in self.vertices:
            raise StructuralError(f"duplicate vertex {vid!r}")
        if isinstance(module, int):
            keys = tuple(range(module))
        elif hasattr(module, "K"):
            if algebra is None:
                raise StructuralError("tensor-object vertices need an algebra")
            keys = tuple(tensor_keys(algebra.rank, len(module.K)))
            self.labels[vid] = tuple(module.K)
        else:
            keys = tuple(module)
        self.vertices[vid] = keys
        return self

    def add_edge(self, eid, src, dst, m):
        for v in (src, dst):
            if v not in self.vertices:
                raise StructuralError(f"edge {eid!r}: unknown vertex {v!r}")
        if isinstance(m, LinMap):
            if src in self.labels and m.dom != self.labels[src]:
                raise StructuralError(f"edge {eid!r}: map domain {m.dom} != labels of {src!r}")
            if dst in self.labels and m.cod != self.labels[dst]:
                raise StructuralError(f"edge {eid!r}: map codomain {m.cod} != labels of {dst!r}")
        mat = _matrix(m)
        if set(mat.cols) != set(self.vertices[src]) or set(mat.rows) != set(self.vertices[dst]):
            raise StructuralError(f"edge {eid!r}: matrix shape does not match its vertices")
        self.edges.append(Edge(eid, src, dst, mat))
        return self

    def copy(self):
        g = FunctorGraph(self.ring)
        g.vertices = dict(self.vertices)
        g.labels = dict(self.labels)
        g.edges = list(self.edges)
        return g

    def ambient(self, vids=None):
        vids = sorted(self.vertices) if vids is None else list(vids)
        return [(v, k) for v in vids for k in self.vertices[v]]

    def total_rank(self):
        return sum(len(k) for k in self.vertices.values())


@dataclass
class Presentation:
    """Generators (vertex blocks) and a relation matrix into their direct sum."""

    blocks: list
    relations: SparseMatrix
    ring: str = "q"
    truncated: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def ambient(self):
        return [(v, k) for v, _, keys in self.blocks for k in keys]

    def invariants(self):
        return cokernel_invariants(self.relations, self.ambient, self.ring)

    @property
    def relation_count(self):
        return len(self.relations.cols)


def _block_vector(vid, col):
    return {(vid, r): v for r, v in col.items()}


def colim_bruteforce(G, ring=None):
    """Generators at every vertex, relations ``v - F(a)v`` per edge and basis vector."""
    ring = ring or G.ring
    vids = sorted(G.vertices)
    rows = G.ambient(vids)
    data = {}
    cols = []
    for e in G.edges:
        for c in G.vertices[e.src]:
            vec = {(e.src, c): 1}
            for r, v in e.map.column(c).items():
                key = (e.dst, r)
                vec[key] = vec.get(key, 0) - v
            cols.append((e.id, c))
            data[(e.id, c)] = vec
    rel = SparseMatrix(rows, cols, data)
    pres = Presentation([(v, len(G.vertices[v]), G.vertices[v]) for v in vids], rel, ring)
    return pres, pres.invariants()


def _check_terminal(G, T):
    into = {v: [] for v in G.vertices}
    for e in G.edges:
        into[e.dst].append(e.src)
    seen = set(T)
    queue = deque(T)
    while queue:
        v = queue.popleft()
        for u in into[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    missing = sorted(set(G.vertices) - seen)
    if missing:
        raise NotTerminalError(f"vertex {missing[0]!r} has no path into the terminal set")


def colim_terminal(G, T, ring=None, max_length=None):
    """Colimit presented by the modules at the terminal set ``T``."""
    ring = ring or G.ring
    T = list(dict.fromkeys(T))
    for t in T:
        if t not in G.vertices:
            raise StructuralError(f"unknown terminal vertex {t!r}")
    _check_terminal(G, T)
    if max_length is None:
        max_length = 2 * len(G.vertices)
    rows = G.ambient(T)
    integral = ring in ("z", "Z", "ZZ", "int")
    span = Lattice(rows) if integral else Span(rows)
    into = {v: [] for v in G.vertices}
    for e in G.edges:
        into[e.dst].append(e)
    ref = {}
    queue = deque()
    for t in T:
        keys = G.vertices[t]
        m = SparseMatrix(rows, keys, {k: {(t, k): 1} for k in keys}, check=False)
        ref[t] = m
        queue.append((t, m, 0, True))
    paths = pruned = 0
    truncated = False
    while queue:
        c, m, length, is_ref = queue.popleft()
        paths += 1
        grew = False
        if not is_ref:
            r = ref[c]
            for k in G.vertices[c]:
                diff = dict(m.column(k))
                for key, v in r.column(k).items():
                    s = diff.get(key, 0) - v
                    if s:
                        diff[key] = s
                    else:
                        diff.pop(key, None)
                if diff and span.add(diff):
                    grew = True
            if not grew:
                pruned += 1
                continue
        if length >= max_length:
            truncated = True
            continue
        for e in into[c]:
            nm = m @ e.map
            if e.src not in ref:
                ref[e.src] = nm
                queue.append((e.src, nm, length + 1, True))
            else:
                queue.append((e.src, nm, length + 1, False))
    basis = span.basis()
    cols = list(range(len(basis)))
    rel = SparseMatrix(rows, cols, dict(zip(cols, basis)), check=False)
    pres = Presentation([(t, len(G.vertices[t]), G.vertices[t]) for t in T], rel, ring,
                        truncated=truncated, stats={"paths": paths, "pruned": pruned})
    return pres, pres.invariants()


def pushout_relation(a, a2, same_target=False, tags=("t", "t'")):
    """Columns ``a e_i ⊖ a' e_i`` (a single block when ``same_target``)."""
    a, a2 = _matrix(a), _matrix(a2)
    if set(a.cols) != set(a2.cols):
        raise StructuralError("pushout relation: domains differ")
    if same_target:
        if set(a.rows) != set(a2.rows):
            raise StructuralError("pushout relation: targets differ")
        return a - a2.select_columns(a.cols)
    rows = [(tags[0], r) for r in a.rows] + [(tags[1], r) for r in a2.rows]
    data = {}
    for c in a.cols:
        vec = {(tags[0], r): v for r, v in a.column(c).items()}
        for r, v in a2.column(c).items():
            vec[(tags[1], r)] = -v
        data[c] = vec
    return SparseMatrix(rows, a.cols, data, check=False)


def pushout_quotient_invariants(f, g, ring="q"):
    """Invariants of (V^{⊗n} ⊕ V^{⊗m}) / {f(v) ⊖ g(v)}."""
    rel = pushout_relation(f, g)
    return cokernel_invariants(rel, rel.rows, ring)


def delete_left_invertible(G):
    """Remove edges ``a: c → d`` having an edge ``b: d → c`` with ``F(b)F(a) = Id``."""
    out = G.copy()
    i = 0
    while i < len(out.edges):
        a = out.edges[i]
        ident = SparseMatrix.identity(G.vertices[a.src])
        if any(b is not a and b.src == a.dst and b.dst == a.src and (b.map @ a.map) == ident
               for b in out.edges):
            del out.edges[i]
        else:
            i += 1
    return out


# ---------------------------------------------------------------------------
# spans and the pullback principle


@dataclass
class SpanPair:
    """Span ``s ← c → u`` contributing the relations ``l(v) - r(v)``."""

    id: str
    s: str
    u: str
    l: SparseMatrix
    r: SparseMatrix

    def __post_init__(self):
        self.l, self.r = _matrix(self.l), _matrix(self.r)
        if set(self.l.cols) != set(self.r.cols):
            raise StructuralError(f"span {self.id!r}: legs have different domains")


@dataclass
class Reduction:
    """Claim that span ``target`` factors as ``first`` then ``second``.

    ``first = (s ← c → t)``, ``second = (t ← c' → u)``; ``p: c'' → c`` and
    ``q: c'' → c'`` must satisfy ``l = l1 p``, ``r1 p = l2 q``, ``r = r2 q``.
    """

    target: str
    first: str
    second: str
    p: SparseMatrix
    q: SparseMatrix

    def __post_init__(self):
        self.p, self.q = _matrix(self.p), _matrix(self.q)


def _eq(a, b):
    try:
        return a == b
    except StructuralError:
        return False


def _verify(red, spans):
    x, a, b = spans[red.target], spans[red.first], spans[red.second]
    if a.s != x.s or b.u != x.u or a.u != b.s:
        return False
    try:
        return (_eq(x.l, a.l @ red.p) and _eq(a.r @ red.p, b.l @ red.q)
                and _eq(x.r, b.r @ red.q))
    except StructuralError:
        return False


def pullback_reduce(spans, reductions):
    """Drop spans whose relations follow from verified factorizations.

    Returns ``(kept spans, rejected reductions)``.  A span is dropped only if
    its witness verifies exactly and both factor spans are themselves kept.
    """
    by_id = {s.id: s for s in spans}
    dropped = set()
    rejected = []
    for red in reductions:
        if red.target not in by_id or red.first not in by_id or red.second not in by_id:
            rejected.append(red)
            continue
        if red.target in (red.first, red.second) or red.first in dropped or red.second in dropped:
            rejected.append(red)
            continue
        if not _verify(red, by_id):
            rejected.append(red)
            continue
        dropped.add(red.target)
    return [s for s in spans if s.id not in dropped], rejected


def colim_spans(vertices, spans, ring="q"):
    """Invariants of ⊕ vertices / {l(v) - r(v)} over the given spans."""
    vids = sorted(vertices)
    rows = [(v, k) for v in vids for k in vertices[v]]
    data = {}
    cols = []
    for sp in spans:
        for c in sp.l.cols:
            vec = _block_vector(sp.s, sp.l.column(c))
            for r, v in sp.r.column(c).items():
                key = (sp.u, r)
                s = vec.get(key, 0) - v
                if s:
                    vec[key] = s
                else:
                    vec.pop(key, None)
            cols.append((sp.id, c))
            data[(sp.id, c)] = vec
    rel = SparseMatrix(rows, cols, data)
    pres = Presentation([(v, len(vertices[v]), tuple(vertices[v])) for v in vids], rel, ring)
    return pres, pres.invariants()

