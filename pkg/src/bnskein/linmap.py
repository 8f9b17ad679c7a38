"""Linear maps between tensor powers of a fixed free module, keyed by labels.

A :class:`LinMap` goes from ``V^{⊗dom}`` to ``V^{⊗cod}`` where ``dom`` and
``cod`` are finite sets of labels.  Basis vectors of ``V^{⊗L}`` are tuples of
basis indices aligned with ``sorted(L)``; the positional order never carries
meaning, which makes permutation coherence automatic.
"""

from __future__ import annotations

from itertools import product

from .exactalg import SparseMatrix, StructuralError

__all__ = ["LinMap", "tensor_keys", "merge_keys_fn"]


def tensor_keys(dim, nlabels):
    return list(product(range(dim), repeat=nlabels))


def _sorted_labels(labels):
    labels = tuple(labels)
    out = tuple(sorted(labels))
    if len(set(out)) != len(out):
        raise StructuralError(f"duplicate labels {labels}")
    return out


def merge_keys_fn(labels1, labels2):
    """Return (merged labels, combine(k1, k2) -> merged key)."""
    merged = tuple(sorted(labels1 + labels2))
    if len(set(merged)) != len(merged):
        raise StructuralError(f"label sets overlap: {labels1} and {labels2}")
    where = {lab: (0, i) for i, lab in enumerate(labels1)}
    where.update({lab: (1, i) for i, lab in enumerate(labels2)})
    plan = tuple(where[lab] for lab in merged)

    def combine(k1, k2):
        src = (k1, k2)
        return tuple(src[s][i] for s, i in plan)

    return merged, combine


class LinMap:
    """Exact linear map V^{⊗dom} → V^{⊗cod}.

    ``mat`` is a :class:`SparseMatrix` whose rows are keys over ``cod`` and
    whose columns are keys over ``dom``.
    """

    __slots__ = ("ring", "dim", "dom", "cod", "mat")

    def __init__(self, ring, dim, dom, cod, mat):
        self.ring = ring
        self.dim = dim
        self.dom = _sorted_labels(dom)
        self.cod = _sorted_labels(cod)
        if tuple(dom) != self.dom or tuple(cod) != self.cod:
            raise StructuralError("LinMap labels must be given sorted")
        self.mat = mat

    # construction -------------------------------------------------------

    @classmethod
    def from_columns(cls, ring, dim, dom, cod, columns):
        """Build from ``columns``: dom-key -> {cod-key: scalar}.

        ``dom`` and ``cod`` may be unsorted; keys are then interpreted in the
        given order and re-sorted.
        """
        dom, cod = tuple(dom), tuple(cod)
        sdom, scod = tuple(sorted(dom)), tuple(sorted(cod))
        pd = [dom.index(lab) for lab in sdom]
        pc = [cod.index(lab) for lab in scod]
        data = {}
        for ck, col in columns.items():
            ck = tuple(ck[i] for i in pd)
            tgt = data.setdefault(ck, {})
            for rk, v in col.items():
                if v:
                    rk = tuple(rk[i] for i in pc)
                    tgt[rk] = tgt.get(rk, 0) + ring.coerce(v)
        mat = SparseMatrix(tensor_keys(dim, len(scod)), tensor_keys(dim, len(sdom)), data, check=False)
        return cls(ring, dim, sdom, scod, mat)

    @classmethod
    def identity(cls, ring, dim, labels):
        labels = _sorted_labels(labels)
        keys = tensor_keys(dim, len(labels))
        return cls(ring, dim, labels, labels, SparseMatrix.identity(keys, ring.one))

    @classmethod
    def zero(cls, ring, dim, dom, cod):
        dom, cod = _sorted_labels(dom), _sorted_labels(cod)
        return cls(ring, dim, dom, cod,
                   SparseMatrix(tensor_keys(dim, len(cod)), tensor_keys(dim, len(dom))))

    @classmethod
    def scalar(cls, ring, dim, c):
        return cls(ring, dim, (), (), SparseMatrix([()], [()], {(): {(): ring.coerce(c)}}))

    # structure ----------------------------------------------------------

    def _check_compat(self, other):
        if self.dim != other.dim or self.ring != other.ring:
            raise StructuralError("maps over different algebras")

    def compose(self, other):
        """``self ∘ other``."""
        self._check_compat(other)
        if other.cod != self.dom:
            raise StructuralError(f"cannot compose: {other.cod} into {self.dom}")
        return LinMap(self.ring, self.dim, other.dom, self.cod, self.mat @ other.mat)

    def __matmul__(self, other):
        return self.compose(other)

    def tensor(self, other):
        self._check_compat(other)
        dom, cd = merge_keys_fn(self.dom, other.dom)
        cod, cc = merge_keys_fn(self.cod, other.cod)
        data = {}
        for c1, col1 in self.mat.data.items():
            for c2, col2 in other.mat.data.items():
                data[cd(c1, c2)] = {
                    cc(r1, r2): v1 * v2 for r1, v1 in col1.items() for r2, v2 in col2.items()
                }
        mat = SparseMatrix(tensor_keys(self.dim, len(cod)), tensor_keys(self.dim, len(dom)),
                           data, check=False)
        return LinMap(self.ring, self.dim, dom, cod, mat)

    def relabel(self, dom_map=None, cod_map=None):
        """Rename labels (dicts old -> new; missing labels keep their name)."""
        dom_map = dom_map or {}
        cod_map = cod_map or {}
        nd = [dom_map.get(lab, lab) for lab in self.dom]
        nc = [cod_map.get(lab, lab) for lab in self.cod]
        sd, sc = _sorted_labels(nd), _sorted_labels(nc)
        pd = [nd.index(lab) for lab in sd]
        pc = [nc.index(lab) for lab in sc]
        if pd == list(range(len(pd))) and pc == list(range(len(pc))):
            return LinMap(self.ring, self.dim, sd, sc, self.mat)
        mat = self.mat.map_keys(
            row_map=lambda k: tuple(k[i] for i in pc),
            col_map=lambda k: tuple(k[i] for i in pd),
        )
        return LinMap(self.ring, self.dim, sd, sc, mat)

    def __add__(self, other):
        self._check_compat(other)
        if self.dom != other.dom or self.cod != other.cod:
            raise StructuralError("adding maps with different labels")
        return LinMap(self.ring, self.dim, self.dom, self.cod, self.mat + other.mat)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return LinMap(self.ring, self.dim, self.dom, self.cod, self.mat.scale(self.ring.coerce(c)))

    def map_scalars(self, ring, f):
        """Change of rings via ``f`` applied to every entry."""
        return LinMap(ring, self.dim, self.dom, self.cod,
                      self.mat.map_values(lambda v: ring.coerce(f(v))))

    def apply(self, vec):
        return self.mat.apply(vec)

    def is_zero(self):
        return self.mat.is_zero()

    def is_identity(self):
        return self.dom == self.cod and self == LinMap.identity(self.ring, self.dim, self.dom)

    def scalar_value(self):
        if self.dom or self.cod:
            raise StructuralError("not a scalar map")
        return self.mat[(), ()] if self.mat.data else self.ring.zero

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.dom == other.dom
            and self.cod == other.cod
            and self.mat == other.mat
        )

    __hash__ = None

    def triplets(self):
        """Sorted (row key, col key, value) listing of the nonzero entries."""
        return sorted(
            ((r, c, v) for c, col in self.mat.data.items() for r, v in col.items()),
            key=lambda t: (t[1], t[0]),
        )

    def __repr__(self):
        return f"LinMap({list(self.dom)} -> {list(self.cod)}, nnz={self.mat.nnz})"
