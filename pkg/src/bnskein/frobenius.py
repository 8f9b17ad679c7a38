"""Finite-rank commutative Frobenius algebras over exact rings.

An algebra is stored by its structure tensors on a fixed basis ``e_0..e_{r-1}``:

* ``mul[i][j]``   coordinates of ``e_i e_j``
* ``comul[i]``    dict ``(j, k) -> c`` with ``Δ(e_i) = Σ c e_j ⊗ e_k``
* ``counit[i]``   ``ε(e_i)``
* ``unit``        coordinates of ``1``

The handle element is ``𝔨 = m∘Δ(1)``; multiplication by it is the handle
operator.  The families ``d_n`` (iterated comultiplication), ``eps_n``
(counit on all but the last factor) and ``m_n`` (iterated multiplication) are
returned as label-keyed :class:`~bnskein.linmap.LinMap` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .exactalg import ZZ, StructuralError, determinant, inverse, poly_ring
from .linmap import LinMap

__all__ = [
    "FrobeniusAlgebra",
    "AlgebraElement",
    "AxiomReport",
    "DegeneratePairingError",
    "derive_comul",
    "builtin",
    "BUILTIN_NAMES",
    "positional",
]

BUILTIN_NAMES = ("trivial", "khovanov", "homology_s2", "universal_quadratic")


class DegeneratePairingError(ArithmeticError):
    """The Gram matrix ε(e_i e_j) is not invertible over the ring."""


def positional(n, prefix=""):
    """Default labels ``"0", "1", ...`` for positional tensor powers."""
    return tuple(f"{prefix}{i}" for i in range(n))


def _axpy(acc, vec, c=1):
    for k, v in vec.items():
        s = acc.get(k, 0) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)
    return acc


@dataclass
class AxiomFailure:
    axiom: str
    indices: tuple
    lhs: dict
    rhs: dict

    def __str__(self):
        return f"{self.axiom} fails at basis {self.indices}: {self.lhs} != {self.rhs}"


@dataclass
class AxiomReport:
    passed: bool
    failures: list = field(default_factory=list)

    def failed_axioms(self):
        return sorted({f.axiom for f in self.failures})

    def __bool__(self):
        return self.passed


def derive_comul(ring, mul, counit, unit=None):
    """Comultiplication forced by the Frobenius form ``𝔭 = ε∘m``.

    ``Δ(v) = Σ_{ij} (G⁻¹)_{ij} (v e_i) ⊗ e_j`` where ``G_{ij} = ε(e_i e_j)``.
    """
    r = len(counit)
    gram = [[sum((mul[i][j][k] * counit[k] for k in range(r)), ring.zero) for j in range(r)]
            for i in range(r)]
    det = determinant(gram)
    if not det or not ring.is_unit(det):
        raise DegeneratePairingError(f"degenerate pairing: Gram determinant {det} is not a unit in {ring}")
    ginv = inverse(gram, ring)
    comul = []
    for v in range(r):
        out = {}
        for i in range(r):
            for j in range(r):
                g = ginv[i][j]
                if not g:
                    continue
                for k, c in enumerate(mul[v][i]):
                    if c:
                        _axpy(out, {(k, j): ring.coerce(g * c)})
        comul.append(out)
    return comul


class FrobeniusAlgebra:
    """Commutative Frobenius algebra given by structure tensors."""

    def __init__(self, ring, basis, mul, counit, unit, comul=None, name=None, verify=True):
        self.ring = ring
        self.basis = tuple(str(b) for b in basis)
        r = len(self.basis)
        if r < 1:
            raise StructuralError("algebra rank must be positive")
        if len(set(self.basis)) != r:
            raise StructuralError("duplicate basis names")
        if len(mul) != r or any(len(row) != r for row in mul):
            raise StructuralError(f"mul must be {r}x{r}")
        for i, row in enumerate(mul):
            for j, vec in enumerate(row):
                if len(vec) != r:
                    raise StructuralError(f"mul[{i}][{j}] has length {len(vec)}, expected {r}")
        if len(counit) != r:
            raise StructuralError(f"counit has length {len(counit)}, expected {r}")
        if len(unit) != r:
            raise StructuralError(f"unit has length {len(unit)}, expected {r}")
        self.mul = tuple(tuple(tuple(ring.coerce(c) for c in vec) for vec in row) for row in mul)
        self.counit = tuple(ring.coerce(c) for c in counit)
        self.unit = tuple(ring.coerce(c) for c in unit)
        self.comul_derived = comul is None
        if comul is None:
            comul = derive_comul(ring, self.mul, self.counit, self.unit)
        if len(comul) != r:
            raise StructuralError(f"comul has {len(comul)} entries, expected {r}")
        clean = []
        for i, terms in enumerate(comul):
            d = {}
            items = terms.items() if isinstance(terms, dict) else ((tuple(t[:2]), t[2]) for t in terms)
            for (j, k), c in items:
                if not (0 <= j < r and 0 <= k < r):
                    raise StructuralError(f"comul[{i}] index ({j},{k}) out of range")
                _axpy(d, {(j, k): ring.coerce(c)})
            clean.append(d)
        self.comul = tuple(clean)
        self.name = name
        self.verified = False
        if verify:
            report = self.verify_axioms()
            if not report.passed:
                raise StructuralError("algebra fails axioms: " + "; ".join(map(str, report.failures[:3])))

    # basic data ---------------------------------------------------------

    @property
    def rank(self):
        return len(self.basis)

    def __repr__(self):
        return f"FrobeniusAlgebra({self.name or ','.join(self.basis)}, rank={self.rank}, ring={self.ring})"

    def structurally_equal(self, other):
        return (
            self.ring == other.ring
            and self.basis == other.basis
            and self.mul == other.mul
            and self.comul == other.comul
            and self.counit == other.counit
            and self.unit == other.unit
        )

    def element(self, coords):
        return AlgebraElement(self, coords)

    def basis_element(self, i):
        return AlgebraElement(self, [self.ring.one if j == i else self.ring.zero for j in range(self.rank)])

    # vector level operations (dicts index -> scalar) --------------------

    def _mul_vec(self, a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                for k, c in enumerate(self.mul[i][j]):
                    if c:
                        _axpy(out, {k: x * y * c})
        return out

    def _comul_vec(self, a):
        out = {}
        for i, x in a.items():
            _axpy(out, self.comul[i], x)
        return out

    def _counit_vec(self, a):
        return sum((x * self.counit[i] for i, x in a.items()), self.ring.zero)

    def _vec(self, coords):
        return {i: c for i, c in enumerate(coords) if c}

    def _coords(self, vec):
        return [vec.get(i, self.ring.zero) for i in range(self.rank)]

    # element operations -------------------------------------------------

    def multiply(self, a, b):
        a, b = self._as_element(a), self._as_element(b)
        return AlgebraElement(self, self._coords(self._mul_vec(self._vec(a.coords), self._vec(b.coords))))

    def comultiply(self, a):
        """Δ(a) as a dict ``(j, k) -> scalar``."""
        a = self._as_element(a)
        return self._comul_vec(self._vec(a.coords))

    def counit_value(self, a):
        return self._counit_vec(self._vec(self._as_element(a).coords))

    def one(self):
        return AlgebraElement(self, self.unit)

    def handle_element(self):
        d = self._comul_vec(self._vec(self.unit))
        out = {}
        for (j, k), c in d.items():
            _axpy(out, self._mul_vec({j: 1}, {k: 1}), c)
        return AlgebraElement(self, self._coords(out))

    def handle_apply(self, a, power=1):
        a = self._as_element(a)
        k = self.handle_element()
        for _ in range(power):
            a = self.multiply(k, a)
        return a

    def _as_element(self, a):
        if isinstance(a, AlgebraElement):
            if a.algebra is not self and a.algebra.rank != self.rank:
                raise StructuralError("element of a different algebra")
            return a
        return AlgebraElement(self, a)

    # structure maps as LinMaps -----------------------------------------

    def _linmap(self, dom, cod, column):
        dom, cod = tuple(dom), tuple(cod)
        cols = {}
        for key in product(range(self.rank), repeat=len(dom)):
            col = column(key)
            if col:
                cols[key] = col
        return LinMap.from_columns(self.ring, self.rank, dom, cod, cols)

    def identity(self, labels=("0",)):
        return LinMap.identity(self.ring, self.rank, tuple(sorted(labels)))

    def scalar_map(self, c):
        return LinMap.scalar(self.ring, self.rank, c)

    def mul_map(self, a="0", b="1", out="0"):
        return self._linmap((a, b), (out,), lambda k: {(i,): c for i, c in enumerate(self.mul[k[0]][k[1]]) if c})

    def comul_map(self, inp="0", out1="0", out2="1"):
        return self._linmap((inp,), (out1, out2), lambda k: dict(self.comul[k[0]]))

    def counit_map(self, inp="0"):
        return self._linmap((inp,), (), lambda k: {(): self.counit[k[0]]} if self.counit[k[0]] else {})

    def unit_map(self, out="0"):
        return self._linmap((), (out,), lambda k: {(i,): c for i, c in enumerate(self.unit) if c})

    def handle_map(self, label="0", power=1):
        """Multiplication by 𝔨^power on the factor ``label``."""
        kp = self._vec(self.unit)
        kv = self._vec(self.handle_element().coords)
        for _ in range(power):
            kp = self._mul_vec(kv, kp)
        return self._linmap((label,), (label,),
                            lambda k: {(i,): c for i, c in self._mul_vec(kp, {k[0]: 1}).items()})

    def d_n(self, n, inp="0", outs=None):
        """Iterated comultiplication V → V^{⊗n}; ``d_0 = ε``, ``d_1 = Id``.

        Defined by ``d_n = (Δ ⊗ Id^{⊗(n-2)}) ∘ d_{n-1}`` with the new factor
        appended last.
        """
        if n < 0:
            raise ValueError("n must be nonnegative")
        outs = positional(n) if outs is None else tuple(outs)
        if len(outs) != n:
            raise StructuralError(f"d_{n} needs {n} output labels")
        if n == 0:
            return self.counit_map(inp)

        def column(key):
            terms = {key: 1}
            for _ in range(n - 1):
                nxt = {}
                for word, c in terms.items():
                    for (j, k), v in self.comul[word[0]].items():
                        w = (j,) + word[1:] + (k,)
                        _axpy(nxt, {w: c * v})
                terms = nxt
            return terms

        return self._linmap((inp,), outs, column)

    def eps_n(self, n, ins=None, out="0"):
        """ε on the first n−1 factors, identity on the last: V^{⊗n} → V."""
        if n < 1:
            raise ValueError("eps_n needs n >= 1")
        ins = positional(n) if ins is None else tuple(ins)
        if len(ins) != n:
            raise StructuralError(f"eps_{n} needs {n} input labels")

        def column(key):
            c = self.ring.one
            for i in key[:-1]:
                c = c * self.counit[i]
            return {(key[-1],): c} if c else {}

        return self._linmap(ins, (out,), column)

    def m_n(self, n, ins=None, out="0"):
        """Iterated multiplication V^{⊗n} → V; ``m_0 = μ``, ``m_1 = Id``."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        ins = positional(n) if ins is None else tuple(ins)
        if len(ins) != n:
            raise StructuralError(f"m_{n} needs {n} input labels")

        def column(key):
            acc = self._vec(self.unit)
            for i in key:
                acc = self._mul_vec(acc, {i: 1})
            return {(i,): c for i, c in acc.items()}

        return self._linmap(ins, (out,), column)

    def gram(self):
        r = self.rank
        return [[self._counit_vec(self._mul_vec({i: 1}, {j: 1})) for j in range(r)] for i in range(r)]

    # axioms -------------------------------------------------------------

    def verify_axioms(self, max_failures=None):
        r = self.rank
        fails = []

        def check(name, idx, lhs, rhs):
            if lhs != rhs:
                fails.append(AxiomFailure(name, idx, lhs, rhs))

        e = [{i: self.ring.one} for i in range(r)]
        unit = self._vec(self.unit)
        for i in range(r):
            check("unit", (i,), self._mul_vec(unit, e[i]), e[i])
            check("unit", (i,), self._mul_vec(e[i], unit), e[i])
            for j in range(r):
                check("commutativity", (i, j), self._mul_vec(e[i], e[j]), self._mul_vec(e[j], e[i]))
                for k in range(r):
                    check("associativity", (i, j, k),
                          self._mul_vec(self._mul_vec(e[i], e[j]), e[k]),
                          self._mul_vec(e[i], self._mul_vec(e[j], e[k])))
        for i in range(r):
            d = self.comul[i]
            check("cocommutativity", (i,), d, {(k, j): c for (j, k), c in d.items()})
            left, right = {}, {}
            for (j, k), c in d.items():
                for (a, b), v in self.comul[j].items():
                    _axpy(left, {(a, b, k): c * v})
                for (a, b), v in self.comul[k].items():
                    _axpy(right, {(j, a, b): c * v})
            check("coassociativity", (i,), left, right)
            cl, cr = {}, {}
            for (j, k), c in d.items():
                _axpy(cl, {k: c * self.counit[j]})
                _axpy(cr, {j: c * self.counit[k]})
            check("counit", (i,), cl, e[i])
            check("counit", (i,), cr, e[i])
        # Frobenius condition (m ⊗ Id)(Id ⊗ Δ) = Δ ∘ m on e_i ⊗ e_j
        for i in range(r):
            for j in range(r):
                lhs = {}
                for (a, b), c in self.comul[j].items():
                    for k, v in self._mul_vec(e[i], e[a]).items():
                        _axpy(lhs, {(k, b): c * v})
                rhs = self._comul_vec(self._mul_vec(e[i], e[j]))
                check("frobenius", (i, j), lhs, rhs)
        # weak Frobenius compatibility (Id ⊗ 𝔨)∘Δ = Δ∘𝔨
        if not any(f.axiom in ("unit", "associativity") for f in fails):
            kv = self._vec(self.handle_element().coords)
            for i in range(r):
                lhs = {}
                for (a, b), c in self.comul[i].items():
                    for k, v in self._mul_vec(kv, e[b]).items():
                        _axpy(lhs, {(a, k): c * v})
                check("handle-compatibility", (i,), lhs, self._comul_vec(self._mul_vec(kv, e[i])))
        report = AxiomReport(not fails, fails[:max_failures] if max_failures else fails)
        self.verified = report.passed
        return report

    # change of rings ----------------------------------------------------

    def specialize(self, point, ring=ZZ, name=None):
        """Substitute values for the polynomial variables."""
        if self.ring.kind != "poly_int":
            raise StructuralError("only polynomial algebras can be specialized")
        f = lambda c: ring.coerce(c.evaluate(point))  # noqa: E731
        mul = [[[f(c) for c in vec] for vec in row] for row in self.mul]
        comul = [{jk: f(c) for jk, c in d.items()} for d in self.comul]
        return FrobeniusAlgebra(ring, self.basis, mul, [f(c) for c in self.counit],
                                [f(c) for c in self.unit], comul=comul,
                                name=name or f"{self.name}@{point}")

    def over(self, ring):
        """Same structure constants read in another ring (e.g. ZZ → QQ)."""
        mul = [[[ring.coerce(c) for c in vec] for vec in row] for row in self.mul]
        comul = [{jk: ring.coerce(c) for jk, c in d.items()} for d in self.comul]
        return FrobeniusAlgebra(ring, self.basis, mul, [ring.coerce(c) for c in self.counit],
                                [ring.coerce(c) for c in self.unit], comul=comul, name=self.name)


class AlgebraElement:
    """Element of a Frobenius algebra in basis coordinates."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords):
        coords = tuple(algebra.ring.coerce(c) for c in coords)
        if len(coords) != algebra.rank:
            raise StructuralError(f"element has {len(coords)} coordinates, algebra rank {algebra.rank}")
        self.algebra = algebra
        self.coords = coords

    def __add__(self, other):
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra.multiply(self, other)
        return AlgebraElement(self.algebra, [a * other for a in self.coords])

    def __rmul__(self, c):
        return AlgebraElement(self.algebra, [a * c for a in self.coords])

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.coords == other.coords
        return NotImplemented

    __hash__ = None

    def is_zero(self):
        return not any(self.coords)

    def __repr__(self):
        terms = [f"{_coef(c)}*{b}" for c, b in zip(self.coords, self.algebra.basis) if c]
        return " + ".join(terms) if terms else "0"


def _coef(c):
    s = str(c)
    return f"({s})" if any(op in s[1:] for op in "+-") else s


def format_tensor(algebra, vec):
    """``{(j, k): c}`` as a sum of basis tensors."""
    b = algebra.basis
    terms = [f"{_coef(c)}*{b[j]}⊗{b[k]}" for (j, k), c in sorted(vec.items()) if c]
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# built-in algebras


def _trivial():
    return FrobeniusAlgebra(ZZ, ["1"], [[[1]]], [1], [1], name="trivial")


def _khovanov():
    # R[x]/(x^2), ε(1) = 0, ε(x) = 1
    mul = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return FrobeniusAlgebra(ZZ, ["1", "x"], mul, [0, 1], [1, 0], name="khovanov")


def _homology_s2():
    # basis: "1" the point class in H_0, "b" the fundamental class (the unit)
    mul = [[[0, 0], [1, 0]], [[1, 0], [0, 1]]]
    return FrobeniusAlgebra(ZZ, ["1", "b"], mul, [1, 0], [0, 1], name="homology_s2")


def _universal_quadratic():
    ring = poly_ring("h", "t")
    h = ring.parse("h")
    t = ring.parse("t")
    z, o = ring.zero, ring.one
    # x^2 = t + h x
    mul = [[[o, z], [z, o]], [[z, o], [t, h]]]
    return FrobeniusAlgebra(ring, ["1", "x"], mul, [z, o], [o, z], name="universal_quadratic")


_BUILDERS = {
    "trivial": _trivial,
    "khovanov": _khovanov,
    "homology_s2": _homology_s2,
    "universal_quadratic": _universal_quadratic,
}
_CACHE = {}


def builtin(name):
    """One of the built-in algebras, axiom-checked on first use."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown built-in algebra {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]

