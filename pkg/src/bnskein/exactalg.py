"""Exact scalars and sparse linear algebra.

Three ring kinds are supported: the integers, the rationals and multivariate
polynomials with integer coefficients.  Integers and rationals are plain
Python ``int`` and ``fractions.Fraction``; polynomials are :class:`Poly`.
Nothing in this module ever touches floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd

__all__ = [
    "StructuralError",
    "Poly",
    "Ring",
    "ZZ",
    "QQ",
    "poly_ring",
    "ring_of",
    "add",
    "sub",
    "mul",
    "neg",
    "eq",
    "normalize",
    "divexact",
    "SparseMatrix",
    "ModuleInvariants",
    "rank",
    "smith_normal_form",
    "cokernel_invariants",
    "Span",
    "Lattice",
    "determinant",
    "inverse",
]


class StructuralError(ValueError):
    """Shape, index or ring-kind mismatch."""


# ---------------------------------------------------------------------------
# polynomials

_TERM_RE = re.compile(r"[+-]?[^+-]+")


class Poly:
    """Polynomial with integer coefficients over a fixed variable list.

    ``terms`` maps exponent tuples to nonzero integers.  Instances are
    immutable and hashable.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        clean = {}
        for e, c in (terms or {}).items():
            if isinstance(c, bool) or not isinstance(c, int):
                raise StructuralError(f"polynomial coefficient must be int, got {c!r}")
            if c:
                if len(e) != len(self.vars):
                    raise StructuralError(f"exponent {e} does not match variables {self.vars}")
                clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, vars, c):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars, name, power=1):
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = power
        return cls(vars, {tuple(e): 1})

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise StructuralError(f"variable lists differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return Poly.const(self.vars, other)
        raise StructuralError(f"cannot combine polynomial with {type(other).__name__}")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        try:
            other = self._lift(other)
        except StructuralError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        """Leading (exponent, coefficient) in lex order."""
        e = max(self.terms)
        return e, self.terms[e]

    def content(self):
        return reduce(gcd, self.terms.values(), 0)

    def exact_div(self, other):
        """Quotient ``self / other``; raises if the division is not exact."""
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        rem = self
        quot = {}
        le, lc = other.leading()
        while rem:
            e, c = rem.leading()
            if any(a < b for a, b in zip(e, le)) or c % lc:
                raise ArithmeticError(f"{self} is not divisible by {other}")
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c // lc
            quot[qe] = qc
            rem = rem - Poly(self.vars, {qe: qc}) * other
        return Poly(self.vars, quot)

    def evaluate(self, point):
        """Substitute ``point`` (var name -> number) for every variable."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(self.vars, e):
                if k:
                    term = term * point[v] ** k
            total = total + term
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f"{sign}{body}"
        return out

    def __repr__(self):
        return f"Poly({self.vars}, {str(self)!r})"

    @classmethod
    def parse(cls, text, vars):
        vars = tuple(vars)
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty polynomial string")
        terms = {}
        pos = 0
        for m in _TERM_RE.finditer(s):
            if m.start() != pos:
                raise ValueError(f"cannot parse polynomial {text!r}")
            pos = m.end()
            term = m.group()
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("+-")
            coeff = 1
            exps = [0] * len(vars)
            for factor in term.split("*"):
                if not factor:
                    raise ValueError(f"cannot parse polynomial {text!r}")
                if factor.isdigit():
                    coeff *= int(factor)
                    continue
                name, _, power = factor.partition("^")
                if name not in vars:
                    raise ValueError(f"unknown variable {name!r} in {text!r}")
                exps[vars.index(name)] += int(power) if power else 1
            e = tuple(exps)
            terms[e] = terms.get(e, 0) + sign * coeff
        if pos != len(s):
            raise ValueError(f"cannot parse polynomial {text!r}")
        return cls(vars, terms)


# ---------------------------------------------------------------------------
# rings and checked scalar arithmetic


@dataclass(frozen=True)
class Ring:
    """One of the three supported scalar kinds.

    ``kind`` is ``"int"``, ``"rat"`` or ``"poly_int"``; ``vars`` is only used
    for polynomial rings.
    """

    kind: str
    vars: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("int", "rat", "poly_int"):
            raise StructuralError(f"unknown ring kind {self.kind!r}")
        if self.kind != "poly_int" and self.vars:
            raise StructuralError("only polynomial rings carry variables")

    @property
    def is_field(self):
        return self.kind == "rat"

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        if self.kind == "int":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise StructuralError(f"{x} is not an integer")
                return int(x.numerator)
            if isinstance(x, int) and not isinstance(x, bool):
                return x
            if isinstance(x, Poly) and x.is_constant():
                return x.constant_value()
        elif self.kind == "rat":
            if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
                return Fraction(x)
            if isinstance(x, Poly) and x.is_constant():
                return Fraction(x.constant_value())
        else:
            if isinstance(x, Poly):
                if x.vars != self.vars:
                    raise StructuralError(f"variable lists differ: {x.vars} vs {self.vars}")
                return x
            if isinstance(x, Fraction) and x.denominator == 1:
                x = int(x.numerator)
            if isinstance(x, int) and not isinstance(x, bool):
                return Poly.const(self.vars, x)
        raise StructuralError(f"{x!r} is not an element of {self}")

    def contains(self, x):
        if self.kind == "int":
            return isinstance(x, int) and not isinstance(x, bool)
        if self.kind == "rat":
            return isinstance(x, Fraction)
        return isinstance(x, Poly) and x.vars == self.vars

    def parse(self, text):
        text = str(text).strip()
        if self.kind == "poly_int":
            return Poly.parse(text, self.vars)
        if self.kind == "int":
            return int(text)
        return Fraction(text)

    def format(self, x):
        x = self.coerce(x)
        if self.kind == "rat":
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(x)

    def is_unit(self, x):
        x = self.coerce(x)
        if self.kind == "rat":
            return x != 0
        if self.kind == "int":
            return x in (1, -1)
        return x.is_constant() and x.constant_value() in (1, -1)

    def to_json(self):
        out = {"kind": self.kind}
        if self.vars:
            out["vars"] = list(self.vars)
        return out

    def __str__(self):
        if self.kind == "int":
            return "ZZ"
        if self.kind == "rat":
            return "QQ"
        return "ZZ[" + ",".join(self.vars) + "]"


ZZ = Ring("int")
QQ = Ring("rat")


def poly_ring(*vars):
    return Ring("poly_int", tuple(vars))


def ring_of(x):
    """The ring kind an individual scalar belongs to."""
    if isinstance(x, bool):
        raise StructuralError("booleans are not scalars")
    if isinstance(x, int):
        return ZZ
    if isinstance(x, Fraction):
        return QQ
    if isinstance(x, Poly):
        return Ring("poly_int", x.vars)
    raise StructuralError(f"{x!r} is not an exact scalar")


def _same_kind(a, b):
    ra, rb = ring_of(a), ring_of(b)
    if ra != rb:
        raise StructuralError(f"mixed scalar kinds: {ra} and {rb}")
    return ra


def normalize(a):
    r = ring_of(a)
    if r.kind == "poly_int":
        return Poly(a.vars, a.terms)
    return a


def add(a, b):
    _same_kind(a, b)
    return a + b


def sub(a, b):
    _same_kind(a, b)
    return a - b


def mul(a, b):
    _same_kind(a, b)
    return a * b


def neg(a):
    ring_of(a)
    return -a


def eq(a, b):
    _same_kind(a, b)
    return a == b


def divexact(a, b):
    """Exact quotient in the ring of ``a``."""
    if isinstance(a, Poly) or isinstance(b, Poly):
        if not isinstance(a, Poly):
            a = b._lift(a)
        return a.exact_div(b)
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return Fraction(a) / b
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError(f"{a} is not divisible by {b}")
    return q


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Exact sparse matrix with arbitrary hashable row and column keys.

    Storage is column major: ``data[col][row] = value``, zeros never stored.
    """

    __slots__ = ("rows", "cols", "data", "_rowset", "_colset")

    def __init__(self, rows, cols, data=None, check=True):
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self._rowset = frozenset(self.rows)
        self._colset = frozenset(self.cols)
        if len(self._rowset) != len(self.rows):
            raise StructuralError("duplicate row keys")
        if len(self._colset) != len(self.cols):
            raise StructuralError("duplicate column keys")
        out = {}
        for c, col in (data or {}).items():
            clean = {r: v for r, v in col.items() if v}
            if not clean:
                continue
            if check:
                if c not in self._colset:
                    raise StructuralError(f"column key {c!r} not in column index")
                for r in clean:
                    if r not in self._rowset:
                        raise StructuralError(f"row key {r!r} not in row index")
            out[c] = clean
        self.data = out

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, rows, cols, entries):
        data = {}
        for (r, c), v in entries.items():
            if v:
                data.setdefault(c, {})[r] = v
        return cls(rows, cols, data)

    @classmethod
    def from_dense(cls, table, rows=None, cols=None):
        nr = len(table)
        nc = len(table[0]) if nr else (len(cols) if cols is not None else 0)
        rows = tuple(range(nr)) if rows is None else tuple(rows)
        cols = tuple(range(nc)) if cols is None else tuple(cols)
        if len(rows) != nr:
            raise StructuralError("row count mismatch")
        data = {}
        for i, line in enumerate(table):
            if len(line) != len(cols):
                raise StructuralError(f"ragged row {i}")
            for j, v in enumerate(line):
                if v:
                    data.setdefault(cols[j], {})[rows[i]] = v
        return cls(rows, cols, data)

    @classmethod
    def identity(cls, keys, one=1):
        keys = tuple(keys)
        return cls(keys, keys, {k: {k: one} for k in keys}, check=False)

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, {})

    # access -------------------------------------------------------------

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def __getitem__(self, rc):
        r, c = rc
        return self.data.get(c, {}).get(r, 0)

    def column(self, c):
        return self.data.get(c, {})

    def entries(self):
        return {(r, c): v for c, col in self.data.items() for r, v in col.items()}

    @property
    def nnz(self):
        return sum(len(col) for col in self.data.values())

    def is_zero(self):
        return not self.data

    def to_dense(self, zero=0):
        ri = {r: i for i, r in enumerate(self.rows)}
        out = [[zero] * len(self.cols) for _ in self.rows]
        for j, c in enumerate(self.cols):
            for r, v in self.data.get(c, {}).items():
                out[ri[r]][j] = v
        return out

    def apply(self, vec):
        """Image of a sparse vector (dict col-key -> scalar)."""
        out = {}
        for c, a in vec.items():
            if not a:
                continue
            for r, v in self.data.get(c, {}).items():
                out[r] = out.get(r, 0) + a * v
        return {r: v for r, v in out.items() if v}

    # algebra ------------------------------------------------------------

    def __matmul__(self, other):
        if self._colset != other._rowset:
            raise StructuralError(
                f"cannot compose: {len(self.cols)} columns vs {len(other.rows)} rows"
            )
        data = {}
        for c, col in other.data.items():
            acc = {}
            for k, b in col.items():
                for r, a in self.data.get(k, {}).items():
                    acc[r] = acc.get(r, 0) + a * b
            data[c] = acc
        return SparseMatrix(self.rows, other.cols, data, check=False)

    def _check_same_shape(self, other):
        if self._rowset != other._rowset or self._colset != other._colset:
            raise StructuralError("index sets differ")

    def __add__(self, other):
        self._check_same_shape(other)
        data = {c: dict(col) for c, col in self.data.items()}
        for c, col in other.data.items():
            tgt = data.setdefault(c, {})
            for r, v in col.items():
                tgt[r] = tgt.get(r, 0) + v
        return SparseMatrix(self.rows, self.cols, data, check=False)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        data = {c: {r: s * v for r, v in col.items()} for c, col in self.data.items()}
        return SparseMatrix(self.rows, self.cols, data, check=False)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self._rowset == other._rowset
            and self._colset == other._colset
            and self.data == other.data
        )

    __hash__ = None

    @property
    def T(self):
        data = {}
        for c, col in self.data.items():
            for r, v in col.items():
                data.setdefault(r, {})[c] = v
        return SparseMatrix(self.cols, self.rows, data, check=False)

    def kron(self, other, combine=None):
        """Tensor product; keys are combined with ``combine`` (tuple concat by default)."""
        if combine is None:
            combine = _concat
        rows = tuple(combine(a, b) for a in self.rows for b in other.rows)
        cols = tuple(combine(a, b) for a in self.cols for b in other.cols)
        data = {}
        for c1, col1 in self.data.items():
            for c2, col2 in other.data.items():
                data[combine(c1, c2)] = {
                    combine(r1, r2): v1 * v2
                    for r1, v1 in col1.items()
                    for r2, v2 in col2.items()
                }
        return SparseMatrix(rows, cols, data, check=False)

    def map_keys(self, row_map=None, col_map=None):
        """Rename row and/or column keys with injective functions."""
        rf = row_map or (lambda k: k)
        cf = col_map or (lambda k: k)
        data = {cf(c): {rf(r): v for r, v in col.items()} for c, col in self.data.items()}
        return SparseMatrix([rf(r) for r in self.rows], [cf(c) for c in self.cols], data, check=False)

    def map_values(self, f):
        data = {c: {r: f(v) for r, v in col.items()} for c, col in self.data.items()}
        return SparseMatrix(self.rows, self.cols, data, check=False)

    def select_columns(self, cols):
        cols = tuple(cols)
        return SparseMatrix(
            self.rows, cols, {c: self.data[c] for c in cols if c in self.data}, check=False
        )

    @classmethod
    def hstack(cls, mats, rows=None, col_tags=None):
        """Place matrices side by side over a common row index.

        Column keys are tagged with the matrix index (or ``col_tags``) so they
        stay distinct.
        """
        mats = list(mats)
        if rows is None:
            if not mats:
                raise StructuralError("hstack of nothing needs explicit rows")
            rows = mats[0].rows
        rowset = frozenset(rows)
        tags = col_tags if col_tags is not None else range(len(mats))
        cols = []
        data = {}
        for tag, m in zip(tags, mats):
            if not m._rowset <= rowset:
                raise StructuralError("row keys outside the common row index")
            for c in m.cols:
                cols.append((tag, c))
            for c, col in m.data.items():
                data[(tag, c)] = dict(col)
        return cls(rows, cols, data, check=False)

    def __repr__(self):
        return f"SparseMatrix({len(self.rows)}x{len(self.cols)}, nnz={self.nnz})"


def _concat(a, b):
    return tuple(a) + tuple(b)


# ---------------------------------------------------------------------------
# rank


def _matrix_kind(mat):
    kind = None
    for col in mat.data.values():
        for v in col.values():
            if isinstance(v, Poly):
                return "poly"
            if isinstance(v, Fraction):
                kind = "rat"
    return kind or "int"


def _integer_rows(mat):
    """Rows of ``mat`` as primitive integer dicts (col index -> int)."""
    ci = {c: j for j, c in enumerate(mat.cols)}
    rows = {}
    for c, col in mat.data.items():
        j = ci[c]
        for r, v in col.items():
            rows.setdefault(r, {})[j] = v
    out = []
    for row in rows.values():
        den = 1
        for v in row.values():
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        irow = {j: int(v * den) for j, v in row.items()}
        out.append(_primitive(irow))
    return out


def _primitive(row):
    g = reduce(gcd, row.values(), 0)
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def _rank_integer(rows):
    """Fraction-free sparse elimination over ZZ (rank over QQ)."""
    pivots = {}
    for row in rows:
        row = dict(row)
        while row:
            j = min(row)
            piv = pivots.get(j)
            if piv is None:
                pivots[j] = row
                break
            a, p = row[j], piv[j]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {k: fa * v for k, v in row.items()}
            for k, v in piv.items():
                new[k] = new.get(k, 0) - fp * v
            row = _primitive({k: v for k, v in new.items() if v})
    return len(pivots)


def _rank_bareiss(table):
    """Bareiss fraction-free elimination on a dense table; returns the rank."""
    a = [list(r) for r in table]
    m = len(a)
    n = len(a[0]) if m else 0
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, m):
            row_i, row_r = a[i], a[r]
            f = row_i[c]
            for j in range(c + 1, n):
                row_i[j] = divexact(p * row_i[j] - f * row_r[j], prev)
            row_i[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r


def rank(mat):
    """Rank over the fraction field of the entries' ring."""
    if not mat.data:
        return 0
    if _matrix_kind(mat) == "poly":
        vars = next(v.vars for col in mat.data.values() for v in col.values() if isinstance(v, Poly))
        table = mat.to_dense(zero=Poly.const(vars, 0))
        table = [[v if isinstance(v, Poly) else Poly.const(vars, v) for v in row] for row in table]
        if len(table) > len(table[0]):
            table = [list(col) for col in zip(*table)]
        return _rank_bareiss(table)
    return _rank_integer(_integer_rows(mat))


# ---------------------------------------------------------------------------
# incremental spans / lattices


class Span:
    """Incrementally grown subspace of QQ^keys, kept in echelon form.

    Vectors are dicts key -> int/Fraction.  Rows are stored primitive and
    integral, so elimination stays fraction free.
    """

    def __init__(self, keys):
        self.keys = tuple(keys)
        self._pos = {k: i for i, k in enumerate(self.keys)}
        self._rows = {}

    def _encode(self, vec):
        row = {}
        den = 1
        for k, v in vec.items():
            if v:
                if isinstance(v, Fraction):
                    den = den * v.denominator // gcd(den, v.denominator)
                row[self._pos[k]] = v
        return _primitive({j: int(v * den) for j, v in row.items()})

    def _reduce(self, row):
        while row:
            j = min(row)
            piv = self._rows.get(j)
            if piv is None:
                return row
            a, p = row[j], piv[j]
            g = gcd(a, p)
            fa, fp = p // g, a // g
            new = {k: fa * v for k, v in row.items()}
            for k, v in piv.items():
                new[k] = new.get(k, 0) - fp * v
            row = _primitive({k: v for k, v in new.items() if v})
        return row

    def add(self, vec):
        """Add a vector; returns True when the span grew."""
        row = self._reduce(self._encode(vec))
        if not row:
            return False
        self._rows[min(row)] = row
        return True

    def contains(self, vec):
        return not self._reduce(self._encode(vec))

    @property
    def dimension(self):
        return len(self._rows)

    def basis(self):
        """Basis vectors as dicts over the original keys."""
        return [{self.keys[j]: v for j, v in row.items()} for _, row in sorted(self._rows.items())]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class Lattice:
    """Incrementally grown sublattice of ZZ^keys in Hermite-style echelon form."""

    def __init__(self, keys):
        self.keys = tuple(keys)
        self._pos = {k: i for i, k in enumerate(self.keys)}
        self._rows = {}

    def _encode(self, vec):
        out = {}
        for k, v in vec.items():
            if v:
                if isinstance(v, Fraction):
                    if v.denominator != 1:
                        raise StructuralError("lattice vectors must be integral")
                    v = int(v.numerator)
                out[self._pos[k]] = v
        return out

    @staticmethod
    def _combine(x, y, a, b):
        out = {}
        for k, v in x.items():
            out[k] = a * v
        for k, v in y.items():
            out[k] = out.get(k, 0) + b * v
        return {k: v for k, v in out.items() if v}

    def add(self, vec):
        row = self._encode(vec)
        grew = False
        while row:
            j = min(row)
            piv = self._rows.get(j)
            if piv is None:
                if row[j] < 0:
                    row = {k: -v for k, v in row.items()}
                self._rows[j] = row
                return True
            a, p = row[j], piv[j]
            if a % p == 0:
                row = self._combine(row, piv, 1, -(a // p))
                continue
            g, s, t = _xgcd(a, p)
            new_piv = self._combine(row, piv, s, t)
            if new_piv[j] < 0:
                new_piv = {k: -v for k, v in new_piv.items()}
            row = self._combine(row, piv, p // g, -(a // g))
            self._rows[j] = new_piv
            grew = True
        return grew

    def contains(self, vec):
        row = self._encode(vec)
        while row:
            j = min(row)
            piv = self._rows.get(j)
            if piv is None or row[j] % piv[j]:
                return False
            row = self._combine(row, piv, 1, -(row[j] // piv[j]))
        return True

    @property
    def rank(self):
        return len(self._rows)

    def basis(self):
        return [{self.keys[j]: v for j, v in row.items()} for _, row in sorted(self._rows.items())]


# ---------------------------------------------------------------------------
# Smith normal form and cokernels


def _snf_dense(a):
    """Invariant factors of a dense integer table (destroys ``a``)."""
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry of the trailing block as pivot
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = v // p
                    if q:
                        row_i, row_t = a[i], a[t]
                        for j in range(t, n):
                            if row_t[j]:
                                row_i[j] -= q * row_t[j]
                    if a[i][t]:
                        dirty = True
            row_t = a[t]
            for j in range(t + 1, n):
                v = row_t[j]
                if v:
                    q = v // p
                    if q:
                        for i in range(t, m):
                            if a[i][t]:
                                a[i][j] -= q * a[i][t]
                    if row_t[j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/column t to the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cand)
                if i != t:
                    a[t], a[i] = a[i], a[t]
                else:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                continue
            # pivot must divide the rest of the block
            bad = next(
                (i for i in range(t + 1, m) if any(a[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            row_b, row_t = a[bad], a[t]
            for j in range(t, n):
                row_t[j] += row_b[j]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def smith_normal_form(mat):
    """Invariant factors d1 | d2 | ... of an integer matrix (zeros omitted).

    Rows are first compressed to a lattice basis so the dense reduction only
    ever sees a full-row-rank block.
    """
    if _matrix_kind(mat) != "int":
        raise StructuralError("Smith normal form needs integer entries")
    lat = Lattice(mat.rows)
    for c in mat.cols:
        col = mat.data.get(c)
        if col:
            lat.add(col)
    basis = lat.basis()
    if not basis:
        return []
    pos = {k: i for i, k in enumerate(mat.rows)}
    used = sorted({pos[k] for vec in basis for k in vec})
    idx = {j: i for i, j in enumerate(used)}
    table = [[0] * len(used) for _ in basis]
    for i, vec in enumerate(basis):
        for k, v in vec.items():
            table[i][idx[pos[k]]] = v
    return _snf_dense(table)


@dataclass(frozen=True)
class ModuleInvariants:
    """Free rank plus torsion coefficients of a finitely generated module."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.free_rank < 0:
            raise StructuralError("negative free rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise StructuralError(f"torsion {self.torsion} is not divisibility sorted")
        if any(t < 2 for t in self.torsion):
            raise StructuralError("torsion coefficients must be >= 2")

    def __add__(self, other):
        """Direct sum."""
        return ModuleInvariants.from_factors(
            self.free_rank + other.free_rank, list(self.torsion) + list(other.torsion)
        )

    def tensor_free(self, n):
        """Tensor with a free module of rank ``n``."""
        return ModuleInvariants.from_factors(self.free_rank * n, list(self.torsion) * n)

    @classmethod
    def from_factors(cls, free_rank, factors):
        """Normalize an arbitrary list of cyclic orders to invariant factors."""
        primes = {}
        for f in factors:
            for p, e in _factorize(f).items():
                primes.setdefault(p, []).append(e)
        length = max((len(v) for v in primes.values()), default=0)
        out = [1] * length
        for p, exps in primes.items():
            exps = sorted(exps)
            for i, e in enumerate(exps):
                out[length - len(exps) + i] *= p**e
        return cls(free_rank, tuple(x for x in out if x > 1))

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def _factorize(n):
    n = abs(n)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _resolve_ring(ring):
    if isinstance(ring, Ring):
        return ring
    if ring in ("q", "Q", "QQ", "rat"):
        return QQ
    if ring in ("z", "Z", "ZZ", "int"):
        return ZZ
    raise StructuralError(f"unknown ring selector {ring!r}")


def cokernel_invariants(mat, ambient, ring="q"):
    """Invariants of ambient / image(mat).

    ``ambient`` is the rank of the ambient free module or its basis keys; it
    must agree with ``mat.rows``.  Over QQ (and polynomial rings, via the
    fraction field) only the free rank is reported.
    """
    if isinstance(ambient, int):
        if ambient != len(mat.rows):
            raise StructuralError(f"ambient rank {ambient} but matrix has {len(mat.rows)} rows")
        n = ambient
    else:
        keys = frozenset(ambient)
        if keys != mat._rowset or len(keys) != len(tuple(ambient)):
            raise StructuralError("matrix rows do not match the ambient basis")
        n = len(keys)
    ring = _resolve_ring(ring)
    if ring.kind == "int":
        factors = smith_normal_form(mat)
        return ModuleInvariants(n - len(factors), tuple(f for f in factors if f > 1))
    return ModuleInvariants(n - rank(mat))


# ---------------------------------------------------------------------------
# small dense matrices


def determinant(table):
    """Determinant of a small square table by fraction-free elimination."""
    a = [list(r) for r in table]
    n = len(a)
    if any(len(r) != n for r in a):
        raise StructuralError("determinant of a non-square table")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return a[0][0] * 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = divexact(a[k][k] * a[i][j] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(table, ring):
    """Inverse of a square table whose determinant is a unit of ``ring``."""
    n = len(table)
    det = determinant(table)
    if not det or not ring.is_unit(det):
        raise ArithmeticError(f"determinant {det} is not a unit in {ring}")
    if ring.kind == "rat":
        dinv = Fraction(1) / det
    else:
        dinv = ring.coerce(1 if ring.coerce(det) == ring.one else -1)
    out = [[ring.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1 :] for k, row in enumerate(table) if k != i]
            cof = determinant(minor) if minor else 1
            if (i + j) % 2:
                cof = -cof
            out[j][i] = ring.coerce(cof * dinv)
    return out
