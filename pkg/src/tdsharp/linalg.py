"""Dense exact matrices and the spectral toolkit.

Matrices store raw field values (see :mod:`tdsharp.fields`).  The hot
kernels (product, row reduction, incremental echelon forms) have a fast
path for prime fields using plain ``int`` arithmetic mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm as ilcm
from typing import Iterable, Sequence

from . import _poly
from .fields import PRIME, RATIONAL, FieldElement, FieldSpec
from .polynomials import PolynomialF, roots_in_field


class LinalgError(ValueError):
    """Non-conformable operands or malformed matrices."""


class ExactMatrix:
    """Immutable dense matrix over a FieldSpec."""

    __slots__ = ("field", "rows", "nrows", "ncols", "_hash")

    def __init__(self, field: FieldSpec, rows: Iterable[Sequence], ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        self.field = field
        self.rows = rows
        self.nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in rows):
            raise LinalgError("ragged matrix rows")
        self._hash = None

    # ---- constructors ----------------------------------------------

    @classmethod
    def from_entries(cls, field: FieldSpec, rows) -> ExactMatrix:
        return cls(field, [[field.coerce(x) for x in r] for r in rows])

    @classmethod
    def zeros(cls, field: FieldSpec, n: int, m: int) -> ExactMatrix:
        z = field.zero
        return cls(field, [[z] * m for _ in range(n)], m)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> ExactMatrix:
        z, o = field.zero, field.one
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, field: FieldSpec, values) -> ExactMatrix:
        vals = [field.coerce(v) for v in values]
        n = len(vals)
        z = field.zero
        return cls(field, [[vals[i] if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_vec(cls, field: FieldSpec, vec: Sequence, nrows: int, ncols: int) -> ExactMatrix:
        """Inverse of :meth:`vec` (row-major)."""
        return cls(field, [vec[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def from_columns(cls, field: FieldSpec, cols: Sequence[Sequence], nrows: int) -> ExactMatrix:
        return cls(field, [[c[i] for c in cols] for i in range(nrows)], len(cols))

    # ---- basic protocol --------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.ncols, self.rows))
        return self._hash

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.field, self.rows[i][j])

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(self.field.encode(x)) for x in r) for r in self.rows)
        return f"ExactMatrix({self.field!r}, [{body}])"

    def vec(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list[list]:
        return [list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)]

    @property
    def T(self) -> ExactMatrix:
        return ExactMatrix(self.field, zip(*self.rows), self.nrows) if self.ncols else \
            ExactMatrix(self.field, [], self.nrows)

    def is_zero(self) -> bool:
        F = self.field
        return all(F.is_zero(x) for r in self.rows for x in r)

    # ---- arithmetic ------------------------------------------------

    def _conform(self, other: ExactMatrix):
        if not isinstance(other, ExactMatrix):
            raise TypeError("expected an ExactMatrix")
        if other.field != self.field:
            raise LinalgError(f"field mismatch {self.field!r} vs {other.field!r}")

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        self._conform(other)
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        F = self.field
        if F.kind == PRIME:
            p = F.p
            return ExactMatrix(F, [[(a + b) % p for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                               self.ncols)
        return ExactMatrix(F, [[F.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.ncols)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        self._conform(other)
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        F = self.field
        if F.kind == PRIME:
            p = F.p
            return ExactMatrix(F, [[(a - b) % p for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                               self.ncols)
        return ExactMatrix(F, [[F.sub(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.ncols)

    def __neg__(self) -> ExactMatrix:
        F = self.field
        return ExactMatrix(F, [[F.neg(a) for a in r] for r in self.rows], self.ncols)

    def scale(self, c) -> ExactMatrix:
        """Multiply by a raw scalar (or FieldElement)."""
        F = self.field
        if isinstance(c, FieldElement):
            c = F.coerce(c)
        if F.kind == PRIME:
            p = F.p
            return ExactMatrix(F, [[a * c % p for a in r] for r in self.rows], self.ncols)
        return ExactMatrix(F, [[F.mul(a, c) for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        self._conform(other)
        if self.ncols != other.nrows:
            raise LinalgError(f"cannot multiply {self.shape} by {other.shape}")
        return ExactMatrix(self.field, matmul_rows(self.field, self.rows, other.rows, other.ncols),
                           other.ncols)

    def apply(self, v: Sequence) -> list:
        """Matrix times a raw column vector."""
        F = self.field
        if F.kind == PRIME:
            p = F.p
            return [sum(a * b for a, b in zip(r, v)) % p for r in self.rows]
        return [_dot(F, r, v) for r in self.rows]

    def __pow__(self, e: int) -> ExactMatrix:
        if not self.is_square or e < 0:
            raise LinalgError("power of a non-square matrix or negative exponent")
        result = ExactMatrix.identity(self.field, self.nrows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    # ---- serialization ---------------------------------------------

    def to_json(self) -> list:
        F = self.field
        return [[F.encode(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, field: FieldSpec, obj) -> ExactMatrix:
        if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
            raise LinalgError("matrix must be a non-empty list of rows")
        return cls(field, [[field.decode(x) for x in r] for r in obj])


def _dot(F: FieldSpec, r, v):
    acc = F.zero
    for a, b in zip(r, v):
        if not F.is_zero(a) and not F.is_zero(b):
            acc = F.add(acc, F.mul(a, b))
    return acc


def matmul_rows(F: FieldSpec, X, Y, ycols: int) -> list[list]:
    if F.kind == PRIME:
        p = F.p
        cols = list(zip(*Y)) if Y else [() for _ in range(ycols)]
        return [[sum(a * b for a, b in zip(r, c)) % p for c in cols] for r in X]
    cols = list(zip(*Y)) if Y else [() for _ in range(ycols)]
    return [[_dot(F, r, c) for c in cols] for r in X]


def matrix(field: FieldSpec, rows) -> ExactMatrix:
    """Build an ExactMatrix from ints / Fractions / FieldElements / coefficient lists."""
    return ExactMatrix.from_entries(field, rows)


# ---- row reduction ----------------------------------------------------


def _clear_denominators(rows):
    out = []
    for r in rows:
        den = ilcm(*(x.denominator for x in r)) if r else 1
        out.append([Fraction(x * den) for x in r] if den != 1 else list(r))
    return out


def rref_rows(F: FieldSpec, rows, ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of raw rows; returns (nonzero rows, pivots)."""
    rows = [list(r) for r in rows]
    if F.kind == RATIONAL:
        rows = _clear_denominators(rows)
    pivots: list[int] = []
    r = 0
    nr = len(rows)
    if F.kind == PRIME:
        p = F.p
        for c in range(ncols):
            piv = next((i for i in range(r, nr) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = pow(rows[r][c], -1, p)
            pr = [x * inv % p for x in rows[r]]
            rows[r] = pr
            for i in range(nr):
                if i != r:
                    f = rows[i][c]
                    if f:
                        rows[i] = [(x - f * y) % p for x, y in zip(rows[i], pr)]
            pivots.append(c)
            r += 1
            if r == nr:
                break
        return rows[:r], pivots
    for c in range(ncols):
        piv = next((i for i in range(r, nr) if not F.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        pr = [F.mul(x, inv) for x in rows[r]]
        rows[r] = pr
        for i in range(nr):
            if i != r:
                f = rows[i][c]
                if not F.is_zero(f):
                    rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows[:r], pivots


def rref(M: ExactMatrix) -> tuple[ExactMatrix, int, list[int]]:
    """Reduced row-echelon form (same shape, zero rows at the bottom), rank, pivot columns."""
    rows, pivots = rref_rows(M.field, M.rows, M.ncols)
    z = [M.field.zero] * M.ncols
    full = rows + [list(z) for _ in range(M.nrows - len(rows))]
    return ExactMatrix(M.field, full, M.ncols), len(pivots), pivots


def rank(M: ExactMatrix) -> int:
    return len(rref_rows(M.field, M.rows, M.ncols)[1])


def _nullspace_vectors(F: FieldSpec, rows, ncols: int) -> list[list]:
    red, pivots = rref_rows(F, rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [F.zero] * ncols
        v[free] = F.one
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[free])
        basis.append(v)
    return basis


def kernel(M: ExactMatrix) -> ExactMatrix:
    """Column-basis matrix of the right null space (``ncols - rank`` columns)."""
    vecs = _nullspace_vectors(M.field, M.rows, M.ncols)
    return ExactMatrix.from_columns(M.field, vecs, M.ncols)


@dataclass(frozen=True)
class InconsistentSystem:
    """Certificate that ``M X = targets`` has no solution: ``witness . M == 0``
    while ``witness . targets[:, column] != 0``."""

    witness: tuple
    column: int


def solve_linear(M: ExactMatrix, targets: ExactMatrix) -> ExactMatrix | InconsistentSystem:
    """Solve ``M X = targets`` exactly (one particular solution, free variables zero)."""
    if M.field != targets.field:
        raise LinalgError("field mismatch")
    if M.nrows != targets.nrows:
        raise LinalgError("row counts differ")
    F = M.field
    n, m, k = M.nrows, M.ncols, targets.ncols
    aug = [list(a) + list(b) for a, b in zip(M.rows, targets.rows)]
    red, pivots = rref_rows(F, aug, m + k)
    if pivots and pivots[-1] >= m:
        for y in _nullspace_vectors(F, M.T.rows, n):
            for j in range(k):
                if not F.is_zero(_dot(F, y, targets.column(j))):
                    return InconsistentSystem(tuple(y), j)
        raise AssertionError("inconsistent system without a left-kernel witness")  # pragma: no cover
    X = [[F.zero] * k for _ in range(m)]
    for row, pc in zip(red, pivots):
        X[pc] = row[m:]
    return ExactMatrix(F, X, k)


def inverse(M: ExactMatrix) -> ExactMatrix:
    if not M.is_square:
        raise LinalgError("inverse of a non-square matrix")
    sol = solve_linear(M, ExactMatrix.identity(M.field, M.nrows))
    if isinstance(sol, InconsistentSystem) or rank(M) != M.nrows:
        raise LinalgError("matrix is singular")
    return sol


# ---- incremental echelon form ---------------------------------------


class Echelon:
    """Incrementally maintained reduced echelon basis of a subspace of F^ncols.

    With ``track=True`` every stored row carries the combination of inserted
    vectors that produced it, so a dependency found by :meth:`add` comes
    with its relation.
    """

    def __init__(self, F: FieldSpec, ncols: int, track: bool = False):
        self.F = F
        self.ncols = ncols
        self.track = track
        self.rows: list[list] = []
        self.pivots: list[int] = []
        self.combos: list[dict] = []
        self._count = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence, combo: dict | None = None):
        F = self.F
        v = list(v)
        if F.kind == PRIME:
            p = F.p
            for piv, row, rc in zip(self.pivots, self.rows, self.combos or [None] * len(self.rows)):
                c = v[piv]
                if c:
                    v[piv:] = [(a - c * b) % p for a, b in zip(v[piv:], row[piv:])]
                    if combo is not None:
                        for key, val in rc.items():
                            combo[key] = (combo.get(key, 0) - c * val) % p
            return v, combo
        for piv, row, rc in zip(self.pivots, self.rows, self.combos or [None] * len(self.rows)):
            c = v[piv]
            if not F.is_zero(c):
                v[piv:] = [F.sub(a, F.mul(c, b)) for a, b in zip(v[piv:], row[piv:])]
                if combo is not None:
                    for key, val in rc.items():
                        combo[key] = F.sub(combo.get(key, F.zero), F.mul(c, val))
        return v, combo

    def contains(self, v: Sequence) -> bool:
        F = self.F
        r, _ = self.reduce(v)
        return all(F.is_zero(x) for x in r)

    def coordinates(self, v: Sequence) -> list | None:
        """Coefficients of ``v`` on the stored rows, or None if outside the span."""
        coords = [v[piv] for piv in self.pivots]
        return coords if self.contains(v) else None

    def express(self, v: Sequence) -> dict | None:
        """Tracking mode: ``v`` as ``{insert index: coefficient}`` over the inserted vectors."""
        F = self.F
        if not self.contains(v):
            return None
        out: dict = {}
        for piv, rc in zip(self.pivots, self.combos):
            c = v[piv]
            if F.is_zero(c):
                continue
            for key, val in rc.items():
                out[key] = F.add(out.get(key, F.zero), F.mul(c, val))
        return out

    @classmethod
    def from_rref(cls, F: FieldSpec, ncols: int, rows, pivots) -> Echelon:
        E = cls(F, ncols)
        E.rows = [list(r) for r in rows]
        E.pivots = list(pivots)
        return E

    def add(self, v: Sequence):
        """Insert ``v``; returns True if it enlarged the span.  In tracking mode
        a dependent ``v`` returns the relation ``{insert index: coefficient}``
        (with coefficient 1 on this insert) instead of False."""
        F = self.F
        idx = self._count
        self._count += 1
        combo = {idx: F.one} if self.track else None
        r, combo = self.reduce(v, combo)
        piv = next((i for i, x in enumerate(r) if not F.is_zero(x)), None)
        if piv is None:
            if self.track:
                return {k: c for k, c in combo.items() if not F.is_zero(c)}
            return False
        inv = F.inv(r[piv])
        if F.kind == PRIME:
            p = F.p
            r = [x * inv % p for x in r]
            if combo is not None:
                combo = {k: c * inv % p for k, c in combo.items()}
        else:
            r = [F.mul(x, inv) for x in r]
            if combo is not None:
                combo = {k: F.mul(c, inv) for k, c in combo.items()}
        # keep the basis fully reduced
        for i, row in enumerate(self.rows):
            c = row[piv]
            if not F.is_zero(c):
                if F.kind == PRIME:
                    p = F.p
                    self.rows[i] = [(a - c * b) % p for a, b in zip(row, r)]
                else:
                    self.rows[i] = [F.sub(a, F.mul(c, b)) for a, b in zip(row, r)]
                if combo is not None:
                    rc = dict(self.combos[i])
                    for key, val in combo.items():
                        rc[key] = F.sub(rc.get(key, F.zero), F.mul(c, val))
                    self.combos[i] = rc
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < piv:
            pos += 1
        self.rows.insert(pos, r)
        self.pivots.insert(pos, piv)
        if self.track:
            self.combos.insert(pos, combo)
        return True


def column_space(M: ExactMatrix) -> list[list]:
    """Echelon basis (as raw vectors) of the column space of ``M``."""
    rows, _ = rref_rows(M.field, M.T.rows, M.nrows)
    return rows


# ---- spectral toolkit -----------------------------------------------


def minimal_polynomial(M: ExactMatrix) -> PolynomialF:
    """Least common multiple of the Krylov annihilators of the standard basis
    vectors (vectors already inside an earlier Krylov space are skipped)."""
    if not M.is_square:
        raise LinalgError("minimal polynomial of a non-square matrix")
    F = M.field
    n = M.nrows
    seen = Echelon(F, n)
    result = PolynomialF(F, (F.one,))
    for i in range(n):
        e = [F.zero] * n
        e[i] = F.one
        if seen.contains(e):
            continue
        krylov = Echelon(F, n, track=True)
        v = e
        while True:
            rel = krylov.add(v)
            if rel is not True:
                break
            seen.add(v)
            v = M.apply(v)
        deg = max(rel)
        coeffs = [rel.get(j, F.zero) for j in range(deg + 1)]
        result = result.lcm(PolynomialF(F, tuple(coeffs)))
    return result


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: tuple
    eigenspaces: tuple
    idempotents: tuple
    diagonalizable: bool
    minpoly: PolynomialF

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(E.ncols for E in self.eigenspaces)


def primitive_idempotents(M: ExactMatrix, eigenvalues: Sequence) -> list[ExactMatrix]:
    """E_i = prod_{j != i} (M - theta_j I) / (theta_i - theta_j), then the
    identities sum E_i = I, E_i E_j = delta_ij E_i, M = sum theta_i E_i are asserted."""
    F = M.field
    thetas = [F.coerce(t) if isinstance(t, FieldElement) else t for t in eigenvalues]
    if len(set(thetas)) != len(thetas):
        raise LinalgError("repeated eigenvalues")
    n = M.nrows
    ident = ExactMatrix.identity(F, n)
    shifted = [M - ident.scale(t) for t in thetas]
    idem = []
    for i, ti in enumerate(thetas):
        E = ident
        for j, tj in enumerate(thetas):
            if j != i:
                E = (E @ shifted[j]).scale(F.inv(F.sub(ti, tj)))
        idem.append(E)
    total = ExactMatrix.zeros(F, n, n)
    recon = ExactMatrix.zeros(F, n, n)
    for i, E in enumerate(idem):
        total = total + E
        recon = recon + E.scale(thetas[i])
        for j, E2 in enumerate(idem):
            prod = E @ E2
            if i == j:
                assert prod == E, "E_i E_i != E_i"
            else:
                assert prod.is_zero(), "E_i E_j != 0"
    assert total == ident, "sum of primitive idempotents is not I"
    assert recon == M, "M != sum theta_i E_i"
    return idem


def eigendecompose(M: ExactMatrix) -> SpectralData:
    """Eigenvalues (canonical order), eigenspace bases, primitive idempotents.

    ``diagonalizable`` is True iff the minimal polynomial splits into distinct
    linear factors over the field.
    """
    if not M.is_square:
        raise LinalgError("eigendecomposition of a non-square matrix")
    F = M.field
    mp = minimal_polynomial(M)
    roots = roots_in_field(mp)
    diag = all(m == 1 for _, m in roots) and len(roots) == mp.degree
    thetas = tuple(r for r, _ in roots)
    n = M.nrows
    ident = ExactMatrix.identity(F, n)
    spaces = tuple(kernel(M - ident.scale(t)) for t in thetas)
    idem = tuple(primitive_idempotents(M, thetas)) if diag else ()
    if diag:
        assert sum(S.ncols for S in spaces) == n
        # prod (M - theta_i I) = 0
        assert mp.evaluate_matrix(M).is_zero()
    return SpectralData(thetas, spaces, idem, diag, mp)


def non_split_part(sd: SpectralData) -> PolynomialF:
    """Witness for non-diagonalizability: the minimal polynomial divided by the
    squarefree product of its in-field linear factors."""
    F = sd.minpoly.field
    g = PolynomialF(F, (F.one,))
    for r in sd.eigenvalues:
        g = g * PolynomialF.linear(F, r)
    return sd.minpoly // g
