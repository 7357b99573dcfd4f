"""Unital matrix subalgebras as values.

An :class:`AlgebraBasis` is the reduced echelon form of the row-major
vectorizations of a subspace of n x n matrices.  The echelon rows *are* the
canonical basis, so two bases of the same subspace compare equal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .fields import FieldSpec, field_create, EXTENSION
from .linalg import Echelon, ExactMatrix, LinalgError, rref_rows
from .polynomials import PolynomialF, find_factor

FULL_CLOSURE_CHECK_DIM = 24


class AlgebraError(ValueError):
    """Malformed algebra input (non-idempotent unit, element outside the algebra, ...)."""


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    field: FieldSpec
    n: int
    rows: tuple
    pivots: tuple
    unit: ExactMatrix | None = None
    generators: tuple = ()
    closed: bool = True

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list[ExactMatrix]:
        return [ExactMatrix.from_vec(self.field, r, self.n, self.n) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, AlgebraBasis):
            return NotImplemented
        return (self.field, self.n, self.rows) == (other.field, other.n, other.rows)

    def __hash__(self):
        return hash((self.field, self.n, self.rows))

    def echelon(self) -> Echelon:
        return Echelon.from_rref(self.field, self.n * self.n, self.rows, self.pivots)

    def contains(self, M: ExactMatrix) -> bool:
        return self.echelon().contains(M.vec())

    def coordinates(self, M: ExactMatrix) -> list | None:
        return self.echelon().coordinates(M.vec())

    def combine(self, coords: Sequence) -> ExactMatrix:
        F = self.field
        vec = [F.zero] * (self.n * self.n)
        for c, r in zip(coords, self.rows):
            if F.is_zero(c):
                continue
            vec = [F.add(a, F.mul(c, b)) for a, b in zip(vec, r)]
        return ExactMatrix.from_vec(F, vec, self.n, self.n)

    def random_element(self, rng: random.Random) -> ExactMatrix:
        return self.combine([self.field.random(rng) for _ in range(self.dim)])

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "n": self.n,
                "basis": [ExactMatrix.from_vec(self.field, r, self.n, self.n).to_json() for r in self.rows]}


def _from_echelon(E: Echelon, n: int, unit=None, generators=(), closed=True) -> AlgebraBasis:
    return AlgebraBasis(E.F, n, tuple(tuple(r) for r in E.rows), tuple(E.pivots), unit,
                        tuple(generators), closed)


def span(field: FieldSpec, n: int, mats: Sequence[ExactMatrix], unit=None, closed=False) -> AlgebraBasis:
    E = Echelon(field, n * n)
    for M in mats:
        E.add(M.vec())
    return _from_echelon(E, n, unit, (), closed)


def _check_square(mats: Sequence[ExactMatrix]):
    if not mats:
        return
    F, n = mats[0].field, mats[0].nrows
    for M in mats:
        if M.field != F or M.shape != (n, n):
            raise LinalgError("generators must be square, same size and field")


def is_idempotent(e: ExactMatrix) -> bool:
    return e @ e == e


def subalgebra_closure(generators: Sequence[ExactMatrix], unit: ExactMatrix | None = None) -> AlgebraBasis:
    """Smallest subspace containing ``unit`` and the generators that is stable
    under left and right multiplication by every generator.

    Containing the unit and being stable under multiplication by generators
    makes the span the full algebra of words, hence closed; this is asserted
    pairwise for small dimensions.
    """
    gens = list(generators)
    if unit is None:
        if not gens:
            raise AlgebraError("need a unit or at least one generator")
        unit = ExactMatrix.identity(gens[0].field, gens[0].nrows)
    _check_square(gens + [unit])
    if not is_idempotent(unit):
        raise AlgebraError("unit is not idempotent")
    F, n = unit.field, unit.nrows
    E = Echelon(F, n * n)
    queue = []
    for M in [unit] + gens:
        if E.add(M.vec()):
            queue.append(M)
    while queue:
        b = queue.pop()
        for g in gens:
            for prod in (g @ b, b @ g):
                if E.add(prod.vec()):
                    queue.append(prod)
        assert E.dim <= n * n
    alg = _from_echelon(E, n, unit, gens)
    if alg.dim <= FULL_CLOSURE_CHECK_DIM:
        assert_closed(alg)
    return alg


def assert_closed(alg: AlgebraBasis) -> None:
    E = alg.echelon()
    basis = alg.basis
    for b in basis:
        for c in basis:
            if not E.contains((b @ c).vec()):
                raise AssertionError("span is not closed under multiplication")
    if alg.unit is not None:
        u = alg.unit
        if not E.contains(u.vec()):
            raise AssertionError("unit outside the algebra")
        for b in basis:
            if u @ b != b or b @ u != b:
                raise AssertionError("unit does not act as identity")


def one_sided_space(T: AlgebraBasis, e: ExactMatrix, side: str) -> AlgebraBasis:
    """``T e`` (side="right") or ``e T`` (side="left") as a subspace."""
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    if not is_idempotent(e):
        raise AlgebraError("e is not idempotent")
    if not T.contains(e):
        raise AlgebraError("e is not in T")
    mats = [b @ e if side == "right" else e @ b for b in T.basis]
    return span(T.field, T.n, mats, closed=False)


def center(T: AlgebraBasis) -> AlgebraBasis:
    """Elements of T commuting with T.

    The commutation system is posed against T's generators when T came from
    :func:`subalgebra_closure` (commuting with generators is equivalent), else
    against the whole basis.  The result is re-checked against every basis
    element of T.
    """
    F, n = T.field, T.n
    basis = T.basis
    tests = list(T.generators) if T.generators else basis
    cols = []
    for b in basis:
        col = []
        for g in tests:
            col.extend((b @ g - g @ b).vec())
        cols.append(col)
    nr = len(cols[0]) if cols else 0
    system = [[c[i] for c in cols] for i in range(nr)]
    from .linalg import _nullspace_vectors

    coeffs = _nullspace_vectors(F, system, len(basis))
    zs = [T.combine(c) for c in coeffs]
    for z in zs:
        for b in basis:
            if z @ b != b @ z:
                raise AssertionError("center element fails to commute")
    ident = ExactMatrix.identity(F, n)
    Z = span(F, n, [ident] + zs, unit=ident, closed=True)
    if Z.dim != len(zs):
        raise AssertionError("identity outside the computed center")
    return Z


def corner(T: AlgebraBasis, e: ExactMatrix) -> AlgebraBasis:
    """``e T e`` with unit ``e``."""
    if not is_idempotent(e):
        raise AlgebraError("e is not idempotent")
    if not T.contains(e):
        raise AlgebraError("e is not in T")
    C = span(T.field, T.n, [e @ b @ e for b in T.basis], unit=e, closed=True)
    if C.dim <= FULL_CLOSURE_CHECK_DIM:
        assert_closed(C)
    return C


def is_commutative(alg: AlgebraBasis) -> tuple[bool, tuple | None]:
    basis = alg.basis
    for i, b in enumerate(basis):
        for c in basis[i + 1:]:
            if b @ c != c @ b:
                return False, (b, c)
    return True, None


def corner_generators_check(T: AlgebraBasis, e: ExactMatrix, A: ExactMatrix, d: int,
                            C: AlgebraBasis | None = None) -> bool:
    """Is ``e T e`` generated (with unit e) by ``e A^i e`` for 1 <= i <= d?"""
    if C is None:
        C = corner(T, e)
    gens = []
    P = A
    for _ in range(d):
        gens.append(e @ P @ e)
        P = P @ A
    sub = subalgebra_closure(gens, unit=e)
    return sub == C


def element_minpoly(a: ExactMatrix, unit: ExactMatrix) -> PolynomialF:
    """Monic least-degree f with f(a) = 0, constants read as multiples of ``unit``."""
    F = a.field
    E = Echelon(F, a.nrows * a.ncols, track=True)
    power = unit
    while True:
        rel = E.add(power.vec())
        if rel is not True:
            break
        power = power @ a
    deg = max(rel)
    return PolynomialF(F, tuple(rel.get(j, F.zero) for j in range(deg + 1)))


def evaluate_at(f: PolynomialF, a: ExactMatrix, unit: ExactMatrix) -> ExactMatrix:
    acc = ExactMatrix.zeros(a.field, a.nrows, a.ncols)
    for c in reversed(f.coeffs):
        acc = acc @ a + unit.scale(c)
    return acc


def invert_in_algebra(a: ExactMatrix, alg: AlgebraBasis) -> ExactMatrix | None:
    """Inverse of ``a`` inside ``alg`` (a polynomial in a), or None if a is not invertible."""
    if alg.unit is None:
        raise AlgebraError("algebra has no unit")
    if not alg.contains(a):
        raise AlgebraError("element outside the algebra")
    F = a.field
    u = alg.unit
    f = element_minpoly(a, u)
    c0 = f.coeffs[0]
    if F.is_zero(c0):
        return None
    # a * (a^{m-1} + ... + c1) = -c0 u
    tail = PolynomialF(F, f.coeffs[1:])
    b = evaluate_at(tail, a, u).scale(F.neg(F.inv(c0)))
    assert a @ b == u and b @ a == u
    return b


@dataclass(frozen=True)
class FieldCertificate:
    primitive: ExactMatrix
    minpoly: PolynomialF
    dim: int
    powers: tuple
    unit: ExactMatrix

    def extension_field(self) -> FieldSpec:
        """The abstract field F[x]/(minpoly) presented by this certificate."""
        F = self.minpoly.field
        if self.dim == 1:
            return F
        if F.kind == EXTENSION:
            raise NotImplementedError("field towers over an extension base are not supported")
        return field_create(EXTENSION, F.p, self.dim, list(self.minpoly.coeffs))

    def coords(self, x: ExactMatrix) -> tuple:
        """Coordinates of ``x`` on the power basis, i.e. a raw element of :meth:`extension_field`."""
        E = self._power_echelon
        rel = E.express(x.vec())
        if rel is None:
            raise AlgebraError("element outside the certified field")
        F = self.minpoly.field
        return tuple(rel.get(i, F.zero) for i in range(self.dim))

    def to_field(self, x: ExactMatrix):
        c = self.coords(x)
        return c[0] if self.dim == 1 else c

    def from_field(self, raw) -> ExactMatrix:
        """Matrix realizing a raw element of :meth:`extension_field`."""
        coeffs = (raw,) if self.dim == 1 else raw
        acc = ExactMatrix.zeros(self.unit.field, self.unit.nrows, self.unit.ncols)
        for c, P in zip(coeffs, self.powers):
            acc = acc + P.scale(c)
        return acc

    @property
    def _power_echelon(self) -> Echelon:
        cached = self.__dict__.get("_pe")
        if cached is None:
            cached = Echelon(self.primitive.field, self.primitive.nrows ** 2, track=True)
            for P in self.powers:
                cached.add(P.vec())
            object.__setattr__(self, "_pe", cached)
        return cached


@dataclass(frozen=True)
class NotAField:
    reason: str  # "noncommutative" | "idempotent" | "zero-divisor"
    witness: tuple


class FieldCertificationInconclusive(RuntimeError):
    pass


def _candidates(alg: AlgebraBasis, rng: random.Random, trials: int):
    basis = alg.basis
    yield from basis
    for r in (2, 3):
        for combo in itertools.combinations(basis, r):
            acc = combo[0]
            for M in combo[1:]:
                acc = acc + M
            yield acc
    for _ in range(trials):
        yield alg.random_element(rng)


def field_certify(alg: AlgebraBasis, rng: random.Random | None = None,
                  trials: int = 200) -> FieldCertificate | NotAField:
    """Certify that a commutative unital algebra is a field via a primitive
    element with irreducible minimal polynomial of full degree, or disprove
    it with a nontrivial idempotent / zero divisor.

    Raises FieldCertificationInconclusive when the search budget runs out.
    """
    if alg.unit is None:
        raise AlgebraError("algebra has no unit")
    comm, pair = is_commutative(alg)
    if not comm:
        return NotAField("noncommutative", pair)
    if rng is None:
        rng = random.Random(0)
    u = alg.unit
    m = alg.dim
    for a in _candidates(alg, rng, trials):
        f = element_minpoly(a, u)
        if f.degree == m:
            g = find_factor(f)
            if g is None:
                powers = [u]
                for _ in range(m - 1):
                    powers.append(powers[-1] @ a)
                return FieldCertificate(a, f, m, tuple(powers), u)
        else:
            g = find_factor(f)
        if g is not None:
            h = f // g
            x, y = evaluate_at(g, a, u), evaluate_at(h, a, u)
            assert not x.is_zero() and not y.is_zero() and (x @ y).is_zero()
            if a @ a == a:
                return NotAField("idempotent", (a, u - a))
            return NotAField("zero-divisor", (x, y))
    raise FieldCertificationInconclusive(f"no certificate or disproof after {trials} random trials")
