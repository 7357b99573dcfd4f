"""Irreducibility of the natural module of a matrix-generated algebra.

``norton_irreducible`` is a MeatAxe-style test: pick a singular element t of
the algebra, and if every nonzero vector of ker(t) spins up to the whole
space and every nonzero vector of ker(t^T) spins up to the whole dual space
under the transposed generators, the module is irreducible (Norton's
criterion).  "Every vector" is covered either trivially (nullity 1), by
enumerating projective points of small kernels, or through the centralizer
when it is a field whose dimension equals the nullity (Holt-Rees).

``bruteforce_invariant_subspaces`` enumerates all subspaces and is the
ground-truth oracle for tiny cases.
"""

from __future__ import annotations

import itertools
import os
import random
from typing import NamedTuple, Sequence

from .fields import FieldSpec
from .linalg import Echelon, ExactMatrix, _nullspace_vectors, minimal_polynomial
from .polynomials import roots_in_field

DEFAULT_WORD_LENGTH = 8
DEFAULT_TRIALS = 200
POINT_LIMIT_CHEAP = 64
POINT_LIMIT = 2000
BRUTE_ORDER_LIMIT = 4
BRUTE_DIM_LIMIT = 4


class NortonInconclusive(RuntimeError):
    """Trial budget exhausted without deciding irreducibility."""


class Irreducibility(NamedTuple):
    irreducible: bool
    witness: list | None  # echelon basis (raw row vectors) of an invariant subspace


def trial_budget(default: int = DEFAULT_TRIALS) -> int:
    env = os.environ.get("TD_TRIAL_BUDGET")
    return int(env) if env else default


def spin(gens: Sequence[ExactMatrix], vectors: Sequence[Sequence], n: int) -> Echelon:
    """Smallest subspace containing ``vectors`` and stable under ``gens``."""
    F = gens[0].field if gens else None
    E = Echelon(F, n)
    queue = list(vectors)
    while queue:
        w = queue.pop()
        if E.add(w):
            for g in gens:
                queue.append(g.apply(w))
            if E.dim == n:
                break
    return E


def is_invariant(gens: Sequence[ExactMatrix], basis: Sequence[Sequence]) -> bool:
    if not basis:
        return True
    F = gens[0].field
    n = len(basis[0])
    E = Echelon(F, n)
    for b in basis:
        E.add(b)
    return all(E.contains(g.apply(b)) for g in gens for b in basis)


def _annihilator(F: FieldSpec, rows: Sequence[Sequence], n: int) -> list[list]:
    """Echelon basis of {x : r . x = 0 for every row r}."""
    vecs = _nullspace_vectors(F, rows, n)
    E = Echelon(F, n)
    for v in vecs:
        E.add(v)
    return E.rows


def _projective_points(F: FieldSpec, basis: Sequence[Sequence]):
    """One representative per line of span(basis)."""
    m = len(basis)
    elems = list(F.elements())
    for lead in range(m):
        for tail in itertools.product(elems, repeat=m - lead - 1):
            coeffs = [F.zero] * lead + [F.one] + list(tail)
            v = [F.zero] * len(basis[0])
            for c, b in zip(coeffs, basis):
                if not F.is_zero(c):
                    v = [F.add(x, F.mul(c, y)) for x, y in zip(v, b)]
            yield v


def _point_count(F: FieldSpec, m: int) -> float:
    if not F.is_finite:
        return float("inf")
    q = F.order
    return (q**m - 1) // (q - 1)


def _random_element(gens: Sequence[ExactMatrix], rng: random.Random, word_length: int) -> ExactMatrix:
    F = gens[0].field
    n = gens[0].nrows
    acc = ExactMatrix.zeros(F, n, n)
    for _ in range(3):
        length = rng.randint(1, word_length)
        w = gens[rng.randrange(len(gens))]
        for _ in range(length - 1):
            w = w @ gens[rng.randrange(len(gens))]
        c = F.random(rng)
        while F.is_zero(c):
            c = F.random(rng)
        acc = acc + w.scale(c)
    return acc


class _Centralizer:
    """Lazily computed centralizer of the generators and its field status."""

    def __init__(self, gens: Sequence[ExactMatrix], rng: random.Random, trials: int):
        self.gens = gens
        self.rng = rng
        self.trials = trials
        self._done = False
        self.alg = None
        self.cert = None
        self.zero_divisor = None

    def compute(self):
        if self._done:
            return
        self._done = True
        from . import algebra

        F = self.gens[0].field
        n = self.gens[0].nrows
        N = n * n
        # unknown X (row-major); rows of X g - g X = 0
        system = []
        for g in self.gens:
            G = g.rows
            for i in range(n):
                for j in range(n):
                    row = [F.zero] * N
                    for k in range(n):
                        # (X g)_{ij} = sum_k X_{ik} g_{kj}
                        if not F.is_zero(G[k][j]):
                            row[i * n + k] = F.add(row[i * n + k], G[k][j])
                        # (g X)_{ij} = sum_k g_{ik} X_{kj}
                        if not F.is_zero(G[i][k]):
                            row[k * n + j] = F.sub(row[k * n + j], G[i][k])
                    system.append(row)
        vecs = _nullspace_vectors(F, system, N)
        ident = ExactMatrix.identity(F, n)
        mats = [ExactMatrix.from_vec(F, v, n, n) for v in vecs]
        self.alg = algebra.span(F, n, mats, unit=ident, closed=True)
        try:
            res = algebra.field_certify(self.alg, self.rng, self.trials)
        except algebra.FieldCertificationInconclusive:
            return
        if isinstance(res, algebra.FieldCertificate):
            self.cert = res
        elif res.reason != "noncommutative":
            # a nonzero singular endomorphism: its kernel is a proper submodule
            self.zero_divisor = res.witness[0]


def _all_vectors_spin(gens, kernel_basis, n, cent: _Centralizer, transpose: bool):
    """Returns ("proper", echelon) | ("full", None) | ("undecided", None)."""
    F = gens[0].field
    m = len(kernel_basis)
    first = spin(gens, [kernel_basis[0]], n)
    if first.dim < n:
        return "proper", first
    if m == 1:
        return "full", None
    points = _point_count(F, m)
    if points <= POINT_LIMIT_CHEAP:
        for v in _projective_points(F, kernel_basis):
            S = spin(gens, [v], n)
            if S.dim < n:
                return "proper", S
        return "full", None
    cent.compute()
    if cent.zero_divisor is not None:
        return "zero-divisor", None
    if cent.cert is not None and cent.alg.dim == m:
        # C acts on ker(t) (C commutes with t); C a field of dimension m means
        # ker(t) = C v, and C v spins to C V = V.
        basis = cent.alg.basis
        if transpose:
            basis = [b.T for b in basis]
        E = Echelon(F, n)
        for b in basis:
            E.add(b.apply(kernel_basis[0]))
        if E.dim == m:
            return "full", None
    if points <= POINT_LIMIT:
        for v in _projective_points(F, kernel_basis):
            S = spin(gens, [v], n)
            if S.dim < n:
                return "proper", S
        return "full", None
    return "undecided", None


def norton_irreducible(generators: Sequence[ExactMatrix], n: int | None = None,
                       rng: random.Random | None = None, word_length: int = DEFAULT_WORD_LENGTH,
                       trials: int | None = None) -> Irreducibility:
    """Decide irreducibility of F^n under ``generators``.

    Reducible answers carry an invariant subspace as an echelon basis of row
    vectors.  Raises :class:`NortonInconclusive` when the budget runs out.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    F = gens[0].field
    if n is None:
        n = gens[0].nrows
    if n == 1:
        return Irreducibility(True, None)
    if rng is None:
        rng = random.Random(0)
    if trials is None:
        trials = trial_budget()
    gensT = [g.T for g in gens]
    cent = _Centralizer(gens, rng, trials)
    ident = ExactMatrix.identity(F, n)
    for _ in range(trials):
        a = _random_element(gens, rng, word_length)
        roots = roots_in_field(minimal_polynomial(a))
        if not roots:
            continue
        lam = roots[rng.randrange(len(roots))][0]
        t = a - ident.scale(lam)
        ker = _nullspace_vectors(F, t.rows, n)
        status, S = _all_vectors_spin(gens, ker, n, cent, transpose=False)
        if status == "proper":
            return Irreducibility(False, S.rows)
        if status == "zero-divisor":
            return _from_zero_divisor(cent, n)
        if status == "undecided":
            continue
        kerT = _nullspace_vectors(F, t.T.rows, n)
        status, S = _all_vectors_spin(gensT, kerT, n, cent, transpose=True)
        if status == "proper":
            return Irreducibility(False, _annihilator(F, S.rows, n))
        if status == "zero-divisor":
            return _from_zero_divisor(cent, n)
        if status == "full":
            return Irreducibility(True, None)
    raise NortonInconclusive(f"undecided after {trials} trials")


def _from_zero_divisor(cent: _Centralizer, n: int) -> Irreducibility:
    z = cent.zero_divisor
    F = z.field
    ker = _nullspace_vectors(F, z.rows, n)
    E = Echelon(F, n)
    for v in ker:
        E.add(v)
    return Irreducibility(False, E.rows)


def _rref_subspaces(F: FieldSpec, n: int, r: int):
    elems = list(F.elements())
    for pivots in itertools.combinations(range(n), r):
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
        for vals in itertools.product(elems, repeat=len(free)):
            rows = [[F.zero] * n for _ in range(r)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = F.one
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield rows, pivots


def bruteforce_invariant_subspaces(generators: Sequence[ExactMatrix], n: int | None = None) -> list[list]:
    """Every proper nonzero invariant subspace, as echelon bases (row vectors)."""
    gens = list(generators)
    F = gens[0].field
    if n is None:
        n = gens[0].nrows
    if not F.is_finite or F.order > BRUTE_ORDER_LIMIT or n > BRUTE_DIM_LIMIT:
        raise ValueError(f"exhaustive search limited to p^k <= {BRUTE_ORDER_LIMIT} and n <= {BRUTE_DIM_LIMIT}")
    found = []
    for r in range(1, n):
        for rows, pivots in _rref_subspaces(F, n, r):
            E = Echelon.from_rref(F, n, rows, pivots)
            if all(E.contains(g.apply(b)) for g in gens for b in rows):
                found.append(rows)
    return found


def within_bruteforce_bounds(F: FieldSpec, n: int) -> bool:
    return F.is_finite and F.order <= BRUTE_ORDER_LIMIT and n <= BRUTE_DIM_LIMIT
