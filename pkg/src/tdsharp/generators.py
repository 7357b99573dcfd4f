"""Candidate TD pairs: split form, restriction of scalars, twisted and tensor families.

Everything here produces *candidates*.  Callers decide membership with
:func:`tdsharp.tdverify.verify_td_system`.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence

from .fields import EXTENSION, FieldError, FieldSpec, GF
from .instances import Instance
from .linalg import ExactMatrix
from .tdverify import TDSystemRecord, verify_td_system


class GeneratorError(ValueError):
    """A generator precondition failed; the message names it."""


@dataclass(frozen=True)
class SplitFormParams:
    field: FieldSpec
    d: int
    theta: tuple
    theta_star: tuple
    phi: tuple

    def __post_init__(self):
        F = self.field
        if self.d < 0:
            raise GeneratorError("diameter must be >= 0")
        if len(self.theta) != self.d + 1 or len(self.theta_star) != self.d + 1 or len(self.phi) != self.d:
            raise GeneratorError("sequence lengths do not match the diameter")
        for name, seq in (("theta", self.theta), ("theta_star", self.theta_star)):
            if len(set(seq)) != len(seq):
                raise GeneratorError(f"{name} entries are not distinct")
        if any(F.is_zero(x) for x in self.phi):
            raise GeneratorError("phi entries must be nonzero")

    def to_json(self) -> dict:
        F = self.field
        return {"d": self.d, "theta": [F.encode(x) for x in self.theta],
                "theta_star": [F.encode(x) for x in self.theta_star],
                "phi": [F.encode(x) for x in self.phi]}


def split_form_pair(params: SplitFormParams) -> tuple[ExactMatrix, ExactMatrix]:
    """A lower bidiagonal (theta, 1s below); A* upper bidiagonal (theta*, phi above)."""
    F = params.field
    n = params.d + 1
    A = [[F.zero] * n for _ in range(n)]
    As = [[F.zero] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = params.theta[i]
        As[i][i] = params.theta_star[i]
        if i > 0:
            A[i][i - 1] = F.one
            As[i - 1][i] = params.phi[i - 1]
    return ExactMatrix(F, A, n), ExactMatrix(F, As, n)


# ---- Leonard-type parameter sampling ------------------------------------


def _three_term_sequence(F: FieldSpec, d: int, rng: random.Random, q):
    """theta_i = a + b q^i + c q^-i, or a + b i + c i^2 when q is None."""
    a, b, c = F.random(rng), F.random(rng), F.random(rng)
    out = []
    for i in range(d + 1):
        if q is None:
            ii = F.from_int(i)
            out.append(F.add(a, F.add(F.mul(b, ii), F.mul(c, F.mul(ii, ii)))))
        else:
            out.append(F.add(a, F.add(F.mul(b, F.pow(q, i)), F.mul(c, F.pow(F.inv(q), i)))))
    return tuple(out)


def split_sequences(F: FieldSpec, theta: Sequence, theta_star: Sequence, varphi1):
    """First and second split sequences from the eigenvalue data and varphi_1.

    Returns ``(phi, varphi)`` or None when theta_0 = theta_d.
    """
    d = len(theta) - 1
    if d == 0:
        return (), ()
    denom = F.sub(theta[0], theta[d])
    if F.is_zero(denom):
        return None
    inv = F.inv(denom)
    partial = [F.zero]
    for h in range(d):
        partial.append(F.add(partial[-1], F.mul(F.sub(theta[h], theta[d - h]), inv)))
    phi = []
    for i in range(1, d + 1):
        phi.append(F.add(F.mul(varphi1, partial[i]),
                         F.mul(F.sub(theta_star[i], theta_star[0]), F.sub(theta[i - 1], theta[d]))))
    phi1 = phi[0]
    varphi = []
    for i in range(1, d + 1):
        varphi.append(F.add(F.mul(phi1, partial[i]),
                            F.mul(F.sub(theta_star[i], theta_star[0]), F.sub(theta[d - i + 1], theta[0]))))
    return tuple(phi), tuple(varphi)


def random_split_params(F: FieldSpec, d: int, rng: random.Random, base_eigenvalues: bool = False,
                        twisted: bool = False, max_tries: int = 2000) -> SplitFormParams:
    """Rejection-sample split-form parameters of Leonard type.

    ``base_eigenvalues`` keeps theta, theta* in the prime subfield;
    ``twisted`` forces varphi_1 outside it (so the pair is not defined over
    the prime field).
    """
    sub = F.prime_field if base_eigenvalues else F
    for _ in range(max_tries):
        if d <= 2:
            theta = tuple(sub.random(rng) for _ in range(d + 1))
            theta_s = tuple(sub.random(rng) for _ in range(d + 1))
        else:
            q = None
            if rng.random() < 0.5:
                q = sub.random(rng)
                if sub.is_zero(q):
                    continue
            theta = _three_term_sequence(sub, d, rng, q)
            theta_s = _three_term_sequence(sub, d, rng, q)
        if sub is not F:
            theta = tuple(F.coerce([t]) for t in theta)
            theta_s = tuple(F.coerce([t]) for t in theta_s)
        if len(set(theta)) != d + 1 or len(set(theta_s)) != d + 1:
            continue
        varphi1 = F.random(rng)
        if twisted and (F.kind != EXTENSION or all(F.base.is_zero(c) for c in varphi1[1:])):
            continue
        seqs = split_sequences(F, theta, theta_s, varphi1)
        if seqs is None:
            continue
        phi, varphi = seqs
        if any(F.is_zero(x) for x in phi + varphi):
            continue
        return SplitFormParams(F, d, theta, theta_s, phi)
    raise GeneratorError(f"no admissible parameters found in {max_tries} tries")


def split_instance(p: int, d: int, seed: int, k: int = 1, restrictable: bool = False) -> Instance:
    """Seeded split-form candidate over GF(p^k).

    ``restrictable`` keeps the eigenvalues in GF(p) and twists varphi_1 out of
    it, so the result is a seed for :func:`restrict_instance`.
    """
    F = GF(p, k)
    rng = random.Random(seed)
    params = random_split_params(F, d, rng, base_eigenvalues=restrictable, twisted=restrictable and k > 1)
    A, As = split_form_pair(params)
    prov = {"generator": "split", "params": {"p": p, "k": k, "d": d, "restrictable": restrictable,
                                             **params.to_json()}, "seed": seed}
    return Instance(F, A, As, prov)


# ---- restriction of scalars ---------------------------------------------


def regular_representation(F: FieldSpec, alpha) -> list[list]:
    """Matrix of multiplication by ``alpha`` on the power basis 1, x, ..., x^(k-1)."""
    k = F.k
    base = F.base
    cols = []
    for j in range(k):
        xj = tuple(base.one if i == j else base.zero for i in range(k))
        cols.append(F.mul(alpha, xj))
    return [[cols[j][i] for j in range(k)] for i in range(k)]


def restrict_matrix(M: ExactMatrix) -> ExactMatrix:
    """Entrywise regular representation: an n x n matrix over GF(p^k) becomes kn x kn over GF(p)."""
    F = M.field
    if F.kind != EXTENSION:
        return M
    k = F.k
    base = F.base
    n, m = M.nrows, M.ncols
    rows = [[base.zero] * (m * k) for _ in range(n * k)]
    for i in range(n):
        for j in range(m):
            a = M.rows[i][j]
            if F.is_zero(a):
                continue
            block = regular_representation(F, a)
            for r in range(k):
                for c in range(k):
                    rows[i * k + r][j * k + c] = block[r][c]
    return ExactMatrix(base, rows, m * k)


def _in_base(F: FieldSpec, a) -> bool:
    return F.kind != EXTENSION or all(F.base.is_zero(c) for c in a[1:])


def restrict_scalars(record: TDSystemRecord) -> tuple[ExactMatrix, ExactMatrix]:
    """Restrict a verified system over GF(p^k) to GF(p).  Output is unverified."""
    F = record.field
    if F.kind != EXTENSION:
        return record.A, record.Astar
    for name, seq in (("eigenvalue", record.theta), ("dual eigenvalue", record.theta_star)):
        for t in seq:
            if not _in_base(F, t):
                raise GeneratorError(f"{name} {F.encode(t)} lies outside the base field")
    return restrict_matrix(record.A), restrict_matrix(record.Astar)


def restrict_instance(inst: Instance, rng: random.Random | None = None) -> Instance:
    record = verify_td_system(inst.A, inst.Astar, rng=rng)
    A, As = restrict_scalars(record)
    prov = {"generator": "restrict", "params": {"seed_instance": inst.to_json()},
            "seed": (inst.provenance or {}).get("seed")}
    return Instance(A.field, A, As, prov)


def restriction_seed(p: int, k: int, d: int, seed: int, max_tries: int = 50) -> TDSystemRecord:
    """Sharp system over GF(p^k) with eigenvalues in GF(p) and varphi_1 outside it."""
    F = GF(p, k)
    rng = random.Random(seed)
    for _ in range(max_tries):
        params = random_split_params(F, d, rng, base_eigenvalues=True, twisted=True)
        A, As = split_form_pair(params)
        rec = verify_td_system(A, As, rng=rng)
        if rec.sharp:
            return rec
    raise GeneratorError("no sharp seed found")  # pragma: no cover


def restriction_instance(p: int, k: int, d: int, seed: int) -> tuple[Instance, TDSystemRecord]:
    rec = restriction_seed(p, k, d, seed)
    A, As = restrict_scalars(rec)
    prov = {"generator": "restrict-split", "params": {"p": p, "k": k, "d": d}, "seed": seed}
    return Instance(A.field, A, As, prov), rec


# ---- twisted diameter-1 family -------------------------------------------

_TERM = re.compile(r"^([0-9]*)\*?(i(?:\^([0-9]+))?)?$")


def parse_element(F: FieldSpec, text: str):
    """Parse ``a``, ``b*i``, ``a+bi``, ``i^2`` ... where i is the class of x."""
    s = text.replace(" ", "")
    if not s:
        raise FieldError("empty element literal")
    if F.kind != EXTENSION:
        try:
            return F.coerce(int(s)) if F.p else F.coerce(s)
        except ValueError:
            raise FieldError(f"cannot parse {text!r} in {F!r}") from None
    acc = F.zero
    for sign, term in re.findall(r"([+-]?)([^+-]+)", s):
        m = _TERM.match(term)
        if not m or (not m.group(1) and not m.group(2)):
            raise FieldError(f"cannot parse term {term!r} of {text!r}")
        coef = F.from_int(int(m.group(1)) if m.group(1) else 1)
        power = 0 if not m.group(2) else int(m.group(3) or 1)
        x = tuple(F.base.one if j == 1 else F.base.zero for j in range(F.k))
        val = F.mul(coef, F.pow(x, power))
        acc = F.sub(acc, val) if sign == "-" else F.add(acc, val)
    return acc


def twisted_seed(p: int, theta0, theta1, ts0, ts1, gamma) -> tuple[ExactMatrix, ExactMatrix]:
    """The 2x2 seed over GF(p^2); raw inputs are GF(p) ints and a GF(p^2) raw gamma."""
    E = GF(p, 2)
    t0, t1, s0, s1 = (E.coerce(v % p) for v in (theta0, theta1, ts0, ts1))
    if t0 == t1:
        raise GeneratorError("theta_0 = theta_1: eigenvalues must be distinct")
    if s0 == s1:
        raise GeneratorError("theta*_0 = theta*_1: dual eigenvalues must be distinct")
    g = E.coerce(gamma)
    if _in_base(E, g):
        raise GeneratorError("gamma not outside base field")
    if g == E.mul(E.sub(t0, t1), E.sub(s1, s0)):
        raise GeneratorError("gamma = (theta_0 - theta_1)(theta*_1 - theta*_0): seed would be reducible")
    if _in_base(E, E.mul(g, g)):
        raise GeneratorError("gamma^2 lies in the base field")
    B = ExactMatrix(E, [[t0, E.zero], [E.one, t1]])
    Bs = ExactMatrix(E, [[s0, g], [E.zero, s1]])
    return B, Bs


def twisted_diameter1_nonsharp(p: int, theta0, theta1, ts0, ts1, gamma,
                               rng: random.Random | None = None) -> tuple[ExactMatrix, ExactMatrix]:
    """4x4 candidate over GF(p) restricted from a verified 2x2 seed over GF(p^2)."""
    B, Bs = twisted_seed(p, theta0, theta1, ts0, ts1, gamma)
    return restrict_scalars(verify_td_system(B, Bs, rng=rng))


def twisted_instance(p: int, params: str) -> Instance:
    """``params`` is ``theta0,theta1,theta*0,theta*1,gamma`` as on the command line."""
    parts = [s.strip() for s in params.split(",")]
    if len(parts) != 5:
        raise GeneratorError("expected five comma-separated parameters")
    try:
        nums = [int(x) for x in parts[:4]]
    except ValueError:
        raise GeneratorError("theta parameters must be integers") from None
    E = GF(p, 2)
    gamma = parse_element(E, parts[4])
    A, As = twisted_diameter1_nonsharp(p, *nums, gamma)
    prov = {"generator": "twisted", "params": {"p": p, "theta": nums[:2], "theta_star": nums[2:],
                                                "gamma": parts[4], "modulus": E.to_json()["modulus"]},
            "seed": None}
    return Instance(A.field, A, As, prov)


# ---- tensor products ------------------------------------------------------


def kron(X: ExactMatrix, Y: ExactMatrix) -> ExactMatrix:
    F = X.field
    rows = []
    for xr in X.rows:
        for yr in Y.rows:
            rows.append([F.mul(a, b) for a in xr for b in yr])
    return ExactMatrix(F, rows, X.ncols * Y.ncols)


def tensor_pair(first: tuple[ExactMatrix, ExactMatrix],
                second: tuple[ExactMatrix, ExactMatrix]) -> tuple[ExactMatrix, ExactMatrix]:
    """(A1 (x) I + I (x) A2, A1* (x) I + I (x) A2*)."""
    (A1, S1), (A2, S2) = first, second
    F = A1.field
    I1 = ExactMatrix.identity(F, A1.nrows)
    I2 = ExactMatrix.identity(F, A2.nrows)
    return kron(A1, I2) + kron(I1, A2), kron(S1, I2) + kron(I1, S2)


def tensor_seed(p: int, k: int, seed: int, max_tries: int = 200) -> TDSystemRecord:
    """Diameter-2 system of shape (1,2,1) over GF(p^k): a tensor product of two
    diameter-1 Leonard pairs with theta = theta* = (0, 1) and distinct twisted phi."""
    F = GF(p, k)
    rng = random.Random(seed)
    zero, one = F.zero, F.one
    B = ExactMatrix(F, [[zero, zero], [one, one]])
    for _ in range(max_tries):
        phis = [F.random(rng), F.random(rng)]
        if phis[0] == phis[1] or any(_in_base(F, f) for f in phis):
            continue
        pairs = [(B, ExactMatrix(F, [[zero, f], [zero, one]])) for f in phis]
        A, As = tensor_pair(pairs[0], pairs[1])
        try:
            rec = verify_td_system(A, As, rng=rng)
        except Exception:  # candidate rejected; try the next draw
            continue
        if all(_in_base(F, t) for t in rec.theta + rec.theta_star):
            return rec
    raise GeneratorError("no tensor seed verified")


def tensor_restriction_instance(p: int, k: int, seed: int) -> tuple[Instance, TDSystemRecord]:
    rec = tensor_seed(p, k, seed)
    A, As = restrict_scalars(rec)
    prov = {"generator": "restrict-tensor", "params": {"p": p, "k": k}, "seed": seed}
    return Instance(A.field, A, As, prov), rec
