"""Sharpening: re-read V as a vector space over the center of the algebra
generated by A and A*, certifying each structural claim along the way."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import algebra
from .algebra import (AlgebraBasis, FieldCertificate, FieldCertificationInconclusive, NotAField,
                      corner, corner_generators_check, element_minpoly, field_certify,
                      one_sided_space, subalgebra_closure)
from .fields import FieldSpec, embed_base
from .generators import restrict_matrix
from .linalg import (Echelon, ExactMatrix, LinalgError, _nullspace_vectors, column_space, inverse,
                     rank)
from .meataxe import NortonInconclusive, trial_budget
from .tdverify import CorruptionError, TDSystemRecord, VerificationFailure, check_irreducible, verify_td_system

LEMMA_KEYS = ("char", "faithful", "center_field", "comgen", "ete0", "es0inj", "vbij", "ext", "ndeg",
              "dualb", "centact", "last", "tdk", "final")
CORNER_NAMES = ("E0", "Ed", "Estar0", "Estard")
SURJECTIVITY_SAMPLES = 10
# enumerate every element of TE*_0 for the injectivity check below this count
INJECTIVITY_ENUM_LIMIT = 2000


def _fail(lemma: str, message: str):
    raise CorruptionError(lemma, message)


def build_T(record: TDSystemRecord) -> AlgebraBasis:
    F, n = record.field, record.n
    T = subalgebra_closure([record.A, record.Astar], unit=ExactMatrix.identity(F, n))
    for E in record.E + record.Estar:
        if not T.contains(E):
            _fail("char", "a primitive idempotent lies outside T")
    return T


def center_field(T: AlgebraBasis, rng: random.Random | None = None,
                 trials: int = 200) -> tuple[AlgebraBasis, int, FieldCertificate]:
    Z = algebra.center(T)
    res = field_certify(Z, rng, trials)
    if isinstance(res, NotAField):
        _fail("center_field", f"center is not a field ({res.reason})")
    return Z, Z.dim, res


@dataclass(frozen=True)
class CornerIso:
    name: str
    e: ExactMatrix
    corner: AlgebraBasis
    matrix: ExactMatrix  # columns: corner coordinates of z_j e for the Z basis z_j
    certificate: FieldCertificate
    generated: bool

    def to_json(self) -> dict:
        return {"dim": self.corner.dim, "minpoly": self.certificate.minpoly.encode(),
                "iso_rank": rank(self.matrix), "generated": self.generated}


def corner_iso_check(T: AlgebraBasis, Z: AlgebraBasis, zcert: FieldCertificate, e: ExactMatrix,
                     gen: ExactMatrix, d: int, name: str = "", rng: random.Random | None = None,
                     trials: int = 200) -> CornerIso:
    """Check z -> z e is a unital ring isomorphism Z(T) -> eTe.

    ``gen`` is the operator whose compressions e gen^i e (1 <= i <= d) must
    generate the corner.
    """
    F = T.field
    C = corner(T, e)
    zs = Z.basis
    images = []
    for z in zs:
        ze = z @ e
        if ze != e @ z @ e:
            _fail("centact", f"{name}: z e != e z e")
        coords = C.coordinates(ze)
        if coords is None:
            _fail("centact", f"{name}: z e lies outside the corner")
        images.append((ze, coords))
    if Z.unit @ e != e:
        _fail("centact", f"{name}: unit not preserved")
    for (z1, (i1, _)), (z2, (i2, _)) in itertools.product(zip(zs, images), repeat=2):
        if (z1 @ z2) @ e != i1 @ i2:
            _fail("centact", f"{name}: map is not multiplicative")
    M = ExactMatrix.from_columns(F, [c for _, c in images], C.dim) if zs else ExactMatrix.zeros(F, C.dim, 0)
    if rank(M) != Z.dim:
        _fail("centact", f"{name}: map is not injective")
    if C.dim != Z.dim:
        _fail("centact", f"{name}: corner has dimension {C.dim}, center {Z.dim}")
    cert = field_certify(C, rng, trials)
    if isinstance(cert, NotAField):
        _fail("ext", f"{name}: corner is not a field ({cert.reason})")
    # the image of the center's primitive element has the same minimal polynomial
    if element_minpoly(zcert.primitive @ e, e) != zcert.minpoly:
        _fail("ext", f"{name}: transported primitive element changed its minimal polynomial")
    generated = corner_generators_check(T, e, gen, d, C)
    return CornerIso(name, e, C, M, cert, generated)


@dataclass(frozen=True)
class DualBasisPair:
    n: int
    xs: tuple
    xps: tuple
    gram: ExactMatrix  # over the corner field
    corner_field: FieldSpec

    def to_json(self) -> dict:
        return {"n": self.n, "gram": self.gram.to_json(), "corner_field": self.corner_field.to_json()}


def _module_basis(space: AlgebraBasis, powers: Sequence[ExactMatrix], side: str) -> list[ExactMatrix]:
    """Greedy basis of ``space`` over the field spanned by ``powers``, acting on ``side``."""
    F = space.field
    span = Echelon(F, space.n * space.n)
    chosen = []
    for b in space.basis:
        if span.contains(b.vec()):
            continue
        vecs = [(b @ P if side == "right" else P @ b).vec() for P in powers]
        before = span.dim
        for v in vecs:
            span.add(v)
        if span.dim - before != len(powers):
            _fail("ndeg", "field action on a one-sided space is not free")
        chosen.append(b)
    if span.dim != space.dim:
        _fail("ndeg", "greedy module basis does not span")
    return chosen


def bilinear_dual_basis(T: AlgebraBasis, es0: ExactMatrix, cert: FieldCertificate) -> DualBasisPair:
    """Bases x_i of T E*_0 and x'_i of E*_0 T with x'_i x_j = delta_ij E*_0."""
    TE = one_sided_space(T, es0, "right")
    ET = one_sided_space(T, es0, "left")
    powers = list(cert.powers)
    xs = _module_basis(TE, powers, "right")
    hats = _module_basis(ET, powers, "left")
    n = len(xs)
    if len(hats) != n:
        _fail("ndeg", "one-sided spaces have different ranks over the corner field")
    K = cert.extension_field()
    gram = ExactMatrix(K, [[cert.to_field(h @ x) for x in xs] for h in hats], n)
    try:
        H = inverse(gram)
    except LinalgError:
        _fail("ndeg", "Gram matrix is singular")
    xps = []
    for i in range(n):
        acc = ExactMatrix.zeros(T.field, T.n, T.n)
        for k in range(n):
            acc = acc + cert.from_field(H.rows[i][k]) @ hats[k]
        xps.append(acc)
    zero = ExactMatrix.zeros(T.field, T.n, T.n)
    for i, xp in enumerate(xps):
        for j, x in enumerate(xs):
            if xp @ x != (es0 if i == j else zero):
                _fail("dualb", f"x'_{i} x_{j} is wrong")
    return DualBasisPair(n, tuple(xs), tuple(xps), gram, K)


def center_surjectivity_witness(a: ExactMatrix, dual: DualBasisPair, T: AlgebraBasis,
                                es0: ExactMatrix) -> ExactMatrix:
    """z = sum x_i a x'_i, asserted central with z E*_0 = a."""
    z = ExactMatrix.zeros(a.field, a.nrows, a.ncols)
    for x, xp in zip(dual.xs, dual.xps):
        z = z + x @ a @ xp
    for t in T.basis:
        if z @ t != t @ z:
            _fail("centact", "surjectivity witness is not central")
    if z @ es0 != a:
        _fail("centact", "surjectivity witness does not restrict to a")
    return z


@dataclass(frozen=True)
class ModuleIso:
    v: tuple
    dim_TE: int
    dim_V: int
    es0inj: bool
    ete0: bool


def tv_module_iso_check(T: AlgebraBasis, es0: ExactMatrix, cert: FieldCertificate,
                        rng: random.Random | None = None) -> ModuleIso:
    F, n = T.field, T.n
    EV = column_space(es0)
    v = EV[0]
    TE = one_sided_space(T, es0, "right")
    images = Echelon(F, n)
    for s in TE.basis:
        images.add(s.apply(v))
    if TE.dim != n or images.dim != n:
        _fail("vbij", f"s -> s v has rank {images.dim} on a space of dimension {TE.dim}, dim V = {n}")
    # injectivity of s on E*_0 V: the corner field moves v onto all of E*_0 V,
    # and s k stays nonzero in T E*_0 for invertible k
    orbit = Echelon(F, n)
    for P in cert.powers:
        orbit.add(P.apply(v))
    if orbit.dim != len(EV):
        _fail("es0inj", "corner field orbit of v does not fill E*_0 V")
    if F.is_finite and F.order ** TE.dim <= INJECTIVITY_ENUM_LIMIT:
        basis = TE.basis
        for coeffs in itertools.product(list(F.elements()), repeat=TE.dim):
            if all(F.is_zero(c) for c in coeffs):
                continue
            s = TE.combine(coeffs)
            Ev = Echelon(F, n)
            for w in EV:
                Ev.add(s.apply(w))
            if Ev.dim != len(EV):
                _fail("es0inj", "a nonzero s in T E*_0 kills a vector of E*_0 V")
    # the corner acts irreducibly on E*_0 V
    restricted = []
    for c in corner(T, es0).basis:
        cols = []
        for w in EV:
            coords = _coords_in(F, EV, c.apply(w))
            cols.append(coords)
        restricted.append(ExactMatrix.from_columns(F, cols, len(EV)))
    irreducible, _ = check_irreducible(restricted, rng=rng)
    if not irreducible:
        _fail("ete0", "corner algebra has an invariant subspace in E*_0 V")
    return ModuleIso(tuple(v), TE.dim, n, True, True)


def _coords_in(F: FieldSpec, basis: Sequence[Sequence], w: Sequence) -> list:
    E = Echelon(F, len(w), track=True)
    for b in basis:
        E.add(b)
    rel = E.express(w)
    if rel is None:
        _fail("ete0", "corner does not preserve E*_0 V")
    return [rel.get(i, F.zero) for i in range(len(basis))]


@dataclass(frozen=True)
class Rebase:
    record: TDSystemRecord
    basis: tuple  # vectors b_j with V = sum Z b_j
    conjugator: ExactMatrix | None


def _z_basis(F: FieldSpec, n: int, powers: Sequence[ExactMatrix]) -> tuple[list, Echelon]:
    rho = len(powers)
    span = Echelon(F, n, track=True)
    chosen = []
    for j in range(n):
        e = [F.one if i == j else F.zero for i in range(n)]
        if span.contains(e):
            continue
        before = span.dim
        for P in powers:
            span.add(P.apply(e))
        if span.dim - before != rho:
            _fail("tdk", "center does not act freely on V")
        chosen.append(e)
    if span.dim != n:
        _fail("tdk", "greedy center basis stalled")
    return chosen, span


def rebase_over_center(record: TDSystemRecord, zcert: FieldCertificate,
                       rng: random.Random | None = None) -> Rebase:
    F, n = record.field, record.n
    rho = zcert.dim
    if n % rho:
        _fail("tdk", f"dim V = {n} is not divisible by rho = {rho}")
    K = zcert.extension_field()
    powers = list(zcert.powers)
    basis, span = _z_basis(F, n, powers)
    m = len(basis)

    def coords(w):
        rel = span.express(w)
        out = []
        for j in range(m):
            c = tuple(rel.get(j * rho + k, F.zero) for k in range(rho))
            out.append(c[0] if rho == 1 else c)
        return out

    def rebase(M: ExactMatrix) -> ExactMatrix:
        cols = [coords(M.apply(b)) for b in basis]
        return ExactMatrix.from_columns(K, cols, m)

    A2, As2 = rebase(record.A), rebase(record.Astar)
    try:
        rec2 = verify_td_system(A2, As2, rng=rng)
    except VerificationFailure as exc:
        _fail("tdk", f"rebased pair fails verification: {exc}")
    emb = lambda seq: tuple(embed_base(F.wrap(t), K).value for t in seq)
    if rec2.theta != emb(record.theta) or rec2.theta_star != emb(record.theta_star):
        _fail("tdk", "rebased eigenvalue sequences differ from the embedded originals")
    for i, (r_old, r_new) in enumerate(zip(record.shape, rec2.shape)):
        if r_new * rho != r_old:
            _fail("tdk", f"dimension law fails on eigenspace {i}: {r_new} * {rho} != {r_old}")
    if not rec2.sharp:
        _fail("final", "rebased system is not sharp")
    X = simultaneous_conjugator(record.A, record.Astar, restrict_matrix(A2), restrict_matrix(As2))
    if X is None:
        _fail("final", "expanded rebased pair is not conjugate to the input")
    return Rebase(rec2, tuple(tuple(b) for b in basis), X)


def simultaneous_conjugator(A: ExactMatrix, As: ExactMatrix, A2: ExactMatrix,
                            As2: ExactMatrix) -> ExactMatrix | None:
    """Invertible X with X A = A2 X and X As = As2 X, or None."""
    F, n = A.field, A.nrows
    if A2.field != F or A2.shape != A.shape:
        return None
    N = n * n
    system = []
    for M, M2 in ((A, A2), (As, As2)):
        for i in range(n):
            for j in range(n):
                # (X M)_ij - (M2 X)_ij, unknown X row-major
                row = [F.zero] * N
                for k in range(n):
                    row[i * n + k] = F.add(row[i * n + k], M.rows[k][j])
                    row[k * n + j] = F.sub(row[k * n + j], M2.rows[i][k])
                system.append(row)
    sols = _nullspace_vectors(F, system, N)
    for v in sols:
        X = ExactMatrix.from_vec(F, v, n, n)
        if rank(X) == n:
            return X
    if F.is_finite and len(sols) > 1:
        for coeffs in itertools.product(list(F.elements()), repeat=min(len(sols), 3)):
            acc = [F.zero] * N
            for c, v in zip(coeffs, sols):
                acc = [F.add(a, F.mul(c, b)) for a, b in zip(acc, v)]
            X = ExactMatrix.from_vec(F, acc, n, n)
            if rank(X) == n:
                return X
    return None


@dataclass
class SharpeningCertificate:
    outcome: str = "accepted"  # accepted | rejected | corrupted | inconclusive
    record: TDSystemRecord | None = None
    failure: VerificationFailure | None = None
    failed_lemma: str | None = None
    message: str = ""
    T: AlgebraBasis | None = None
    Z: AlgebraBasis | None = None
    rho: int | None = None
    z_certificate: FieldCertificate | None = None
    corners: dict = field(default_factory=dict)
    dual: DualBasisPair | None = None
    module_iso: ModuleIso | None = None
    surjectivity_checked: int = 0
    rebase: Rebase | None = None
    lemma_passes: dict = field(default_factory=lambda: {k: None for k in LEMMA_KEYS})

    @property
    def sharpened(self) -> TDSystemRecord | None:
        return self.rebase.record if self.rebase else None

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "failed_lemma": self.failed_lemma,
            "message": self.message,
            "failure": self.failure.to_json() if self.failure else None,
            "input": self.record.to_json() if self.record else None,
            "T_dim": self.T.dim if self.T else None,
            "rho": self.rho,
            "Z_minpoly": self.z_certificate.minpoly.encode() if self.z_certificate else None,
            "corners": {k: c.to_json() for k, c in self.corners.items()},
            "dual_basis_n": self.dual.n if self.dual else None,
            "witness_vector": ([self.record.field.encode(x) for x in self.module_iso.v]
                               if self.module_iso else None),
            "surjectivity_samples": self.surjectivity_checked,
            "lemma_passes": dict(self.lemma_passes),
            "sharpened": self.sharpened.to_json() if self.sharpened else None,
        }


def sharpen_pipeline(A: ExactMatrix, Astar: ExactMatrix, seed: int = 0,
                     trials: int | None = None) -> SharpeningCertificate:
    """Verify, build T and Z(T), certify each structural claim, rebase over Z(T)."""
    rng = random.Random(seed)
    budget = trials if trials is not None else trial_budget()
    cert = SharpeningCertificate()
    passes = cert.lemma_passes
    stage = "char"
    try:
        rec = verify_td_system(A, Astar, rng=rng, trials=trials)
        cert.record = rec
        passes["char"] = True
        passes["faithful"] = True  # matrices act faithfully on their column space

        stage = "center_field"
        T = build_T(rec)
        cert.T = T
        Z, rho, zcert = center_field(T, rng, budget)
        cert.Z, cert.rho, cert.z_certificate = Z, rho, zcert
        passes["center_field"] = True

        stage = "centact"
        d = rec.d
        specs = (("E0", rec.E[0], rec.Astar), ("Ed", rec.E[d], rec.Astar),
                 ("Estar0", rec.Estar[0], rec.A), ("Estard", rec.Estar[d], rec.A))
        for name, e, gen in specs:
            cert.corners[name] = corner_iso_check(T, Z, zcert, e, gen, d, name, rng, budget)
        passes["ext"] = True
        passes["comgen"] = all(c.generated for c in cert.corners.values())
        if not passes["comgen"]:
            _fail("comgen", "a corner is not generated by compressions of the other operator")

        stage = "ndeg"
        es0 = rec.Estar[0]
        ccert = cert.corners["Estar0"].certificate
        dual = bilinear_dual_basis(T, es0, ccert)
        cert.dual = dual
        passes["ndeg"] = True
        passes["dualb"] = True
        if dual.n * ccert.dim != rec.n:
            _fail("dualb", f"n * rho_0 = {dual.n * ccert.dim} != dim V = {rec.n}")

        stage = "centact"
        C = cert.corners["Estar0"].corner
        samples = [es0, ExactMatrix.zeros(rec.field, rec.n, rec.n)]
        samples += [C.random_element(rng) for _ in range(SURJECTIVITY_SAMPLES)]
        for a in samples:
            center_surjectivity_witness(a, dual, T, es0)
        cert.surjectivity_checked = len(samples)
        passes["centact"] = True

        stage = "vbij"
        cert.module_iso = tv_module_iso_check(T, es0, ccert, rng)
        passes["vbij"] = passes["es0inj"] = passes["ete0"] = True

        stage = "last"
        if rho != rec.shape[0]:
            _fail("last", f"rho = {rho} but rho_0 = {rec.shape[0]}")
        passes["last"] = True

        stage = "tdk"
        cert.rebase = rebase_over_center(rec, zcert, rng)
        passes["tdk"] = True
        passes["final"] = True
    except VerificationFailure as exc:
        cert.outcome = "rejected"
        cert.failure = exc
        cert.failed_lemma = "char"
        cert.message = str(exc)
        passes["char"] = False
    except (NortonInconclusive, FieldCertificationInconclusive) as exc:
        cert.outcome = "inconclusive"
        cert.failed_lemma = stage
        cert.message = str(exc)
    except CorruptionError as exc:
        cert.outcome = "corrupted"
        cert.failed_lemma = exc.lemma
        cert.message = str(exc)
        passes[exc.lemma] = False
    except AssertionError as exc:
        cert.outcome = "corrupted"
        cert.failed_lemma = stage
        cert.message = str(exc) or "internal identity check failed"
        passes[stage] = False
    return cert
