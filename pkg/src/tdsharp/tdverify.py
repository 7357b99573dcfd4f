"""Certify tridiagonal pairs and assemble tridiagonal systems."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .fields import FieldSpec
from .linalg import ExactMatrix, LinalgError, column_space, eigendecompose, non_split_part, rank
from .meataxe import (bruteforce_invariant_subspaces, norton_irreducible,
                      within_bruteforce_bounds)

TAGS = ("not-diagonalizable-A", "not-diagonalizable-A*", "no-standard-ordering-A",
        "no-standard-ordering-A*", "reducible")


class VerificationFailure(Exception):
    """The input is not a TD pair; ``witness`` is re-checkable on its own."""

    def __init__(self, tag: str, witness, detail: str = "", field: FieldSpec | None = None):
        if tag not in TAGS:
            raise ValueError(f"unknown failure tag {tag!r}")
        super().__init__(f"{tag}: {detail}" if detail else tag)
        self.tag = tag
        self.witness = witness
        self.detail = detail
        self.field = field

    def to_json(self) -> dict:
        w = self.witness
        if self.tag.startswith("not-diagonalizable"):
            enc = w.encode()
        elif self.tag.startswith("no-standard-ordering"):
            enc = [list(e) for e in w]
        else:
            F = self.field
            enc = [[F.encode(x) for x in row] for row in w]
        return {"tag": self.tag, "witness": enc, "detail": self.detail}


class CorruptionError(AssertionError):
    """A proven property failed on an instance; ``lemma`` names what it contradicts."""

    def __init__(self, lemma: str, message: str):
        super().__init__(f"[{lemma}] {message}")
        self.lemma = lemma


@dataclass(frozen=True)
class TDSystemRecord:
    field: FieldSpec
    A: ExactMatrix
    Astar: ExactMatrix
    d: int
    E: tuple
    Estar: tuple
    theta: tuple
    theta_star: tuple
    shape: tuple
    sharp: bool
    ordering_counts: tuple = (1, 1)

    @property
    def n(self) -> int:
        return self.A.nrows

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.to_json(),
            "n": self.n,
            "d": self.d,
            "theta": [F.encode(t) for t in self.theta],
            "theta_star": [F.encode(t) for t in self.theta_star],
            "shape": list(self.shape),
            "sharp": self.sharp,
            "E": [E.to_json() for E in self.E],
            "E_star": [E.to_json() for E in self.Estar],
        }


def find_standard_orderings(idempotents: Sequence[ExactMatrix], B: ExactMatrix) -> list[list[int]]:
    """Orderings of ``idempotents`` making ``B`` block tridiagonal.

    Edges join i != j when E_i B E_j or E_j B E_i is nonzero; a standard
    ordering exists iff that graph is a path, and then it is the path read
    from either end.
    """
    k = len(idempotents)
    if k == 1:
        return [[0]]
    adj = {i: set() for i in range(k)}
    left = [E @ B for E in idempotents]
    for i in range(k):
        for j in range(i + 1, k):
            if not (left[i] @ idempotents[j]).is_zero() or not (left[j] @ idempotents[i]).is_zero():
                adj[i].add(j)
                adj[j].add(i)
    edges = sum(len(s) for s in adj.values()) // 2
    ends = [i for i in range(k) if len(adj[i]) == 1]
    if edges != k - 1 or any(len(s) > 2 for s in adj.values()) or len(ends) != 2:
        return []
    path = [ends[0]]
    prev = None
    while len(path) < k:
        nxt = [j for j in adj[path[-1]] if j != prev]
        if not nxt:
            return []
        prev = path[-1]
        path.append(nxt[0])
    return [path, path[::-1]]


def _adjacency(idempotents, B) -> list[tuple[int, int]]:
    k = len(idempotents)
    return [(i, j) for i in range(k) for j in range(k)
            if i != j and not (idempotents[i] @ B @ idempotents[j]).is_zero()]


def _is_linear_forest(k: int, edges) -> bool:
    """Undirected graph on range(k) embeds in a path: degrees <= 2 and acyclic."""
    und = {tuple(sorted(e)) for e in edges}
    deg = [0] * k
    for i, j in und:
        deg[i] += 1
        deg[j] += 1
    if any(x > 2 for x in deg):
        return False
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in und:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


def _component(k: int, edges) -> set[int]:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for a, b in edges:
            if a == i and b not in seen:
                seen.add(b)
                stack.append(b)
            elif b == i and a not in seen:
                seen.add(a)
                stack.append(a)
    return seen


def check_irreducible(gens: Sequence[ExactMatrix], rng: random.Random | None = None,
                      trials: int | None = None):
    """(irreducible, witness rows) with the exhaustive oracle preferred when in bounds."""
    F = gens[0].field
    n = gens[0].nrows
    if within_bruteforce_bounds(F, n):
        subs = bruteforce_invariant_subspaces(gens, n)
        return (not subs), (subs[0] if subs else None)
    res = norton_irreducible(gens, n, rng=rng, trials=trials)
    return res.irreducible, res.witness


def verify_td_system(A: ExactMatrix, Astar: ExactMatrix, rng: random.Random | None = None,
                     trials: int | None = None) -> TDSystemRecord:
    """Certify (A, A*) as a TD pair and return the canonical TD system.

    Raises :class:`VerificationFailure` naming the first failed condition, or
    :class:`~tdsharp.meataxe.NortonInconclusive` if irreducibility could not
    be decided.
    """
    if A.field != Astar.field or not A.is_square or A.shape != Astar.shape:
        raise LinalgError("A and A* must be square, of equal size, over one field")
    F = A.field
    n = A.nrows
    sdA = eigendecompose(A)
    if not sdA.diagonalizable:
        raise VerificationFailure("not-diagonalizable-A", non_split_part(sdA),
                                  "minimal polynomial does not split into distinct linear factors")
    sdS = eigendecompose(Astar)
    if not sdS.diagonalizable:
        raise VerificationFailure("not-diagonalizable-A*", non_split_part(sdS),
                                  "minimal polynomial does not split into distinct linear factors")
    for sd, B, tag in ((sdA, Astar, "no-standard-ordering-A"), (sdS, A, "no-standard-ordering-A*")):
        edges = _adjacency(sd.idempotents, B)
        if not _is_linear_forest(len(sd.idempotents), edges):
            raise VerificationFailure(tag, edges, "adjacency graph fits in no path")
        comp = _component(len(sd.idempotents), edges)
        if len(comp) < len(sd.idempotents):
            # a standard ordering exists, but the component's eigenspaces are invariant
            P = ExactMatrix.zeros(F, n, n)
            for i in comp:
                P = P + sd.idempotents[i]
            raise VerificationFailure("reducible", column_space(P),
                                      "eigenspace adjacency graph is disconnected", F)
    ordA = find_standard_orderings(sdA.idempotents, Astar)
    ordS = find_standard_orderings(sdS.idempotents, A)
    irreducible, witness = check_irreducible([A, Astar], rng=rng, trials=trials)
    if not irreducible:
        raise VerificationFailure("reducible", witness, f"invariant subspace of dimension {len(witness)}", F)
    d = len(sdA.eigenvalues) - 1
    if len(sdS.eigenvalues) - 1 != d:
        raise CorruptionError("char", "diameters of A and A* differ on an irreducible pair")
    key = F.sort_key
    best = min(((oa, os_) for oa in ordA for os_ in ordS),
               key=lambda c: (tuple(key(sdA.eigenvalues[i]) for i in c[0]),
                              tuple(key(sdS.eigenvalues[i]) for i in c[1])))
    oa, os_ = best
    E = tuple(sdA.idempotents[i] for i in oa)
    Es = tuple(sdS.idempotents[i] for i in os_)
    theta = tuple(sdA.eigenvalues[i] for i in oa)
    theta_s = tuple(sdS.eigenvalues[i] for i in os_)
    shape = tuple(sdA.dims[i] for i in oa)
    record = TDSystemRecord(F, A, Astar, d, E, Es, theta, theta_s, shape, shape[0] == 1,
                            (len(ordA), len(ordS)))
    shape_profile(record)
    _assert_identities(record)
    return record


def shape_profile(record: TDSystemRecord) -> tuple[tuple, bool, int]:
    """Shape from idempotent ranks (asserted equal for E_i and E*_i), sharpness, diameter."""
    rho = []
    for E, Es in zip(record.E, record.Estar):
        r, rs = rank(E), rank(Es)
        if r != rs:
            raise CorruptionError("char", f"rank E_i = {r} but rank E*_i = {rs}")
        rho.append(r)
    d = record.d
    if any(rho[i] != rho[d - i] for i in range(d + 1)):
        raise CorruptionError("char", f"shape {rho} is not symmetric")
    if any(rho[i - 1] > rho[i] for i in range(1, d // 2 + 1)):
        raise CorruptionError("char", f"shape {rho} is not unimodal")
    if tuple(rho) != tuple(record.shape):
        raise CorruptionError("char", "stored shape disagrees with idempotent ranks")
    return tuple(rho), rho[0] == 1, d


def _assert_identities(rec: TDSystemRecord) -> None:
    F = rec.field
    n = rec.n
    ident = ExactMatrix.identity(F, n)
    for Es, M, thetas in ((rec.E, rec.A, rec.theta), (rec.Estar, rec.Astar, rec.theta_star)):
        total = ExactMatrix.zeros(F, n, n)
        recon = ExactMatrix.zeros(F, n, n)
        for E, t in zip(Es, thetas):
            total = total + E
            recon = recon + E.scale(t)
        if total != ident or recon != M:
            raise CorruptionError("char", "idempotent identities fail")
    for i in range(rec.d + 1):
        for j in range(rec.d + 1):
            if abs(i - j) > 1:
                if not (rec.E[i] @ rec.Astar @ rec.E[j]).is_zero():
                    raise CorruptionError("char", f"E_{i} A* E_{j} != 0")
                if not (rec.Estar[i] @ rec.A @ rec.Estar[j]).is_zero():
                    raise CorruptionError("char", f"E*_{i} A E*_{j} != 0")
