from __future__ import annotations

import random

import pytest

from tdsharp.fields import GF
from tdsharp.generators import split_instance
from tdsharp.linalg import ExactMatrix, inverse, matrix, rank
from tdsharp.meataxe import is_invariant
from tdsharp.tdverify import (VerificationFailure, find_standard_orderings, shape_profile,
                              verify_td_system)


def test_orderings_single_idempotent():
    F = GF(5)
    assert find_standard_orderings([ExactMatrix.identity(F, 1)], matrix(F, [[1]])) == [[0]]


def test_orderings_diameter_one():
    F = GF(5)
    E0, E1 = matrix(F, [[1, 0], [4, 0]]), matrix(F, [[0, 0], [1, 1]])
    B = matrix(F, [[0, 1], [0, 1]])
    assert not (E0 @ B @ E1).is_zero()
    assert sorted(find_standard_orderings([E0, E1], B)) == [[0, 1], [1, 0]]


def test_orderings_star_graph_is_empty():
    F = GF(5)
    E = [ExactMatrix.diag(F, [1 if j == i else 0 for j in range(4)]) for i in range(4)]
    # B links vertex 0 with each of 1, 2, 3
    B = matrix(F, [[0, 1, 1, 1], [1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]])
    assert find_standard_orderings(E, B) == []


def test_orderings_path_in_scrambled_order():
    F = GF(7)
    E = [ExactMatrix.diag(F, [1 if j == i else 0 for j in range(4)]) for i in range(4)]
    # path 2 - 0 - 3 - 1
    rows = [[0] * 4 for _ in range(4)]
    for a, b in ((2, 0), (0, 3), (3, 1)):
        rows[a][b] = rows[b][a] = 1
    B = matrix(F, rows)
    assert sorted(find_standard_orderings(E, B)) == [[1, 3, 0, 2], [2, 0, 3, 1]]


def test_verify_one_by_one():
    F = GF(5)
    rec = verify_td_system(matrix(F, [[2]]), matrix(F, [[4]]))
    assert rec.d == 0 and rec.shape == (1,) and rec.sharp and rec.ordering_counts == (1, 1)


def test_verify_sharp_2x2():
    F = GF(5)
    rec = verify_td_system(matrix(F, [[0, 0], [1, 1]]), matrix(F, [[0, 1], [0, 1]]))
    assert rec.d == 1 and rec.shape == (1, 1) and rec.sharp
    assert rec.theta == (0, 1) and rec.theta_star == (0, 1)


def test_verify_diag_pair_reducible():
    F = GF(5)
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(ExactMatrix.diag(F, [0, 1]), ExactMatrix.diag(F, [0, 1]))
    exc = info.value
    assert exc.tag == "reducible" and exc.witness == [[1, 0]]
    assert is_invariant([ExactMatrix.diag(F, [0, 1])], exc.witness)


def test_verify_not_diagonalizable():
    F = GF(3)
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(matrix(F, [[0, 2], [1, 0]]), ExactMatrix.identity(F, 2))
    assert info.value.tag == "not-diagonalizable-A"
    assert info.value.witness.coeffs == (1, 0, 1)  # x^2 + 1 has no root in GF(3)
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(ExactMatrix.diag(F, [0, 1]), matrix(F, [[0, 1], [0, 0]]))
    assert info.value.tag == "not-diagonalizable-A*"


def test_verify_no_standard_ordering():
    F = GF(7)
    A = ExactMatrix.diag(F, [0, 1, 2])
    # A* couples all three A-eigenspaces pairwise: a triangle is not a path
    As = matrix(F, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(A, As)
    assert info.value.tag == "no-standard-ordering-A"
    assert len(info.value.witness) == 6


def test_verify_rejects_mismatched_sizes():
    F = GF(5)
    with pytest.raises(ValueError):
        verify_td_system(ExactMatrix.identity(F, 2), ExactMatrix.identity(F, 3))


def test_shape_profile_sharp_d3_gf13():
    inst = split_instance(13, 3, seed=1)
    rec = verify_td_system(inst.A, inst.Astar)
    shape, sharp, d = shape_profile(rec)
    assert d == 3 and sharp
    # oracle: ranks of the idempotents
    assert shape == tuple(rank(E) for E in rec.E) == (1, 1, 1, 1)


def test_shape_profile_flagship(flagship):
    rec = verify_td_system(flagship.A, flagship.Astar)
    assert shape_profile(rec) == ((2, 2), False, 1)
    assert tuple(rank(E) for E in rec.Estar) == (2, 2)


def test_basis_invariance(flagship):
    rng = random.Random(9)
    F = flagship.field
    rec = verify_td_system(flagship.A, flagship.Astar)
    for _ in range(5):
        while True:
            P = ExactMatrix(F, [[F.random(rng) for _ in range(4)] for _ in range(4)], 4)
            if rank(P) == 4:
                break
        Pi = inverse(P)
        rec2 = verify_td_system(P @ flagship.A @ Pi, P @ flagship.Astar @ Pi)
        assert (rec2.d, rec2.theta, rec2.theta_star, rec2.shape) == (rec.d, rec.theta, rec.theta_star, rec.shape)
        for E, E2 in zip(rec.E + rec.Estar, rec2.E + rec2.Estar):
            assert E2 == P @ E @ Pi


def test_record_json(flagship):
    rec = verify_td_system(flagship.A, flagship.Astar)
    doc = rec.to_json()
    assert set(doc) == {"field", "n", "d", "theta", "theta_star", "shape", "sharp", "E", "E_star"}
    assert doc["shape"] == [2, 2] and doc["sharp"] is False and doc["n"] == 4
