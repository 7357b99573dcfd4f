from __future__ import annotations

import random

import pytest

from tdsharp.fields import GF
from tdsharp.generators import (GeneratorError, SplitFormParams, kron, parse_element, random_split_params,
                                regular_representation, restrict_matrix, restrict_scalars,
                                restriction_instance, split_form_pair, split_instance, tensor_seed,
                                twisted_diameter1_nonsharp, twisted_instance)
from tdsharp.linalg import ExactMatrix, matrix
from tdsharp.meataxe import bruteforce_invariant_subspaces, is_invariant
from tdsharp.tdverify import VerificationFailure, verify_td_system


def test_split_form_d0():
    F = GF(5)
    A, As = split_form_pair(SplitFormParams(F, 0, (3,), (1,), ()))
    assert A == matrix(F, [[3]]) and As == matrix(F, [[1]])
    assert verify_td_system(A, As).d == 0


def test_split_form_d1_gf5():
    F = GF(5)
    A, As = split_form_pair(SplitFormParams(F, 1, (0, 1), (0, 1), (1,)))
    assert A == matrix(F, [[0, 0], [1, 1]]) and As == matrix(F, [[0, 1], [0, 1]])
    rec = verify_td_system(A, As)
    assert rec.sharp and rec.shape == (1, 1)


@pytest.mark.parametrize("kwargs,msg", [
    (dict(d=2, theta=(0, 1, 0), theta_star=(0, 1, 1), phi=(1, 1)), "distinct"),
    (dict(d=1, theta=(0, 1), theta_star=(0, 1), phi=(0,)), "nonzero"),
    (dict(d=1, theta=(0, 1, 1), theta_star=(0, 1), phi=(1,)), "lengths"),
])
def test_split_params_invariants(kwargs, msg):
    with pytest.raises(GeneratorError, match=msg):
        SplitFormParams(GF(2), **kwargs)


def test_split_instance_reproducible():
    a = split_instance(11, 3, seed=42)
    b = split_instance(11, 3, seed=42)
    assert a.dumps() == b.dumps()
    assert a.provenance == {"generator": "split", "params": a.provenance["params"], "seed": 42}


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_split_instances_verify_sharp(p):
    for seed in range(5):
        d = 1 + seed % 4
        inst = split_instance(p, d, seed)
        rec = verify_td_system(inst.A, inst.Astar, rng=random.Random(seed))
        assert rec.sharp and rec.shape == (1,) * (d + 1)


def test_regular_representation_gf9():
    F = GF(3, 2)
    i = F.coerce([0, 1])
    # oracle: multiplication by i sends 1 -> i and i -> i^2 = -1
    assert regular_representation(F, i) == [[0, 2], [1, 0]]
    rng = random.Random(0)
    for _ in range(50):
        a, b = F.random(rng), F.random(rng)
        Ra = ExactMatrix(GF(3), regular_representation(F, a))
        Rb = ExactMatrix(GF(3), regular_representation(F, b))
        assert Ra @ Rb == ExactMatrix(GF(3), regular_representation(F, F.mul(a, b)))


def test_restrict_prime_field_unchanged():
    F = GF(5)
    rec = verify_td_system(matrix(F, [[0, 0], [1, 1]]), matrix(F, [[0, 1], [0, 1]]))
    assert restrict_scalars(rec) == (rec.A, rec.Astar)


def test_restrict_requires_base_eigenvalues():
    F = GF(3, 2)
    i = F.coerce([0, 1])
    A = ExactMatrix(F, [[i, F.zero], [F.one, F.zero]])
    As = ExactMatrix(F, [[F.zero, F.coerce([1, 1])], [F.zero, F.one]])
    rec = verify_td_system(A, As)
    with pytest.raises(GeneratorError, match="outside the base field"):
        restrict_scalars(rec)


def test_restrict_of_base_defined_pair_is_reducible():
    F9 = GF(3, 2)
    emb = lambda rows: ExactMatrix(F9, [[F9.coerce([x]) for x in r] for r in rows])
    rec = verify_td_system(emb([[0, 0], [1, 1]]), emb([[0, 1], [0, 1]]))
    A, As = restrict_scalars(rec)
    subs = bruteforce_invariant_subspaces([A, As])
    assert any(len(s) == 2 for s in subs)
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(A, As)
    assert info.value.tag == "reducible" and is_invariant([A, As], info.value.witness)


def test_flagship_family():
    inst = twisted_instance(3, "0,1,0,1,1+i")
    assert inst.field == GF(3) and inst.n == 4
    rec = verify_td_system(inst.A, inst.Astar)
    assert rec.d == 1 and rec.shape == (2, 2) and not rec.sharp
    assert bruteforce_invariant_subspaces([inst.A, inst.Astar]) == []


@pytest.mark.parametrize("gamma,msg", [
    ((2, 0), "gamma not outside base field"),
    ((0, 1), "gamma\\^2 lies in the base field"),  # i^2 = -1
])
def test_twisted_preconditions(gamma, msg):
    with pytest.raises(GeneratorError, match=msg):
        twisted_diameter1_nonsharp(3, 0, 1, 0, 1, gamma)


def test_twisted_distinctness_preconditions():
    with pytest.raises(GeneratorError, match="theta_0 = theta_1"):
        twisted_diameter1_nonsharp(3, 1, 1, 0, 1, (1, 1))
    with pytest.raises(GeneratorError, match="theta\\*_0 = theta\\*_1"):
        twisted_diameter1_nonsharp(3, 0, 1, 2, 2, (1, 1))


def test_twisted_reducible_gamma_is_the_invariant_line_value():
    # oracle: for B = [[t0,0],[1,t1]], B* = [[s0,g],[0,s1]] the B-eigenline for t1
    # is spanned by e2; B* e2 = (g, s1) which stays on the t0-eigenline direction
    # (t0 - t1, 1) exactly when g = (t0 - t1)(s1 - s0)
    F = GF(3, 2)
    t0, t1, s0, s1 = 0, 1, 0, 1
    g = ((t0 - t1) * (s1 - s0)) % 3
    A = ExactMatrix(F, [[F.coerce(t0), F.zero], [F.one, F.coerce(t1)]])
    As = ExactMatrix(F, [[F.coerce(s0), F.coerce(g)], [F.zero, F.coerce(s1)]])
    with pytest.raises(VerificationFailure) as info:
        verify_td_system(A, As)
    assert info.value.tag == "reducible"


def test_parse_element():
    F = GF(3, 2)
    assert parse_element(F, "1+i") == (1, 1)
    assert parse_element(F, "2i") == (0, 2)
    assert parse_element(F, "i^2") == (2, 0)
    assert parse_element(F, "-i") == (0, 2)
    assert parse_element(GF(5), "7") == 2


def test_restriction_seeds_round_trip():
    for seed in range(3):
        inst, rec = restriction_instance(5, 2, 1 + seed % 2, seed)
        assert rec.field == GF(5, 2) and rec.sharp
        big = verify_td_system(inst.A, inst.Astar)
        assert big.shape == tuple(2 * r for r in rec.shape)


def test_tensor_seed_shape():
    rec = tensor_seed(3, 3, seed=0)
    assert rec.d == 2 and rec.shape == (1, 2, 1) and rec.n == 4


def test_kron_small():
    F = GF(5)
    X = matrix(F, [[1, 2], [3, 4]])
    Y = ExactMatrix.identity(F, 2)
    assert kron(X, Y) == matrix(F, [[1, 0, 2, 0], [0, 1, 0, 2], [3, 0, 4, 0], [0, 3, 0, 4]])


def test_random_split_params_twisted_outside_base():
    F = GF(7, 2)
    params = random_split_params(F, 2, random.Random(1), base_eigenvalues=True, twisted=True)
    assert all(t[1] == 0 for t in params.theta + params.theta_star)
    assert any(ph[1] != 0 for ph in params.phi)


def test_restrict_matrix_dimensions():
    F = GF(2, 3)
    M = ExactMatrix(F, [[F.one, F.zero], [F.coerce([0, 1]), F.one]])
    R = restrict_matrix(M)
    assert R.shape == (6, 6) and R.field == GF(2)
