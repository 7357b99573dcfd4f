from __future__ import annotations

import random

import pytest

from tdsharp.fields import GF
from tdsharp.generators import restrict_matrix, restriction_instance, split_instance
from tdsharp.linalg import ExactMatrix, inverse, matrix, rank
from tdsharp.sharpen import (LEMMA_KEYS, bilinear_dual_basis, build_T, center_field,
                             center_surjectivity_witness, rebase_over_center, sharpen_pipeline,
                             simultaneous_conjugator, tv_module_iso_check)
from tdsharp.tdverify import verify_td_system

F5 = GF(5)


@pytest.fixture(scope="module")
def flagship_state(flagship):
    rec = verify_td_system(flagship.A, flagship.Astar)
    T = build_T(rec)
    Z, rho, zcert = center_field(T, random.Random(0))
    return rec, T, Z, rho, zcert


def test_build_T_dimensions(flagship_state):
    rec1 = verify_td_system(matrix(F5, [[2]]), matrix(F5, [[3]]))
    assert build_T(rec1).dim == 1
    rec2 = verify_td_system(matrix(F5, [[0, 0], [1, 1]]), matrix(F5, [[0, 1], [0, 1]]))
    assert build_T(rec2).dim == 4
    # the flagship T is M_2(GF(9)) viewed over GF(3)
    assert flagship_state[1].dim == 8


def test_center_rho(flagship_state):
    rec, T, Z, rho, zcert = flagship_state
    assert rho == rec.shape[0] == 2 and zcert.minpoly.degree == 2
    for z in Z.basis:
        for t in T.basis:
            assert z @ t == t @ z


def test_dual_basis_sizes(flagship_state):
    rec, T, Z, rho, zcert = flagship_state
    from tdsharp.algebra import corner, field_certify
    ccert = field_certify(corner(T, rec.Estar[0]))
    dual = bilinear_dual_basis(T, rec.Estar[0], ccert)
    assert dual.n == 2
    for i, xp in enumerate(dual.xps):
        for j, x in enumerate(dual.xs):
            expect = rec.Estar[0] if i == j else ExactMatrix.zeros(GF(3), 4, 4)
            assert xp @ x == expect
    assert rank(dual.gram) == dual.n
    inst = split_instance(7, 2, seed=0)
    rec2 = verify_td_system(inst.A, inst.Astar)
    T2 = build_T(rec2)
    c2 = field_certify(corner(T2, rec2.Estar[0]))
    assert bilinear_dual_basis(T2, rec2.Estar[0], c2).n == 3
    rec1 = verify_td_system(matrix(F5, [[2]]), matrix(F5, [[3]]))
    T1 = build_T(rec1)
    assert bilinear_dual_basis(T1, rec1.Estar[0], field_certify(corner(T1, rec1.Estar[0]))).n == 1


def test_surjectivity_witness(flagship_state):
    rec, T, Z, rho, zcert = flagship_state
    from tdsharp.algebra import corner, field_certify
    es0 = rec.Estar[0]
    C = corner(T, es0)
    dual = bilinear_dual_basis(T, es0, field_certify(C))
    rng = random.Random(5)
    z = center_surjectivity_witness(es0, dual, T, es0)
    assert z == ExactMatrix.identity(GF(3), 4)
    assert center_surjectivity_witness(ExactMatrix.zeros(GF(3), 4, 4), dual, T, es0).is_zero()
    for _ in range(10):
        a = C.random_element(rng)
        z = center_surjectivity_witness(a, dual, T, es0)
        assert Z.contains(z) and z @ es0 == a


def test_tv_module_iso(flagship_state):
    rec, T, Z, rho, zcert = flagship_state
    from tdsharp.algebra import corner, field_certify
    iso = tv_module_iso_check(T, rec.Estar[0], field_certify(corner(T, rec.Estar[0])), random.Random(0))
    assert iso.dim_TE == iso.dim_V == 4 and iso.es0inj and iso.ete0
    assert rec.Estar[0].apply(list(iso.v)) == list(iso.v)


def test_rebase_flagship(flagship_state):
    rec, T, Z, rho, zcert = flagship_state
    rb = rebase_over_center(rec, zcert, random.Random(0))
    K = rb.record.field
    assert K.order == 9 and rb.record.n == 2 and rb.record.shape == (1, 1) and rb.record.sharp
    X = rb.conjugator
    assert rank(X) == 4
    assert X @ rec.A == restrict_matrix(rb.record.A) @ X
    assert X @ rec.Astar == restrict_matrix(rb.record.Astar) @ X


def test_simultaneous_conjugator():
    F = GF(7)
    A, As = matrix(F, [[0, 0], [1, 1]]), matrix(F, [[0, 1], [0, 1]])
    P = matrix(F, [[1, 2], [3, 5]])
    Pi = inverse(P)
    X = simultaneous_conjugator(A, As, P @ A @ Pi, P @ As @ Pi)
    assert X is not None and X @ A == P @ A @ Pi @ X
    # a pair with a different spectrum is not conjugate
    assert simultaneous_conjugator(A, As, ExactMatrix.diag(F, [0, 2]), As) is None


def test_pipeline_flagship_accepts(flagship):
    cert = sharpen_pipeline(flagship.A, flagship.Astar)
    assert cert.outcome == "accepted"
    assert all(cert.lemma_passes[k] for k in LEMMA_KEYS)
    assert set(cert.corners) == {"E0", "Ed", "Estar0", "Estard"}
    assert all(c.corner.dim == 2 for c in cert.corners.values())
    doc = cert.to_json()
    assert doc["rho"] == 2 and doc["T_dim"] == 8 and doc["sharpened"]["shape"] == [1, 1]


def test_pipeline_identity_on_sharp():
    inst = split_instance(11, 3, seed=4)
    cert = sharpen_pipeline(inst.A, inst.Astar, seed=4)
    assert cert.outcome == "accepted" and cert.rho == 1
    assert cert.sharpened.A == inst.A and cert.sharpened.Astar == inst.Astar


def test_pipeline_rejects():
    F = GF(5)
    cert = sharpen_pipeline(ExactMatrix.diag(F, [0, 1]), ExactMatrix.diag(F, [0, 1]))
    assert cert.outcome == "rejected" and cert.failure.tag == "reducible"
    assert cert.failed_lemma == "char" and cert.lemma_passes["char"] is False
    assert cert.to_json()["failure"]["tag"] == "reducible"


def test_pipeline_restriction_instances():
    for seed in range(2):
        inst, seed_rec = restriction_instance(3, 2, 2, seed)
        cert = sharpen_pipeline(inst.A, inst.Astar, seed=seed)
        assert cert.outcome == "accepted" and cert.rho == 2
        assert cert.sharpened.shape == seed_rec.shape
