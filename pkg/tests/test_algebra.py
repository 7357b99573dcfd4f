from __future__ import annotations

import itertools
import random

import pytest

from tdsharp import algebra
from tdsharp.algebra import (AlgebraError, FieldCertificate, NotAField, center, corner, corner_generators_check,
                             field_certify, invert_in_algebra, is_commutative, one_sided_space, span,
                             subalgebra_closure)
from tdsharp.fields import GF
from tdsharp.linalg import ExactMatrix, matrix
from tdsharp.tdverify import verify_td_system
from tdsharp.generators import split_instance


F5 = GF(5)
A2 = matrix(F5, [[0, 0], [1, 1]])
S2 = matrix(F5, [[0, 1], [0, 1]])


def I(F, n):
    return ExactMatrix.identity(F, n)


def test_closure_examples():
    F3 = GF(3)
    assert subalgebra_closure([I(F3, 2)]).dim == 1
    assert subalgebra_closure([ExactMatrix.diag(F3, [0, 1])], unit=I(F3, 2)).dim == 2
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    # oracle: I, A, A*, AA* already span all 2x2 matrices
    oracle = span(F5, 2, [I(F5, 2), A2, S2, A2 @ S2])
    assert T.dim == 4 == oracle.dim and T == oracle


def test_closure_rejects_mixed_sizes():
    with pytest.raises((AlgebraError, ValueError)):
        subalgebra_closure([I(F5, 2), I(F5, 3)])


def test_closure_is_idempotent():
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    assert subalgebra_closure(T.basis, unit=I(F5, 2)) == T


def test_one_sided_spaces():
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    assert one_sided_space(T, I(F5, 2), "right") == T
    assert one_sided_space(T, ExactMatrix.zeros(F5, 2, 2), "left").dim == 0
    with pytest.raises(AlgebraError):
        one_sided_space(T, A2 + A2, "right")


def test_center_examples(flagship):
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    Z = center(T)
    assert Z.dim == 1 and Z.contains(I(F5, 2))
    D = subalgebra_closure([ExactMatrix.diag(GF(3), [0, 1])], unit=I(GF(3), 2))
    assert center(D) == D
    Tf = subalgebra_closure([flagship.A, flagship.Astar], unit=I(GF(3), 4))
    Zf = center(Tf)
    assert Zf.dim == 2
    # oracle: brute-force every element of T against the generators
    F = GF(3)
    count = 0
    for coeffs in itertools.product(range(3), repeat=Tf.dim):
        z = Tf.combine(list(coeffs))
        if z @ flagship.A == flagship.A @ z and z @ flagship.Astar == flagship.Astar @ z:
            count += 1
    assert count == 3 ** 2
    assert center(Zf) == Zf


def test_corner_examples(flagship):
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    assert corner(T, I(F5, 2)) == T
    rec = verify_td_system(A2, S2)
    assert corner(T, rec.Estar[0]).dim == rec.shape[0] == 1
    recf = verify_td_system(flagship.A, flagship.Astar)
    Tf = subalgebra_closure([flagship.A, flagship.Astar], unit=I(GF(3), 4))
    Cf = corner(Tf, recf.Estar[0])
    assert Cf.dim == 2
    # oracle: span of E*0 b E*0 over the T basis, computed independently
    assert Cf == span(GF(3), 4, [recf.Estar[0] @ b @ recf.Estar[0] for b in Tf.basis])


def test_is_commutative():
    assert is_commutative(span(F5, 2, [I(F5, 2)]))[0]
    ok, pair = is_commutative(subalgebra_closure([A2, S2], unit=I(F5, 2)))
    assert not ok and pair[0] @ pair[1] != pair[1] @ pair[0]


def test_corner_generators(flagship):
    rec = verify_td_system(matrix(F5, [[2]]), matrix(F5, [[3]]))
    T = subalgebra_closure([rec.A, rec.Astar], unit=I(F5, 1))
    assert corner_generators_check(T, rec.Estar[0], rec.A, 0)
    inst = split_instance(7, 2, seed=3)
    rec = verify_td_system(inst.A, inst.Astar)
    T = subalgebra_closure([rec.A, rec.Astar], unit=I(GF(7), 3))
    assert corner_generators_check(T, rec.Estar[0], rec.A, rec.d)
    recf = verify_td_system(flagship.A, flagship.Astar)
    Tf = subalgebra_closure([recf.A, recf.Astar], unit=I(GF(3), 4))
    assert corner_generators_check(Tf, recf.Estar[0], recf.A, recf.d)


def test_invert_in_algebra():
    D = span(GF(7), 2, [I(GF(7), 2), ExactMatrix.diag(GF(7), [0, 1])], unit=I(GF(7), 2), closed=True)
    assert invert_in_algebra(I(GF(7), 2), D) == I(GF(7), 2)
    assert invert_in_algebra(ExactMatrix.diag(GF(7), [2, 3]), D) == ExactMatrix.diag(GF(7), [4, 5])
    N = matrix(F5, [[0, 1], [0, 0]])
    P = span(F5, 2, [I(F5, 2), N], unit=I(F5, 2), closed=True)
    assert invert_in_algebra(N, P) is None
    with pytest.raises(AlgebraError):
        invert_in_algebra(A2, P)


def test_field_certify_examples(flagship):
    one = span(F5, 2, [I(F5, 2)], unit=I(F5, 2), closed=True)
    cert = field_certify(one)
    assert isinstance(cert, FieldCertificate) and cert.dim == 1 and cert.minpoly.coeffs == (4, 1)
    D = span(GF(3), 2, [I(GF(3), 2), ExactMatrix.diag(GF(3), [0, 1])], unit=I(GF(3), 2), closed=True)
    res = field_certify(D)
    assert isinstance(res, NotAField) and res.reason == "idempotent"
    e, f = res.witness
    assert e @ e == e and (e @ f).is_zero() and not e.is_zero() and not f.is_zero()
    Tf = subalgebra_closure([flagship.A, flagship.Astar], unit=I(GF(3), 4))
    Zf = center(Tf)
    cert = field_certify(Zf)
    assert isinstance(cert, FieldCertificate) and cert.dim == 2 and cert.minpoly.degree == 2
    # oracle: every nonzero central element is invertible
    for coeffs in itertools.product(range(3), repeat=2):
        if any(coeffs):
            z = Zf.combine(list(coeffs))
            assert invert_in_algebra(z, Zf) is not None


def test_certified_field_properties(flagship):
    Tf = subalgebra_closure([flagship.A, flagship.Astar], unit=I(GF(3), 4))
    Zf = center(Tf)
    cert = field_certify(Zf)
    rng = random.Random(0)
    nonzero = lambda: next(x for x in iter(lambda: Zf.random_element(rng), None) if not x.is_zero())
    for _ in range(200):
        assert not (nonzero() @ nonzero()).is_zero()
    for _ in range(50):
        x = nonzero()
        y = invert_in_algebra(x, Zf)
        assert x @ y == Zf.unit
    # the field presentation is a ring isomorphism on samples
    K = cert.extension_field()
    for _ in range(30):
        x, y = Zf.random_element(rng), Zf.random_element(rng)
        assert cert.to_field(x @ y) == K.mul(cert.to_field(x), cert.to_field(y))
        assert cert.from_field(cert.to_field(x)) == x


def test_noncommutative_is_not_a_field():
    T = subalgebra_closure([A2, S2], unit=I(F5, 2))
    res = field_certify(T)
    assert isinstance(res, NotAField) and res.reason == "noncommutative"
