from __future__ import annotations

import itertools

import pytest

from tdsharp.fields import GF
from tdsharp.generators import twisted_instance


def mat_mod(rows, p):
    return [[x % p for x in r] for r in rows]


def naive_matmul(X, Y, p):
    """Plain integer matrix product reduced mod p (independent of the library)."""
    return [[sum(X[i][k] * Y[k][j] for k in range(len(Y))) % p for j in range(len(Y[0]))]
            for i in range(len(X))]


def all_vectors(p, n):
    return [list(v) for v in itertools.product(range(p), repeat=n)]


@pytest.fixture(scope="session")
def flagship():
    return twisted_instance(3, "0,1,0,1,1+i")


@pytest.fixture(scope="session")
def gf5():
    return GF(5)
