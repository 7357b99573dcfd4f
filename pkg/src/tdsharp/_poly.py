"""Raw polynomial helpers over a field.

Polynomials are little-endian lists of raw field values with no trailing
zeros; the zero polynomial is ``[]``.  Every function takes the coefficient
field ``F`` (anything exposing the raw-value API of
:class:`tdsharp.fields.FieldSpec`) as its first argument.
"""

from __future__ import annotations


def trim(F, a):
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def degree(a) -> int:
    return len(a) - 1


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return trim(F, out)


def sub(F, a, b):
    return add(F, a, [F.neg(c) for c in b])


def scale(F, a, c):
    if F.is_zero(c):
        return []
    return [F.mul(x, c) for x in a]


def mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(F, out)


def divmod_(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    lead_inv = F.inv(b[-1])
    db = len(b) - 1
    q = [F.zero] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - 1 - db
        q[shift] = c
        for j, y in enumerate(b):
            a[shift + j] = F.sub(a[shift + j], F.mul(c, y))
        a = trim(F, a)
    return trim(F, q), a


def rem(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return []
    return scale(F, a, F.inv(a[-1]))


def gcd(F, a, b):
    a, b = trim(F, a), trim(F, b)
    while b:
        a, b = b, rem(F, a, b)
    return monic(F, a)


def xgcd(F, a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` monic."""
    r0, r1 = trim(F, a), trim(F, b)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return [], [], []
    c = F.inv(r0[-1])
    return scale(F, r0, c), scale(F, s0, c), scale(F, t0, c)


def mulmod(F, a, b, m):
    return rem(F, mul(F, a, b), m)


def powmod(F, a, e: int, m):
    result = [F.one]
    base = rem(F, a, m)
    while e:
        if e & 1:
            result = mulmod(F, result, base, m)
        e >>= 1
        if e:
            base = mulmod(F, base, base, m)
    return rem(F, result, m)


def evaluate(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def derivative(F, a):
    return trim(F, [F.mul(F.from_int(i), c) for i, c in enumerate(a)][1:])


def lcm(F, a, b):
    g = gcd(F, a, b)
    return monic(F, divmod_(F, mul(F, a, b), g)[0])


def x_minus(F, r):
    return [F.neg(r), F.one]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots(a) -> list:
    """Distinct rational roots of a polynomial with Fraction coefficients."""
    from fractions import Fraction
    from math import lcm as ilcm

    a = [Fraction(c) for c in a]
    while a and a[-1] == 0:
        a.pop()
    if len(a) <= 1:
        return []
    roots = []
    low = 0
    while a[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
        a = a[low:]
    if len(a) == 1:
        return roots
    den = ilcm(*(c.denominator for c in a))
    ints = [int(c * den) for c in a]
    for q in _divisors(ints[-1]):
        for r in _divisors(ints[0]):
            for cand in (Fraction(r, q), Fraction(-r, q)):
                if cand in roots:
                    continue
                acc = Fraction(0)
                for c in reversed(ints):
                    acc = acc * cand + c
                if acc == 0:
                    roots.append(cand)
    return roots
