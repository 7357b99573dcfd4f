"""Exact coefficient fields: GF(p), simple extensions, and the rationals.

A :class:`FieldSpec` is an immutable description of a field and also carries
the arithmetic on *raw* values, which is what matrices and polynomials store
internally:

* prime field GF(p): ``int`` in ``[0, p)``
* rationals: :class:`fractions.Fraction`
* extension F[x]/(m): ``tuple`` of ``k`` raw base values, little-endian in
  the class of ``x``

:class:`FieldElement` wraps a raw value together with its spec and is the
user-facing scalar type.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterator

from . import _poly

PRIME = "prime"
EXTENSION = "extension"
RATIONAL = "rational"

# exhaustive-table threshold for extension multiplication caches
_CACHE_ORDER = 4096


class FieldError(ValueError):
    """Invalid field construction or arithmetic."""


class FieldMismatchError(FieldError):
    """Operands live in different fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int
    k: int = 1
    modulus: tuple | None = None

    # ---- structure -------------------------------------------------

    @cached_property
    def base(self) -> FieldSpec | None:
        if self.kind != EXTENSION:
            return None
        return RATIONALS if self.p == 0 else FieldSpec(PRIME, self.p)

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def order(self) -> int | None:
        return self.p ** self.k if self.p else None

    @property
    def prime_field(self) -> FieldSpec:
        return RATIONALS if self.p == 0 else FieldSpec(PRIME, self.p)

    def __repr__(self) -> str:
        if self.kind == PRIME:
            return f"GF({self.p})"
        if self.kind == RATIONAL:
            return "QQ"
        m = " + ".join(f"{self.base.encode(c)}*x^{i}" for i, c in enumerate(self.modulus)
                       if not self.base.is_zero(c))
        return f"{self.base!r}[x]/({m})"

    # ---- raw arithmetic --------------------------------------------

    @cached_property
    def zero(self):
        if self.kind == PRIME:
            return 0
        if self.kind == RATIONAL:
            return Fraction(0)
        return (self.base.zero,) * self.k

    @cached_property
    def one(self):
        if self.kind == PRIME:
            return 1
        if self.kind == RATIONAL:
            return Fraction(1)
        return (self.base.one,) + (self.base.zero,) * (self.k - 1)

    def from_int(self, n: int):
        if self.kind == PRIME:
            return n % self.p
        if self.kind == RATIONAL:
            return Fraction(n)
        return (self.base.from_int(n),) + (self.base.zero,) * (self.k - 1)

    def add(self, a, b):
        if self.kind == PRIME:
            return (a + b) % self.p
        if self.kind == RATIONAL:
            return a + b
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        if self.kind == PRIME:
            return (a - b) % self.p
        if self.kind == RATIONAL:
            return a - b
        B = self.base
        return tuple(B.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if self.kind == PRIME:
            return -a % self.p
        if self.kind == RATIONAL:
            return -a
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        if self.kind == PRIME:
            return a * b % self.p
        if self.kind == RATIONAL:
            return a * b
        cache = self._mul_cache
        if cache is not None:
            key = (a, b)
            r = cache.get(key)
            if r is None:
                r = cache[key] = self._ext_mul(a, b)
            return r
        return self._ext_mul(a, b)

    @cached_property
    def _mul_cache(self):
        if self.order is not None and self.order <= _CACHE_ORDER:
            return {}
        return None

    def _ext_mul(self, a, b):
        B = self.base
        r = _poly.rem(B, _poly.mul(B, _poly.trim(B, a), _poly.trim(B, b)), list(self.modulus))
        return self._pad(r)

    def _pad(self, r):
        return tuple(r) + (self.base.zero,) * (self.k - len(r))

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError(f"inverse of zero in {self!r}")
        if self.kind == PRIME:
            return pow(a, -1, self.p)
        if self.kind == RATIONAL:
            return 1 / a
        B = self.base
        g, s, _ = _poly.xgcd(B, _poly.trim(B, a), list(self.modulus))
        if len(g) != 1:
            raise FieldError("modulus is not irreducible")
        return self._pad(s)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        if self.kind == EXTENSION:
            return a == self.zero
        return a == 0

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    # ---- conversions -----------------------------------------------

    def coerce(self, x):
        """Turn an int, Fraction, FieldElement, or coefficient list into a raw value."""
        if isinstance(x, FieldElement):
            if x.spec != self:
                raise FieldMismatchError(f"element of {x.spec!r} used in {self!r}")
            return x.value
        if self.kind == PRIME:
            if isinstance(x, bool) or not isinstance(x, int):
                raise FieldError(f"cannot interpret {x!r} in {self!r}")
            return x % self.p
        if self.kind == RATIONAL:
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            if isinstance(x, str):
                return Fraction(x)
            raise FieldError(f"cannot interpret {x!r} in {self!r}")
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction) and self.p == 0:
            return (x,) + (self.base.zero,) * (self.k - 1)
        if isinstance(x, (list, tuple)):
            if len(x) > self.k:
                raise FieldError(f"too many coefficients for {self!r}")
            vals = tuple(self.base.coerce(c) for c in x)
            return vals + (self.base.zero,) * (self.k - len(vals))
        raise FieldError(f"cannot interpret {x!r} in {self!r}")

    def __call__(self, x) -> FieldElement:
        return FieldElement(self, self.coerce(x))

    def wrap(self, raw) -> FieldElement:
        return FieldElement(self, raw)

    def sort_key(self, a):
        if self.kind == EXTENSION:
            return tuple(self.base.sort_key(c) for c in a)
        return a

    def encode(self, a) -> Any:
        """JSON encoding: int (prime), "num/den" (rational), list (extension)."""
        if self.kind == PRIME:
            return a
        if self.kind == RATIONAL:
            return f"{a.numerator}/{a.denominator}"
        return [self.base.encode(c) for c in a]

    def decode(self, obj) -> Any:
        if self.kind == PRIME:
            if isinstance(obj, bool) or not isinstance(obj, int):
                raise FieldError(f"expected an integer for p={self.p}, got {obj!r}")
            if not 0 <= obj < self.p:
                raise FieldError(f"coefficient out of range for p={self.p}: {obj}")
            return obj
        if self.kind == RATIONAL:
            if isinstance(obj, int) and not isinstance(obj, bool):
                return Fraction(obj)
            if not isinstance(obj, str):
                raise FieldError(f"expected a 'num/den' string, got {obj!r}")
            try:
                return Fraction(obj)
            except (ValueError, ZeroDivisionError) as exc:
                raise FieldError(f"bad rational {obj!r}") from exc
        if not isinstance(obj, list) or len(obj) != self.k:
            raise FieldError(f"expected {self.k} coefficients for {self!r}, got {obj!r}")
        return tuple(self.base.decode(c) for c in obj)

    def to_json(self) -> dict:
        mod = None
        if self.modulus is not None:
            mod = [self.base.encode(c) for c in self.modulus]
        return {"kind": self.kind, "p": self.p, "k": self.k, "modulus": mod}

    @classmethod
    def from_json(cls, obj: dict) -> FieldSpec:
        kind = obj.get("kind")
        p = obj.get("p", 0)
        k = obj.get("k", 1)
        modulus = obj.get("modulus")
        if kind == EXTENSION and modulus is not None:
            base = RATIONALS if p == 0 else FieldSpec(PRIME, p)
            if not isinstance(modulus, list):
                raise FieldError("modulus must be a list")
            modulus = [base.decode(c) for c in modulus]
        return field_create(kind, p, k, modulus)

    # ---- enumeration -----------------------------------------------

    def elements(self) -> Iterator:
        """Raw elements in coefficient-vector lexicographic order."""
        if self.kind == RATIONAL:
            raise FieldError("cannot enumerate the rationals")
        if self.kind == PRIME:
            yield from range(self.p)
            return
        for digits in itertools.product(range(self.p), repeat=self.k):
            yield digits

    def random(self, rng, bound: int = 9):
        if self.kind == PRIME:
            return rng.randrange(self.p)
        if self.kind == RATIONAL:
            return Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
        return tuple(self.base.random(rng, bound) for _ in range(self.k))


RATIONALS = FieldSpec(RATIONAL, 0)


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: Any

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.spec.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.div(self.value, b))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow(self.value, e))

    def inv(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.inv(self.value))

    def is_zero(self) -> bool:
        return self.spec.is_zero(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")
            return self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == self.spec.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def encode(self):
        return self.spec.encode(self.value)

    def __repr__(self) -> str:
        return f"{self.spec.encode(self.value)!r}@{self.spec!r}"


# ---- construction ----------------------------------------------------


def _irreducible_finite(p: int, f: list[int]) -> bool:
    F = FieldSpec(PRIME, p)
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(k // 2):
        power = _poly.powmod(F, power, p, f)
        if len(_poly.gcd(F, f, _poly.sub(F, power, x))) != 1:
            return False
    return True


def _irreducible_rational(f: list[Fraction]) -> bool:
    k = len(f) - 1
    if k < 1:
        return False
    if k <= 3:
        return not _poly.rational_roots(f)
    import sympy

    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(f))
    return sympy.Poly(expr, x, domain="QQ").is_irreducible


def is_irreducible(base: FieldSpec, f) -> bool:
    """Irreducibility of a raw polynomial over a prime field or the rationals."""
    if base.kind == PRIME:
        return _irreducible_finite(base.p, _poly.trim(base, f))
    if base.kind == RATIONAL:
        return _irreducible_rational(_poly.trim(base, f))
    raise FieldError("irreducibility test only over GF(p) or QQ")


def smallest_irreducible(p: int, k: int) -> list[int]:
    """First monic irreducible of degree k over GF(p), ordering x^k + c_{k-1}x^{k-1} + ... + c_0
    lexicographically by (c_{k-1}, ..., c_0)."""
    for digits in itertools.product(range(p), repeat=k):
        f = list(reversed(digits)) + [1]
        if _irreducible_finite(p, f):
            return f
    raise FieldError(f"no irreducible of degree {k} over GF({p})")  # unreachable


def field_create(kind: str, p: int = 0, k: int = 1, modulus=None) -> FieldSpec:
    """Validated field construction.

    ``modulus`` is a little-endian coefficient list (ints, Fractions or
    strings) including the leading 1.  Omitting it for a finite extension
    installs :func:`smallest_irreducible`.  Extension degree 1 collapses to
    the base field.
    """
    if kind == RATIONAL:
        if p not in (0, None) or k != 1:
            raise FieldError("the rationals have p=0, k=1")
        return RATIONALS
    if not isinstance(k, int) or k < 1:
        raise FieldError(f"extension degree must be >= 1, got {k!r}")
    if kind == PRIME:
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if k != 1:
            raise FieldError("prime field has k=1")
        return FieldSpec(PRIME, p)
    if kind != EXTENSION:
        raise FieldError(f"unknown field kind {kind!r}")
    if p != 0 and not is_prime(p):
        raise FieldError(f"{p} is not prime")
    base = RATIONALS if p == 0 else FieldSpec(PRIME, p)
    if k == 1 and modulus is None:
        return base
    if modulus is None:
        if p == 0:
            raise FieldError("an extension of QQ needs an explicit modulus")
        modulus = smallest_irreducible(p, k)
    mod = [base.coerce(c) for c in modulus]
    if len(mod) != k + 1:
        raise FieldError(f"modulus must have degree {k}")
    if mod[-1] != base.one:
        raise FieldError("modulus must be monic")
    if not is_irreducible(base, mod):
        raise FieldError(f"modulus {[base.encode(c) for c in mod]} is reducible")
    if k == 1:
        return base
    return FieldSpec(EXTENSION, p, k, tuple(mod))


def GF(p: int, k: int = 1, modulus=None) -> FieldSpec:
    if k == 1 and modulus is None:
        return field_create(PRIME, p)
    return field_create(EXTENSION, p, k, modulus)


def embed_base(a: FieldElement, target: FieldSpec) -> FieldElement:
    """Canonical inclusion of a base-field element into an extension."""
    if target == a.spec:
        return a
    if target.kind != EXTENSION or target.base != a.spec:
        raise FieldMismatchError(f"cannot embed {a.spec!r} into {target!r}")
    return FieldElement(target, (a.value,) + (a.spec.zero,) * (target.k - 1))


def enumerate_field(spec: FieldSpec) -> Iterator[FieldElement]:
    for raw in spec.elements():
        yield FieldElement(spec, raw)
