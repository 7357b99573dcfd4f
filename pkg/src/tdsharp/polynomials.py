"""Univariate polynomials over a :class:`~tdsharp.fields.FieldSpec`."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _poly
from .fields import EXTENSION, PRIME, RATIONAL, FieldElement, FieldSpec

# exhaustive root scan up to this field order, gcd with x^q - x beyond it
EXHAUSTIVE_ROOT_ORDER = 4096


@dataclass(frozen=True)
class PolynomialF:
    """Little-endian raw coefficients, no trailing zeros; zero is ``()``."""

    field: FieldSpec
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_poly.trim(self.field, self.coeffs)))

    @classmethod
    def from_list(cls, field: FieldSpec, values) -> PolynomialF:
        return cls(field, tuple(field.coerce(v) for v in values))

    @classmethod
    def x(cls, field: FieldSpec) -> PolynomialF:
        return cls(field, (field.zero, field.one))

    @classmethod
    def linear(cls, field: FieldSpec, root) -> PolynomialF:
        """``x - root`` for a raw root."""
        return cls(field, tuple(_poly.x_minus(field, root)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def _check(self, other: PolynomialF):
        if other.field != self.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        return PolynomialF(self.field, _poly.add(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return PolynomialF(self.field, _poly.sub(self.field, self.coeffs, other.coeffs))

    def __mul__(self, other):
        self._check(other)
        return PolynomialF(self.field, _poly.mul(self.field, self.coeffs, other.coeffs))

    def __divmod__(self, other):
        self._check(other)
        q, r = _poly.divmod_(self.field, self.coeffs, other.coeffs)
        return PolynomialF(self.field, q), PolynomialF(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> PolynomialF:
        return PolynomialF(self.field, _poly.monic(self.field, self.coeffs))

    def gcd(self, other) -> PolynomialF:
        self._check(other)
        return PolynomialF(self.field, _poly.gcd(self.field, self.coeffs, other.coeffs))

    def lcm(self, other) -> PolynomialF:
        self._check(other)
        return PolynomialF(self.field, _poly.lcm(self.field, self.coeffs, other.coeffs))

    def derivative(self) -> PolynomialF:
        return PolynomialF(self.field, _poly.derivative(self.field, self.coeffs))

    def __call__(self, x):
        """Evaluate at a raw value or FieldElement (returns the same kind)."""
        if isinstance(x, FieldElement):
            return FieldElement(self.field, _poly.evaluate(self.field, self.coeffs, self.field.coerce(x)))
        return _poly.evaluate(self.field, self.coeffs, x)

    def evaluate_matrix(self, M):
        """Horner evaluation at a square ExactMatrix."""
        from .linalg import ExactMatrix

        n = M.nrows
        acc = ExactMatrix.zeros(self.field, n, n)
        ident = ExactMatrix.identity(self.field, n)
        for c in reversed(self.coeffs):
            acc = acc @ M + ident.scale(c)
        return acc

    def encode(self) -> list:
        return [self.field.encode(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"PolynomialF({self.encode()}, {self.field!r})"


def _finite_roots_exhaustive(f: PolynomialF) -> list:
    F = f.field
    return [r for r in F.elements() if F.is_zero(_poly.evaluate(F, f.coeffs, r))]


def _finite_roots_gcd(f: PolynomialF) -> list:
    F = f.field
    q = F.order
    x = [F.zero, F.one]
    xq = _poly.powmod(F, x, q, list(f.coeffs))
    split = _poly.gcd(F, list(f.coeffs), _poly.sub(F, xq, x))
    return [r for r in F.elements() if F.is_zero(_poly.evaluate(F, split, r))] if len(split) > 1 else []


def _number_field_roots(f: PolynomialF) -> list:
    import sympy

    F = f.field
    found = []
    t = sympy.Symbol("t")
    y = sympy.Symbol("y")
    mod = sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(F.modulus))
    alpha = sympy.CRootOf(mod, 0)
    K = sympy.QQ.algebraic_field(alpha)

    def to_sym(c):
        return sum(sympy.Rational(v.numerator, v.denominator) * alpha**i for i, v in enumerate(c))

    P = sympy.Poly(sum(to_sym(c) * y**i for i, c in enumerate(f.coeffs)), y, domain=K)
    for fac, _ in P.factor_list()[1]:
        if fac.degree() != 1:
            continue
        lead, const = fac.rep.to_list()
        root = K.quo(-K.convert(const), K.convert(lead))
        coeffs = [Fraction(int(v.numerator), int(v.denominator)) for v in reversed(root.to_list())]
        raw = tuple(coeffs) + (Fraction(0),) * (F.k - len(coeffs))
        if raw not in found:
            found.append(raw)
    return found


def roots_in_field(f: PolynomialF) -> list[tuple]:
    """All roots of ``f`` in its field as ``(raw root, multiplicity)`` pairs,
    sorted by the field's canonical order."""
    if f.is_zero():
        raise ValueError("roots of the zero polynomial")
    F = f.field
    if F.kind in (PRIME, EXTENSION) and F.is_finite:
        if F.order <= EXHAUSTIVE_ROOT_ORDER:
            candidates = _finite_roots_exhaustive(f)
        else:
            candidates = _finite_roots_gcd(f)
    elif F.kind == RATIONAL:
        candidates = _poly.rational_roots(f.coeffs)
    else:
        candidates = _number_field_roots(f)
    out = []
    for r in sorted(candidates, key=F.sort_key):
        mult = 0
        g = list(f.coeffs)
        lin = _poly.x_minus(F, r)
        while True:
            q, rem = _poly.divmod_(F, g, lin)
            if rem:
                break
            mult += 1
            g = q
        out.append((r, mult))
    return out


def find_factor(f: PolynomialF) -> PolynomialF | None:
    """A proper monic factor of ``f`` or None when ``f`` is irreducible.

    Finite fields: repeated-factor split, then a linear factor, then
    distinct-degree splitting.  Rationals: rational roots, then sympy.
    """
    F = f.field
    f = f.monic()
    if f.degree <= 1:
        return None
    roots = roots_in_field(f)
    if roots:
        return PolynomialF.linear(F, roots[0][0])
    if F.kind == RATIONAL:
        if f.degree <= 3:
            return None
        import sympy

        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(f.coeffs))
        factors = sympy.factor_list(sympy.Poly(expr, x, domain="QQ"))[1]
        if len(factors) == 1 and factors[0][1] == 1:
            return None
        g = factors[0][0].monic()
        return PolynomialF(F, tuple(Fraction(int(c.p), int(c.q)) for c in reversed(g.all_coeffs())))
    if not F.is_finite:
        raise NotImplementedError("factor search over number fields")
    d = f.derivative()
    if d.is_zero():
        # f(x) = g(x^p)^... : take p-th roots of coefficients
        p = F.p
        root_exp = F.order // p
        g = PolynomialF(F, tuple(F.pow(c, root_exp) for c in f.coeffs[::p]))
        return g.monic()
    g = f.gcd(d)
    if g.degree >= 1:
        return g
    x = [F.zero, F.one]
    power = x
    for i in range(1, f.degree // 2 + 1):
        power = _poly.powmod(F, power, F.order, list(f.coeffs))
        h = _poly.gcd(F, list(f.coeffs), _poly.sub(F, power, x))
        if 1 < len(h) < len(f.coeffs):
            return PolynomialF(F, tuple(h))
        if len(h) == len(f.coeffs):
            # f is a product of degree-i irreducibles, several of them
            return _equal_degree_split(f, i)
    return None


def _equal_degree_split(f: PolynomialF, i: int) -> PolynomialF:
    """Cantor-Zassenhaus with a deterministic sweep of trial polynomials."""
    import itertools

    F = f.field
    q = F.order
    m = list(f.coeffs)
    n = f.degree
    elems = list(F.elements())
    for trial in itertools.count(1):
        # deterministic enumeration of small-degree monic trials
        digits = []
        t = trial
        while t:
            digits.append(elems[t % len(elems)])
            t //= len(elems)
        a = _poly.trim(F, digits + [F.one])
        if len(a) - 1 >= n:
            break
        if F.p == 2:
            # trace map a + a^2 + ... + a^(2^(k i - 1))
            acc = list(a)
            cur = list(a)
            for _ in range(F.k * i - 1):
                cur = _poly.mulmod(F, cur, cur, m)
                acc = _poly.add(F, acc, cur)
            b = acc
        else:
            b = _poly.sub(F, _poly.powmod(F, a, (q**i - 1) // 2, m), [F.one])
        h = _poly.gcd(F, m, b)
        if 1 < len(h) < len(m):
            return PolynomialF(F, tuple(h))
    raise RuntimeError("equal-degree splitting failed")  # pragma: no cover


def is_irreducible_poly(f: PolynomialF) -> bool:
    if f.degree < 1:
        return False
    return find_factor(f) is None
