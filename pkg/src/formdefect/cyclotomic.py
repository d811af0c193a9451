"""Exact arithmetic in the cyclotomic field Q(zeta_d).

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(d)-1), reduced
modulo the d-th cyclotomic polynomial, so equality is coefficient equality.
The involution zeta -> zeta^-1 is complex conjugation under the embedding
zeta -> exp(2 pi i / d).

    >>> z = zeta_power(8, 1)
    >>> z * zeta_power(8, 7) == 1
    True
    >>> (z + z.conj()).is_real()
    True
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from mpmath.ctx_iv import MPIntervalContext

from .errors import ConductorMismatchError, CyclotomicZeroDivisionError

__all__ = [
    "CyclotomicElement",
    "ComplexInterval",
    "cyclotomic_polynomial",
    "euler_phi",
    "zeta_power",
    "field_ops",
    "involution",
    "is_real",
    "embed",
    "parse_rational",
    "format_rational",
]


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    # low-degree-first integer polynomials, den monic, remainder must vanish
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(d: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_d, lowest degree first."""
    if d < 1:
        raise ValueError(f"conductor must be positive, got {d}")
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly = _poly_exact_div(poly, list(cyclotomic_polynomial(e)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(d: int) -> tuple[tuple[Fraction, ...], ...]:
    """x^k mod Phi_d for 0 <= k < max(d, 2 phi(d) - 1)."""
    phi = cyclotomic_polynomial(d)
    n = len(phi) - 1
    rows = []
    cur = [Fraction(0)] * n
    cur[0] = Fraction(1)
    for _ in range(max(d, 2 * n - 1)):
        rows.append(tuple(cur))
        # multiply by x
        top = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if top:
            for j in range(n):
                cur[j] -= top * phi[j]
    return tuple(rows)


def _reduce(d: int, poly: Sequence[Fraction]) -> tuple[Fraction, ...]:
    table = _power_table(d)
    n = euler_phi(d)
    out = [Fraction(c) for c in poly[:n]] + [Fraction(0)] * max(0, n - len(poly))
    for k in range(n, len(poly)):
        c = poly[k]
        if c:
            if k >= len(table):
                row = _reduce_power(d, k)
            else:
                row = table[k]
            for j in range(n):
                if row[j]:
                    out[j] += c * row[j]
    return tuple(out)


def _reduce_power(d: int, k: int) -> tuple[Fraction, ...]:
    return _power_table(d)[k % d]


def parse_rational(text: str | int | Fraction) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(text.strip())


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class CyclotomicElement:
    """An element of Q(zeta_d), immutable."""

    __slots__ = ("d", "coeffs", "_hash")

    def __init__(self, d: int, coeffs: Iterable = ()):
        if d < 1:
            raise ValueError(f"conductor must be positive, got {d}")
        self.d = d
        self.coeffs = _reduce(d, [Fraction(c) for c in coeffs])
        self._hash = None

    @classmethod
    def _raw(cls, d: int, coeffs: tuple[Fraction, ...]) -> "CyclotomicElement":
        obj = object.__new__(cls)
        obj.d = d
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, d: int, q) -> "CyclotomicElement":
        n = euler_phi(d)
        return cls._raw(d, (Fraction(q),) + (Fraction(0),) * (n - 1))

    @classmethod
    def zero(cls, d: int) -> "CyclotomicElement":
        return cls.rational(d, 0)

    @classmethod
    def one(cls, d: int) -> "CyclotomicElement":
        return cls.rational(d, 1)

    # -- coercion -----------------------------------------------------------

    def _coerce(self, other) -> "CyclotomicElement | None":
        if isinstance(other, CyclotomicElement):
            if other.d != self.d:
                raise ConductorMismatchError(
                    f"conductor mismatch: {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, _RationalABC)):
            return CyclotomicElement.rational(self.d, Fraction(other))
        return None

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CyclotomicElement._raw(
            self.d, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement._raw(self.d, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CyclotomicElement._raw(
            self.d, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, bool):
            q = Fraction(other)
            return CyclotomicElement._raw(self.d, tuple(a * q for a in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        n = len(a)
        if n == 1:
            return CyclotomicElement._raw(self.d, (a[0] * b[0],))
        conv = [Fraction(0)] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        return CyclotomicElement._raw(self.d, _reduce(self.d, conv))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicElement":
        if not self:
            raise CyclotomicZeroDivisionError(f"inverse of zero in Q(zeta_{self.d})")
        n = len(self.coeffs)
        if n == 1:
            return CyclotomicElement._raw(self.d, (1 / self.coeffs[0],))
        u = _poly_inverse_mod(list(self.coeffs), [Fraction(c) for c in cyclotomic_polynomial(self.d)])
        return CyclotomicElement(self.d, u)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if len(o.coeffs) == 1 or o.is_rational():
            q = o.coeffs[0]
            if q == 0:
                raise CyclotomicZeroDivisionError("division by zero")
            return CyclotomicElement._raw(self.d, tuple(a / q for a in self.coeffs))
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicElement.one(self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- involution and predicates -----------------------------------------

    def conj(self) -> "CyclotomicElement":
        """Image under zeta -> zeta^-1."""
        d = self.d
        poly = [Fraction(0)] * d
        for k, c in enumerate(self.coeffs):
            if c:
                poly[(-k) % d] += c
        return CyclotomicElement(d, poly)

    def is_real(self) -> bool:
        return self.conj() == self

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, CyclotomicElement):
            return self.d == other.d and self.coeffs == other.coeffs
        if isinstance(other, (int, _RationalABC)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.d, self.coeffs))
        return self._hash

    def lift(self, multiple: int) -> "CyclotomicElement":
        """Image in Q(zeta_{d*multiple}) under zeta_d -> zeta_{dm}^m."""
        D = self.d * multiple
        poly = [Fraction(0)] * D
        for k, c in enumerate(self.coeffs):
            poly[(k * multiple) % D] += c
        return CyclotomicElement(D, poly)

    def restrict(self, d: int) -> "CyclotomicElement":
        """Express self (in Q(zeta_D)) as an element of the subfield Q(zeta_d), d | D.

        Raises ValueError if self does not lie in the subfield.
        """
        D = self.d
        if D % d:
            raise ConductorMismatchError(f"{d} does not divide {D}")
        m = D // d
        n = euler_phi(d)
        basis = [zeta_power(D, m * k).coeffs for k in range(n)]
        sol = _solve_columns(basis, list(self.coeffs))
        if sol is None:
            raise ValueError(f"element does not lie in Q(zeta_{d})")
        return CyclotomicElement._raw(d, tuple(sol))

    def embed(self, precision: int = 64) -> "ComplexInterval":
        return embed(self, precision)

    def __complex__(self):
        iv = embed(self, 64)
        return complex(float(iv.re.mid), float(iv.im.mid))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"d": self.d, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "CyclotomicElement":
        d = int(obj["d"])
        coeffs = [parse_rational(c) for c in obj["coeffs"]]
        if len(coeffs) != euler_phi(d):
            raise ValueError(f"expected {euler_phi(d)} coefficients for d={d}")
        return cls(d, coeffs)

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                if mono and c == 1:
                    terms.append(mono)
                elif mono and c == -1:
                    terms.append("-" + mono)
                else:
                    terms.append(f"{c}{'*' + mono if mono else ''}")
        body = " + ".join(terms) if terms else "0"
        return f"<{body} in Q(z_{self.d})>"


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
        a.pop()
        _poly_trim(a)
    return q, a


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)


def _poly_inverse_mod(a: list[Fraction], m: list[Fraction]) -> list[Fraction]:
    """u with a*u = 1 mod m, by the extended Euclidean algorithm over Q."""
    r0, r1 = _poly_trim(list(m)), _poly_trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1:
            raise CyclotomicZeroDivisionError("element is a zero divisor")
    if not r1:
        raise CyclotomicZeroDivisionError("element is a zero divisor")
    c = r1[0]
    return [x / c for x in s1]


def _solve_columns(columns: list[Sequence[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Solve sum_k x_k * columns[k] = target exactly; None if inconsistent."""
    rows = len(target)
    ncol = len(columns)
    aug = [[Fraction(columns[k][i]) for k in range(ncol)] + [Fraction(target[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, rows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][ncol] for i in range(r, rows)):
        return None
    x = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncol]
    return x


def zeta_power(d: int, k: int) -> CyclotomicElement:
    """Canonical representative of zeta_d^k."""
    if d < 1:
        raise ValueError(f"conductor must be positive, got {d}")
    row = _power_table(d)[k % d]
    return CyclotomicElement._raw(d, row)


def field_ops(a: CyclotomicElement, b: CyclotomicElement, op: str) -> CyclotomicElement:
    """Dispatch one of add, subtract, multiply, divide, invert (b ignored)."""
    if op == "add":
        return a + b
    if op == "subtract":
        return a - b
    if op == "multiply":
        return a * b
    if op == "divide":
        return a / b
    if op == "invert":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def involution(a: CyclotomicElement) -> CyclotomicElement:
    return a.conj()


def is_real(a: CyclotomicElement) -> bool:
    return a.is_real()


# -- certified complex embedding --------------------------------------------


@dataclass(frozen=True)
class ComplexInterval:
    """Rectangle re x im of outward-rounded real intervals (mpmath iv)."""

    re: object
    im: object

    @property
    def ctx(self):
        return self.re.ctx

    @property
    def real(self) -> tuple:
        return _mid_rad(self.re)

    @property
    def imaginary(self) -> tuple:
        return _mid_rad(self.im)

    @property
    def radius(self):
        """Upper bound on the distance from the midpoint to any contained point."""
        _, rr = self.real
        _, ri = self.imaginary
        return rr + ri

    def __add__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def abs_upper(self):
        """Rigorous upper bound for |z| over the rectangle."""
        ctx = self.ctx
        mr = max(abs(self.re.a), abs(self.re.b))
        mi = max(abs(self.im.a), abs(self.im.b))
        return ctx.sqrt(mr * mr + mi * mi).b

    def contains(self, z: complex | tuple) -> bool:
        if isinstance(z, tuple):
            x, y = z
        else:
            x, y = z.real, z.imag
        return _iv_contains(self.re, x) and _iv_contains(self.im, y)

    def intersects(self, other: "ComplexInterval") -> bool:
        return (self.re.a <= other.re.b and other.re.a <= self.re.b
                and self.im.a <= other.im.b and other.im.a <= self.im.b)


def _iv_contains(iv, x) -> bool:
    ctx = iv.ctx
    point = ctx.convert(x) if not hasattr(x, "a") else x
    return iv.a <= point.a and point.b <= iv.b


def _mid_rad(iv):
    ctx = iv.ctx
    mid = (iv.a + iv.b) / 2
    mid = mid.a  # a point value inside [a, b]
    rad = max((iv.b - mid).b, (mid - iv.a).b)
    return mid, rad


@lru_cache(maxsize=256)
def _interval_context(precision: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = precision
    return ctx


@lru_cache(maxsize=4096)
def _root_of_unity_interval(d: int, k: int, precision: int) -> ComplexInterval:
    ctx = _interval_context(precision)
    k %= d
    if k == 0:
        return ComplexInterval(ctx.mpf(1), ctx.mpf(0))
    if 4 * k == d:
        return ComplexInterval(ctx.mpf(0), ctx.mpf(1))
    if 2 * k == d:
        return ComplexInterval(ctx.mpf(-1), ctx.mpf(0))
    if 4 * k == 3 * d:
        return ComplexInterval(ctx.mpf(0), ctx.mpf(-1))
    theta = 2 * ctx.pi * k / d
    return ComplexInterval(ctx.cos(theta), ctx.sin(theta))


def embed(a: CyclotomicElement, precision: int = 64) -> ComplexInterval:
    """Certified enclosure of the image of a under zeta_d -> exp(2 pi i/d)."""
    if precision < 16:
        raise ValueError("precision must be at least 16 bits")
    ctx = _interval_context(precision)
    re = ctx.mpf(0)
    im = ctx.mpf(0)
    for k, c in enumerate(a.coeffs):
        if not c:
            continue
        q = ctx.mpf(c.numerator) / c.denominator
        z = _root_of_unity_interval(a.d, k, precision)
        re = re + q * z.re
        im = im + q * z.im
    return ComplexInterval(re, im)
