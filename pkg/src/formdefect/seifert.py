"""Seifert matrices, Alexander polynomials, the block forms lambda_r(A, w),
knot-cover defects, and Levine-Tristram signatures."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath

from ._linalg import determinant
from .cyclotomic import CyclotomicElement, zeta_power
from .errors import AlexanderZeroError
from .witt import HermitianForm, WittClass, signature

__all__ = [
    "SeifertMatrix",
    "LaurentPolynomial",
    "alexander",
    "k_a_matrix",
    "trefoil_matrix",
    "build_lambda_r",
    "knot_cover_defect",
    "dis_formula",
    "lambda_det_formula",
    "levine_tristram",
    "root_exponent",
]


class SeifertMatrix:
    """Integer 2g x 2g matrix A with det(A - A^T) = 1."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence[int]], check: bool = True):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("Seifert matrix must be square")
        if n % 2:
            raise ValueError("Seifert matrix must have even size")
        self.entries = rows
        if check:
            skew = [[Fraction(rows[i][j] - rows[j][i]) for j in range(n)] for i in range(n)]
            if determinant(skew) != 1:
                raise ValueError("Seifert matrix must satisfy det(A - A^T) = 1")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def genus(self) -> int:
        return self.size // 2

    def transpose(self) -> "SeifertMatrix":
        return SeifertMatrix(list(zip(*self.entries)), check=False)

    def concordance_inverse(self) -> "SeifertMatrix":
        """-A^T, the Seifert matrix of the mirror image with reversed orientation."""
        return SeifertMatrix([[-x for x in row] for row in zip(*self.entries)], check=False)

    def block_sum(self, other: "SeifertMatrix") -> "SeifertMatrix":
        """Block-diagonal sum (Seifert matrix of the connected sum)."""
        n, m = self.size, other.size
        rows = [list(r) + [0] * m for r in self.entries]
        rows += [[0] * n + list(r) for r in other.entries]
        return SeifertMatrix(rows, check=False)

    def __eq__(self, other):
        return isinstance(other, SeifertMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"SeifertMatrix({[list(r) for r in self.entries]})"

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    @classmethod
    def from_json(cls, obj) -> "SeifertMatrix":
        return cls(obj)


class LaurentPolynomial:
    """Finite-support integer Laurent polynomial {exponent: coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        out: dict[int, int] = {}
        for e, c in items:
            out[int(e)] = out.get(int(e), 0) + int(c)
        self.coeffs = {e: c for e, c in sorted(out.items()) if c}

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*t^{e}" for e, c in self.coeffs.items())

    def substitute_inverse(self) -> "LaurentPolynomial":
        return LaurentPolynomial({-e: c for e, c in self.coeffs.items()})

    def __call__(self, t):
        """Evaluate at an int, Fraction, or CyclotomicElement (nonzero if negative powers occur)."""
        if isinstance(t, CyclotomicElement):
            total = CyclotomicElement.zero(t.d)
            inv = t.inverse() if any(e < 0 for e in self.coeffs) else None
            for e, c in self.coeffs.items():
                total = total + (t ** e if e >= 0 else inv ** (-e)) * c
            return total
        t = Fraction(t)
        return sum((c * t ** e for e, c in self.coeffs.items()), Fraction(0))

    def integer_roots_polynomial(self) -> list[int]:
        """Coefficients, highest degree first, of t^(-min exp) * self."""
        if not self.coeffs:
            return []
        lo, hi = min(self.coeffs), max(self.coeffs)
        return [self.coeffs.get(e, 0) for e in range(hi, lo - 1, -1)]

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in self.coeffs.items()}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "LaurentPolynomial":
        return cls({int(e): int(c) for e, c in obj.items()})


def _as_seifert(A) -> SeifertMatrix:
    return A if isinstance(A, SeifertMatrix) else SeifertMatrix(A)


@lru_cache(maxsize=1024)
def _alexander_cached(A: SeifertMatrix) -> LaurentPolynomial:
    n, g = A.size, A.genus
    a = A.entries
    # det(tA - A^T) has degree <= 2g; interpolate through 2g + 1 integer points
    points = list(range(-g, g + 1))
    values = []
    for t in points:
        m = [[Fraction(t * a[i][j] - a[j][i]) for j in range(n)] for i in range(n)]
        values.append(determinant(m))
    poly = [Fraction(0)] * (n + 1)
    for k, (xk, yk) in enumerate(zip(points, values)):
        if not yk:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(points):
            if j == k:
                continue
            basis = [Fraction(0)] + basis
            for i in range(len(basis) - 1):
                basis[i] -= xj * basis[i + 1]
            denom *= xk - xj
        for i, c in enumerate(basis):
            poly[i] += yk * c / denom
    assert all(c.denominator == 1 for c in poly)
    return LaurentPolynomial({i - g: int(c) for i, c in enumerate(poly)})


def alexander(A) -> LaurentPolynomial:
    """Symmetrized Alexander polynomial t^(-g) det(tA - A^T)."""
    return _alexander_cached(_as_seifert(A))


def k_a_matrix(a: int) -> SeifertMatrix:
    return SeifertMatrix([[a, 1], [0, -a]])


def trefoil_matrix() -> SeifertMatrix:
    return SeifertMatrix([[-1, 1], [0, -1]])


def root_exponent(w: CyclotomicElement) -> int:
    """The k with w = zeta_d^k; raises ValueError if w is not a d-th root of unity."""
    for k in range(w.d):
        if zeta_power(w.d, k) == w:
            return k
    raise ValueError(f"{w!r} is not a root of unity of order dividing {w.d}")


@lru_cache(maxsize=4096)
def _lambda_cached(A: SeifertMatrix, r: int, d: int, s: int) -> HermitianForm:
    n = A.size
    a = A.entries
    w = zeta_power(d, s)
    winv = zeta_power(d, -s)
    zero = CyclotomicElement.zero(d)

    def blk(fa, fat):
        # fa * A + fat * A^T, with scalar coefficients
        return [[fa * a[i][j] + fat * a[j][i] for j in range(n)] for i in range(n)]

    if r == 1:
        block = blk(1 - w, 1 - winv)
        return HermitianForm(d, block)
    sym = blk(CyclotomicElement.one(d), CyclotomicElement.one(d))
    blocks = [[None] * r for _ in range(r)]
    for i in range(r):
        blocks[i][i] = sym
    if r == 2:
        m1 = CyclotomicElement.rational(d, -1)
        blocks[0][1] = blk(m1, -winv)
        blocks[1][0] = blk(-w, m1)
    else:
        m1 = CyclotomicElement.rational(d, -1)
        for i in range(r - 1):
            blocks[i][i + 1] = blk(m1, zero)
            blocks[i + 1][i] = blk(zero, m1)
        blocks[0][r - 1] = blk(zero, -winv)
        blocks[r - 1][0] = blk(-w, zero)
    rows = []
    for bi in range(r):
        for i in range(n):
            row = []
            for bj in range(r):
                b = blocks[bi][bj]
                row.extend(b[i] if b is not None else [zero] * n)
            rows.append(row)
    return HermitianForm(d, rows)


def build_lambda_r(A, r: int, omega: CyclotomicElement) -> HermitianForm:
    """The 2gr x 2gr hermitian block matrix lambda_r(A, omega).

    Diagonal blocks A + A^T, superdiagonal -A, subdiagonal -A^T, corners
    -omega^(-1) A^T (top right) and -omega A (bottom left); r = 1 and r = 2
    collapse the corner terms into (1 - w)A + (1 - w^-1)A^T and
    [[A + A^T, -A - w^-1 A^T], [-A^T - wA, A + A^T]].
    """
    if r < 1:
        raise ValueError("r must be positive")
    return _lambda_cached(_as_seifert(A), r, omega.d, root_exponent(omega))


@lru_cache(maxsize=4096)
def _block_class(A: SeifertMatrix, r: int, d: int, s: int) -> WittClass:
    return WittClass.of(_lambda_cached(A, r, d, s % d))


def lambda_class(A, r: int, d: int, s: int) -> WittClass:
    """Witt class of the nonsingular part of lambda_r(A, zeta_d^s) (cached)."""
    return _block_class(_as_seifert(A), r, d, s % d)


def knot_cover_defect(A, r: int, s: int, d: int) -> WittClass:
    """[lambda_r(A, zeta_d^s)] - [lambda_r(A, 1)]."""
    if r < 1 or d < 1:
        raise ValueError("r and d must be positive")
    A = _as_seifert(A)
    return lambda_class(A, r, d, s) - lambda_class(A, r, d, 0)


def _half_root_values(A: SeifertMatrix, omega: CyclotomicElement):
    d = omega.d
    s = root_exponent(omega)
    delta = alexander(A)
    root = zeta_power(2 * d, s)
    return delta(root), delta(-root), d


def dis_formula(A, omega: CyclotomicElement, r: int) -> CyclotomicElement:
    """Discriminant predicted from the Alexander polynomial.

    r = 1: Delta(w).  r = 2: Delta(sqrt w) Delta(-sqrt w) with sqrt w taken in
    Q(zeta_2d) and the product brought back to Q(zeta_d).
    """
    A = _as_seifert(A)
    delta = alexander(A)
    if r == 1:
        val = delta(omega)
        if not val:
            raise AlexanderZeroError(f"Alexander polynomial vanishes at {omega!r}")
        return val
    if r == 2:
        plus, minus, d = _half_root_values(A, omega)
        if not plus or not minus:
            raise AlexanderZeroError("Alexander polynomial vanishes at a square root of omega")
        return (plus * minus).restrict(d)
    raise ValueError("dis_formula is defined for r in {1, 2}")


def lambda_det_formula(A, omega: CyclotomicElement, r: int) -> CyclotomicElement:
    """Exact determinant of lambda_r(A, omega) predicted by the Alexander polynomial.

    r = 1: (-1)^(g(2g+1)) (w - 1)^g (w^-1 - 1)^g Delta(w).
    r = 2: (1 - w)^g (1 - w^-1)^g Delta(sqrt w) Delta(-sqrt w).
    """
    A = _as_seifert(A)
    g = A.genus
    d = omega.d
    winv = omega.inverse()
    if r == 1:
        sign = -1 if (g * (2 * g + 1)) % 2 else 1
        return (omega - 1) ** g * (winv - 1) ** g * alexander(A)(omega) * sign
    if r == 2:
        plus, minus, _ = _half_root_values(A, omega)
        prod = (plus * minus).restrict(d)
        return prod * (1 - omega) ** g * (1 - winv) ** g
    raise ValueError("lambda_det_formula is defined for r in {1, 2}")


def _unit_circle_root_angles(delta: LaurentPolynomial, dps: int = 40) -> list:
    coeffs = delta.integer_roots_polynomial()
    if len(coeffs) <= 1:
        return []
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        out = []
        for z in roots:
            if abs(abs(z) - 1) < mpmath.mpf(10) ** (-dps // 2):
                out.append(mpmath.arg(z) % (2 * mpmath.pi))
    return out


def levine_tristram(A, d: int, s: int) -> int:
    """Two-sided averaged signature of lambda_1(A, w) at w = zeta_d^s."""
    A = _as_seifert(A)
    s %= d
    if s == 0:
        return 0
    delta = alexander(A)
    w = zeta_power(d, s)
    if delta(w):
        return signature(build_lambda_r(A, 1, w))
    angles = _unit_circle_root_angles(delta)
    theta = 2 * mpmath.pi * s / d
    N = 2
    while True:
        step = 2 * mpmath.pi / (N * d)
        lo, hi = zeta_power(N * d, N * s - 1), zeta_power(N * d, N * s + 1)
        clear = all(
            abs(_angle_diff(a, theta)) < step / 4 or abs(_angle_diff(a, theta)) > step * 1.01
            for a in angles
        )
        if clear and delta(lo) and delta(hi):
            s_lo = signature(build_lambda_r(A, 1, lo))
            s_hi = signature(build_lambda_r(A, 1, hi))
            total = s_lo + s_hi
            assert total % 2 == 0
            return total // 2
        N += 1


def _angle_diff(a, b):
    diff = (a - b) % (2 * mpmath.pi)
    if diff > mpmath.pi:
        diff -= 2 * mpmath.pi
    return diff
