"""Hermitian forms over Q(zeta_d) and their classes in the Witt group L^0.

A hermitian form is given by its Gram matrix G with G = conj(G)^T, and
h(x, y) = conj(x)^T G y.  The three Witt invariants are the signature of
the complex embedding, the rank modulo 2, and the discriminant
(-1)^(r(r+1)/2) det G, taken modulo norms z * conj(z).

Witt classes keep a tuple of nonsingular orthogonal summands rather than
one big block matrix: signature and determinant are computed blockwise and
cached per summand, and an exact summand/negated-summand pair cancels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from mpmath.ctx_mp import MPContext

from . import numtheory
from ._linalg import determinant, pivot_columns
from .cyclotomic import (CyclotomicElement, ComplexInterval, _interval_context,
                         embed, euler_phi, format_rational, parse_rational)
from .errors import (ConductorMismatchError, NotHermitianError, SingularFormError,
                     WittUndecidedError)

__all__ = [
    "HermitianForm",
    "WittClass",
    "WittInvariants",
    "DiscriminantClass",
    "radical_reduce",
    "hyperbolic_reduce",
    "signature",
    "rank_mod2",
    "discriminant",
    "witt_add",
    "witt_negate",
    "witt_invariants",
    "realify",
    "rational_signature",
]

#: conductors whose real subfield is Q, where discriminant classes are decided
CLASS_CONDUCTORS = (1, 2, 4)


def _as_element(d: int, x) -> CyclotomicElement:
    if isinstance(x, CyclotomicElement):
        if x.d != d:
            raise ConductorMismatchError(f"entry has conductor {x.d}, form has {d}")
        return x
    return CyclotomicElement.rational(d, Fraction(x))


class HermitianForm:
    """Square hermitian Gram matrix over Q(zeta_d); possibly 0x0."""

    def __init__(self, d: int, gram: Sequence[Sequence], check: bool = True):
        self.d = d
        self.gram = tuple(tuple(_as_element(d, x) for x in row) for row in gram)
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise ValueError("Gram matrix must be square")
        if check:
            for i in range(n):
                for j in range(i, n):
                    if self.gram[i][j].conj() != self.gram[j][i]:
                        raise NotHermitianError(f"entry ({i},{j}) breaks hermitian symmetry")

    @classmethod
    def empty(cls, d: int) -> "HermitianForm":
        return cls(d, (), check=False)

    @property
    def dim(self) -> int:
        return len(self.gram)

    def __len__(self):
        return self.dim

    @cached_property
    def det(self) -> CyclotomicElement:
        return determinant(self.gram, one=CyclotomicElement.one(self.d))

    def is_nonsingular(self) -> bool:
        return bool(self.det)

    def negate(self) -> "HermitianForm":
        return HermitianForm(self.d, [[-x for x in row] for row in self.gram], check=False)

    def __neg__(self):
        return self.negate()

    def direct_sum(self, other: "HermitianForm") -> "HermitianForm":
        if other.d != self.d:
            raise ConductorMismatchError(f"conductor mismatch: {self.d} vs {other.d}")
        n, m = self.dim, other.dim
        zero = CyclotomicElement.zero(self.d)
        rows = [list(r) + [zero] * m for r in self.gram]
        rows += [[zero] * n + list(r) for r in other.gram]
        return HermitianForm(self.d, rows, check=False)

    def principal(self, idx: Sequence[int]) -> "HermitianForm":
        return HermitianForm(self.d, [[self.gram[i][j] for j in idx] for i in idx], check=False)

    def __eq__(self, other):
        if not isinstance(other, HermitianForm):
            return NotImplemented
        return self.d == other.d and self.gram == other.gram

    def __hash__(self):
        return hash((self.d, self.gram))

    def __repr__(self):
        return f"HermitianForm(d={self.d}, dim={self.dim})"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "gram": [[[format_rational(c) for c in x.coeffs] for x in row] for row in self.gram],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianForm":
        d = int(obj["d"])
        n = euler_phi(d)
        gram = []
        for row in obj["gram"]:
            out = []
            for x in row:
                if isinstance(x, (str, int)):
                    out.append(CyclotomicElement.rational(d, parse_rational(x)))
                else:
                    if len(x) != n:
                        raise ValueError(f"expected {n} coefficients per entry for d={d}")
                    out.append(CyclotomicElement(d, [parse_rational(c) for c in x]))
            gram.append(out)
        return cls(d, gram)

    # cached per-form invariants -------------------------------------------

    @cached_property
    def _signature(self) -> int:
        return _certified_signature(self)


def radical_reduce(h: HermitianForm) -> HermitianForm:
    """Restriction of h to a complement of its radical.

    The complement is spanned by the standard basis vectors at a maximal
    independent set of Gram columns; the principal submatrix there is
    nonsingular for any hermitian matrix.
    """
    if h.dim == 0:
        return h
    piv = pivot_columns(h.gram)
    if len(piv) == h.dim:
        return h
    return h.principal(piv)


def hyperbolic_reduce(h: HermitianForm) -> HermitianForm:
    """Split off hyperbolic planes spanned by isotropic basis vectors.

    Input must be nonsingular.  Whenever a diagonal entry vanishes, the plane
    span(e_i, e_j) with G_ij != 0 is hyperbolic and is replaced by its
    orthogonal complement (Schur complement).  Witt class is unchanged.
    """
    g = [list(row) for row in h.gram]
    d = h.d
    while g:
        n = len(g)
        iso = next((i for i in range(n) if not g[i][i]), None)
        if iso is None:
            break
        j = next((k for k in range(n) if k != iso and g[iso][k]), None)
        if j is None:
            raise SingularFormError("hyperbolic_reduce requires a nonsingular form")
        P = [iso, j]
        rest = [k for k in range(n) if k not in P]
        a, b = g[iso][iso], g[iso][j]
        c, e = g[j][iso], g[j][j]
        det = a * e - b * c
        inv = [[e / det, -b / det], [-c / det, a / det]]
        new = []
        for r in rest:
            row = []
            gr = (g[r][iso], g[r][j])
            for s in rest:
                gs = (g[iso][s], g[j][s])
                corr = CyclotomicElement.zero(d)
                for p in range(2):
                    if not gr[p]:
                        continue
                    for q in range(2):
                        if gs[q] and inv[p][q]:
                            corr = corr + gr[p] * inv[p][q] * gs[q]
                row.append(g[r][s] - corr)
            new.append(row)
        g = new
    return HermitianForm(d, g, check=False)


def _require_nonsingular(h: HermitianForm) -> None:
    if h.dim and not h.det:
        raise SingularFormError(f"form of dimension {h.dim} is singular; call radical_reduce first")


# -- signature ------------------------------------------------------------------


def _certified_signature(h: HermitianForm, start_precision: int = 64,
                         max_precision: int = 1 << 16) -> int:
    n = h.dim
    if n == 0:
        return 0
    _require_nonsingular(h)
    if n == 1:
        x = h.gram[0][0]
        prec = start_precision
        while True:
            z = embed(x, prec)
            if z.re.a > 0:
                return 1
            if z.re.b < 0:
                return -1
            prec *= 2
    prec = start_precision
    while prec <= max_precision:
        s = _signature_at_precision(h, prec)
        if s is not None:
            return s
        prec *= 2
    raise ArithmeticError("signature certification did not converge")


def _signature_at_precision(h: HermitianForm, prec: int) -> int | None:
    """Congruence-certified inertia count, or None if precision is insufficient.

    With Q the approximate eigenvector matrix of the embedded Gram matrix H,
    Q*HQ is congruent to H whenever Q is nonsingular.  Gershgorin discs of an
    interval enclosure of Q*HQ that all avoid 0 fix the number of positive and
    negative eigenvalues; Q*Q having all discs in (0, inf) certifies Q
    nonsingular.
    """
    n = h.dim
    ivc = _interval_context(prec + 10)
    mpc = MPContext()
    mpc.prec = prec
    H = [[embed(x, prec + 10) for x in row] for row in h.gram]
    mid = mpc.matrix(n, n)
    for i in range(n):
        for j in range(n):
            re, _ = H[i][j].real
            im, _ = H[i][j].imaginary
            mid[i, j] = mpc.mpc(re, im)
    # symmetrize the midpoint to keep eighe happy
    for i in range(n):
        mid[i, i] = mpc.mpc(mpc.re(mid[i, i]), 0)
        for j in range(i + 1, n):
            mid[j, i] = mpc.conj(mid[i, j])
    try:
        _, Qm = mpc.eighe(mid)
    except Exception:  # pragma: no cover - mpmath convergence failure
        return None
    Q = [[ComplexInterval(ivc.mpf(mpc.re(Qm[i, j])), ivc.mpf(mpc.im(Qm[i, j])))
          for j in range(n)] for i in range(n)]
    zero = ComplexInterval(ivc.mpf(0), ivc.mpf(0))

    def conj_t_times(A, B):
        out = [[zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + A[k][i].conj() * B[k][j]
                out[i][j] = acc
        return out

    def times(A, B):
        out = [[zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + A[i][k] * B[k][j]
                out[i][j] = acc
        return out

    gram_q = conj_t_times(Q, Q)
    if _gershgorin_signs(gram_q, ivc) != (n, 0):
        return None
    B = conj_t_times(Q, times(H, Q))
    counts = _gershgorin_signs(B, ivc)
    if counts is None:
        return None
    pos, neg = counts
    return pos - neg


def _gershgorin_signs(B, ivc) -> tuple[int, int] | None:
    n = len(B)
    pos = neg = 0
    for i in range(n):
        r = ivc.mpf(0)
        for j in range(n):
            if j != i:
                r = r + ivc.mpf(B[i][j].abs_upper())
        rb = r.b
        c = B[i][i].re
        if (c - rb).a > 0:
            pos += 1
        elif (c + rb).b < 0:
            neg += 1
        else:
            return None
    return pos, neg


def signature(h: HermitianForm) -> int:
    """Signature of the complex embedding of a nonsingular form."""
    _require_nonsingular(h)
    return h._signature


def rank_mod2(h: HermitianForm) -> int:
    _require_nonsingular(h)
    return h.dim % 2


def discriminant(h: HermitianForm) -> CyclotomicElement:
    """(-1)^(r(r+1)/2) det; always lies in the real subfield."""
    _require_nonsingular(h)
    r = h.dim
    sign = -1 if (r * (r + 1) // 2) % 2 else 1
    dis = h.det * sign
    assert dis.is_real(), "discriminant of a hermitian form must be involution-fixed"
    return dis


# -- exact rational oracle --------------------------------------------------------


def realify(h: HermitianForm) -> list[list[Fraction]]:
    """2n x 2n real symmetric matrix [[X, -Y], [Y, X]] of a form over Q(i).

    Its signature is exactly twice the signature of h.
    """
    if h.d != 4:
        raise ValueError("realification is implemented for Q(i) only")
    n = h.dim
    X = [[h.gram[i][j].coeffs[0] for j in range(n)] for i in range(n)]
    Y = [[h.gram[i][j].coeffs[1] for j in range(n)] for i in range(n)]
    top = [X[i] + [-y for y in Y[i]] for i in range(n)]
    bottom = [Y[i] + X[i] for i in range(n)]
    return top + bottom


def rational_signature(S: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a rational symmetric matrix by exact congruence."""
    m = [[Fraction(x) for x in row] for row in S]
    pos = neg = zero = 0
    while m:
        n = len(m)
        i = next((k for k in range(n) if m[k][k]), None)
        if i is not None:
            p = m[i][i]
            if p > 0:
                pos += 1
            else:
                neg += 1
            rest = [k for k in range(n) if k != i]
            m = [[m[r][s] - m[r][i] * m[i][s] / p for s in rest] for r in rest]
            continue
        pair = next(((a, b) for a in range(n) for b in range(a + 1, n) if m[a][b]), None)
        if pair is None:
            zero += n
            break
        a, b = pair
        # [[0, c], [c, 0]] block contributes one positive and one negative
        pos += 1
        neg += 1
        c = m[a][b]
        rest = [k for k in range(n) if k not in pair]
        # inverse of [[0, c], [c, 0]] is [[0, 1/c], [1/c, 0]]
        m = [[m[r][s] - (m[r][a] * m[b][s] + m[r][b] * m[a][s]) / c for s in rest] for r in rest]
    return pos, neg, zero


# -- Witt classes ---------------------------------------------------------------


@dataclass(frozen=True)
class DiscriminantClass:
    """Canonical representative of a discriminant modulo norms (real subfield Q).

    kind is "norm-Q(i)" for d = 4 (norms are sums of two squares) and
    "square" for d in {1, 2} where the involution is trivial.
    """

    kind: str
    representative: int
    certificate: "numtheory.SymbolCertificate | None" = None

    @property
    def is_trivial(self) -> bool:
        return self.representative == 1

    def to_json(self) -> dict:
        out = {"kind": self.kind, "representative": self.representative}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def discriminant_class(d: int, x: Fraction) -> DiscriminantClass:
    if d == 4:
        cert = numtheory.norm_certificate(x)
        return DiscriminantClass("norm-Q(i)", numtheory.norm_class_representative(x), cert)
    if d in (1, 2):
        return DiscriminantClass("square", numtheory.squarefree_part(x))
    raise ValueError(f"discriminant classes are decided only for d in {CLASS_CONDUCTORS}")


@dataclass(frozen=True)
class WittInvariants:
    signature: int
    rank_mod2: int
    discriminant_raw: CyclotomicElement
    discriminant_class: DiscriminantClass | None = None

    def triple(self):
        cls = self.discriminant_class.representative if self.discriminant_class else None
        return (self.signature, self.rank_mod2, cls)

    def to_json(self) -> dict:
        out = {
            "signature": self.signature,
            "rank_mod2": self.rank_mod2,
            "discriminant_raw": self.discriminant_raw.to_json(),
        }
        if self.discriminant_class is not None:
            out["discriminant_class"] = self.discriminant_class.to_json()
        return out


class WittClass:
    """Element of L^0(Q(zeta_d)) held as an orthogonal sum of nonsingular forms."""

    def __init__(self, d: int, summands: Sequence[HermitianForm] = ()):
        self.d = d
        for s in summands:
            if s.d != d:
                raise ConductorMismatchError(f"summand conductor {s.d} != {d}")
        self.summands = _cancel_pairs([s for s in summands if s.dim])

    @classmethod
    def zero(cls, d: int) -> "WittClass":
        return cls(d, ())

    @classmethod
    def of(cls, h: HermitianForm) -> "WittClass":
        """Class of the nonsingular part of h."""
        reduced = hyperbolic_reduce(radical_reduce(h))
        return cls(h.d, (reduced,) if reduced.dim else ())

    @property
    def representative(self) -> HermitianForm:
        out = HermitianForm.empty(self.d)
        for s in self.summands:
            out = out.direct_sum(s)
        return out

    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.summands)

    def __add__(self, other: "WittClass") -> "WittClass":
        return witt_add(self, other)

    def __neg__(self) -> "WittClass":
        return witt_negate(self)

    def __sub__(self, other: "WittClass") -> "WittClass":
        return witt_add(self, witt_negate(other))

    @cached_property
    def invariants(self) -> WittInvariants:
        return witt_invariants(self)

    def is_zero(self) -> bool:
        """Decide whether the class vanishes.

        Raises WittUndecidedError for conductors outside {1, 2, 4} when
        signature and rank vanish but the discriminant is not exactly 1.
        """
        if not self.summands:
            return True
        inv = self.invariants
        if inv.signature or inv.rank_mod2:
            return False
        if inv.discriminant_class is not None:
            return inv.discriminant_class.is_trivial
        if inv.discriminant_raw == 1:
            return True
        raise WittUndecidedError(
            f"cannot decide whether discriminant {inv.discriminant_raw!r} is a norm")

    def __eq__(self, other):
        if not isinstance(other, WittClass):
            return NotImplemented
        if other.d != self.d:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"WittClass(d={self.d}, dims={[s.dim for s in self.summands]})"

    def to_json(self) -> dict:
        return {"d": self.d, "summands": [s.to_json() for s in self.summands]}


def _cancel_pairs(forms: list[HermitianForm]) -> tuple[HermitianForm, ...]:
    out: list[HermitianForm] = []
    for f in forms:
        neg = f.negate()
        for k, g in enumerate(out):
            if g == neg:
                del out[k]
                break
        else:
            out.append(f)
    return tuple(out)


def witt_add(x: WittClass, y: WittClass) -> WittClass:
    if x.d != y.d:
        raise ConductorMismatchError(f"conductor mismatch: {x.d} vs {y.d}")
    return WittClass(x.d, x.summands + y.summands)


def witt_negate(x: WittClass) -> WittClass:
    return WittClass(x.d, tuple(s.negate() for s in x.summands))


def witt_invariants(x: WittClass) -> WittInvariants:
    sig = sum(signature(s) for s in x.summands)
    r = x.dim
    det = CyclotomicElement.one(x.d)
    for s in x.summands:
        det = det * s.det
    sign = -1 if (r * (r + 1) // 2) % 2 else 1
    dis = det * sign
    assert dis.is_real()
    cls = None
    if x.d in CLASS_CONDUCTORS:
        cls = discriminant_class(x.d, dis.to_rational())
    return WittInvariants(sig, r % 2, dis, cls)
