"""Valuations, norm residue symbols over Q, the Q(i)/Q norm test, Pell
machinery, and the dual-prime sequence.

Norms from Q(i) are exactly the positive rationals in which every prime
p = 3 (mod 4) occurs to an even power, so Q^x / N(Q(i)^x) is an F_2-vector
space with basis {-1} and those primes.  Classes are represented canonically
by sign * (product of such primes with odd valuation).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import gmpy2

from .errors import BudgetExhaustedError

__all__ = [
    "valuation",
    "norm_residue_symbol",
    "is_norm_from_Qi",
    "norm_class_equal",
    "norm_class_representative",
    "norm_certificate",
    "squarefree_part",
    "factorize",
    "is_prime",
    "pell_solutions",
    "non_square_multiple",
    "dual_sequence",
    "SymbolCertificate",
    "DualSequence",
]

TRIAL_LIMIT = 10**6
DEFAULT_FACTOR_BUDGET = 2_000_000


def _as_fraction(x) -> Fraction:
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no valuation / norm class")
    return x


def is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n, 40))


def valuation(x, p: int) -> int:
    """Exponent of the prime p in the nonzero rational x."""
    x = _as_fraction(x)
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _unit_part_mod(x: Fraction, p: int) -> int:
    """x / p^v_p(x) reduced mod p (it is a p-adic unit)."""
    v = valuation(x, p)
    y = x / Fraction(p) ** v
    return y.numerator * pow(y.denominator, -1, p) % p


def norm_residue_symbol(a, b, p: int) -> int:
    """(a, b)_p for an odd prime p, by the closed tame-symbol formula."""
    if p == 2:
        raise ValueError("the symbol at p = 2 is not implemented")
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    a, b = _as_fraction(a), _as_fraction(b)
    va, vb = valuation(a, p), valuation(b, p)
    ua, ub = _unit_part_mod(a, p), _unit_part_mod(b, p)
    # (-1)^(va vb) a^vb / b^va, with the p-powers cancelling
    t = pow(ua, vb, p) * pow(ub, -va, p) % p
    if (va * vb) % 2:
        t = -t % p
    s = pow(t, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def _fraction_support(x: Fraction, budget: int | None = None) -> dict[int, int]:
    """Prime factorization of a nonzero rational as {p: v_p(x)}."""
    out: dict[int, int] = {}
    for p, e in factorize(abs(x.numerator), budget).items():
        out[p] = out.get(p, 0) + e
    for p, e in factorize(x.denominator, budget).items():
        out[p] = out.get(p, 0) - e
    return out


def is_norm_from_Qi(x) -> bool:
    x = _as_fraction(x)
    if x < 0:
        return False
    return norm_class_representative(x) == 1


def norm_class_representative(x) -> int:
    """Canonical representative of x in Q^x modulo norms from Q(i)."""
    x = _as_fraction(x)
    rep = -1 if x < 0 else 1
    for p, e in _fraction_support(x).items():
        if p % 4 == 3 and e % 2:
            rep *= p
    return rep


def norm_class_equal(x, y) -> bool:
    x, y = _as_fraction(x), _as_fraction(y)
    return is_norm_from_Qi(x / y)


def squarefree_part(x) -> int:
    """Canonical representative of x in Q^x / (Q^x)^2."""
    x = _as_fraction(x)
    rep = -1 if x < 0 else 1
    for p, e in _fraction_support(x).items():
        if e % 2:
            rep *= p
    return rep


@dataclass(frozen=True)
class SymbolCertificate:
    """Symbols (x, -1)_p at the odd primes dividing x, plus the norm verdict."""

    value_x: Fraction
    symbols: tuple[tuple[int, int], ...]
    norm_verdict: str  # "norm" | "not-norm"

    @property
    def is_norm(self) -> bool:
        return self.norm_verdict == "norm"

    def symbol(self, p: int) -> int:
        for q, s in self.symbols:
            if q == p:
                return s
        return norm_residue_symbol(self.value_x, -1, p)

    def to_json(self) -> dict:
        return {
            "value_x": str(self.value_x),
            "symbols": [[p, s] for p, s in self.symbols],
            "norm_verdict": self.norm_verdict,
        }


def norm_certificate(x, primes: Iterable[int] | None = None) -> SymbolCertificate:
    """Evaluate (x, -1)_p at the given odd primes (default: all odd primes dividing x)."""
    x = _as_fraction(x)
    full = primes is None
    if full:
        primes = sorted(p for p in _fraction_support(x) if p != 2)
    symbols = tuple((p, norm_residue_symbol(x, -1, p)) for p in primes)
    verdict = "norm" if is_norm_from_Qi(x) else "not-norm"
    if full and verdict == "not-norm":
        assert x < 0 or any(s == -1 for _, s in symbols), "verdict must be witnessed"
    return SymbolCertificate(x, symbols, verdict)


# -- factorization --------------------------------------------------------------


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(sieve) if f]


_PRIMES: list[int] | None = None


def _trial_primes() -> list[int]:
    global _PRIMES
    if _PRIMES is None:
        _PRIMES = _small_primes(TRIAL_LIMIT)
    return _PRIMES


def _brent(n: int, budget: int, rng: random.Random) -> tuple[int | None, int]:
    """One Pollard-Brent rho run; returns (factor or None, iterations used)."""
    n = gmpy2.mpz(n)
    y = gmpy2.mpz(rng.randrange(1, n))
    c = gmpy2.mpz(rng.randrange(1, n))
    m = 128
    g = r = q = gmpy2.mpz(1)
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            used += min(m, r - k)
            g = gmpy2.gcd(q, n)
            k += m
            if used >= budget:
                return None, used
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            if g > 1:
                break
    if g == n:
        return None, used
    return int(g), used


def factorize(n: int, budget: int | None = None, seed: int = 0) -> dict[int, int]:
    """Prime factorization of a positive integer.

    Trial division to 10^6, then Pollard-Brent rho with a total iteration
    budget; raises BudgetExhaustedError when the budget runs out.
    """
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    budget = DEFAULT_FACTOR_BUDGET if budget is None else budget
    out: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n == 1:
        return out
    rng = random.Random(seed)
    stack = [n]
    spent = 0
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = None
        while f is None:
            if spent >= budget:
                raise BudgetExhaustedError(f"factorization budget {budget} exhausted on {m}")
            f, used = _brent(m, budget - spent, rng)
            spent += used
        stack += [f, m // f]
    return dict(sorted(out.items()))


# -- Pell and the dual sequence -------------------------------------------------


def pell_solutions(count: int) -> list[tuple[int, int]]:
    """First positive solutions of x^2 = 2y^2 + 1 by the standard recurrence."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    x, y = 3, 2
    for _ in range(count):
        assert x * x == 2 * y * y + 1
        out.append((x, y))
        x, y = 3 * x + 4 * y, 2 * x + 3 * y
    return out


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def non_square_multiple(q: int) -> int:
    """Smallest a = kq with k odd and 2a^2 + 1 not a perfect square."""
    if q < 1 or q % 2 == 0:
        raise ValueError("q must be odd and positive")
    k = 1
    while _is_square(2 * (k * q) ** 2 + 1):
        k += 2
    return k * q


@dataclass
class DualSequence:
    pairs: list[tuple[int, int]] = field(default_factory=list)
    truncated: bool = False
    symbol_table: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def to_json(self) -> dict:
        return {
            "pairs": [{"a": a, "p": p, "2a^2+1": 2 * a * a + 1,
                       "2a^4+4a^2+1": 2 * a**4 + 4 * a * a + 1} for a, p in self.pairs],
            "truncated": self.truncated,
            # symbols[i][j] = ((2a_j^2+1, -1)_{p_i}, (2a_j^4+4a_j^2+1, -1)_{p_i})
            "symbols": [
                [list(self.symbol_table[(i, j)]) for j in range(len(self.pairs))]
                for i in range(len(self.pairs))
            ],
        }


def first_factor(a: int) -> int:
    return 2 * a * a + 1


def second_factor(a: int) -> int:
    return 2 * a**4 + 4 * a * a + 1


def _dual_prime(n: int, budget: int) -> int:
    """A prime p = 3 (mod 4) dividing n to an odd power (n = 3 mod 8)."""
    for p, e in factorize(n, budget).items():
        if p % 4 == 3 and e % 2:
            return p
    raise AssertionError(f"{n} has no prime 3 mod 4 with odd exponent")


def dual_sequence(count: int, factor_budget: int = DEFAULT_FACTOR_BUDGET) -> DualSequence:
    """Pairs (a_i, p_i) with (2a_i^2+1, -1)_{p_i} = -1 and all cross symbols +1.

    On factorization budget exhaustion the sequence built so far is returned
    with truncated = True.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    seq = DualSequence()
    for n in range(count):
        if n == 0:
            a, p = 1, 3
        else:
            prod = 1
            for aj, _ in seq.pairs:
                prod *= first_factor(aj) * second_factor(aj)
            a = non_square_multiple(prod)
            assert first_factor(a) % 8 == 3
            try:
                p = _dual_prime(first_factor(a), factor_budget)
            except BudgetExhaustedError:
                seq.truncated = True
                break
        seq.pairs.append((a, p))
    k = len(seq.pairs)
    for i in range(k):
        p = seq.pairs[i][1]
        for j in range(k):
            aj = seq.pairs[j][0]
            s1 = norm_residue_symbol(first_factor(aj), -1, p)
            s2 = norm_residue_symbol(second_factor(aj), -1, p)
            seq.symbol_table[(i, j)] = (s1, s2)
            assert s2 == 1, "second factor must be a local norm at every dual prime"
            assert s1 == (-1 if i == j else 1), f"dual condition fails at ({i},{j})"
    return seq
