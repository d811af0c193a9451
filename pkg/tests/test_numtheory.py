from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from formdefect.errors import BudgetExhaustedError
from formdefect.numtheory import (dual_sequence, factorize, is_norm_from_Qi, is_prime,
                                  non_square_multiple, norm_certificate, norm_class_equal,
                                  norm_class_representative, norm_residue_symbol,
                                  pell_solutions, squarefree_part, valuation)

ODD_PRIMES = [p for p in range(3, 100) if all(p % q for q in range(2, p))]


def hilbert_bruteforce(a: int, b: int, p: int) -> int:
    """(a, b)_p for odd p by searching z^2 = a x^2 + b y^2 modulo p^3.

    Reducing a, b to valuation 0 or 1 first (squares do not change the symbol),
    a primitive solution mod p^3 lifts by Hensel, so the search decides it.
    """
    def reduce(x):
        while x % (p * p) == 0:
            x //= p * p
        return x
    a, b = reduce(a), reduce(b)
    m = p ** 3
    squares = {}
    for z in range(m):
        squares.setdefault(z * z % m, []).append(z)
    for x in range(m):
        for y in range(m):
            t = (a * x * x + b * y * y) % m
            for z in squares.get(t, ()):
                if x % p or y % p or z % p:
                    return 1
    return -1


def test_valuation_examples():
    assert valuation(18, 3) == 2
    assert valuation(Fraction(3, 4), 2) == -2
    assert valuation(21, 3) == 1
    assert valuation(-7, 5) == 0
    with pytest.raises(ValueError):
        valuation(0, 3)


def test_symbol_examples():
    assert norm_residue_symbol(21, -1, 3) == -1
    assert norm_residue_symbol(21, -1, 7) == -1
    assert norm_residue_symbol(19, -1, 3) == 1
    assert norm_residue_symbol(3, -1, 3) == -1
    assert norm_residue_symbol(5, -1, 5) == 1
    with pytest.raises(ValueError):
        norm_residue_symbol(3, -1, 2)
    with pytest.raises(ValueError):
        norm_residue_symbol(3, -1, 9)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_symbol_against_bruteforce(p):
    for a in (1, 2, 3, -1, p, 2 * p, -p, p * p * 3, 6, 10):
        for b in (-1, 2, p, 3 * p, 5):
            assert norm_residue_symbol(a, b, p) == hilbert_bruteforce(a, b, p), (a, b, p)


nonzero = st.integers(-10**6, 10**6).filter(bool)


@given(nonzero, nonzero, nonzero, st.sampled_from(ODD_PRIMES))
def test_symbol_bilinear_and_symmetric(a, b, c, p):
    s = norm_residue_symbol
    assert s(a * b, c, p) == s(a, c, p) * s(b, c, p)
    assert s(a, b, p) == s(b, a, p)
    assert s(a, -a, p) == 1
    assert s(a * 49, c, p) == s(a, c, p)


def test_norm_examples():
    assert is_norm_from_Qi(5)
    assert not is_norm_from_Qi(3)
    assert is_norm_from_Qi(2)
    assert not is_norm_from_Qi(-1)
    assert is_norm_from_Qi(Fraction(9, 2))
    assert norm_class_representative(Fraction(-63, 5)) == -7
    assert norm_class_representative(21) == 21
    assert squarefree_part(Fraction(-18, 5)) == -10


def test_norm_class_equal_examples():
    assert norm_class_equal(21, 21 * 25)
    assert not norm_class_equal(21, 19)
    assert norm_class_equal(3, 27)
    assert norm_class_equal(Fraction(1, 3), 3)
    assert not norm_class_equal(1, -1)


def test_norm_verdict_matches_local_symbols():
    # x > 0 is a norm from Q(i) iff (x, -1)_p = +1 at every odd p <= 100 dividing x
    rng = random.Random(7)
    for _ in range(1000):
        x = 1
        for _ in range(rng.randint(0, 4)):
            x *= rng.choice(ODD_PRIMES + [2])
        x *= rng.choice([1, 1, -1])
        local = x > 0 and all(norm_residue_symbol(x, -1, p) == 1 for p in ODD_PRIMES)
        assert is_norm_from_Qi(x) == local
        cert = norm_certificate(x)
        assert cert.is_norm == local


def test_pell_matches_exhaustive_search():
    brute = [(math.isqrt(2 * y * y + 1), y) for y in range(1, 10**4 + 1)
             if math.isqrt(2 * y * y + 1) ** 2 == 2 * y * y + 1]
    listed = [s for s in pell_solutions(10) if s[1] <= 10**4]
    assert listed == brute
    assert brute[:3] == [(3, 2), (17, 12), (99, 70)]


def test_non_square_multiple():
    assert non_square_multiple(1) == 1
    assert non_square_multiple(3) == 3
    assert non_square_multiple(57) == 57
    with pytest.raises(ValueError):
        non_square_multiple(4)
    # every Pell y is even, so odd multiples never hit a square
    assert all(y % 2 == 0 for _, y in pell_solutions(30))


def test_factorize():
    assert factorize(1) == {}
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    big = (10**12 + 39) * (10**12 + 61)
    assert is_prime(10**12 + 39) and is_prime(10**12 + 61)
    assert factorize(big) == {10**12 + 39: 1, 10**12 + 61: 1}
    with pytest.raises(BudgetExhaustedError):
        factorize(big, budget=10)


def test_dual_sequence_small():
    seq = dual_sequence(1)
    assert seq.pairs == [(1, 3)] and not seq.truncated
    seq = dual_sequence(2)
    (a1, p1), (a2, p2) = seq.pairs
    assert (a2, p2) == (21, 883)
    assert norm_residue_symbol(2 * a2 * a2 + 1, -1, p2) == -1
    assert norm_residue_symbol(2 * a1 * a1 + 1, -1, p2) == 1
    assert norm_residue_symbol(2 * a2 * a2 + 1, -1, p1) == 1
    assert norm_residue_symbol(2 * a2**4 + 4 * a2**2 + 1, -1, p1) == 1
    assert seq.to_json()["symbols"][1][1] == [-1, 1]


def test_dual_sequence_truncation_is_reported():
    seq = dual_sequence(3, factor_budget=1)
    assert seq.truncated
    assert len(seq.pairs) == 2
