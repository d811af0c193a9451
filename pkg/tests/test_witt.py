from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from formdefect.cyclotomic import CyclotomicElement, zeta_power
from formdefect.errors import (ConductorMismatchError, NotHermitianError, SingularFormError,
                               WittUndecidedError)
from formdefect.numtheory import norm_class_equal
from formdefect.seifert import build_lambda_r, k_a_matrix
from formdefect.witt import (HermitianForm, WittClass, discriminant, hyperbolic_reduce,
                             radical_reduce, rank_mod2, rational_signature, realify, signature,
                             witt_add, witt_invariants, witt_negate)

I = zeta_power(4, 1)


def form(d, rows):
    return HermitianForm(d, rows)


def test_hermitian_check():
    with pytest.raises(NotHermitianError):
        form(4, [[1, I], [I, 1]])
    form(4, [[1, I], [-I, 1]])
    with pytest.raises(ValueError):
        form(4, [[1, 2]])


def test_radical_reduce():
    zero = build_lambda_r(k_a_matrix(1), 1, CyclotomicElement.one(4))
    assert zero.dim == 2 and all(not x for row in zero.gram for x in row)
    assert radical_reduce(zero).dim == 0
    ident = form(4, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert radical_reduce(ident) is ident
    # singular with a nontrivial nonsingular part
    h = form(4, [[1, 1, 0], [1, 1, 0], [0, 0, 2]])
    red = radical_reduce(h)
    assert red.dim == 2 and red.is_nonsingular()
    assert radical_reduce(red) is red


def test_lambda2_at_one_reduces_to_symmetrized():
    for a in (1, 2, 3):
        A = k_a_matrix(a)
        red = WittClass.of(build_lambda_r(A, 2, CyclotomicElement.one(4)))
        sym = [[A.entries[i][j] + A.entries[j][i] for j in range(2)] for i in range(2)]
        assert red.invariants.triple() == WittClass.of(form(4, sym)).invariants.triple()


def test_signature_examples():
    assert signature(form(4, [[1]])) == 1
    assert signature(form(4, [[1, 0], [0, -1]])) == 0
    assert signature(form(4, [[-4, 2], [2, -4]])) == -2
    assert signature(HermitianForm.empty(4)) == 0
    with pytest.raises(SingularFormError):
        signature(form(4, [[1, 1], [1, 1]]))
    # close-to-singular entries force precision doubling
    eps = Fraction(1, 10**40)
    assert signature(form(4, [[1, 1], [1, 1 + eps]])) == 2
    assert signature(form(4, [[1, 1], [1, 1 - eps]])) == 0


def test_rank_and_discriminant():
    assert rank_mod2(form(4, [[1]])) == 1
    assert rank_mod2(HermitianForm.empty(4)) == 0
    assert discriminant(HermitianForm.empty(4)) == 1
    assert discriminant(form(4, [[1]])) == -1
    l2 = build_lambda_r(k_a_matrix(1), 2, I)
    assert l2.dim == 4 and l2.is_nonsingular() and rank_mod2(l2) == 0
    l1 = build_lambda_r(k_a_matrix(1), 1, I)
    assert norm_class_equal(discriminant(l1).to_rational(), 3)
    assert norm_class_equal(discriminant(l2).to_rational(), 7)


def test_invariants_examples():
    zero = WittClass.zero(4)
    assert zero.invariants.triple() == (0, 0, 1)
    assert zero.is_zero()
    one = WittClass.of(form(4, [[1]]))
    assert one.invariants.triple() == (1, 1, -1)
    k1 = WittClass.of(build_lambda_r(k_a_matrix(1), 1, I))
    assert k1.invariants.triple() == (0, 0, 3)


def test_witt_group_operations():
    x = WittClass.of(form(4, [[2, I], [-I, 5]]))
    assert (x + witt_negate(x)).is_zero()
    assert (x - x).summands == ()
    assert witt_add(WittClass.zero(4), x) == x
    with pytest.raises(ConductorMismatchError):
        witt_add(x, WittClass.zero(8))


def test_combined_class_21():
    A = k_a_matrix(1)
    mi = zeta_power(4, 3)
    cls = (WittClass.of(build_lambda_r(A, 2, I)) + WittClass.of(build_lambda_r(A, 1, mi))
           - WittClass.of(build_lambda_r(A, 2, CyclotomicElement.one(4))))
    inv = cls.invariants
    assert inv.rank_mod2 == 0
    assert inv.discriminant_class.representative == 21


def test_hyperbolic_reduce_splits_planes():
    h = form(4, [[0, 1], [1, 0]])
    assert hyperbolic_reduce(h).dim == 0
    h2 = form(4, [[0, 1 + I, 0], [1 - I, 3, 0], [0, 0, 7]])
    red = hyperbolic_reduce(h2)
    assert red.dim == 1 and red.gram[0][0] == 7


def test_undecided_for_large_conductor():
    z = zeta_power(8, 1)
    r = z + z.inverse()  # sqrt 2
    # <1> + <-(2 + sqrt2)>: signature 0, rank 0, discriminant not obviously a norm
    cls = WittClass.of(form(8, [[1, 0], [0, -(2 + r)]]))
    assert cls.invariants.signature == 0
    with pytest.raises(WittUndecidedError):
        cls.is_zero()
    other = WittClass.of(form(8, [[1]]))
    assert (cls == other) is False  # rank differs: decided


def test_json_round_trip():
    h = form(4, [[Fraction(1, 2), 1 + I], [1 - I, -3]])
    obj = h.to_json()
    assert obj["gram"][0][1] == ["1/1", "1/1"]
    assert HermitianForm.from_json(obj) == h
    inv = WittClass.of(h).invariants.to_json()
    assert inv["rank_mod2"] == 0 and "discriminant_class" in inv


def test_rational_signature_oracle_small():
    assert rational_signature([[0, 1], [1, 0]]) == (1, 1, 0)
    assert rational_signature([[1, 2], [2, 4]]) == (1, 0, 1)
    assert rational_signature([[-4, 2], [2, -4]]) == (0, 2, 0)


small = st.integers(-4, 4)


@st.composite
def gaussian_hermitian(draw, max_dim=4):
    n = draw(st.integers(1, max_dim))
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = CyclotomicElement(4, [draw(small), 0])
        for j in range(i + 1, n):
            z = CyclotomicElement(4, [draw(small), draw(small)])
            rows[i][j] = z
            rows[j][i] = z.conj()
    return HermitianForm(4, rows)


@given(gaussian_hermitian())
def test_signature_matches_realification(h):
    assume(h.is_nonsingular())
    pos, neg, zero = rational_signature(realify(h))
    assert zero == 0
    assert pos - neg == 2 * signature(h)
    assert signature(h) + signature(h.negate()) == 0


@given(gaussian_hermitian())
def test_discriminant_is_real_and_hyperbolic_invariance(h):
    h = radical_reduce(h)
    hyp = HermitianForm(4, [[0, 1], [1, 0]])
    a = WittClass(4, (h,)) if h.dim else WittClass.zero(4)
    b = WittClass(4, (h.direct_sum(hyp),))
    assert a.invariants.discriminant_raw.is_real()
    assert a.invariants.triple() == b.invariants.triple()
    assert a == b


@given(gaussian_hermitian(3), gaussian_hermitian(3), gaussian_hermitian(3))
def test_equality_is_congruence(x, y, z):
    x, y, z = (radical_reduce(f) for f in (x, y, z))
    X, Y, Z = (WittClass(4, (f,)) for f in (x, y, z))
    # X + Y equals X' + Y with X' = X + hyperbolic plane
    Xp = WittClass(4, (x.direct_sum(HermitianForm(4, [[0, 1], [1, 0]])),))
    assert X == Xp
    assert X + Y == Xp + Y
    inv = (X + Y + Z).invariants
    assert inv.rank_mod2 == (x.dim + y.dim + z.dim) % 2
    assert abs(inv.signature) <= x.dim + y.dim + z.dim
    assert (inv.signature - inv.rank_mod2) % 2 == 0
