from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from formdefect.covers import (Character, FiniteAbelianGroup, VoltageGraph, Word, betti,
                               character_rank, derive_cover, enumerate_characters,
                               evaluate_character, homology, lift_word, loop_lift_collection,
                               wedge_of_circles)
from formdefect.errors import InvalidCharacterError, LiftError, OpenPathError
from helpers import random_two_tower

c1, c2 = Word(((0, 1),)), Word(((1, 1),))


def test_group_basics():
    G = FiniteAbelianGroup((2, 4))
    assert G.order == 8
    assert [G.index(G.element(i)) for i in range(8)] == list(range(8))
    assert G.add((1, 3), (1, 2)) == (0, 1)
    assert G.generated_by([(1, 0), (0, 1)])
    assert not G.generated_by([(1, 2)])
    assert G.generated_by([(1, 1), (0, 3)])


def test_trivial_cover_is_base():
    W = wedge_of_circles(3)
    c = derive_cover(W, Character(FiniteAbelianGroup((1,)), {}, W))
    assert c.cover.vertex_count == 1 and c.cover.edges == W.edges
    end, w = lift_word(c, c1 * c2, 0)
    assert end == 0 and w.letters == ((0, 1), (1, 1))


def test_wedge_two_circles_klein_cover():
    W = wedge_of_circles(2)
    G = FiniteAbelianGroup((2, 2))
    c = derive_cover(W, Character(G, {0: (1, 0), 1: (0, 1)}, W))
    assert (c.cover.vertex_count, c.cover.edge_count) == (4, 8)
    assert betti(c.cover) == 5
    assert c.cover.euler_characteristic() == 4 * W.euler_characteristic()


@pytest.mark.parametrize("m,d", [(2, 3), (3, 4), (4, 2)])
def test_cyclic_cover_of_wedge(m, d):
    W = wedge_of_circles(m)
    c = derive_cover(W, Character(FiniteAbelianGroup((d,)), {0: (1,)}, W))
    assert (c.cover.vertex_count, c.cover.edge_count) == (d, d * m)
    assert betti(c.cover) == d * (m - 1) + 1


def test_lift_word_cases():
    W = wedge_of_circles(2)
    c = derive_cover(W, Character(FiniteAbelianGroup((2, 2)), {0: (1, 0), 1: (0, 1)}, W))
    for v in range(4):
        end, _ = lift_word(c, Word.commutator(c1, c2), v)
        assert end == v
    C = wedge_of_circles(1)
    c3 = derive_cover(C, Character(FiniteAbelianGroup((3,)), {0: (1,)}, C))
    end, _ = lift_word(c3, c1, 0)
    assert end != 0 and c3.project_vertex(end) == (0, (1,))
    two = VoltageGraph(2, [(0, 1), (1, 0)])
    c2cov = derive_cover(two, Character(FiniteAbelianGroup((2,)), {0: (1,)}, two))
    with pytest.raises(LiftError):
        lift_word(c2cov, Word(((0, 1),), 0), c2cov.vertex(1, (0,)))


def test_invalid_characters():
    W = wedge_of_circles(2)
    with pytest.raises(InvalidCharacterError):
        derive_cover(W, Character(FiniteAbelianGroup((2, 2)), {0: (1, 0)}, W))
    R = wedge_of_circles(1, [3])
    with pytest.raises(InvalidCharacterError):
        derive_cover(R, Character(FiniteAbelianGroup((2,)), {0: (1,)}, R))


def test_relators_lift_to_loops():
    R = wedge_of_circles(2, [4, 2])
    c = derive_cover(R, Character(FiniteAbelianGroup((4, 2)), {0: (1, 0), 1: (0, 1)}, R))
    assert len(c.cover.relators) == 2 * 8
    for w in c.cover.relators:
        assert c.cover.is_loop(w)


def test_loop_lift_collection_examples():
    C = wedge_of_circles(1)
    c4 = derive_cover(C, Character(FiniteAbelianGroup((4,)), {0: (1,)}, C))
    recs = loop_lift_collection(c1, [c4])
    assert [(r.start, r.r) for r in recs] == [(0, 4)]
    assert c4.cover.is_loop(recs[0].lifted_word)
    recs = loop_lift_collection(c1, [])
    assert len(recs) == 1 and recs[0].r == 1 and recs[0].lifted_word == c1


def test_loop_lift_two_level_bookkeeping():
    W = wedge_of_circles(2)
    c0 = derive_cover(W, Character(FiniteAbelianGroup((2,)), {0: (1,)}, W))
    chi1 = Character(FiniteAbelianGroup((3,)), {1: (1,)}, c0.cover)
    c1_ = derive_cover(c0.cover, chi1)
    alpha = c1 * c2
    recs = loop_lift_collection(alpha, [c0, c1_])
    assert sum(r.r for r in recs) == 6
    fibre = set()
    for rec in recs:
        assert c1_.cover.is_loop(rec.lifted_word)
        assert len(rec.lifted_word) == rec.r * len(alpha)
        fibre.add(rec.start)
    assert len(fibre) == len(recs)


def test_evaluate_character():
    W = wedge_of_circles(2)
    G = FiniteAbelianGroup((4,))
    chi = Character(G, {0: (3,), 1: (1,)}, W)
    assert evaluate_character(chi, Word.commutator(c1, c2)) == (0,)
    assert evaluate_character(chi, c1) == (3,)
    two = VoltageGraph(2, [(0, 1), (1, 0)])
    with pytest.raises(OpenPathError):
        evaluate_character(Character(G, {0: (1,)}, two), Word(((0, 1),), 0))
    # alpha^2 lift through a single-edge character
    C = wedge_of_circles(1)
    c2cov = derive_cover(C, Character(FiniteAbelianGroup((2,)), {0: (1,)}, C))
    rec = loop_lift_collection(c1, [c2cov])[0]
    assert rec.r == 2
    top = Character(G, {c2cov.edge(0, (1,)): (1,)}, c2cov.cover)
    assert evaluate_character(top, rec.lifted_word) == (1,)
    top = Character(G, {c2cov.edge(0, (1,)): (3,)}, c2cov.cover)
    assert evaluate_character(top, rec.lifted_word.inverse()) == (1,)


def test_betti_and_character_rank():
    for m in range(1, 5):
        assert betti(wedge_of_circles(m)) == m
    R = wedge_of_circles(1, [4])
    assert homology(R) == (0, [4])
    assert character_rank(R, FiniteAbelianGroup((2,))) == 1
    assert character_rank(wedge_of_circles(1, [3]), FiniteAbelianGroup((2,))) == 0
    with pytest.raises(ValueError):
        character_rank(wedge_of_circles(2, [2, 0]), FiniteAbelianGroup((4,)))


def test_enumerate_characters():
    W = wedge_of_circles(2)
    assert len(list(enumerate_characters(W, FiniteAbelianGroup((1,))))) == 1
    assert len(list(enumerate_characters(W, FiniteAbelianGroup((2,))))) == 4
    R = wedge_of_circles(1, [4])
    assert len(list(enumerate_characters(R, FiniteAbelianGroup((2,))))) == 2
    assert len(list(enumerate_characters(R, FiniteAbelianGroup((3,))))) == 1


def test_enumerate_support_limit_counts():
    # 64-edge graph: wedge of 4 circles covered by (Z_2)^4
    W = wedge_of_circles(4)
    G = FiniteAbelianGroup((2,) * 4)
    c = derive_cover(W, Character(G, {i: G.basis(i) for i in range(4)}, W))
    assert c.cover.edge_count == 64
    chars = list(enumerate_characters(c, FiniteAbelianGroup((4,)), support_limit=1))
    assert len(chars) == 64 * 3 + 1
    assert chars[0].assignment == {}


def test_json_round_trips():
    R = wedge_of_circles(2, [4, 2])
    back = VoltageGraph.from_json(R.to_json())
    assert back.edges == R.edges and [w.letters for w in back.relators] == [w.letters for w in R.relators]
    chi = Character(FiniteAbelianGroup((4, 2)), {0: (1, 0), 1: (0, 1)}, R)
    obj = chi.to_json()
    assert obj == {"orders": [4, 2], "assignment": {"0": [1, 0], "1": [0, 1]}}
    assert Character.from_json(obj) == chi
    w = Word.commutator(c1, c2)
    assert Word.from_json(w.to_json()) == w


@given(st.integers(2, 4), st.integers(1, 2), st.integers(0, 10**6))
def test_rank_formula_and_connectivity(m, height, seed):
    covers = random_two_tower(random.Random(seed), m, height)
    degree = 1
    for c in covers:
        degree *= c.degree
        assert c.cover.is_connected()
    top = covers[-1].cover
    assert top.euler_characteristic() == degree * (1 - m)
    assert character_rank(top, FiniteAbelianGroup((2,))) == degree * (m - 1) + 1
    assert character_rank(top, FiniteAbelianGroup((4, 2))) == degree * (m - 1) + 1


@given(st.integers(0, 10**6))
def test_relator_lifting_property(seed):
    rng = random.Random(seed)
    r1, r2 = rng.choice([2, 4]), rng.choice([2, 4])
    R = wedge_of_circles(2, [r1, r2])
    G = FiniteAbelianGroup((4,))
    chi = Character(G, {0: (rng.randrange(4),), 1: (rng.randrange(4),)}, R)
    kills = chi.kills_relators(R)
    if not chi.is_surjective(R):
        return
    if kills:
        c = derive_cover(R, chi)
        assert all(c.cover.is_loop(w) for w in c.cover.relators)
    else:
        with pytest.raises(InvalidCharacterError):
            derive_cover(R, chi)
