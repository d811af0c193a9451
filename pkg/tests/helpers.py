"""Random generators shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from formdefect.covers import Character, FiniteAbelianGroup, derive_cover, wedge_of_circles
from formdefect.seifert import SeifertMatrix


def random_seifert(rng: random.Random, g: int) -> SeifertMatrix:
    """Symmetric part plus the standard half-symplectic block, then a unimodular congruence."""
    n = 2 * g
    S = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            S[i][j] = S[j][i] = rng.randint(-3, 3)
    for i in range(g):
        S[i][g + i] += 1
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        for k in range(n):
            P[k][j] += c * P[k][i]
    A = [[sum(P[k][i] * S[k][l] * P[l][j] for k in range(n) for l in range(n))
          for j in range(n)] for i in range(n)]
    return SeifertMatrix(A)


TWO_GROUPS = [(2,), (4,), (2, 2), (4, 2)]


def random_two_tower(rng: random.Random, m: int, height: int):
    """Random tower over the wedge of m circles with 2-group decks; returns the covers."""
    g = wedge_of_circles(m)
    covers = []
    for _ in range(height):
        G = FiniteAbelianGroup(rng.choice(TWO_GROUPS))
        while True:
            support = rng.sample(range(g.edge_count), min(g.edge_count, G.rank + 1))
            assign = {e: tuple(rng.randrange(o) for o in G.orders) for e in support}
            chi = Character(G, assign, g)
            if chi.is_surjective(g):
                break
        c = derive_cover(g, chi)
        covers.append(c)
        g = c.cover
    return covers
