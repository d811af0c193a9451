"""Voltage graphs, derived abelian covers, iterated towers, loop lifts.

A 2-complex is modelled as a graph plus relator words (attaching maps of
2-cells).  Characters are edge labellings in a finite abelian group; on a
complex with relators they must send every relator to 0.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from ._linalg import smith_invariants
from .errors import InvalidCharacterError, LiftError, OpenPathError

__all__ = [
    "FiniteAbelianGroup",
    "Word",
    "VoltageGraph",
    "Character",
    "DerivedCover",
    "LoopLiftRecord",
    "wedge_of_circles",
    "derive_cover",
    "lift_word",
    "lift_through_tower",
    "loop_lift_collection",
    "evaluate_character",
    "betti",
    "homology",
    "character_rank",
    "enumerate_characters",
]


# -- groups ---------------------------------------------------------------------


class FiniteAbelianGroup:
    """Direct sum of cyclic groups Z_{n_1} + ... + Z_{n_k}."""

    __slots__ = ("orders", "order", "_radix")

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(n) for n in orders)
        if not orders or any(n < 1 for n in orders):
            raise ValueError("cyclic orders must be a nonempty list of positive integers")
        self.orders = orders
        order = 1
        radix = []
        for n in reversed(orders):
            radix.append(order)
            order *= n
        self.order = order
        self._radix = tuple(reversed(radix))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,))

    @classmethod
    def elementary(cls, p: int, rank: int) -> "FiniteAbelianGroup":
        return cls((p,) * rank)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def __len__(self):
        return self.order

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return "+".join(f"Z{n}" for n in self.orders)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        if len(x) != len(self.orders):
            raise ValueError(f"element {x} has wrong length for {self}")
        return tuple(int(a) % n for a, n in zip(x, self.orders))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    def basis(self, i: int) -> tuple[int, ...]:
        return self.reduce(tuple(1 if j == i else 0 for j in range(self.rank)))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x) -> tuple[int, ...]:
        return tuple(-a % n for a, n in zip(x, self.orders))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return tuple(k * a % n for a, n in zip(x, self.orders))

    def index(self, x) -> int:
        return sum(a * r for a, r in zip(x, self._radix))

    def element(self, idx: int) -> tuple[int, ...]:
        return tuple((idx // r) % n for r, n in zip(self._radix, self.orders))

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.orders))

    def generated_by(self, gens: Iterable[Sequence[int]]) -> bool:
        """True iff the given elements generate the whole group."""
        rows = [list(g) for g in gens]
        k = self.rank
        rows += [[n if j == i else 0 for j in range(k)] for i, n in enumerate(self.orders)]
        inv = smith_invariants(rows, k)
        return len(inv) == k and all(t == 1 for t in inv)

    def to_json(self) -> list[int]:
        return list(self.orders)


# -- words and graphs -----------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Edge path: letters (edge id, +1 or -1) starting at a vertex."""

    letters: tuple[tuple[int, int], ...]
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple((int(e), int(x)) for e, x in self.letters))
        if any(x not in (1, -1) for _, x in self.letters):
            raise ValueError("word exponents must be +1 or -1")

    def __len__(self):
        return len(self.letters)

    def inverse(self, end: int | None = None) -> "Word":
        """Reverse path; its start is the original end (pass it, default: same start)."""
        return Word(tuple((e, -x) for e, x in reversed(self.letters)),
                    self.start if end is None else end)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, self.start)

    def power(self, k: int) -> "Word":
        if k < 0:
            return self.inverse().power(-k)
        return Word(self.letters * k, self.start)

    @staticmethod
    def commutator(x: "Word", y: "Word") -> "Word":
        """(x, y) = x y x^-1 y^-1 for loops based at the same vertex."""
        return x * y * x.inverse() * y.inverse()

    def edge_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e, x in self.letters:
            out[e] = out.get(e, 0) + x
        return {e: c for e, c in out.items() if c}

    def to_json(self) -> list[list[int]]:
        return [[e, x] for e, x in self.letters]

    @classmethod
    def from_json(cls, obj, start: int = 0) -> "Word":
        return cls(tuple((int(e), int(x)) for e, x in obj), start)


class VoltageGraph:
    """Connected finite graph with optional relator words (a presentation 2-complex)."""

    def __init__(self, vertex_count: int, edges: Sequence[tuple[int, int]], basepoint: int = 0,
                 relators: Sequence[Word] = (), check: bool = True):
        self.vertex_count = int(vertex_count)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        self.basepoint = int(basepoint)
        self.relators = tuple(relators)
        if check:
            for u, v in self.edges:
                if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                    raise ValueError(f"edge ({u}, {v}) has an endpoint out of range")
            if not 0 <= self.basepoint < self.vertex_count:
                raise ValueError("basepoint out of range")
            if not self.is_connected():
                raise ValueError("voltage graph must be connected")
            for w in self.relators:
                if self.trace(w) != w.start:
                    raise OpenPathError("relator word is not a closed loop")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def trace(self, w: Word) -> int:
        """End vertex of the path w; raises OpenPathError if letters do not compose."""
        v = w.start
        for e, x in w.letters:
            u, t = self.edges[e]
            if x == 1:
                if u != v:
                    raise OpenPathError(f"letter ({e}, +1) does not start at vertex {v}")
                v = t
            else:
                if t != v:
                    raise OpenPathError(f"letter ({e}, -1) does not start at vertex {v}")
                v = u
        return v

    def is_loop(self, w: Word) -> bool:
        return self.trace(w) == w.start

    def adjacency(self) -> list[list[tuple[int, int, int]]]:
        """Per vertex: (edge, direction, neighbour)."""
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((e, 1, v))
            adj[v].append((e, -1, u))
        return adj

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return False
        return len(self._bfs_tree()[0]) == self.vertex_count

    def _bfs_tree(self) -> tuple[dict[int, tuple[int, int] | None], set[int]]:
        adj = self.adjacency()
        parent: dict[int, tuple[int, int] | None] = {self.basepoint: None}
        tree: set[int] = set()
        queue = deque([self.basepoint])
        while queue:
            x = queue.popleft()
            for e, _, y in adj[x]:
                if y not in parent:
                    parent[y] = (e, x)
                    tree.add(e)
                    queue.append(y)
        return parent, tree

    def spanning_tree(self) -> set[int]:
        return self._bfs_tree()[1]

    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count

    def __repr__(self):
        return (f"VoltageGraph(V={self.vertex_count}, E={self.edge_count}, "
                f"relators={len(self.relators)})")

    def to_json(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "basepoint": self.basepoint,
            "relators": [w.to_json() for w in self.relators],
            "relator_starts": [w.start for w in self.relators],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "VoltageGraph":
        starts = obj.get("relator_starts") or [obj.get("basepoint", 0)] * len(obj.get("relators", []))
        rel = [Word.from_json(w, s) for w, s in zip(obj.get("relators", []), starts)]
        return cls(obj["vertices"], [tuple(e) for e in obj["edges"]], obj.get("basepoint", 0), rel)


def wedge_of_circles(m: int, relator_powers: Sequence[int] | None = None) -> VoltageGraph:
    """One vertex, m loops c_1..c_m (edge ids 0..m-1); optional relators c_i^{k_i}."""
    rel = []
    if relator_powers is not None:
        rel = [Word(((i, 1),) * k) for i, k in enumerate(relator_powers) if k]
    return VoltageGraph(1, [(0, 0)] * m, 0, rel)


def betti(g: VoltageGraph) -> int:
    """First Betti number E - V + 1 of the underlying graph (relators ignored)."""
    return g.edge_count - g.vertex_count + 1


# -- characters -----------------------------------------------------------------


class Character:
    """Edge labelling in a finite abelian group (unlisted edges map to 0)."""

    def __init__(self, target: FiniteAbelianGroup, assignment: Mapping[int, Sequence[int]],
                 graph: VoltageGraph | None = None):
        self.target = target
        self.graph = graph
        reduced = {int(e): target.reduce(x) for e, x in assignment.items()}
        self.assignment = {e: x for e, x in sorted(reduced.items()) if any(x)}

    def value(self, edge: int) -> tuple[int, ...]:
        return self.assignment.get(edge, self.target.zero())

    def on_word(self, w: Word) -> tuple[int, ...]:
        G = self.target
        acc = G.zero()
        for e, x in w.letters:
            v = self.assignment.get(e)
            if v is not None:
                acc = G.add(acc, v if x == 1 else G.neg(v))
        return acc

    def on_counts(self, counts: Mapping[int, int]) -> tuple[int, ...]:
        G = self.target
        acc = G.zero()
        for e, c in counts.items():
            v = self.assignment.get(e)
            if v is not None:
                acc = G.add(acc, G.scale(c, v))
        return acc

    def kills_relators(self, graph: VoltageGraph | None = None) -> bool:
        graph = graph or self.graph
        if graph is None:
            return True
        zero = self.target.zero()
        return all(self.on_word(w) == zero for w in graph.relators)

    def is_surjective(self, graph: VoltageGraph | None = None) -> bool:
        """Image generates the target (images of closed loops at the basepoint).

        The image of pi_1 is generated by the values of the fundamental cycles
        of a spanning tree, which are the edge values when tree edges carry 0;
        in general we evaluate each fundamental cycle.
        """
        graph = graph or self.graph
        if graph is None or graph.vertex_count == 1:
            return self.target.generated_by(self.assignment.values())
        return self.target.generated_by(_cycle_values(graph, self))

    def validate(self, graph: VoltageGraph | None = None, surjective: bool = True) -> None:
        graph = graph or self.graph
        if graph is not None:
            if any(e >= graph.edge_count or e < 0 for e in self.assignment):
                raise InvalidCharacterError("character assigns a value to a nonexistent edge")
            if not self.kills_relators(graph):
                raise InvalidCharacterError("character does not kill every relator")
        if surjective and not self.is_surjective(graph):
            raise InvalidCharacterError(f"character is not surjective onto {self.target}")

    def __eq__(self, other):
        return (isinstance(other, Character) and self.target == other.target
                and self.assignment == other.assignment)

    def __hash__(self):
        return hash((self.target, tuple(self.assignment.items())))

    def __repr__(self):
        return f"Character({self.target}, {self.assignment})"

    def to_json(self) -> dict:
        return {
            "orders": self.target.to_json(),
            "assignment": {str(e): list(x) for e, x in self.assignment.items()},
        }

    @classmethod
    def from_json(cls, obj: Mapping, graph: VoltageGraph | None = None) -> "Character":
        G = FiniteAbelianGroup(obj["orders"])
        return cls(G, {int(e): x for e, x in obj["assignment"].items()}, graph)


def _cycle_values(graph: VoltageGraph, chi: Character) -> list[tuple[int, ...]]:
    """chi on the fundamental cycle of each non-tree edge."""
    G = chi.target
    parent, tree = graph._bfs_tree()
    # potential(v) = chi on the tree path basepoint -> v
    potential = {graph.basepoint: G.zero()}
    order = sorted(parent, key=lambda v: _depth(parent, v))
    for v in order:
        p = parent[v]
        if p is None:
            continue
        e, u = p
        step = chi.value(e)
        if graph.edges[e] == (u, v):
            potential[v] = G.add(potential[u], step)
        else:
            potential[v] = G.add(potential[u], G.neg(step))
    out = []
    for e, (u, v) in enumerate(graph.edges):
        if e in tree:
            continue
        out.append(G.add(G.add(potential[u], chi.value(e)), G.neg(potential[v])))
    return out


def _depth(parent, v) -> int:
    d = 0
    while parent[v] is not None:
        v = parent[v][1]
        d += 1
    return d


def evaluate_character(chi: Character, w: Word, graph: VoltageGraph | None = None) -> tuple[int, ...]:
    """Signed sum of labels along a closed loop."""
    graph = graph or chi.graph
    if graph is not None and not graph.is_loop(w):
        raise OpenPathError("character values are only defined on closed loops")
    return chi.on_word(w)


# -- derived covers ---------------------------------------------------------------


@dataclass
class DerivedCover:
    """Cover of `base` determined by `character`; vertex (u, g) has id u*|G| + index(g)."""

    base: VoltageGraph
    character: Character
    cover: VoltageGraph

    @property
    def deck(self) -> FiniteAbelianGroup:
        return self.character.target

    @property
    def degree(self) -> int:
        return self.deck.order

    def vertex(self, u: int, g: Sequence[int]) -> int:
        return u * self.deck.order + self.deck.index(g)

    def edge(self, e: int, g: Sequence[int]) -> int:
        return e * self.deck.order + self.deck.index(g)

    def project_vertex(self, v: int) -> tuple[int, tuple[int, ...]]:
        n = self.deck.order
        return v // n, self.deck.element(v % n)

    def project_edge(self, e: int) -> tuple[int, tuple[int, ...]]:
        n = self.deck.order
        return e // n, self.deck.element(e % n)

    def fiber(self, u: int) -> list[int]:
        n = self.deck.order
        return list(range(u * n, (u + 1) * n))


def derive_cover(g: VoltageGraph, chi: Character, require_surjective: bool = True) -> DerivedCover:
    chi.validate(g, surjective=require_surjective)
    G = chi.target
    n = G.order
    elements = [G.element(i) for i in range(n)]
    edges = []
    for e, (u, v) in enumerate(g.edges):
        w = chi.value(e)
        for gi in elements:
            edges.append((u * n + G.index(gi), v * n + G.index(G.add(gi, w))))
    cover_graph = VoltageGraph(g.vertex_count * n, edges, g.basepoint * n, (), check=False)
    dc = DerivedCover(g, Character(G, chi.assignment, g), cover_graph)
    relators = []
    for r in g.relators:
        for gi in elements:
            end, lifted = lift_word(dc, r, dc.vertex(r.start, gi))
            if end != lifted.start:
                raise InvalidCharacterError("relator lift is not closed")
            relators.append(lifted)
    cover_graph.relators = tuple(relators)
    if require_surjective:
        assert cover_graph.is_connected(), "derived cover of a surjective character must be connected"
    return dc


def lift_word(c: DerivedCover, w: Word, start: int) -> tuple[int, Word]:
    """Lift the base path w starting at the cover vertex `start`."""
    G = c.deck
    n = G.order
    u, gamma = c.project_vertex(start)
    if u != w.start:
        raise LiftError(f"cover vertex {start} lies over {u}, word starts at {w.start}")
    gi = G.index(gamma)
    letters = []
    chi = c.character
    edges = c.base.edges
    # adding a fixed element to an index is a permutation; cache per edge
    for e, x in w.letters:
        src, tgt = edges[e]
        if x == 1:
            if src != u:
                raise OpenPathError(f"letter ({e}, +1) does not start at base vertex {u}")
            letters.append((e * n + gi, 1))
            gi = G.index(G.add(G.element(gi), chi.value(e)))
            u = tgt
        else:
            if tgt != u:
                raise OpenPathError(f"letter ({e}, -1) does not start at base vertex {u}")
            gi = G.index(G.add(G.element(gi), G.neg(chi.value(e))))
            letters.append((e * n + gi, -1))
            u = src
    return u * n + gi, Word(tuple(letters), start)


def _project_to_levels(tower: Sequence[DerivedCover], v: int) -> list[int]:
    """[v_0, v_1, ..., v_h] with v_h = v in the top cover."""
    chain = [v]
    for c in reversed(tower):
        chain.append(c.project_vertex(chain[-1])[0])
    chain.reverse()
    return chain


def lift_through_tower(tower: Sequence[DerivedCover], w: Word, start: int) -> tuple[int, Word]:
    """Lift a base path through every level, starting at a top-level vertex."""
    if not tower:
        raise ValueError("empty tower")
    chain = _project_to_levels(tower, start)
    if chain[0] != w.start:
        raise LiftError(f"top vertex {start} does not lie over {w.start}")
    cur = w
    end = None
    for level, c in enumerate(tower):
        end, cur = lift_word(c, cur, chain[level + 1])
    return end, cur


@dataclass(frozen=True)
class LoopLiftRecord:
    start: int
    r: int
    lifted_word: Word

    def to_json(self) -> dict:
        return {"start": self.start, "r": self.r, "lifted_word": self.lifted_word.to_json()}


def loop_lift_collection(alpha: Word, tower: Sequence[DerivedCover]) -> list[LoopLiftRecord]:
    """Marking algorithm over the fibre of the base basepoint in the top cover.

    Fibre vertices start white (ascending order).  For a white v, the minimal
    r with the lift of alpha^r at v closed is recorded; the endpoints of the
    lifts of alpha^k, 1 <= k <= r, are marked black.
    """
    if not tower:
        return [LoopLiftRecord(alpha.start, 1, alpha)]
    base = tower[0].base
    if base.trace(alpha) != alpha.start:
        raise OpenPathError("alpha must be a closed loop")
    fibre = [v for v in range(tower[-1].cover.vertex_count)
             if _project_to_levels(tower, v)[0] == alpha.start]
    white = dict.fromkeys(fibre, True)
    records = []
    for v in fibre:
        if not white[v]:
            continue
        cur = v
        letters: list = []
        r = 0
        while True:
            cur, piece = lift_through_tower(tower, alpha, cur)
            letters.extend(piece.letters)
            r += 1
            white[cur] = False
            if cur == v:
                break
        records.append(LoopLiftRecord(v, r, Word(tuple(letters), v)))
    total = 1
    for c in tower:
        total *= c.degree
    assert sum(rec.r for rec in records) == total
    return records


# -- homology and character groups ----------------------------------------------------


def homology(g: VoltageGraph) -> tuple[int, list[int]]:
    """H_1 of the 2-complex as (free rank, torsion invariant factors > 1)."""
    tree = g.spanning_tree()
    cyc = [e for e in range(g.edge_count) if e not in tree]
    col = {e: i for i, e in enumerate(cyc)}
    rows = []
    for w in g.relators:
        row = [0] * len(cyc)
        for e, x in w.letters:
            if e in col:
                row[col[e]] += x
        if any(row):
            rows.append(row)
    inv = smith_invariants(rows, len(cyc)) if rows else []
    free = len(cyc) - len(inv)
    return free, [t for t in inv if t > 1]


def character_rank(c: DerivedCover | VoltageGraph, gamma: FiniteAbelianGroup) -> int:
    """The r with Hom(H_1, Gamma) = Gamma^r; raises ValueError if no such r exists."""
    g = c.cover if isinstance(c, DerivedCover) else c
    free, torsion = homology(g)
    size = 1
    for q in gamma.orders:
        size *= q ** free
        for t in torsion:
            size *= _gcd(t, q)
    if gamma.order == 1:
        return free
    r, acc = 0, 1
    while acc < size:
        acc *= gamma.order
        r += 1
    if acc != size:
        raise ValueError(f"|Hom(H_1, {gamma})| = {size} is not a power of |{gamma}|")
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def enumerate_characters(c: DerivedCover | VoltageGraph, gamma: FiniteAbelianGroup,
                         support_limit: int | None = None) -> Iterator[Character]:
    """All relator-killing characters on the cover, in a fixed order.

    Without a support limit, characters are normalized to vanish on a BFS
    spanning tree, so each homomorphism pi_1 -> Gamma appears exactly once.
    With support_limit = k, all labellings supported on at most k edges are
    tried (ascending edge tuples, values in index order).
    """
    g = c.cover if isinstance(c, DerivedCover) else c
    nonzero = [x for x in gamma.elements() if any(x)]
    if support_limit is None:
        tree = g.spanning_tree()
        free_edges = [e for e in range(g.edge_count) if e not in tree]
        for values in itertools.product(list(gamma.elements()), repeat=len(free_edges)):
            chi = Character(gamma, dict(zip(free_edges, values)), g)
            if chi.kills_relators(g):
                yield chi
        return
    # relator sums only change on relators touching the support
    touching: dict[int, dict[int, int]] = {}
    for ri, w in enumerate(g.relators):
        for e, c in w.edge_counts().items():
            touching.setdefault(e, {})[ri] = c
    for k in range(0, support_limit + 1):
        for edges in itertools.combinations(range(g.edge_count), k):
            rels = set()
            for e in edges:
                rels.update(touching.get(e, ()))
            for values in itertools.product(nonzero, repeat=k):
                ok = True
                for ri in rels:
                    acc = gamma.zero()
                    for e, v in zip(edges, values):
                        c = touching.get(e, {}).get(ri)
                        if c:
                            acc = gamma.add(acc, gamma.scale(c, v))
                    if any(acc):
                        ok = False
                        break
                if ok:
                    yield Character(gamma, dict(zip(edges, values)), g)
