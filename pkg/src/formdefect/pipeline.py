"""Infection defects over abelian towers, Bing-double and lens-space
scenarios, obstruction reports.

An infection scenario is a base 2-complex with a tower of characters, a
loop alpha, a knot (Seifert matrix) and a top Z_d character.  Its defect is

    seed + sum_j ([lambda_{r_j}(A, zeta_d^{v_j})] - [lambda_{r_j}(A, 1)])

over the loop-lift records (r_j, v_j) of alpha in the top cover.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import numtheory
from .covers import (Character, DerivedCover, FiniteAbelianGroup, LoopLiftRecord, VoltageGraph,
                     Word, derive_cover, enumerate_characters, loop_lift_collection,
                     wedge_of_circles)
from .cyclotomic import zeta_power
from .errors import (AlexanderZeroError, ConductorMismatchError, SearchExhaustedError,
                     WittUndecidedError)
from .numtheory import SymbolCertificate
from .seifert import SeifertMatrix, alexander, dis_formula, k_a_matrix, knot_cover_defect, lambda_class
from .witt import WittClass, WittInvariants

__all__ = [
    "InfectionScenario",
    "ObstructionReport",
    "build_tower",
    "lift_values",
    "defect_from_values",
    "infection_defect",
    "formula_discriminant",
    "obstruction_report",
    "bing_double_tower",
    "BingDoubleTower",
    "bd_lift_structure_check",
    "bd_slice_obstruction",
    "bd_signature_recovery",
    "lens_seed_scan",
    "homology_cobordism_distinguisher",
    "solvability_report",
    "arf_invariant",
]


def _is_power_of(d: int, p: int) -> bool:
    while d % p == 0 and d > 1:
        d //= p
    return d == 1


def arf_invariant(A: SeifertMatrix) -> int:
    """Arf invariant from Delta(-1) mod 8: 0 for +-1, 1 for +-3."""
    v = alexander(A)(-1)
    assert v.denominator == 1
    r = int(v) % 8
    if r in (1, 7):
        return 0
    if r in (3, 5):
        return 1
    raise ValueError(f"Delta(-1) = {v} is even; not a knot Alexander polynomial")


# -- scenarios ------------------------------------------------------------------


@dataclass
class InfectionScenario:
    base: VoltageGraph
    tower_characters: list[Character]
    alpha: Word
    seifert: SeifertMatrix
    top_character: Character
    d: int
    seed_defect: WittClass | None = None
    seed_note: str = "seed defect assumed zero (trivial-link or lens-space seed)"
    prime: int = 2

    def __post_init__(self):
        if self.seed_defect is None:
            self.seed_defect = WittClass.zero(self.d)
        if self.seed_defect.d != self.d:
            raise ConductorMismatchError("seed defect conductor differs from d")
        if self.top_character.target.orders != (self.d,):
            raise ConductorMismatchError(f"top character must map to Z_{self.d}")

    @property
    def height(self) -> int:
        return len(self.tower_characters)

    @property
    def invariance_claim(self) -> bool:
        """The defect is a homology-cobordism invariant only for prime-power d."""
        return _is_power_of(self.d, self.prime)


def build_tower(base: VoltageGraph, characters: Sequence[Character]) -> list[DerivedCover]:
    tower = []
    g = base
    for chi in characters:
        c = derive_cover(g, chi)
        tower.append(c)
        g = c.cover
    return tower


def lift_values(tower: Sequence[DerivedCover], alpha: Word,
                top: Character) -> list[tuple[int, int]]:
    """(r_j, value_j) for each record of the loop-lift collection (value in Z_d)."""
    records = loop_lift_collection(alpha, tower)
    top_graph = tower[-1].cover if tower else None
    if top_graph is not None:
        top.validate(top_graph, surjective=False)
    return [(rec.r, top.on_word(rec.lifted_word)[0]) for rec in records]


def defect_from_values(A: SeifertMatrix, d: int, values: Iterable[tuple[int, int]],
                       seed: WittClass | None = None) -> WittClass:
    """seed + sum over records of [lambda_r(A, zeta^v)] - [lambda_r(A, 1)].

    Records with v = 0 contribute exactly the zero class and are skipped.
    """
    out = seed if seed is not None else WittClass.zero(d)
    for (r, v), mult in sorted(Counter((r, v % d) for r, v in values).items()):
        if v == 0:
            continue
        term = knot_cover_defect(A, r, v, d)
        for _ in range(mult):
            out = out + term
    return out


def infection_defect(s: InfectionScenario) -> WittClass:
    tower = build_tower(s.base, s.tower_characters)
    values = lift_values(tower, s.alpha, s.top_character)
    return defect_from_values(s.seifert, s.d, values, s.seed_defect)


def formula_discriminant(A: SeifertMatrix, d: int, values: Iterable[tuple[int, int]]) -> Fraction | None:
    """Discriminant of the knot part predicted from Alexander values (d = 4 only).

    Returns None when some record has r > 2 (no closed formula) or d != 4.
    """
    if d != 4:
        return None
    out = Fraction(1)
    one = zeta_power(d, 0)
    for r, v in values:
        v %= d
        if v == 0:
            continue
        if r > 2:
            return None
        num = dis_formula(A, zeta_power(d, v), r)
        den = dis_formula(A, one, r)
        out *= num.to_rational() / den.to_rational()
    return out


# -- reports --------------------------------------------------------------------


@dataclass
class ObstructionReport:
    witt_class: WittClass
    invariants: WittInvariants
    certificates: list[SymbolCertificate]
    verdict: str  # "obstructed" | "unobstructed-at-this-tower"
    values: list[tuple[int, int]] = field(default_factory=list)
    formula_discriminant: Fraction | None = None
    cross_check: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return self.verdict == "obstructed"

    @property
    def discriminant_class(self) -> int | None:
        dc = self.invariants.discriminant_class
        return dc.representative if dc else None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "invariants": self.invariants.to_json(),
            "certificates": [c.to_json() for c in self.certificates],
            "lift_values": [list(v) for v in self.values],
            "formula_discriminant": None if self.formula_discriminant is None
            else str(self.formula_discriminant),
            "cross_check": self.cross_check,
            "notes": list(self.notes),
            "witt_class": self.witt_class.to_json(),
        }


def obstruction_report(cls: WittClass, values: Sequence[tuple[int, int]] = (),
                       A: SeifertMatrix | None = None, notes: Sequence[str] = ()) -> ObstructionReport:
    inv = cls.invariants
    certs: list[SymbolCertificate] = []
    notes = list(notes)
    obstructed = bool(inv.signature or inv.rank_mod2)
    if inv.discriminant_class is not None:
        dc = inv.discriminant_class
        if cls.d == 4:
            rep = dc.representative
            primes = [p for p, _ in numtheory.factorize(abs(rep)).items() if p != 2]
            certs.append(numtheory.norm_certificate(inv.discriminant_raw.to_rational(), primes))
        if not dc.is_trivial:
            obstructed = True
    elif not obstructed:
        try:
            obstructed = not cls.is_zero()
        except WittUndecidedError:
            notes.append("discriminant class undecided for this conductor")
    formula = cross = None
    if A is not None and values:
        try:
            formula = formula_discriminant(A, cls.d, values)
        except AlexanderZeroError:
            formula = None
        if formula is not None and formula != 0:
            cross = numtheory.norm_class_equal(formula, inv.discriminant_raw.to_rational())
    verdict = "obstructed" if obstructed else "unobstructed-at-this-tower"
    return ObstructionReport(cls, inv, certs, verdict, list(values), formula, cross, notes)


# -- Bing doubles -------------------------------------------------------------------


@dataclass
class BingDoubleTower:
    n: int
    base: VoltageGraph
    characters: list[Character]
    covers: list[DerivedCover]
    alpha: Word

    def __iter__(self):
        # unpack as (base, characters, alpha)
        return iter((self.base, self.characters, self.alpha))

    def truncated(self, height: int) -> list[DerivedCover]:
        return self.covers[:height]

    @property
    def degrees(self) -> list[int]:
        return [c.degree for c in self.covers]


def _commutator_word(n: int) -> Word:
    words = [Word(((i, 1),)) for i in range(2 ** n)]
    for _ in range(n):
        words = [Word.commutator(words[2 * i], words[2 * i + 1]) for i in range(len(words) // 2)]
    return words[0]


@lru_cache(maxsize=8)
def bing_double_tower(n: int) -> BingDoubleTower:
    """Wedge of 2^n circles with the iterated commutator and its (Z_2)-tower.

    Level k uses Gamma_k = (Z_2)^(2^(n-k)) sending the designated edge
    c^(k)_i to the i-th basis vector; c^(k+1)_i is the lift of c^(k)_(2i-1)
    at the basepoint.  There are n + 1 levels, ending with Gamma_n = Z_2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = wedge_of_circles(2 ** n)
    designated = list(range(2 ** n))
    graph = base
    characters, covers = [], []
    for k in range(n + 1):
        rank = 2 ** (n - k)
        G = FiniteAbelianGroup((2,) * rank)
        chi = Character(G, {e: G.basis(i) for i, e in enumerate(designated)}, graph)
        c = derive_cover(graph, chi)
        characters.append(chi)
        covers.append(c)
        # lifts at the basepoint fibre element 0 of c^(k)_{2i-1}
        designated = [c.edge(designated[2 * i], G.zero()) for i in range(rank // 2)]
        graph = c.cover
    return BingDoubleTower(n, base, characters, covers, _commutator_word(n))


@dataclass
class LiftStructure:
    character: Character
    records: list[LoopLiftRecord]
    values: list[tuple[int, int]]
    distinguished: tuple[int, ...]  # indices into records
    total_degree: int


def _single_edge_search(tower: Sequence[DerivedCover], alpha: Word, d: int,
                        wanted: list[tuple[int, int]]) -> LiftStructure:
    """First single-edge Z_d character whose nonzero lift values are exactly `wanted`.

    `wanted` is a multiset of (r, value) pairs.
    """
    records = loop_lift_collection(alpha, tower)
    top = tower[-1].cover
    G = FiniteAbelianGroup((d,))
    total = 1
    for c in tower:
        total *= c.degree
    counts = [rec.lifted_word.edge_counts() for rec in records]
    touching: dict[int, list[int]] = {}
    for j, cnt in enumerate(counts):
        for e in cnt:
            touching.setdefault(e, []).append(j)
    target = Counter((r, v % d) for r, v in wanted)
    if not target:
        chi = Character(G, {}, top)
        vals = [(rec.r, 0) for rec in records]
        return LiftStructure(chi, records, vals, (), total)
    for e in range(top.edge_count):
        js = touching.get(e, [])
        for v in range(1, d):
            nz = [(j, records[j].r, v * counts[j][e] % d) for j in js if v * counts[j][e] % d]
            if Counter((r, x) for _, r, x in nz) != target:
                continue
            chi = Character(G, {e: (v,)}, top)
            vals = [(rec.r, chi.on_word(rec.lifted_word)[0]) for rec in records]
            return LiftStructure(chi, records, vals, tuple(j for j, _, _ in nz), total)
    raise SearchExhaustedError(f"no single-edge Z_{d} character yields lift values {sorted(target)}")


def bd_lift_structure_check(n: int, d: int, s: int) -> LiftStructure:
    """Character on X_(n+1) with exactly two nonzero lift values: s at r = 2, -s at r = 1."""
    if not _is_power_of(d, 2):
        raise ValueError("d must be a power of 2")
    t = bing_double_tower(n)
    s %= d
    wanted = [] if s == 0 else [(2, s), (1, -s % d)]
    res = _single_edge_search(t.covers, t.alpha, d, wanted)
    assert sum(r for r, _ in res.values) == res.total_degree
    return res


def bd_scenario(A: SeifertMatrix, n: int, d: int = 4, s: int = 1,
                signature_route: bool = False) -> tuple[InfectionScenario, LiftStructure]:
    t = bing_double_tower(n)
    if signature_route:
        res = _bd_signature_structure(n, d, s)
        chars = t.characters[:n]
    else:
        res = bd_lift_structure_check(n, d, s)
        chars = t.characters
    scen = InfectionScenario(t.base, list(chars), t.alpha, A, res.character, d,
                             seed_note="trivial link seed: defect zero")
    return scen, res


def bd_slice_obstruction(a: int, n: int) -> ObstructionReport:
    A = k_a_matrix(a)
    scen, res = bd_scenario(A, n, 4, 1)
    cls = defect_from_values(A, 4, res.values, scen.seed_defect)
    rep = obstruction_report(cls, res.values, A, [scen.seed_note])
    return rep


def _bd_signature_structure(n: int, d: int, s: int) -> LiftStructure:
    t = bing_double_tower(n)
    s %= d
    wanted = [] if s == 0 else [(1, s), (1, -s % d)]
    return _single_edge_search(t.covers[:n], t.alpha, d, wanted)


def bd_signature_recovery(A: SeifertMatrix, n: int, d: int, s: int) -> int:
    """Signature of the height-n Bing-double defect; equals twice sign lambda_1(A, zeta_d^s)."""
    res = _bd_signature_structure(n, d, s)
    cls = defect_from_values(A, d, res.values)
    sig = cls.invariants.signature
    expected = 2 * lambda_class(A, 1, d, s).invariants.signature
    assert sig == expected, f"signature {sig} != 2 * {expected // 2}"
    return sig


# -- lens-space seed ---------------------------------------------------------------


@dataclass
class LensScanResult:
    a: int
    r1: int
    r2: int
    scanned: int
    classes: dict[tuple, dict]  # lift-value multiset -> summary
    shape_ok: bool
    r_values: set[int]
    realization: dict | None
    cross_check_ok: bool

    def to_json(self) -> dict:
        return {
            "a": self.a, "r1": self.r1, "r2": self.r2,
            "scanned_pairs": self.scanned,
            "distinct_value_patterns": len(self.classes),
            "discriminant_classes": sorted({v["class"] for v in self.classes.values()}),
            "shape_ok": self.shape_ok,
            "r_values": sorted(self.r_values),
            "cross_check_ok": self.cross_check_ok,
            "realization": self.realization,
        }


def shape_exponents(c: int, a: int) -> tuple[int, int] | None:
    """(n1, n2) in {0,1}^2 with c = (2a^2+1)^n1 (2a^4+4a^2+1)^n2 modulo norms."""
    f1 = numtheory.first_factor(a)
    f2 = numtheory.second_factor(a)
    for n1 in (0, 1):
        for n2 in (0, 1):
            if numtheory.norm_class_equal(c, f1 ** n1 * f2 ** n2):
                return n1, n2
    return None


def _dual_primes(a: int) -> list[int]:
    out = set()
    for f in (numtheory.first_factor(a), numtheory.second_factor(a)):
        for p, e in numtheory.factorize(f).items():
            if p % 4 == 3 and e % 2:
                out.add(p)
    return sorted(out)


def lens_seed_scan(r1: int, r2: int, a: int, support_limit: int = 2,
                   d: int = 4) -> LensScanResult:
    """Scan bounded-support characters over the lens-space seed complex."""
    A = k_a_matrix(a)
    base = wedge_of_circles(2, [r1, r2])
    G0 = FiniteAbelianGroup((r1, r2))
    chi0 = Character(G0, {0: (1, 0), 1: (0, 1)}, base)
    c0 = derive_cover(base, chi0)
    alpha = Word.commutator(Word(((0, 1),)), Word(((1, 1),)))
    Z2 = FiniteAbelianGroup((2,))
    Zd = FiniteAbelianGroup((d,))
    primes = _dual_primes(a) if a else []
    classes: dict[tuple, dict] = {}
    realization = None
    scanned = 0
    r_values: set[int] = set()
    shape_ok = True
    cross_ok = True
    for chi1 in enumerate_characters(c0, Z2, support_limit):
        if not chi1.assignment or not chi1.is_surjective(c0.cover):
            continue
        c1 = derive_cover(c0.cover, chi1)
        tower = [c0, c1]
        records = loop_lift_collection(alpha, tower)
        r_values.update(rec.r for rec in records)
        counts = [rec.lifted_word.edge_counts() for rec in records]
        for top in enumerate_characters(c1, Zd, support_limit):
            if not top.assignment:
                continue
            scanned += 1
            vals = tuple(sorted((rec.r, top.on_counts(cnt)[0]) for rec, cnt in zip(records, counts)))
            key = tuple(sorted(v for v in vals if v[1] % d))
            if key not in classes:
                cls = defect_from_values(A, d, key)
                rep = obstruction_report(cls, key, A)
                c = rep.discriminant_class
                shape = shape_exponents(c, a) if a else (0, 0) if c == 1 else None
                certs = [(p, numtheory.norm_residue_symbol(rep.invariants.discriminant_raw.to_rational(), -1, p))
                         for p in primes]
                classes[key] = {
                    "class": c,
                    "signature": rep.invariants.signature,
                    "rank_mod2": rep.invariants.rank_mod2,
                    "shape": shape,
                    "symbols": certs,
                    "example": {"level1": chi1.to_json(), "top": top.to_json()},
                }
                if shape is None:
                    shape_ok = False
                if rep.cross_check is False:
                    cross_ok = False
            if realization is None and a and classes[key]["shape"] == (1, 1):
                realization = dict(classes[key], lift_values=[list(v) for v in key])
    return LensScanResult(a, r1, r2, scanned, classes, shape_ok, r_values, realization, cross_ok)


# -- distinguishing homology cobordism classes ---------------------------------------


def homology_cobordism_distinguisher(count: int, factor_budget: int = numtheory.DEFAULT_FACTOR_BUDGET) -> dict:
    """Certify pairwise distinctness of the classes (2a_i^2+1)(2a_i^4+4a_i^2+1).

    Class i is separated from every class of the shape built from a_j (j != i)
    and from the trivial seed class by the symbol at p_i.
    """
    if count <= 0:
        return {"count": 0, "classes": [], "distinguished": [], "truncated": False}
    seq = numtheory.dual_sequence(count, factor_budget)
    f1, f2 = numtheory.first_factor, numtheory.second_factor
    classes = []
    for a, p in seq.pairs:
        c = f1(a) * f2(a)
        classes.append({"a": a, "p": p, "class": c,
                        "symbol_at_p": numtheory.norm_residue_symbol(c, -1, p)})
    pairs = []
    k = len(seq.pairs)
    for i in range(k):
        p = seq.pairs[i][1]
        own = classes[i]["symbol_at_p"]
        # against the trivial seed class
        pairs.append({"i": i + 1, "j": 0, "prime": p, "own_symbol": own,
                      "generator_symbols": [1], "distinguished": own == -1})
        for j in range(k):
            if j == i:
                continue
            aj = seq.pairs[j][0]
            gens = [numtheory.norm_residue_symbol(f1(aj), -1, p),
                    numtheory.norm_residue_symbol(f2(aj), -1, p)]
            pairs.append({"i": i + 1, "j": j + 1, "prime": p, "own_symbol": own,
                          "generator_symbols": gens,
                          "distinguished": own == -1 and all(g == 1 for g in gens)})
    return {"count": k, "classes": classes, "distinguished": pairs, "truncated": seq.truncated}


# -- solvability -------------------------------------------------------------------


def solvability_report(s: InfectionScenario, n_claim: int | None = None) -> ObstructionReport:
    """Obstruction report with solvability annotations.

    A nonvanishing defect on a tower of height k obstructs (k+1)-solvability.
    """
    tower = build_tower(s.base, s.tower_characters)
    values = lift_values(tower, s.alpha, s.top_character)
    cls = defect_from_values(s.seifert, s.d, values, s.seed_defect)
    notes = [s.seed_note]
    if not s.invariance_claim:
        notes.append(f"d = {s.d} is not a power of {s.prime}: no invariance claim")
    rep = obstruction_report(cls, values, s.seifert, notes)
    k = s.height
    if rep.obstructed:
        rep.notes.append(f"not {k + 1}-solvable")
        if n_claim is not None and n_claim >= k + 1:
            rep.notes.append(f"contradicts claimed {n_claim}-solvability")
    rep.notes.append(f"Arf(K) = {arf_invariant(s.seifert)} (from Delta(-1) mod 8; metadata only)")
    return rep
