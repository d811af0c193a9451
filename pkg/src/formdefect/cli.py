"""formdefect: Witt-group defects of abelian covers and knot infections.

Exit codes: 0 computed, 1 usage error, 2 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import numtheory, pipeline
from .covers import (Character, FiniteAbelianGroup, VoltageGraph, Word, betti, character_rank,
                     homology, loop_lift_collection)
from .errors import BudgetExhaustedError, FormDefectError, SearchExhaustedError
from .seifert import SeifertMatrix, k_a_matrix, knot_cover_defect
from .witt import HermitianForm, WittClass

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(arg: str):
    """Inline JSON, a path to a JSON file, or '-' for stdin."""
    if arg == "-":
        return json.load(sys.stdin)
    text = arg.strip()
    if text[:1] in "[{":
        return json.loads(text)
    with open(arg) as fh:
        return json.load(fh)


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in lines:
            print(line)


def cmd_witt(args) -> int:
    h = HermitianForm.from_json(_load_json(args.form))
    inv = WittClass.of(h).invariants
    dc = inv.discriminant_class
    _emit(args, inv.to_json(), [
        f"signature      {inv.signature}",
        f"rank mod 2     {inv.rank_mod2}",
        f"discriminant   {inv.discriminant_raw!r}",
        f"class          {dc.representative if dc else 'undecided (d not in 1, 2, 4)'}",
    ])
    return EXIT_OK


def cmd_knot_defect(args) -> int:
    A = SeifertMatrix(_load_json(args.A))
    cls = knot_cover_defect(A, args.r, args.s, args.d)
    rep = pipeline.obstruction_report(cls)
    _emit(args, rep.to_json(), _report_lines(rep))
    return EXIT_OK


def _report_lines(rep: pipeline.ObstructionReport) -> list[str]:
    inv = rep.invariants
    lines = [
        f"verdict        {rep.verdict}",
        f"signature      {inv.signature}",
        f"rank mod 2     {inv.rank_mod2}",
        f"discriminant   {inv.discriminant_raw!r}",
    ]
    if inv.discriminant_class is not None:
        lines.append(f"class          {inv.discriminant_class.representative}")
    for c in rep.certificates:
        for p, s in c.symbols:
            lines.append(f"symbol         ({c.value_x}, -1)_{p} = {s:+d}")
    if rep.cross_check is not None:
        lines.append(f"alexander path {'agrees' if rep.cross_check else 'DISAGREES'}")
    lines += [f"note           {n}" for n in rep.notes]
    return lines


def cmd_bing_double(args) -> int:
    A = k_a_matrix(args.a) if args.seifert is None else SeifertMatrix(_load_json(args.seifert))
    d = 4 if args.d is None else args.d
    s = 1 if args.s is None else args.s
    scen, res = pipeline.bd_scenario(A, args.n, d, s, signature_route=args.signature)
    rep = pipeline.solvability_report(scen)
    payload = rep.to_json()
    payload["character"] = res.character.to_json()
    lines = [f"character      {res.character.assignment} in Z_{scen.d} on X_{scen.height}"]
    lines += _report_lines(rep)
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_lens_seed(args) -> int:
    res = pipeline.lens_seed_scan(args.r1, args.r2, args.a, args.support)
    payload = res.to_json()
    lines = [
        f"scanned pairs  {res.scanned}",
        f"classes        {payload['discriminant_classes']}",
        f"shape test     {'pass' if res.shape_ok else 'FAIL'}",
        f"r values       {sorted(res.r_values)}",
        f"realization    {res.realization['class'] if res.realization else 'none found'}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_dual_primes(args) -> int:
    seq = numtheory.dual_sequence(args.count, args.budget)
    lines = [f"a_{i + 1} = {a}   p_{i + 1} = {p}" for i, (a, p) in enumerate(seq.pairs)]
    if seq.truncated:
        lines.append(f"truncated: factorization budget {args.budget} exhausted")
    _emit(args, seq.to_json(), lines)
    return EXIT_BUDGET if seq.truncated else EXIT_OK


def cmd_distinguish(args) -> int:
    rep = pipeline.homology_cobordism_distinguisher(args.count, args.budget)
    lines = [f"class {c['class']} (a = {c['a']}): symbol at {c['p']} = {c['symbol_at_p']:+d}"
             for c in rep["classes"]]
    for row in rep["distinguished"]:
        lines.append(f"Sigma_{row['i']} vs Sigma_{row['j']} at p = {row['prime']}: "
                     f"{'distinguished' if row['distinguished'] else 'NOT distinguished'}")
    if rep["truncated"]:
        lines.append("truncated: factorization budget exhausted")
    _emit(args, rep, lines)
    return EXIT_BUDGET if rep["truncated"] else EXIT_OK


def cmd_tower(args) -> int:
    layout = _load_json(args.layout)
    base = VoltageGraph.from_json(layout["base"])
    chars = []
    graph = base
    tower = []
    for obj in layout.get("characters", []):
        chi = Character.from_json(obj, graph)
        tower = pipeline.build_tower(base, chars + [chi])
        chars.append(chi)
        graph = tower[-1].cover
    levels = [{"vertices": base.vertex_count, "edges": base.edge_count, "betti": betti(base),
               "homology": list(homology(base))}]
    for c in tower:
        g = c.cover
        levels.append({"deck": c.deck.to_json(), "vertices": g.vertex_count,
                       "edges": g.edge_count, "betti": betti(g), "homology": list(homology(g))})
        if args.rank_group:
            levels[-1]["character_rank"] = character_rank(g, FiniteAbelianGroup(args.rank_group))
    payload = {"levels": levels}
    lines = [f"X_{i}: V={lv['vertices']} E={lv['edges']} b1={lv['betti']}" for i, lv in enumerate(levels)]
    if "alpha" in layout and tower:
        alpha = Word.from_json(layout["alpha"], base.basepoint)
        recs = loop_lift_collection(alpha, tower)
        payload["loop_lifts"] = [{"start": r.start, "r": r.r} for r in recs]
        lines.append(f"loop lifts: {len(recs)} records, r values {sorted({r.r for r in recs})}")
    _emit(args, payload, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="formdefect", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("witt", help="Witt invariants of a hermitian form given as JSON")
    s.add_argument("form", help="inline JSON, file path, or '-'")
    s.set_defaults(func=cmd_witt)

    s = sub.add_parser("knot-defect", help="[lambda_r(A, zeta_d^s)] - [lambda_r(A, 1)]")
    s.add_argument("A", help="Seifert matrix as JSON, e.g. '[[1,1],[0,-1]]'")
    s.add_argument("r", type=int)
    s.add_argument("s", type=int)
    s.add_argument("d", type=int)
    s.set_defaults(func=cmd_knot_defect)

    s = sub.add_parser("bing-double", help="iterated Bing double of K_a")
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--s", type=int, default=None)
    s.add_argument("--seifert", default=None, help="use this Seifert matrix instead of K_a")
    s.add_argument("--signature", action="store_true",
                   help="height-n signature route instead of the height-(n+1) discriminant route")
    s.set_defaults(func=cmd_bing_double)

    s = sub.add_parser("lens-seed", help="bounded character scan over the lens-space seed")
    s.add_argument("--r1", type=int, default=4)
    s.add_argument("--r2", type=int, default=4)
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--support", type=int, default=2)
    s.set_defaults(func=cmd_lens_seed)

    for name, fn, hlp in (("dual-primes", cmd_dual_primes, "dual-prime sequence (a_i, p_i)"),
                          ("distinguish", cmd_distinguish, "pairwise-distinct discriminant classes")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--count", type=int, default=3)
        s.add_argument("--budget", type=int, default=numtheory.DEFAULT_FACTOR_BUDGET)
        s.set_defaults(func=fn)

    s = sub.add_parser("tower", help="build and inspect a tower from JSON")
    s.add_argument("layout", help="JSON with base, characters, optional alpha")
    s.add_argument("--rank-group", type=int, nargs="+", default=None,
                   help="cyclic orders of Gamma for character_rank at each level")
    s.set_defaults(func=cmd_tower)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhaustedError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SearchExhaustedError as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FormDefectError, ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
