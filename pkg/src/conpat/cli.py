"""Command-line entry point.

Usage::

    conpat phi --perm 1,4,3,2,5 --profile
    conpat bounds --n 8 --asymptotics
    conpat attain --n 8 --budget-ms 60000
    conpat overlap --k 3 --l 2 --exact
    conpat expect --n 8 --samples 100000 --seed 7
    conpat reproduce --max-n 8

JSON goes to stdout, diagnostics to stderr. Exit status is 0 on success,
2 on a bad flag or violated precondition, 1 on an internal error or when
``reproduce`` disagrees with the reference table.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import Any, Sequence

from conpat import bounds, consecutive, expectation, overlap
from conpat.core import PatternError, RandomSource, format_permutation, parse_permutation

DEFAULT_SEED = 0
JSON_SAFE_INT = 2**53

# n -> (bound, attained, E(X) to two decimals)
EXPECTED_TABLE: dict[int, tuple[int, bool, str]] = {
    3: (4, True, "3.67"),
    4: (6, True, "5.83"),
    5: (9, True, "8.70"),
    6: (13, True, "12.33"),
    7: (18, True, "16.78"),
    8: (24, True, "22.08"),
}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return {"num": _jsonable(obj.numerator), "den": _jsonable(obj.denominator)}
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) >= JSON_SAFE_INT else obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _csv_cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return " ".join(str(_csv_cell(x)) for x in v)
    return v


@dataclass
class Output:
    payload: dict[str, Any]
    rows: list[dict[str, Any]] | None = None
    status: int = 0
    notes: list[str] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(_jsonable(self.payload), indent=2) + "\n"
        rows = self.rows
        if rows is None:
            rows = [{k: v for k, v in self.payload.items() if not isinstance(v, dict)}]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
        return buf.getvalue()


def _round2(value: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 50
        d = Decimal(value.numerator) / Decimal(value.denominator)
        return str(d.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def reproduce_table(
    max_n: int = 8,
    *,
    budget_s: float = 60.0,
    expected: dict[int, tuple[int, bool, str]] | None = None,
    threads: int = 1,
) -> tuple[list[dict[str, Any]], list[str]]:
    """Recompute the small-n table (bound, attainment, exact E(X)).

    Returns the rows and a list of human-readable disagreements with
    ``expected``; rows beyond the reference table are reported unchecked.
    """
    if not 3 <= max_n <= 10:
        raise PatternError("max_n must lie in 3..10")
    expected = EXPECTED_TABLE if expected is None else expected
    rows, diffs = [], []
    for n in range(3, max_n + 1):
        total = bounds.bound_table(n).total
        witness = bounds.search_attaining(n, budget_s)
        ex = expectation.exact_expected_phi(n, threads=threads).value
        row = {
            "n": n,
            "bound": total,
            "attained": witness is not None,
            "witness": format_permutation(witness) if witness else "",
            "expected_phi": _round2(ex),
            "expected_phi_exact": ex,
        }
        rows.append(row)
        if n in expected:
            b, att, e = expected[n]
            for name, want, got in (("bound", b, total), ("attained", att, row["attained"]), ("expected_phi", e, row["expected_phi"])):
                if want != got:
                    diffs.append(f"n={n} {name}: expected {want}, got {got}")
    return rows, diffs


def _perms(args) -> list[tuple[int, ...]]:
    if args.perm is not None:
        return [parse_permutation(args.perm)]
    with open(args.perm_file) as fh:
        return [parse_permutation(line) for line in fh if line.strip()]


def _need_samples(args, minimum: int = 2) -> None:
    if args.samples is None or args.samples < minimum:
        raise PatternError(f"--samples must be >= {minimum}")


def cmd_phi(args) -> Output:
    results, rows = [], []
    for perm in _perms(args):
        prof = consecutive.profile(perm)
        rec: dict[str, Any] = {"n": prof.n, "perm": format_permutation(perm), "phi": prof.phi}
        if args.profile or args.pairs:
            rec["x"] = list(prof.x)
        if args.pairs:
            pc = consecutive.pair_counts(perm, args.kmin)
            rec["kmin"] = args.kmin
            rec["z"] = list(pc.z)
            rec["y"] = list(pc.y)
        if args.patterns:
            rec["patterns"] = {
                str(k): ["".join(map(str, p)) if k < 10 else format_permutation(p) for p in pats]
                for k, pats in consecutive.distinct_patterns(perm).items()
            }
        results.append(rec)
        if args.profile or args.pairs:
            for k in range(1, prof.n + 1):
                row = {"perm": rec["perm"], "k": k, "x": prof.x[k - 1]}
                if args.pairs and k >= args.kmin:
                    row["y"], row["z"] = pc.at(k)
                elif args.pairs:
                    row["y"] = row["z"] = ""
                rows.append(row)
        else:
            rows.append({"perm": rec["perm"], "n": prof.n, "phi": prof.phi})
    payload = results[0] if args.perm is not None else {"results": results}
    return Output(payload, rows)


def cmd_bounds(args) -> Output:
    table = bounds.bound_table(args.n)
    payload: dict[str, Any] = {
        "n": table.n,
        "terms": list(table.terms),
        "total": table.total,
        "crossover": table.crossover,
    }
    if args.asymptotics:
        ap = bounds.asymptotic_params(args.n)
        payload.update(a_n=ap.a_n, k0=ap.k0, lower_bound=ap.lower_bound)
    rows = [{"k": k, "term": t} for k, t in enumerate(table.terms, start=1)]
    return Output(payload, rows)


def cmd_attain(args) -> Output:
    if args.budget_ms < 0:
        raise PatternError("--budget-ms must be >= 0")
    target = bounds.bound_table(args.n).total
    found = bounds.search_attaining(args.n, args.budget_ms / 1000)
    payload = {
        "n": args.n,
        "bound": target,
        "found": found is not None,
        "witness": list(found) if found else None,
        "phi": consecutive.phi(found) if found else None,
    }
    return Output(payload)


def cmd_overlap(args) -> Output:
    if args.samples is not None:
        _need_samples(args, 1)
        st = overlap.mc_overlap_probability(args.k, args.l, args.samples, RandomSource(args.seed))
        payload = {
            "k": st.k,
            "l": st.l,
            "mode": st.mode,
            "hits": st.numerator,
            "samples": st.samples,
            "seed": args.seed,
            "estimate": st.estimate,
            "stderr": st.stderr,
        }
    else:
        st = overlap.exact_overlap_probability(args.k, args.l, threads=args.threads)
        payload = {
            "k": st.k,
            "l": st.l,
            "mode": st.mode,
            "numerator": st.numerator,
            "denominator": st.denominator,
            "probability": st.probability,
            "probability_float": float(st.probability),
        }
    lemma = overlap.lemma_bound(args.k, args.l)
    payload["lemma"], payload["bound"] = lemma
    return Output(payload)


def cmd_good(args) -> Output:
    gs = overlap.enumerate_good(args.k, args.l, threads=args.threads)
    pats = ["".join(map(str, p)) if args.k < 10 else format_permutation(p) for p in gs.patterns()]
    payload = {
        "k": gs.k,
        "l": gs.l,
        "count": gs.count,
        "members": pats,
        "codes": sorted(gs.members),
        "witnesses": [gs.witnesses[c] for c in sorted(gs.members)],
    }
    rows = [{"pattern": p, "code": c, "witnesses": gs.witnesses[c]} for p, c in zip(pats, sorted(gs.members))]
    return Output(payload, rows)


def cmd_probe(args) -> Output:
    kmin = args.kmin if args.kmin is not None else args.d + 1
    table = overlap.good_count_probe(args.d, range(kmin, args.kmax + 1))
    payload = {
        "d": table.d,
        "k": list(table.ks),
        "G": list(table.counts),
        "differences": [list(d) for d in table.differences],
        "next_difference_vanishes": table.vanishes,
        "omitted": list(table.omitted),
    }
    rows = [{"k": k, "l": k - table.d, "G": g} for k, g in zip(table.ks, table.counts)]
    return Output(payload, rows)


def cmd_bounddecomp(args) -> Output:
    bd = overlap.bound_breakdown(args.n, args.k)
    payload = {
        "n": bd.n,
        "k": bd.k,
        "term_disjoint": bd.term_disjoint,
        "term_full_overlap": bd.term_full_overlap,
        "term_small_overlap": bd.term_small_overlap,
        "term_large_overlap": bd.term_large_overlap,
        "z_bound": bd.z_bound,
        "y_bound": bd.y_bound,
        "large_overlap_terms": [{"l": l, "value": v, "pow096": c, "within": v <= c} for l, v, c in bd.large_overlap_terms],
    }
    return Output(payload)


def cmd_expect(args) -> Output:
    if args.exact:
        res = expectation.exact_expected_phi(args.n, threads=args.threads, cap=args.exact_cap)
        payload: dict[str, Any] = {"n": res.n, "mode": res.mode, "value": res.value, "value_float": float(res.value)}
        per = res.per_length
    else:
        _need_samples(args)
        res = expectation.mc_expected_phi(
            args.n, args.samples, RandomSource(args.seed), threads=args.threads, per_length=args.per_length
        )
        payload = {
            "n": res.n,
            "mode": res.mode,
            "mean": res.mean,
            "stderr": res.stderr,
            "samples": res.samples,
            "seed": res.seed,
        }
        per = res.per_length
    payload["bound"] = bounds.bound_table(args.n).total
    rows = None
    if args.per_length and per is not None:
        payload["per_length"] = list(per)
        rows = [{"k": k, "expected_x": v} for k, v in enumerate(per, start=1)]
    return Output(payload, rows)


def cmd_zexpect(args) -> Output:
    _need_samples(args)
    pe = expectation.expected_pair_counts(args.n, args.kmin, args.samples, RandomSource(args.seed), threads=args.threads)
    payload = {
        "n": pe.n,
        "kmin": pe.k_min,
        "samples": pe.samples,
        "seed": pe.seed,
        "k": list(pe.lengths),
        "mean_z": list(pe.mean_z),
        "stderr_z": list(pe.stderr_z),
        "mean_y": list(pe.mean_y),
        "stderr_y": list(pe.stderr_y),
        "violations": list(pe.violations),
    }
    rows = [
        {"k": k, "mean_z": z, "stderr_z": sz, "mean_y": y, "stderr_y": sy, "violations": v}
        for k, z, sz, y, sy, v in zip(pe.lengths, pe.mean_z, pe.stderr_z, pe.mean_y, pe.stderr_y, pe.violations)
    ]
    return Output(payload, rows)


def cmd_psi(args) -> Output:
    results = []
    for perm in _perms(args):
        results.append({"n": len(perm), "perm": format_permutation(perm), "psi": expectation.psi(perm), "phi": consecutive.phi(perm)})
    payload = results[0] if args.perm is not None else {"results": results}
    return Output(payload, results)


def cmd_psi_expect(args) -> Output:
    if args.exact:
        res = expectation.exact_expected_psi(args.n)
        payload: dict[str, Any] = {"n": res.n, "mode": res.mode, "value": res.value, "value_float": float(res.value)}
    else:
        _need_samples(args)
        res = expectation.mc_expected_psi(args.n, args.samples, RandomSource(args.seed), threads=args.threads)
        payload = {"n": res.n, "mode": res.mode, "mean": res.mean, "stderr": res.stderr, "samples": res.samples, "seed": res.seed}
    payload["ratio_to_2n"] = res.ratio_to_2n
    return Output(payload)


def cmd_reproduce(args) -> Output:
    rows, diffs = reproduce_table(args.max_n, budget_s=args.budget_ms / 1000, threads=args.threads)
    payload = {"rows": rows, "agrees": not diffs, "diff": diffs}
    csv_rows = [{k: v for k, v in r.items() if k != "expected_phi_exact"} for r in rows]
    return Output(payload, csv_rows, status=1 if diffs else 0, notes=diffs)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED)

    parser = argparse.ArgumentParser(prog="conpat", description="Distinct consecutive patterns in permutations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def perm_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--perm", help='permutation, e.g. "1,4,3,2,5"')
        g.add_argument("--perm-file", help="file with one permutation per line")

    p = sub.add_parser("phi", parents=[common], help="distinct consecutive patterns of a permutation")
    perm_source(p)
    p.add_argument("--profile", action="store_true", help="per-length distinct counts")
    p.add_argument("--pairs", action="store_true", help="repeat and isomorphic-pair counts")
    p.add_argument("--kmin", type=_positive, default=1)
    p.add_argument("--patterns", action="store_true", help="list the distinct patterns")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("bounds", parents=[common], help="sum of min(n-k+1, k!)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--asymptotics", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("attain", parents=[common], help="search for a permutation reaching the bound")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--budget-ms", type=int, default=60_000)
    p.set_defaults(func=cmd_attain)

    p = sub.add_parser("overlap", parents=[common], help="P(two overlapping windows are order isomorphic)")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--l", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("good", parents=[common], help="l-good patterns of length k")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--l", type=int, required=True)
    p.set_defaults(func=cmd_good)

    p = sub.add_parser("probe", parents=[common], help="G(k, k-d) with finite differences")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--kmax", type=_positive, required=True)
    p.add_argument("--kmin", type=_positive)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("bounddecomp", parents=[common], help="closed-form terms of the overlap bound")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.set_defaults(func=cmd_bounddecomp)

    p = sub.add_parser("expect", parents=[common], help="E(phi), exact or Monte Carlo")
    p.add_argument("--n", type=_positive, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exact", action="store_true")
    g.add_argument("--samples", type=int)
    p.add_argument("--per-length", action="store_true")
    p.add_argument("--exact-cap", type=_positive, default=expectation.EXACT_CAP, help="largest n allowed in exact mode")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("zexpect", parents=[common], help="Monte Carlo E(Z_k) and E(Y_k)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--kmin", type=_positive, default=1)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=cmd_zexpect)

    p = sub.add_parser("psi", parents=[common], help="distinct subsequence patterns of a permutation")
    perm_source(p)
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("psi-expect", parents=[common], help="E(psi), exhaustive or Monte Carlo")
    p.add_argument("--n", type=_positive, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exact", action="store_true")
    g.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_psi_expect)

    p = sub.add_parser("reproduce", parents=[common], help="recompute the small-n reference table")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--budget-ms", type=int, default=60_000, help="attainment search budget per n")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except PatternError as exc:
        print(f"conpat {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"conpat {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    sys.stdout.write(out.render(args.format))
    for note in out.notes:
        print(note, file=sys.stderr)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
