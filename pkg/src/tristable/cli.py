"""Command-line entry point.

Subcommands: gen, stab, amsm, asa, exact, reduce, bench, verify.  Reports
go to stdout as a human table by default, or as structured records with
``--format json|csv``.  Exit codes: 0 success, 2 validation failure (and
failed verifications), 3 size-limit refusal.

Identical argv produces byte-identical structured output; wall-clock
timings are only added behind the opt-in ``--timings`` flag.
"""

from __future__ import annotations

import argparse
import json
import csv
import math
import os
import sys
import time

from . import exact, generators, reductions
from .approx import (
    amsm_detailed,
    amsm_instability_bound,
    asa_detailed,
    asa_instability_bound,
)
from .core import (
    DmInstance,
    GsmInstance,
    PsaInstance,
    _instance_text,
    dm_uncovered_count,
    read_instance,
    read_solution,
    write_instance,
    write_solution,
)
from .errors import InstanceTooLarge, TristableError, ValidationError
from .stability import stability_report_gsm, stability_report_psa

RECORD_FIELDS = ("family", "n", "seed", "algorithm", "stab", "ins", "bound",
                 "runtimeMs")

GEN_FAMILIES = ("gadget2", "adversarial", "random", "random-psa", "planted-dm")


def _worker_cap() -> int:
    """Honor TRISTABLE_THREADS; all current algorithms are sequential, so
    the cap only needs to be validated, not distributed."""
    raw = os.environ.get("TRISTABLE_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"TRISTABLE_THREADS={raw!r} is not an integer")
    if cap < 1:
        raise ValidationError(f"TRISTABLE_THREADS must be positive, got {cap}")
    return cap


def _emit(records: list[dict], fmt: str, timings: bool) -> None:
    fields = RECORD_FIELDS if timings else RECORD_FIELDS[:-1]
    rows = [{k: r.get(k) for k in fields} for r in records]
    if fmt == "json":
        json.dump(rows, sys.stdout, indent=1)
        sys.stdout.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(sys.stdout, fieldnames=fields)
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
    else:
        widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) if rows
                  else len(k) for k in fields}
        print("  ".join(k.ljust(widths[k]) for k in fields).rstrip())
        for r in rows:
            print("  ".join(str(r[k]).ljust(widths[k]) for k in fields).rstrip())


def _make_instance(family: str, n: int | None, seed: int | None,
                   extra_edges: int):
    if family == "gadget2":
        return generators.gen_gadget2()
    if family == "adversarial":
        if n is None:
            raise ValidationError("--n is required for the adversarial family")
        return generators.gen_adversarial(n)
    if family == "random":
        if n is None or seed is None:
            raise ValidationError("--n and --seed are required for random")
        return generators.gen_random(n, seed)
    if family == "random-psa":
        if n is None or seed is None:
            raise ValidationError("--n and --seed are required for random-psa")
        return generators.gen_random_psa(3 * n, seed)
    if family == "planted-dm":
        if n is None or seed is None:
            raise ValidationError("--n and --seed are required for planted-dm")
        dm, _ = generators.gen_planted_dm(n, seed, extra_edges=extra_edges)
        return dm
    raise ValidationError(f"unknown family {family!r}")


def _load_or_make(args):
    """Instance plus (family, n, seed) provenance for the report record."""
    if getattr(args, "instance", None):
        inst = read_instance(args.instance)
        if isinstance(inst, GsmInstance):
            n = inst.n
        elif isinstance(inst, PsaInstance):
            n = inst.num_players // 3
        elif isinstance(inst, DmInstance):
            n = inst.m
        else:
            n = None
        return inst, os.path.basename(args.instance), n, None
    if args.family is None:
        raise ValidationError("give an instance file or --family")
    inst = _make_instance(args.family, args.n, args.seed, 2)
    return inst, args.family, args.n, args.seed


def _timed(fn, timings: bool):
    start = time.perf_counter()
    out = fn()
    ms = round((time.perf_counter() - start) * 1000.0, 3)
    return out, (ms if timings else None)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_gen(args) -> int:
    if args.list:
        for fam in GEN_FAMILIES:
            print(fam)
        return 0
    if args.family is None:
        raise ValidationError("gen needs a family (or --list)")
    inst = _make_instance(args.family, args.n, args.seed, args.extra_edges)
    if args.output:
        write_instance(args.output, inst)
    else:
        sys.stdout.write(_instance_text(inst))
    return 0


def _cmd_stab(args) -> int:
    inst, family, n, seed = _load_or_make(args)
    solution = read_solution(args.solution)
    if isinstance(inst, GsmInstance):
        report = stability_report_gsm(inst, solution)
    elif isinstance(inst, PsaInstance):
        report = stability_report_psa(inst, solution)
    else:
        raise ValidationError("stab expects a 3GSM or 3PSA instance")
    _emit([{"family": family, "n": n, "seed": seed, "algorithm": "stab",
            "stab": report.stab, "ins": report.ins, "bound": None}],
          args.format, False)
    return 0


def _cmd_amsm(args) -> int:
    inst, family, n, seed = _load_or_make(args)
    if not isinstance(inst, GsmInstance):
        raise ValidationError("amsm expects a 3GSM instance")
    result, ms = _timed(lambda: amsm_detailed(inst), args.timings)
    if args.output:
        write_solution(args.output, result.solution)
    _emit([{"family": family, "n": n, "seed": seed, "algorithm": "amsm",
            "stab": result.report.stab, "ins": result.report.ins,
            "bound": float(amsm_instability_bound(inst.n)),
            "runtimeMs": ms}], args.format, args.timings)
    return 0


def _cmd_asa(args) -> int:
    inst, family, n, seed = _load_or_make(args)
    if not isinstance(inst, PsaInstance):
        raise ValidationError("asa expects a 3PSA instance")
    result, ms = _timed(lambda: asa_detailed(inst), args.timings)
    if args.output:
        write_solution(args.output, result.solution)
    _emit([{"family": family, "n": n, "seed": seed, "algorithm": "asa",
            "stab": result.report.stab, "ins": result.report.ins,
            "bound": asa_instability_bound(inst.num_players // 3),
            "runtimeMs": ms}], args.format, args.timings)
    return 0


def _cmd_exact(args) -> int:
    inst, family, n, seed = _load_or_make(args)
    algorithm = f"exact-{args.mode}"

    def run():
        if isinstance(inst, GsmInstance):
            if args.mode == "msm":
                marriage, stab = exact.msm_opt(
                    inst, **({"n_limit": args.limit} if args.limit else {}))
                return marriage, stab, inst.n ** 3 - stab
            sub, size = exact.mss_opt(
                inst, **({"n_limit": args.limit} if args.limit else {}))
            return sub, size ** 3, 0  # size^3 triple universe, all stable
        if isinstance(inst, PsaInstance):
            sol, value = exact.psa_opt(inst, mode=args.mode, limit=args.limit)
            if args.mode == "msm":
                universe = math.comb(inst.num_players, 3)
                return sol, value, universe - value
            return sol, value, 0
        if isinstance(inst, DmInstance):
            matching, size = exact.max_3dm(inst)
            return matching, size, dm_uncovered_count(inst, matching)
        raise ValidationError("exact cannot handle this instance kind")

    (solution, stab, ins), ms = _timed(run, args.timings)
    if args.output:
        write_solution(args.output, solution)
    _emit([{"family": family, "n": n, "seed": seed, "algorithm": algorithm,
            "stab": stab, "ins": ins, "bound": None, "runtimeMs": ms}],
          args.format, args.timings)
    return 0


def _cmd_reduce(args) -> int:
    if args.step == "sat3dm":
        formula = read_instance(args.input)
        if not isinstance(formula, reductions.SatBFormula):
            raise ValidationError("sat3dm expects a 3SATB formula file")
        dm, layout = reductions.sat_to_3dm3(formula)
        write_instance(args.output, dm)
        if args.layout:
            with open(args.layout, "w") as fh:
                json.dump(reductions.layout_document(layout), fh, indent=1)
                fh.write("\n")
        print(f"3DM-3 instance with m={dm.m}, {len(dm.edges)} edges "
              f"-> {args.output}")
        return 0
    if args.step == "embed":
        dm = read_instance(args.input)
        if not isinstance(dm, DmInstance):
            raise ValidationError("embed expects a 3DM instance file")
        if dm.m > 50:
            # the embedded instance stores 3*(6m) rows of (6m)^2 entries
            raise InstanceTooLarge(
                f"m={dm.m} would embed into an instance with n={6 * dm.m}; "
                f"the limit is m=50")
        gsm, _ = generators.embed_3dm(dm)
        write_instance(args.output, gsm)
        print(f"3GSM instance with n={gsm.n} -> {args.output}")
        return 0
    if args.step == "lift":
        gsm = read_instance(args.input)
        if not isinstance(gsm, GsmInstance):
            raise ValidationError("lift expects a 3GSM instance file")
        psa = generators.lift_gsm_to_psa(gsm)
        write_instance(args.output, psa)
        print(f"3PSA instance with {psa.num_players} players -> {args.output}")
        return 0
    if args.step == "decode":
        if not args.layout:
            raise ValidationError("decode needs --layout")
        with open(args.layout) as fh:
            dm, layout = reductions.layout_from_document(json.load(fh))
        matching = read_solution(args.input)
        assignment = reductions.decode_matching_to_assignment(
            layout.formula, layout, matching)
        print(" ".join(f"x{i + 1}={'T' if v else 'F'}"
                       for i, v in enumerate(assignment)))
        return 0
    raise ValidationError(f"unknown reduce step {args.step!r}")


def _cmd_bench(args) -> int:
    records = []
    for n in args.n:
        for seed in range(args.seeds):
            if args.family == "random-psa":
                inst = generators.gen_random_psa(3 * n, seed)
            elif args.family == "random":
                inst = generators.gen_random(n, seed)
            elif args.family == "adversarial":
                inst = generators.gen_adversarial(n)
            else:
                raise ValidationError(
                    f"bench supports random, random-psa, adversarial; "
                    f"got {args.family!r}")
            for algorithm in args.algorithm:
                record = {"family": args.family, "n": n, "seed": seed,
                          "algorithm": algorithm, "bound": None}
                if algorithm == "amsm":
                    if not isinstance(inst, GsmInstance):
                        raise ValidationError("amsm needs a 3GSM family")
                    result, ms = _timed(lambda: amsm_detailed(inst),
                                        args.timings)
                    record.update(stab=result.report.stab,
                                  ins=result.report.ins,
                                  bound=float(amsm_instability_bound(n)),
                                  runtimeMs=ms)
                elif algorithm == "asa":
                    if not isinstance(inst, PsaInstance):
                        raise ValidationError("asa needs the random-psa family")
                    result, ms = _timed(lambda: asa_detailed(inst),
                                        args.timings)
                    record.update(stab=result.report.stab,
                                  ins=result.report.ins,
                                  bound=asa_instability_bound(n),
                                  runtimeMs=ms)
                elif algorithm == "exact-msm":
                    if isinstance(inst, GsmInstance):
                        if n > exact.DEFAULT_MSM_LIMIT and not args.force:
                            raise InstanceTooLarge(
                                f"n={n} exceeds the exact limit "
                                f"{exact.DEFAULT_MSM_LIMIT}; pass --force")
                        (_, stab), ms = _timed(
                            lambda: exact.msm_opt(inst, n_limit=n),
                            args.timings)
                        record.update(stab=stab, ins=n ** 3 - stab,
                                      runtimeMs=ms)
                    else:
                        if 3 * n > exact.DEFAULT_PSA_MSM_LIMIT and not args.force:
                            raise InstanceTooLarge(
                                f"{3 * n} players exceed the exact limit "
                                f"{exact.DEFAULT_PSA_MSM_LIMIT}; pass --force")
                        (_, stab), ms = _timed(
                            lambda: exact.psa_opt(inst, mode="msm",
                                                  limit=3 * n),
                            args.timings)
                        record.update(
                            stab=stab,
                            ins=math.comb(3 * n, 3) - stab,
                            runtimeMs=ms)
                else:
                    raise ValidationError(f"unknown algorithm {algorithm!r}")
                records.append(record)
    _emit(records, args.format, args.timings)
    return 0


def _cmd_verify(args) -> int:
    checks: list[tuple[str, bool]] = []
    if args.family == "gadget2":
        inst = generators.gen_gadget2()
        worst = min(stability_report_gsm(inst, m).ins
                    for m in exact.iter_marriages(inst.n))
        checks.append(("gadget2: every marriage has ins >= 1", worst >= 1))
    elif args.family == "adversarial":
        if args.n is None:
            raise ValidationError("--n is required for adversarial")
        inst = generators.gen_adversarial(args.n)
        floor = -((-args.n ** 3) // 128)
        worst = min(stability_report_gsm(inst, m).ins
                    for m in exact.iter_marriages(inst.n))
        checks.append((f"adversarial n={args.n}: min ins {worst} >= {floor}",
                       worst >= floor))
    elif args.family == "planted":
        if args.n is None:
            raise ValidationError("--n (the 3DM part size) is required")
        seed = args.seed if args.seed is not None else 0
        dm, planted = generators.gen_planted_dm(args.n, seed)
        gsm, emb = generators.embed_3dm(dm)
        marriage = generators.witness_marriage(emb, planted)
        report = stability_report_gsm(gsm, marriage)
        checks.append((f"planted m={args.n} seed={seed}: witness marriage "
                       f"ins = {report.ins}", report.ins == 0))
    else:
        raise ValidationError(f"unknown verify family {args.family!r}")
    ok = True
    for label, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {label}")
        ok = ok and passed
    return 0 if ok else 2


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tristable",
        description="Stable three-party matching toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", nargs="?",
                           help="instance file (or use --family)")
            p.add_argument("--family", choices=GEN_FAMILIES)
            p.add_argument("--n", type=int)
            p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("table", "json", "csv"),
                       default="table")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock runtimeMs in records")

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("family", nargs="?", choices=GEN_FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--extra-edges", type=int, default=2)
    p.add_argument("--list", action="store_true", help="list families")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("stab", help="stability report for a solution")
    common(p)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=_cmd_stab)

    p = sub.add_parser("amsm", help="greedy stable-marriage approximation")
    common(p)
    p.add_argument("-o", "--output", help="write the marriage here")
    p.set_defaults(func=_cmd_amsm)

    p = sub.add_parser("asa", help="greedy stable-assignment approximation")
    common(p)
    p.add_argument("-o", "--output", help="write the matching here")
    p.set_defaults(func=_cmd_asa)

    p = sub.add_parser("exact", help="exact solvers (small instances)")
    common(p)
    p.add_argument("--mode", choices=("msm", "mss"), default="msm")
    p.add_argument("--limit", type=int,
                   help="override the built-in size limit")
    p.add_argument("-o", "--output", help="write the solution here")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("reduce", help="instance transformations")
    p.add_argument("step", choices=("sat3dm", "embed", "lift", "decode"))
    p.add_argument("input", help="input instance or solution file")
    p.add_argument("-o", "--output")
    p.add_argument("--layout", help="layout file (written by sat3dm, "
                                    "read by decode)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("bench", help="run algorithms over seeded corpora")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--algorithm", nargs="+", default=["amsm"],
                   choices=("amsm", "asa", "exact-msm"))
    p.add_argument("--force", action="store_true",
                   help="allow exact solvers past their size limits")
    p.add_argument("--format", choices=("table", "json", "csv"),
                   default="table")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="self-checking property runs")
    p.add_argument("--family", required=True,
                   choices=("gadget2", "adversarial", "planted"))
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _worker_cap()
        return args.func(args)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TristableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
