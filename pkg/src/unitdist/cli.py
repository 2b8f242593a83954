"""Command line entry point: ``unitdist <command> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .embed import EmbedConfig, Refuted, outcome_record, solve
from .enumeration import EnumConfig, LevelStore, load_family, save_family, write_level
from .graphcore import emit_graph6, parse_graph6
from .pipeline import default_catalog, default_family, derive_forbidden, load_verdicts, report_lines, reproduce_counts, write_report
from .tuud import is_reducible, load_catalog

EXIT_OK, EXIT_ERROR, EXIT_DIVERGED = 0, 1, 2


def _family(args):
    return load_family(args.forbidden) if args.forbidden else default_family()


def _enum_config(args) -> EnumConfig:
    return EnumConfig(prune=not args.no_prune, jobs=args.jobs, checkpoint=args.checkpoint)


def _embed_config(args) -> EmbedConfig:
    kw = {"rng_seed": args.seed}
    if getattr(args, "retries", None) is not None:
        kw["max_retries"] = args.retries
    if getattr(args, "tol", None) is not None:
        kw.update(eps_rank=args.tol, eps_mod=args.tol, eps_res=args.tol)
    return EmbedConfig(**kw)


def _write_codes(codes, out: str | None) -> None:
    text = "".join(c + "\n" for c in codes)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    level = LevelStore(_family(args), _enum_config(args)).get(args.n, args.m)
    if args.out_dir:
        write_level(args.out_dir, level)
    _write_codes(level.codes, args.out)
    print(f"n={args.n} m={args.m}: {len(level)} graphs", file=sys.stderr)
    return EXIT_OK


def cmd_maxdensity(args) -> int:
    u, level = LevelStore(_family(args), _enum_config(args)).max_density(args.n)
    _write_codes(level.codes, args.out)
    print(f"n={args.n}: max edges {u}, {len(level)} graphs", file=sys.stderr)
    return EXIT_OK


def cmd_tuud_filter(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    survivors, rejects = [], []
    for line in Path(args.input).read_text().split():
        hit = is_reducible(parse_graph6(line), catalog)
        if hit is None:
            survivors.append(line)
        else:
            rejects.append({"graph6": line, "entry": hit.entry_index, "embedding": list(hit.embedding)})
    _write_codes(survivors, args.out)
    if args.report:
        Path(args.report).write_text("".join(json.dumps(r) + "\n" for r in rejects))
    print(f"{len(survivors)} survivors, {len(rejects)} rejected", file=sys.stderr)
    return EXIT_OK


def cmd_embed(args) -> int:
    g = parse_graph6(args.graph)
    config = _embed_config(args)
    outcome = solve(g, config)
    record = outcome_record(g, outcome)
    status = EXIT_OK
    if args.paranoid and isinstance(outcome, Refuted):
        strict = dataclasses.replace(config, eps_rank=1e-12, eps_mod=1e-12, eps_res=1e-12)
        second = solve(g, strict)
        record["paranoid"] = {"outcome": second.tag, "agrees": second.tag == outcome.tag}
        if second.tag != outcome.tag:
            status = EXIT_DIVERGED
    text = json.dumps(record, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    print(outcome.tag, file=sys.stderr)
    return status


def cmd_reproduce(args) -> int:
    catalog = load_catalog(args.tuud_catalog) if args.tuud_catalog else default_catalog()
    decisions: list = []
    report = reproduce_counts(args.max_n, _family(args), catalog, _embed_config(args), _enum_config(args),
                              decisions=decisions)
    for line in report_lines(report):
        print(line)
    if args.report:
        write_report(report, args.report)
    if args.decisions:
        Path(args.decisions).write_text("".join(json.dumps(d) + "\n" for d in decisions))
    if not report.complete:
        return EXIT_ERROR
    return EXIT_OK if report.all_match else EXIT_DIVERGED


def cmd_derive_forbidden(args) -> int:
    verdicts = load_verdicts(args.verdicts) if args.verdicts else load_verdicts()
    derived = derive_forbidden(args.max_vertices, _embed_config(args), verdicts=verdicts)
    if args.out:
        save_family(derived.family, args.out, header=f"minimal forbidden graphs on at most {args.max_vertices} vertices")
    else:
        _write_codes([emit_graph6(g) for g in derived.family.members], None)
    by_size: dict[int, int] = {}
    for g in derived.family.members:
        by_size[g.n] = by_size.get(g.n, 0) + 1
    print(f"{len(derived.family)} minimal graphs by vertex count: {dict(sorted(by_size.items()))}", file=sys.stderr)
    for code in derived.flagged:
        print(f"undecided: {code}", file=sys.stderr)
    return EXIT_DIVERGED if derived.flagged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unitdist", description="Maximum edge counts of unit-distance graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def enum_opts(sp):
        sp.add_argument("--forbidden", metavar="PATH", help="forbidden family, one graph6 per line")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--checkpoint", metavar="DIR")
        sp.add_argument("--no-prune", action="store_true", help="disable the degree pruning rules")

    def embed_opts(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--retries", type=int)
        sp.add_argument("--tol", type=float)

    sp = sub.add_parser("enumerate", help="all F-free graphs with n vertices and m edges")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--out", metavar="PATH")
    sp.add_argument("--out-dir", metavar="DIR", help="also write U_{n}_{m}.g6 plus sidecar here")
    enum_opts(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("maxdensity", help="densest F-free graphs on n vertices")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", metavar="PATH")
    enum_opts(sp)
    sp.set_defaults(func=cmd_maxdensity)

    sp = sub.add_parser("tuud-filter", help="drop graphs containing a totally unfaithful witness")
    sp.add_argument("--catalog", metavar="PATH")
    sp.add_argument("--in", dest="input", metavar="LEVEL.g6", required=True)
    sp.add_argument("--out", metavar="SURVIVORS.g6")
    sp.add_argument("--report", metavar="REJECTS.jsonl")
    sp.set_defaults(func=cmd_tuud_filter)

    sp = sub.add_parser("embed", help="decide unit-distance embeddability of one graph")
    sp.add_argument("--graph", metavar="G6", required=True)
    sp.add_argument("--paranoid", action="store_true", help="re-run refutations at tolerance 1e-12")
    sp.add_argument("--out", metavar="result.json")
    embed_opts(sp)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("reproduce", help="three-stage filter for n = 0..max-n, compared to known values")
    sp.add_argument("--max-n", type=int, default=12)
    sp.add_argument("--tuud-catalog", metavar="PATH")
    sp.add_argument("--report", metavar="PATH", help="JSON report")
    sp.add_argument("--decisions", metavar="PATH", help="JSON lines, one record per graph decision")
    enum_opts(sp)
    embed_opts(sp)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("derive-forbidden", help="recompute minimal forbidden graphs")
    sp.add_argument("--max-vertices", type=int, default=7)
    sp.add_argument("--verdicts", metavar="PATH", help="rulings for solver-undecided graphs (default: shipped file)")
    sp.add_argument("--out", metavar="PATH")
    embed_opts(sp)
    sp.set_defaults(func=cmd_derive_forbidden)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # report and map to the error exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
