"""Command-line interface: ``condorcet <command> ...``.

Exit codes: 0 success, 1 invalid argument, 2 parse error, 3 infeasible
request, 4 record conflict, 5 missing record sizes.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analysis, constructions, search
from .analysis import IncompleteRecords
from .canonical import canonical_form
from .formats import ParseError, format_domain, format_rules, read_domain, read_rules, write_domain
from .orders import InvalidArgument
from .records import RecordConflict, RecordStore, SizeFunctionTable
from .rules import ALL_RULES, PEAK_PIT_RULES, SEARCH_RULES, NeverRule, NotCondorcet, assignment_for, generate_domain

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_CONFLICT, EXIT_MISSING = 0, 1, 2, 3, 4, 5

RULE_SETS = {"all": ALL_RULES, "peak-pit": PEAK_PIT_RULES, "search": SEARCH_RULES}


def _rules_arg(text: str):
    if text in RULE_SETS:
        return RULE_SETS[text]
    return tuple(NeverRule.parse(x) for x in text.split(","))


def _labels(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_many(domains, outdir: str | None, prefix: str) -> None:
    if outdir:
        Path(outdir).mkdir(parents=True, exist_ok=True)
    for k, d in enumerate(domains):
        if outdir:
            write_domain(Path(outdir) / f"{prefix}_{k:04d}_size{len(d)}.txt", d)
        print(f"{k}\tsize={len(d)}\tcanonical={canonical_form(d).digest[:16]}")


def cmd_fishburn(args) -> int:
    asn = constructions.fishburn_scheme(args.n)
    if args.rules_out:
        Path(args.rules_out).write_text(format_rules(asn))
    _emit(format_domain(generate_domain(asn)), args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    _emit(format_domain(generate_domain(read_rules(args.rulefile))), args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    d = read_domain(args.domainfile)
    props = args.props.split(",") if args.props else analysis.ALL_PROPERTIES
    ks = _labels(args.abundance) or None
    report = analysis.property_report(d, props, abundance_ks=ks)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_exhaustive(args) -> int:
    found = search.exhaustive_maximal(args.n, _rules_arg(args.rules))
    _write_many(found, args.output, f"n{args.n}")
    return EXIT_OK


def _load_seeds(paths, seed_dir):
    files = [Path(p) for p in paths]
    if seed_dir:
        files += sorted(Path(seed_dir).glob("*.txt"))
    if not files:
        raise InvalidArgument("no seed domains given")
    seeds = [read_domain(p) for p in files]
    return [assignment_for(d) for d in seeds]


def cmd_extend(args) -> int:
    cfg = search.SearchConfig(
        allowed_rules=_rules_arg(args.rules),
        threshold=args.threshold,
        pair_mode=args.mode,
        workers=args.workers,
        slack=args.slack,
        checkpoint=args.checkpoint,
        include_duals=not args.no_duals,
    )
    seeds = _load_seeds(args.seeds, args.seed_dir)
    found = search.extend(seeds, cfg)
    if args.keep_close:
        found = search.select_seeds(found, cfg.slack)
    _write_many(found, args.output, f"n{seeds[0].n + 1}")
    return EXIT_OK


def cmd_compose(args) -> int:
    d1, d2 = read_domain(args.d1), read_domain(args.d2)
    if args.kind == "s1":
        a1 = _labels(args.a1)
        b1 = _labels(args.b1)
        if args.a2 is not None or args.b2 is not None:
            a2 = _labels(args.a2) if args.a2 is not None else sorted(set(range(1, d1.n + 1)) - set(a1))
            b2 = _labels(args.b2) if args.b2 is not None else sorted(set(range(1, d2.n + 1)) - set(b1))
            spec = constructions.CompositionSpec.from_partitions(d1, d2, a1, a2, b1, b2)
        else:
            spec = constructions.CompositionSpec(d1, d2, frozenset(a1), frozenset(b1))
        result = constructions.compose_s1(spec)
    else:
        result = constructions.compose_s2(d1, d2)
    _emit(format_domain(result), args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    kind = constructions.FISHBURN_LIMINF if args.kind == "fishburn" else constructions.PEAK_PIT_LIMINF
    if args.k is not None and args.size is not None:
        bound = constructions.liminf_bound(args.size, args.k, kind)
    else:
        table = RecordStore(args.store).table if args.store else SizeFunctionTable.known()
        sizes = {n: v.value for (n, fn), v in table.values.items() if fn == "f"}
        if args.k is not None:
            if args.k not in sizes:
                raise IncompleteRecords(f"no recorded size for k={args.k}")
            sizes = {args.k: sizes[args.k]}
        bound = constructions.best_liminf_bound(sizes, kind)
        print(f"k={bound.k}")
    print(bound.format(args.digits))
    return EXIT_OK


def cmd_records(args) -> int:
    store = RecordStore(args.store)
    if args.action == "show":
        for n, e in sorted(store.entries.items()):
            print(f"n={n}\tsize={e.size}\t{e.provenance}\t{e.domain_path}")
        sys.stdout.write(store.table.to_text())
    elif args.action == "verify":
        store.table.verify()
        print("ok")
    elif args.action == "import":
        store.import_table(Path(args.file).read_text())
    elif args.action == "export":
        _emit(store.table.to_text(), args.file)
    elif args.action == "add":
        d = read_domain(args.file)
        report = analysis.property_report(d, analysis.CHEAP_PROPERTIES)
        entry = store.add(d, args.provenance, properties=report)
        print(f"n={entry.n}\tsize={entry.size}\t{entry.domain_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="condorcet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fishburn", help="Fishburn's alternating-scheme domain")
    s.add_argument("n", type=int)
    s.add_argument("-o", "--output")
    s.add_argument("--rules-out")
    s.set_defaults(func=cmd_fishburn)

    s = sub.add_parser("generate", help="domain of a rule file")
    s.add_argument("rulefile")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("analyze", help="property report of a domain file")
    s.add_argument("domainfile")
    s.add_argument("--props", help="comma list from: " + ",".join(analysis.ALL_PROPERTIES))
    s.add_argument("--abundance", help="comma list of k for abundance")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("exhaustive", help="all maximal domains for small n")
    s.add_argument("n", type=int)
    s.add_argument("--rules", default="all", help="all, peak-pit, search, or a comma list like 1N3,3N1")
    s.add_argument("-o", "--output", help="directory for domain files")
    s.set_defaults(func=cmd_exhaustive)

    s = sub.add_parser("extend", help="inductive extension n -> n+1")
    s.add_argument("seeds", nargs="*")
    s.add_argument("--seed-dir")
    s.add_argument("--mode", choices=("all_pairs", "shortcut"), default="all_pairs")
    s.add_argument("--threshold", type=int)
    s.add_argument("--slack", type=float, default=0.10)
    s.add_argument("--keep-close", action="store_true", help="only write domains within the slack of the best")
    s.add_argument("--workers", type=int)
    s.add_argument("--checkpoint")
    s.add_argument("--rules", default="search")
    s.add_argument("--no-duals", action="store_true")
    s.add_argument("-o", "--output", help="directory for domain files")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("compose", help="S1 (1N3-3N1) or S2 composition")
    s.add_argument("kind", choices=("s1", "s2"))
    s.add_argument("d1")
    s.add_argument("d2")
    for name in ("a1", "a2", "b1", "b2"):
        s.add_argument(f"--{name}", help="comma-separated labels")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("bound", help="asymptotic growth-rate bound")
    s.add_argument("k", type=int, nargs="?")
    s.add_argument("size", type=int, nargs="?")
    s.add_argument("--kind", choices=("fishburn", "peak-pit"), default="fishburn")
    s.add_argument("--digits", type=int, default=10)
    s.add_argument("--store", help="record store to take sizes from when k/size are omitted")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("records", help="record store maintenance")
    s.add_argument("action", choices=("show", "verify", "import", "export", "add"))
    s.add_argument("file", nargs="?")
    s.add_argument("--store", default="records")
    s.add_argument("--provenance", default="imported")
    s.set_defaults(func=cmd_records)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except search.Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except RecordConflict as exc:
        print(f"record conflict: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except IncompleteRecords as exc:
        print(f"missing records: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (InvalidArgument, NotCondorcet, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
