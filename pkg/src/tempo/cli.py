"""Command-line entry point: ``tempo rewrite|materialize|query|bench``.

Exit codes: 0 when every answer is certified, 2 when some answer is unknown
because the round cap was hit, 1 for usage, parse or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .engine import (
    GENERATORS,
    BenchSpec,
    Entailment,
    answer_query,
    compare_runs,
    generate_bench,
    report_jsonl,
    report_row,
    report_table,
)
from .magic import ConfigurationError, magic_rewrite, rewrite_for_entailment
from .materialise import MaterialisationConfig, default_max_rounds, materialize
from .parser import ParseError, parse_dataset, parse_program, parse_queries, render_dataset, render_fact, render_program
from .syntax import Dataset, normalize

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse(kind: str, path: str):
    fn = {"program": parse_program, "dataset": parse_dataset, "queries": parse_queries}[kind]
    try:
        return fn(_read(path), allow_reserved=True)
    except ParseError as e:
        raise ValueError(f"{path}:{e}") from None


def _config(args) -> MaterialisationConfig:
    rounds = args.max_rounds if args.max_rounds is not None else default_max_rounds()
    return MaterialisationConfig(
        max_rounds=rounds,
        naive=getattr(args, "naive", False),
        collect_stats=getattr(args, "stats", False),
        widen_guards=getattr(args, "widen_guards", None),
    )


def cmd_rewrite(args) -> int:
    program = normalize(_parse("program", args.program))
    queries = _parse("queries", args.query)
    if len(queries) != 1:
        raise ValueError(f"{args.query}: expected exactly one query, found {len(queries)}")
    q = queries[0]
    if args.widen:
        p, _ = rewrite_for_entailment(program, Dataset(()), q)
        _write(args.output, render_program(p))
        return EXIT_OK
    out = magic_rewrite(program, Dataset(()), q)
    seed = render_fact(out.seed_fact)
    if args.seed_out:
        _write(args.seed_out, seed + "\n")
        _write(args.output, render_program(out.program))
    else:
        _write(args.output, render_program(out.program) + f"% seed: {seed}\n")
    return EXIT_OK


def _stats_table(stats) -> str:
    rows = sorted(stats.items(), key=lambda kv: kv[0].name)
    width = max([len("predicate")] + [len(p.name) for p, _ in rows])
    lines = [f"{'predicate'.ljust(width)}  derived  first  last"]
    for p, s in rows:
        lines.append(f"{p.name.ljust(width)}  {s.derived:7d}  {s.first_round:5d}  {s.last_round:4d}")
    return "\n".join(lines) + "\n"


def cmd_materialize(args) -> int:
    program = normalize(_parse("program", args.program))
    dataset = _parse("dataset", args.dataset)
    res = materialize(program, dataset, _config(args))
    _write(args.output, res.interpretation.dump())
    status = "fixpoint" if res.reached_fixpoint else "round cap hit"
    print(f"% {status} after {res.rounds} rounds, {res.interpretation.fact_count()} facts", file=sys.stderr)
    if args.stats:
        sys.stderr.write(_stats_table(res.stats))
    return EXIT_OK if res.reached_fixpoint else EXIT_UNKNOWN


def cmd_query(args) -> int:
    program = _parse("program", args.program)
    dataset = _parse("dataset", args.dataset)
    queries = _parse("queries", args.query)
    cfg = _config(args)
    code = EXIT_OK
    for q in queries:
        ans = answer_query(program, dataset, q, cfg, magic=not args.no_magic)
        print(f"{render_fact(q)}\t{ans.entailed.value}\trounds={ans.rounds}")
        if not q.is_ground:
            for f in ans.answer_facts():
                print(f"  {render_fact(f)}")
        if ans.entailed is Entailment.UNKNOWN:
            code = EXIT_UNKNOWN
    return code


def cmd_bench(args) -> int:
    spec = BenchSpec(generator=args.generator, users=args.users, seed=args.seed, policy=args.policy,
                     components=args.components)
    program, dataset, q = generate_bench(spec)
    if args.emit:
        _write(f"{args.emit}.dmtl", render_program(program))
        _write(f"{args.emit}.dtf", render_dataset(dataset))
        _write(f"{args.emit}.q", render_fact(q) + "\n")
    cfg = _config(args)
    if args.compare:
        rows = compare_runs(program, dataset, [q], cfg)
    else:
        rows = [report_row(answer_query(program, dataset, q, cfg, magic=True), program, dataset)]
    if args.jsonl:
        _write(args.jsonl, report_jsonl(rows))
    sys.stdout.write(report_table(rows))
    return EXIT_UNKNOWN if any(r["cap_exhausted"] for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tempo", description="DatalogMTL reasoning with temporal magic sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    def rounds(p):
        p.add_argument("--max-rounds", type=int, default=None, metavar="N",
                       help="round cap (default: $TEMPO_MAX_ROUNDS or 1000)")
        p.add_argument("--widen-guards", type=int, default=None, metavar="K",
                       help="widen a magic fact to all of time after it has grown in K rounds")

    p = sub.add_parser("rewrite", help="print the magic-set rewriting of a program for a query")
    p.add_argument("-p", "--program", required=True)
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--widen", action="store_true", help="widen the query to all of time and emit the seed as a rule")
    p.add_argument("--seed-out", metavar="FILE", help="write the seed fact to FILE as a dataset")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_rewrite)

    p = sub.add_parser("materialize", help="materialise a program over a dataset")
    p.add_argument("-p", "--program", required=True)
    p.add_argument("-d", "--dataset", required=True)
    rounds(p)
    p.add_argument("--naive", action="store_true", help="naive instead of semi-naive evaluation")
    p.add_argument("--stats", action="store_true", help="print per-predicate statistics to stderr")
    p.add_argument("-o", "--output", metavar="DUMP")
    p.set_defaults(fn=cmd_materialize)

    p = sub.add_parser("query", help="answer queries")
    p.add_argument("-p", "--program", required=True)
    p.add_argument("-d", "--dataset", required=True)
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--no-magic", action="store_true", help="materialise the input pair without rewriting")
    rounds(p)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="generate a benchmark instance and run it")
    p.add_argument("--generator", choices=GENERATORS, default="chain")
    p.add_argument("--users", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=("reachable", "unreachable"), default="reachable")
    p.add_argument("--components", type=int, default=1)
    p.add_argument("--compare", action="store_true", help="also run the baseline and report both")
    p.add_argument("--emit", metavar="PREFIX", help="write PREFIX.dmtl, PREFIX.dtf and PREFIX.q")
    p.add_argument("--jsonl", metavar="FILE", help="write the report as JSON lines")
    rounds(p)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        return args.fn(args)
    except (ParseError, ConfigurationError, ValueError, OSError) as e:
        print(f"tempo: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
