"""Command line entry points.

    hierseq run --config FILE [--out DIR] [-O key=value ...]
    hierseq analyze DIR [--mu-ld F] [--min-len N]
    hierseq export-dot SNAPSHOT.json [--out FILE]
    hierseq compare-cs SNAPSHOT.json
    hierseq report DIR [--out DIR]

``run`` executes every replicate of a configuration and writes the
output tree; ``analyze`` recomputes summary rows from a finished tree;
``export-dot`` converts a saved DAG snapshot to Graphviz; ``compare-cs``
rebuilds a snapshot's target set from scratch and prints the comparison;
``report`` renders the standard figures next to the delimited output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config, parse_config
from .dag import HierarchyDag
from .engine import (
    SUMMARY_FIELDS,
    analyze_dir,
    mean_summary,
    run_experiment,
    summary_csv,
)
from .symbols import SymbolTable


def _parse_overrides(pairs: list[str]) -> dict:
    text = "\n".join(pairs)
    probe = parse_config(text)  # reuses the file grammar and its errors
    keys = [p.split("=", 1)[0].strip() for p in pairs]
    return {k: getattr(probe, k) for k in keys}


def _print_rows(rows: list[dict]) -> None:
    rows = rows + [mean_summary(rows)]
    widths = {
        f: max(len(f), *(len(_fmt(r[f])) for r in rows)) for f in SUMMARY_FIELDS
    }
    print("  ".join(f.ljust(widths[f]) for f in SUMMARY_FIELDS))
    for r in rows:
        print("  ".join(_fmt(r[f]).ljust(widths[f]) for f in SUMMARY_FIELDS))


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def cmd_run(args) -> int:
    overrides = _parse_overrides(args.override or [])
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = RunConfig(**overrides)
    exp = run_experiment(cfg, args.out)
    _print_rows(exp.summary_rows())
    if args.out:
        print(f"\noutputs in {args.out}", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    rows = analyze_dir(args.dir, mu_ld=args.mu_ld, stasis_min_len=args.min_len)
    _print_rows(rows)
    if args.csv:
        Path(args.csv).write_text(summary_csv(rows))
    return 0


def cmd_export_dot(args) -> int:
    dag = HierarchyDag.from_json(Path(args.snapshot).read_text())
    dot = dag.to_dot(SymbolTable.default(dag.n), max_label=args.max_label)
    if args.out:
        Path(args.out).write_text(dot)
    else:
        print(dot)
    return 0


def cmd_compare_cs(args) -> int:
    from .centrality import h_score
    from .greedy import greedy_build
    from .metrics import avg_depth, normalized_cost

    dag = HierarchyDag.from_json(Path(args.snapshot).read_text())
    cs = greedy_build(dag.alphabet, dag.target_strings())
    print(f"targets            {len(dag.targets())}")
    print(f"incremental cost   {dag.edge_cost()}")
    print(f"clean-slate cost   {cs.edge_cost()}")
    print(f"cost ratio         {dag.edge_cost() / cs.edge_cost():.4f}")
    print(f"incremental norm   {normalized_cost(dag):.4f}")
    print(f"clean-slate norm   {normalized_cost(cs):.4f}")
    print(f"incremental depth  {avg_depth(dag):.4f}")
    print(f"clean-slate depth  {avg_depth(cs):.4f}")
    print(f"incremental h      {h_score(dag, args.tau).value:.4f}")
    print(f"clean-slate h      {h_score(cs, args.tau).value:.4f}")
    return 0


def cmd_report(args) -> int:
    from .figures import render_report

    written = render_report(args.dir, args.out)
    for p in written:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hierseq",
        description="Hierarchical sequence DAGs under incremental evolution",
    )
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a configured experiment")
    r.add_argument("--config", help="key=value config file")
    r.add_argument("--out", help="output directory for the run tree")
    r.add_argument(
        "-O", "--override", action="append", metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("analyze", help="summarize a finished output tree")
    a.add_argument("dir")
    a.add_argument("--mu-ld", type=float, default=0.1,
                   help="stasis drift threshold (normalized edit distance)")
    a.add_argument("--min-len", type=int, default=20,
                   help="minimum stasis run length in iterations")
    a.add_argument("--csv", help="also write the summary table here")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("export-dot", help="convert a DAG snapshot to Graphviz")
    d.add_argument("snapshot")
    d.add_argument("--out")
    d.add_argument("--max-label", type=int, default=16)
    d.set_defaults(func=cmd_export_dot)

    c = sub.add_parser("compare-cs", help="clean-slate rebuild comparison")
    c.add_argument("snapshot")
    c.add_argument("--tau", type=float, default=0.85)
    c.set_defaults(func=cmd_compare_cs)

    f = sub.add_parser("report", help="render figures for an output tree")
    f.add_argument("dir")
    f.add_argument("--out", help="figure directory (default DIR/figures)")
    f.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"not found: {e.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
