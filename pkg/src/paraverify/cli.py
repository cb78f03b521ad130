"""Command-line interface.

``paraverify check FILE.pv`` runs the full pipeline; ``paraverify corpus``
lists the bundled protocols.  Exit codes: 0 verified, 1 unresolved or
unsafe, 2 resource limit, 3 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import corpus_names, corpus_source
from .parser import ParseError, parse_protocol
from .pipeline import PipelineConfig, run_pipeline
from .report import emit_report

EXIT_BY_OUTCOME = {
    "verified": 0,
    "unsafe": 1,
    "unresolved-cti": 1,
    "resource-limit": 2,
}


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paraverify")
    sub = ap.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", help="verify a protocol file")
    chk.add_argument("file", help="protocol source (.pv), or a bundled corpus name")
    chk.add_argument("--strategy", choices=["inc", "dec"], default="dec")
    chk.add_argument("--heuristic", choices=["on", "off"], default="on")
    chk.add_argument("--symmetry", choices=["on", "off"], default="on")
    chk.add_argument("--final-sizes", default=None, help="comma-separated sizes, e.g. 2,3,4")
    chk.add_argument("--impl-bound", type=int, default=None)
    chk.add_argument("--state-limit", type=int, default=None)
    chk.add_argument("--time-limit", type=float, default=None, help="per-phase seconds")
    chk.add_argument("--report", choices=["json", "text"], default="text")
    chk.add_argument("--out", default=None, help="write the report here instead of stdout")
    sub.add_parser("corpus", help="list bundled protocols")
    return ap


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    final_sizes = None
    if args.final_sizes:
        final_sizes = tuple(int(x) for x in args.final_sizes.split(","))
    kwargs = dict(
        strategy={"inc": "increasing", "dec": "decreasing"}[args.strategy],
        heuristic=args.heuristic == "on",
        symmetry=args.symmetry == "on",
        final_sizes=final_sizes,
        impl_bound=args.impl_bound,
        phase_time_limit=args.time_limit,
        report_format=args.report,
    )
    if args.state_limit is not None:
        kwargs["state_limit"] = args.state_limit
    return PipelineConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.command == "corpus":
        for name in corpus_names():
            print(name)
        return 0
    path = Path(args.file)
    try:
        if path.exists():
            text = path.read_text(encoding="utf-8")
            name = path.stem
        elif args.file in corpus_names():
            text = corpus_source(args.file)
            name = args.file
        else:
            print(f"error: no such file or corpus protocol: {args.file}", file=sys.stderr)
            return 3
        spec = parse_protocol(text, name=name)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    report = run_pipeline(spec, _config_from_args(args))
    rendered = emit_report(report, args.report)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    return EXIT_BY_OUTCOME[report.outcome]


if __name__ == "__main__":
    raise SystemExit(main())
