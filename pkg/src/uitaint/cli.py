"""Command-line entry points.

Exit codes are the machine contract: 0 success, 1 analysis failure (a bug or
unexpected condition inside the analyzer), 2 bad input, configuration, or
usage. Corpus analysis parallelizes over apps only, so reports are
byte-identical whatever -j is.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import AnalysisError, EmptyCorpus, InvalidSpec
from .fixtures import FixtureSpec, generate
from .gui import load_widget_registry
from .pi import load_lexicon
from .pipeline import analyze_bundle
from .report import (
    aggregate,
    export_csv,
    parse_report,
    serialize_report,
    write_summary,
)
from .sources_sinks import load_sinks

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uitaint",
        description="Detect leaks of user-entered personal information in "
        "decompiled app bundles.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase log verbosity (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one app bundle")
    p.add_argument("--app", required=True, help="bundle directory")
    _config_flags(p)
    p.add_argument("--out", help="report file (default: stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("corpus", help="analyze every bundle under a directory")
    p.add_argument("--apps", required=True, help="directory of bundle directories")
    p.add_argument("--out", required=True, help="directory for report files")
    _config_flags(p)
    p.add_argument("-j", "--jobs", type=int, default=1, metavar="N",
                   help="worker processes (default 1)")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("aggregate", help="fold reports into corpus statistics")
    p.add_argument("--reports", required=True, help="directory of report files")
    p.add_argument("--out", required=True, help="directory for summary + CSVs")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("gen-fixtures", help="generate oracle bundles")
    p.add_argument("--seed", type=int, help="base seed (overrides the spec file)")
    p.add_argument("--spec", help="JSON file of FixtureSpec fields")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--count", type=int, default=1, metavar="M",
                   help="generate M bundles at consecutive seeds (default 1)")
    p.set_defaults(func=cmd_gen_fixtures)

    p = sub.add_parser("explain", help="print one leak's witness trace")
    p.add_argument("--report", required=True, help="report file")
    p.add_argument("--leak", type=int, required=True, help="leak index")
    p.set_defaults(func=cmd_explain)

    return parser


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sinks", help="sink registry TSV (default: built-in)")
    p.add_argument("--lexicon", help="PI lexicon TSV (default: built-in)")
    p.add_argument("--widgets", help="widget registry file (default: built-in)")


def _load_configs(args):
    widgets = load_widget_registry(args.widgets) if args.widgets else None
    lexicon = load_lexicon(args.lexicon) if args.lexicon else None
    sinks = load_sinks(args.sinks) if args.sinks else None
    return widgets, lexicon, sinks


def _diag_line(report: dict) -> str:
    d = report["diagnostics"]
    return (
        f"{report['app_package']}: {len(report['leaks'])} leaks, "
        f"{report['views_labeled']}/{report['views_total']} views labeled, "
        f"findViewById sites={d['findviewbyid_sites']} "
        f"resolved={d['sources_resolved']} "
        f"unlabeled-id-skips={d['unlabeled_id_skips']} "
        f"unresolved-arg-skips={d['unresolved_arg_skips']}"
    )


def cmd_analyze(args) -> int:
    widgets, lexicon, sinks = _load_configs(args)
    report = analyze_bundle(args.app, widgets=widgets, lexicon=lexicon, sinks=sinks)
    text = serialize_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(_diag_line(report), file=sys.stderr)
    return 0


def _analyze_to_text(app_dir: str, widgets_path, lexicon_path, sinks_path) -> str:
    """Worker for corpus analysis; loads configs from paths so it pickles."""
    widgets = load_widget_registry(widgets_path) if widgets_path else None
    lexicon = load_lexicon(lexicon_path) if lexicon_path else None
    sinks = load_sinks(sinks_path) if sinks_path else None
    report = analyze_bundle(app_dir, widgets=widgets, lexicon=lexicon, sinks=sinks)
    return serialize_report(report)


def cmd_corpus(args) -> int:
    apps_dir = Path(args.apps)
    apps = sorted(p for p in apps_dir.iterdir() if p.is_dir())
    if not apps:
        raise EmptyCorpus(f"no app bundles under {apps_dir}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(str(p), args.widgets, args.lexicon, args.sinks) for p in apps]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            texts = list(pool.map(_analyze_to_text, *zip(*jobs)))
    else:
        texts = [_analyze_to_text(*job) for job in jobs]

    for app, text in zip(apps, texts):
        (out_dir / f"{app.name}.json").write_text(text, encoding="utf-8")
    print(f"analyzed {len(apps)} bundles -> {out_dir}", file=sys.stderr)
    return 0


def cmd_aggregate(args) -> int:
    paths = sorted(Path(args.reports).glob("*.json"))
    reports = [parse_report(p) for p in paths]
    summary = aggregate(reports)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary(summary, out_dir / "summary.json")
    export_csv(summary, out_dir)
    print(
        f"aggregated {summary.n_apps} reports, {summary.total_leaks} leaks -> {out_dir}",
        file=sys.stderr,
    )
    return 0


def cmd_gen_fixtures(args) -> int:
    doc = {}
    if args.spec:
        try:
            doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"bad spec file {args.spec}: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidSpec(f"spec file {args.spec} must hold a JSON object")
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.count < 1:
        raise InvalidSpec(f"--count must be >= 1, got {args.count}")
    spec = FixtureSpec.from_dict(doc)

    out_dir = Path(args.out)
    for k in range(args.count):
        one = dataclasses.replace(spec, seed=spec.seed + k)
        bundle_dir, gt = generate(one, out_dir / f"fx{one.seed:08d}")
        print(bundle_dir)
    print(f"generated {args.count} bundle(s) -> {out_dir}", file=sys.stderr)
    return 0


def cmd_explain(args) -> int:
    report = parse_report(args.report)
    leaks = report.get("leaks", [])
    if not 0 <= args.leak < len(leaks):
        print(
            f"error: leak index {args.leak} out of range (report has {len(leaks)})",
            file=sys.stderr,
        )
        return 2
    leak = leaks[args.leak]
    lines = leak["path_text"]
    print("SOURCE")
    for line in lines[:-1]:
        print(f"{line} =>")
    print(lines[-1])
    print("SINK")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AnalysisError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - analyzer bug guard
        log.exception("internal error")
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
