"""Operator command line: serve, validate, export PDFs, compute metrics.

Exit codes follow the usual convention: 0 success, 1 domain failure,
2 usage or unreadable input. Human output goes to stdout, diagnostics to
stderr. ``CUENTOTERAPP_DATA_DIR`` and ``CUENTOTERAPP_PORT`` override the
serve defaults for containerized runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from cuentoterapp.grammar import (
    Catalog,
    CatalogParseError,
    CatalogValidationError,
    InvalidStoryError,
    Story,
    default_catalog_bytes,
    load_catalog,
    story_from_dict,
)
from cuentoterapp.metrics import (
    CaseTarget,
    MetricsError,
    SusResponse,
    build_report,
    parse_duration,
    parse_records_file,
    parse_sus_file,
    sus_mean,
    sus_score,
    above_average,
)
from cuentoterapp.pdf import LayoutError, UnresolvedReferenceError, render_pdf, slugify_title
from cuentoterapp.service import (
    BindError,
    ConfigError,
    ServiceConfig,
    default_static_dir,
    serve,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _default_catalog_path() -> Path:
    return Path(str(resources.files("cuentoterapp.data").joinpath("default_catalog.json")))


def _load_catalog_file(path: Path) -> Catalog:
    return load_catalog(path.read_bytes())


def _load_story_file(path: Path, catalog: Catalog) -> Story:
    doc = json.loads(path.read_text("utf-8"))
    return story_from_dict(doc, catalog)


def _fail(message: str, code: int = EXIT_FAILURE) -> int:
    print(message, file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Subcommands


def cmd_serve(args: argparse.Namespace) -> int:
    config = ServiceConfig(
        data_dir=Path(args.data_dir),
        catalog_path=Path(args.catalog),
        static_dir=Path(args.static_dir),
        port=args.port,
        host=args.host,
        require_ending=args.require_ending,
        allow_cross_origin=args.allow_cross_origin,
    )
    try:
        return serve(config)
    except (ConfigError, BindError) as exc:
        return _fail(f"cannot start service: {exc}")
    except KeyboardInterrupt:
        return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog_file(Path(args.catalog))
    except (OSError, CatalogParseError, CatalogValidationError) as exc:
        return _fail(f"cannot load catalog: {exc}", EXIT_USAGE)
    try:
        raw = Path(args.story).read_text("utf-8")
    except OSError as exc:
        return _fail(f"cannot read story: {exc}", EXIT_USAGE)
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        return _fail(f"story is not valid JSON: {exc}", EXIT_USAGE)
    try:
        story_from_dict(doc, catalog)
    except InvalidStoryError as exc:
        return _fail(str(exc))
    print("OK")
    return EXIT_OK


def cmd_export_pdf(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog_file(Path(args.catalog))
        story = _load_story_file(Path(args.story), catalog)
    except (OSError, json.JSONDecodeError, CatalogParseError,
            CatalogValidationError) as exc:
        return _fail(f"cannot read input: {exc}", EXIT_USAGE)
    except InvalidStoryError as exc:
        return _fail(f"invalid story: {exc}")
    try:
        data = render_pdf(story, catalog)
    except (UnresolvedReferenceError, LayoutError) as exc:
        return _fail(f"cannot render: {exc}")
    out_path = Path(args.output) if args.output else Path(f"{slugify_title(story.title)}.pdf")
    try:
        out_path.write_bytes(data)
    except OSError as exc:
        return _fail(f"cannot write {out_path}: {exc}")
    print(f"{out_path}: {len(data)} bytes")
    return EXIT_OK


def cmd_sus(args: argparse.Namespace) -> int:
    try:
        text = Path(args.responses).read_text("utf-8")
    except OSError as exc:
        return _fail(f"cannot read responses: {exc}", EXIT_USAGE)
    try:
        parsed = parse_sus_file(text)
        scores = [
            sus_score(entry) if isinstance(entry, SusResponse) else entry
            for entry in parsed
        ]
        mean = sus_mean(scores)
    except MetricsError as exc:
        return _fail(str(exc))
    for index, score in enumerate(scores, start=1):
        print(f"{index}\t{score:.1f}")
    verdict = "above average" if above_average(mean) else "not above average"
    print(f"Average\t{mean:.2f}\t({verdict})")
    if args.out_dir:
        _write_sus_outputs(scores, mean, Path(args.out_dir))
    return EXIT_OK


def _write_sus_outputs(scores: list[float], mean: float, out_dir: Path) -> None:
    from cuentoterapp.figures import render_report_figures
    from cuentoterapp.metrics import EvaluationReport

    report = EvaluationReport(cases=(), sus_scores=tuple(scores), sus_mean_score=mean)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sus.csv").write_text(report.sus_to_csv(), "utf-8")
    written = render_report_figures(report, out_dir)
    for path in [out_dir / "sus.csv"] + written:
        print(f"wrote {path}", file=sys.stderr)


def cmd_metrics(args: argparse.Namespace) -> int:
    try:
        text = Path(args.records).read_text("utf-8")
    except OSError as exc:
        return _fail(f"cannot read records: {exc}", EXIT_USAGE)
    try:
        records = parse_records_file(text)
        targets = [
            CaseTarget(1, parse_duration(args.target_case1)),
            CaseTarget(2, parse_duration(args.target_case2)),
        ]
        report = build_report(records, targets)
    except MetricsError as exc:
        return _fail(str(exc))
    print(report.to_text())
    if args.out_dir:
        from cuentoterapp.figures import render_report_figures

        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "metrics.csv").write_text(report.to_csv(), "utf-8")
        (out_dir / "report.txt").write_text(report.to_text(), "utf-8")
        written = render_report_figures(report, out_dir)
        for path in [out_dir / "metrics.csv", out_dir / "report.txt"] + written:
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_seed_catalog(args: argparse.Namespace) -> int:
    out_path = Path(args.output)
    try:
        out_path.write_bytes(default_catalog_bytes())
    except OSError as exc:
        return _fail(f"cannot write catalog: {exc}")
    print(f"{out_path}: default catalog written")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuentoterapp",
        description="Storytelling-therapy support toolkit",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    serve_cmd = commands.add_parser("serve", help="run the HTTP service")
    serve_cmd.add_argument(
        "--port", type=int,
        default=int(os.environ.get("CUENTOTERAPP_PORT", "8000")),
    )
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument(
        "--data-dir",
        default=os.environ.get("CUENTOTERAPP_DATA_DIR", "data"),
        help="directory for the story library and cache (default: ./data)",
    )
    serve_cmd.add_argument(
        "--static-dir", default=str(default_static_dir()),
        help="app shell to serve (default: built-in placeholder shell)",
    )
    serve_cmd.add_argument("--catalog", default=str(_default_catalog_path()))
    serve_cmd.add_argument("--require-ending", action="store_true",
                           help="forbid rejecting the final function card")
    serve_cmd.add_argument("--allow-cross-origin", action="store_true",
                           help="development only: permissive CORS headers")
    serve_cmd.set_defaults(func=cmd_serve)

    validate_cmd = commands.add_parser("validate", help="check a story file")
    validate_cmd.add_argument("story")
    validate_cmd.add_argument("--catalog", default=str(_default_catalog_path()))
    validate_cmd.set_defaults(func=cmd_validate)

    export_cmd = commands.add_parser("export-pdf", help="render a story to PDF")
    export_cmd.add_argument("story")
    export_cmd.add_argument("--catalog", default=str(_default_catalog_path()))
    export_cmd.add_argument("-o", "--output", default=None,
                            help="output path (default: <slugified-title>.pdf)")
    export_cmd.set_defaults(func=cmd_export_pdf)

    sus_cmd = commands.add_parser("sus", help="score usability questionnaires")
    sus_cmd.add_argument("responses", help="CSV: 10 items per row, or one score per row")
    sus_cmd.add_argument("--out-dir", default=None,
                         help="also write sus.csv and charts here")
    sus_cmd.set_defaults(func=cmd_sus)

    metrics_cmd = commands.add_parser("metrics", help="compute evaluation tables")
    metrics_cmd.add_argument("records", help="participant record CSV")
    metrics_cmd.add_argument("--target-case1", default="12:45", metavar="MM:SS")
    metrics_cmd.add_argument("--target-case2", default="10:05", metavar="MM:SS")
    metrics_cmd.add_argument("--out-dir", default=None,
                             help="also write metrics.csv, report.txt and charts here")
    metrics_cmd.set_defaults(func=cmd_metrics)

    seed_cmd = commands.add_parser("seed-catalog", help="write the default catalog")
    seed_cmd.add_argument("-o", "--output", default="catalog.json")
    seed_cmd.set_defaults(func=cmd_seed_catalog)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
