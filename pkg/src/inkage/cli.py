"""Command line interface.

Exit codes: 0 success, 1 unexpected error, 2 usage error, 3 EmptyCorpus,
4 TooFewWriters, 5 UnknownFeature, 6 capture format/validation error,
7 metadata error, 8 UnmatchedFile, 9 BadSpec, 10 IoFailure.

Errors are reported on standard error as a single line
``error: <ErrorClass>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .capture import WriterMeta
from .errors import EmptyCorpus, InkageError, IoFailure, UnknownFeature
from .features import DEFAULT_ENTROPY_BINS, FEATURE_NAMES, FeatureVector, extract, format_float
from .ingest import CAPTURE_SUFFIX, read_capture_file, read_metadata_file, scan_corpus
from .stats import correlate_cohort, histogram, scatter_pairs
from .synth import SynthSpec, generate_cohort, load_spec, with_seed


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc.strerror}") from exc


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _cell(value: object) -> object:
    return format_float(value) if isinstance(value, float) else value


def _capture_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix == CAPTURE_SUFFIX and p.is_file())
    elif path.is_file():
        files = [path]
    else:
        raise IoFailure(f"no such file or directory: {path}")
    if not files:
        raise EmptyCorpus(f"no {CAPTURE_SUFFIX} files in {path}")
    return files


def _load_cohort(args: argparse.Namespace) -> tuple[dict[str, FeatureVector], dict[str, WriterMeta], list[tuple[str, str]]]:
    """Extract features for every matched recording; keys are ``<writer_id>_s<session>``."""
    metas = read_metadata_file(args.meta)
    if args.session is not None:
        metas = [m for m in metas if m.session == args.session]
    index = scan_corpus(args.input, metas, "strict" if args.strict else "lenient")
    for w in index.warnings:
        _warn(w)
    features: dict[str, FeatureVector] = {}
    failed: list[tuple[str, str]] = []
    for entry in index.entries:
        try:
            rec = read_capture_file(entry.path, entry.writer_id, "paragraph")
            features[entry.key] = extract(rec, args.entropy_bins)
        except InkageError as exc:
            if args.strict:
                raise
            _warn(f"skipping {entry.path.name}: {type(exc).__name__}: {exc}")
            failed.append((entry.key, f"{type(exc).__name__}: {exc}"))
    meta_by_key = {e.key: e.meta for e in index.entries}
    return features, meta_by_key, failed


def run_extract(args: argparse.Namespace) -> int:
    files = _capture_files(Path(args.input))
    records: list[tuple[str, FeatureVector]] = []
    for path in files:
        try:
            rec = read_capture_file(path, path.stem)
            records.append((path.stem, extract(rec, args.entropy_bins)))
        except InkageError as exc:
            if args.strict:
                raise
            _warn(f"skipping {path.name}: {type(exc).__name__}: {exc}")
    if not records:
        raise EmptyCorpus(f"no readable capture files under {args.input}")

    if args.format == "json":
        doc = [{"recording": name, **fv.to_dict()} for name, fv in records]
        text = json.dumps(doc, indent=2) + "\n"
    else:
        rows = [("recording", *FEATURE_NAMES)]
        rows += [(name, *(format_float(v) for v in fv.values())) for name, fv in records]
        text = _csv(rows)
    _emit(text, args.out)
    return 0


def run_cohort(args: argparse.Namespace) -> int:
    features, metas, failed = _load_cohort(args)
    report = correlate_cohort(features, metas)
    if failed:
        report = type(report)(report.rows, report.n, tuple(sorted(report.excluded + tuple(failed))))
    for key, reason in report.excluded:
        _warn(f"excluded {key}: {reason}")
    if args.format == "json":
        text = report.to_json(args.table1_style)
    else:
        text = report.to_csv(args.table1_style)
    _emit(text, args.out)
    return 0


def run_scatter(args: argparse.Namespace) -> int:
    if args.feature not in FEATURE_NAMES:
        raise UnknownFeature(args.feature)
    features, metas, _ = _load_cohort(args)
    pairs = scatter_pairs(features, metas, args.feature)
    if args.format == "json":
        text = json.dumps([{"age": a, args.feature: v} for a, v in pairs], indent=2) + "\n"
    else:
        text = _csv([("age", args.feature), *((a, _cell(v)) for a, v in pairs)])
    _emit(text, args.out)
    return 0


def run_hist(args: argparse.Namespace) -> int:
    metas = read_metadata_file(args.meta)
    if args.session is not None:
        metas = [m for m in metas if m.session == args.session]
    if args.input is not None:
        index = scan_corpus(args.input, metas, "strict" if args.strict else "lenient")
        for w in index.warnings:
            _warn(w)
        ages = [e.age for e in index.entries]
    else:
        ages = [m.age for m in metas]
    if not ages:
        raise EmptyCorpus("no writers to histogram")
    bins = histogram(ages, args.hist_width, args.hist_origin)
    if args.format == "json":
        text = json.dumps([{"bin_edge": e, "count": c} for e, c in bins], indent=2) + "\n"
    else:
        text = _csv([("bin_edge", "count"), *((_cell(float(e)), c) for e, c in bins)])
    _emit(text, args.out)
    return 0


def run_synth(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec) if args.spec else SynthSpec().check()
    if args.seed is not None:
        spec = with_seed(spec, args.seed)
    if args.writers is not None:
        spec = replace(spec, writers=args.writers).check()
    corpus, meta = generate_cohort(spec, args.out)
    print(f"wrote {spec.writers} recordings to {corpus} and metadata to {meta}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inkage", description="Online handwriting features versus writer age.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, meta: bool, input_required: bool = True) -> None:
        if input_required:
            p.add_argument("input", help="capture file or corpus directory")
        if meta:
            p.add_argument("--meta", required=True, help="writer metadata CSV")
            p.add_argument("--session", type=int, default=None, help="only use this acquisition session")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--strict", action="store_true", help="fail on the first unmatched or unreadable file")
        p.add_argument("--entropy-bins", type=int, default=DEFAULT_ENTROPY_BINS)

    p = sub.add_parser("extract", help="per-recording feature table")
    common(p, meta=False)
    p.set_defaults(func=run_extract)

    p = sub.add_parser("cohort", help="correlation of every feature with age")
    common(p, meta=True)
    p.add_argument("--table1-style", action="store_true", help="round rho to 2 decimals and p to 3 significant digits")
    p.set_defaults(func=run_cohort)

    p = sub.add_parser("scatter", help="(age, feature) pairs per writer")
    common(p, meta=True)
    p.add_argument("--feature", default="t_upm")
    p.set_defaults(func=run_scatter)

    p = sub.add_parser("hist", help="age histogram")
    common(p, meta=True, input_required=False)
    p.add_argument("input", nargs="?", default=None, help="restrict to writers with a recording in this directory")
    p.add_argument("--hist-width", type=float, default=5.0)
    p.add_argument("--hist-origin", type=float, default=18.0)
    p.set_defaults(func=run_hist)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--spec", default=None, help="key = value generator spec")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--writers", type=int, default=None)
    p.add_argument("--out", required=True, help="target directory")
    p.set_defaults(func=run_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "entropy_bins", 1) < 1:
        print("error: --entropy-bins must be positive", file=sys.stderr)
        return 2
    if getattr(args, "hist_width", 1.0) <= 0:
        print("error: --hist-width must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InkageError as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
