"""Command-line interface: segment single pages, batch directories,
evaluate against ground truth, and run the fixed-window baseline.

Exit codes: 0 success, 1 partial failure in a batch, 2 unusable input or
configuration. All machine output is JSON and is byte-stable for a given
input and configuration, regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .baseline import DEFAULT_WINDOW_WORDS, fixed_window_context
from .dom import DomTree, child_index_path
from .evaluation import (
    EvalReport,
    MatchMode,
    MatchPolicy,
    evaluate_corpus,
    format_report_table,
    load_ground_truth,
    precision_recall,
)
from .images import FilterPolicy, collect_valid_images
from .ingest import IngestOptions, parse_html
from .segmenter import PageSegmentation, segment_page
from .structure import DEFAULT_TOLERANCE
from .validation import check_fraction

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imgseg",
        description="Segment webpages into images with their surrounding contextual text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_policy_flags(command):
        command.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                             help="structural similarity tolerance in [0,1] (default 0.2)")
        command.add_argument("--min-small-px", type=int, default=45,
                             help="lower bound of the small near-square band (default 45)")
        command.add_argument("--min-large-px", type=int, default=60,
                             help="lower bound of the large-image band (default 60)")
        command.add_argument("--unknown-dims", choices=("valid", "invalid"), default="valid",
                             help="treat images without parseable dimensions as valid/invalid")

    segment = sub.add_parser("segment", help="segment one HTML file (or - for stdin)")
    segment.add_argument("input", help="HTML file path, or - to read standard input")
    segment.add_argument("--out", help="write JSON here instead of standard output")
    add_policy_flags(segment)

    batch = sub.add_parser("batch", help="segment every .html file in a directory")
    batch.add_argument("input", help="directory containing .html files")
    batch.add_argument("--out", required=True, help="directory for per-page JSON results")
    batch.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="worker processes (default: number of processors)")
    add_policy_flags(batch)

    evaluate = sub.add_parser("eval", help="precision/recall against a ground-truth file")
    evaluate.add_argument("input", nargs="?", help="directory of .html files (omit with --counts)")
    evaluate.add_argument("--truth", help="ground-truth JSON file")
    evaluate.add_argument("--counts", nargs=3, type=int, metavar=("CORRECT", "EXTRACTED", "ACTUAL"),
                          help="skip segmentation and report metrics for raw counts")
    evaluate.add_argument("--match", choices=("exact", "jaccard"), default="exact")
    evaluate.add_argument("--jaccard-threshold", type=float, default=0.8)
    evaluate.add_argument("--out", help="write the JSON report here")
    add_policy_flags(evaluate)

    window = sub.add_parser("baseline-window", help="fixed-window baseline contexts")
    window.add_argument("input", help="HTML file path, or - to read standard input")
    window.add_argument("--window-n", type=int, default=DEFAULT_WINDOW_WORDS,
                        help="words on each side of the image; 0 = whole page (default 32)")
    window.add_argument("--out", help="write JSON here instead of standard output")
    add_policy_flags(window)

    return parser


def _policy_from(args) -> FilterPolicy:
    return FilterPolicy(
        large_min_px=args.min_large_px,
        small_min_px=args.min_small_px,
        unknown_dims_valid=args.unknown_dims == "valid",
    )


def _read_input(path_argument: str) -> tuple[bytes, str]:
    if path_argument == "-":
        return sys.stdin.buffer.read(), "<stdin>"
    path = Path(path_argument)
    return path.read_bytes(), str(path)


def _image_json(descriptor) -> dict:
    return {
        "src": descriptor.src,
        "alt": descriptor.alt,
        "filename": descriptor.filename,
        "width": descriptor.width_px,
        "height": descriptor.height_px,
    }


def _page_json(tree: DomTree, page: PageSegmentation) -> dict:
    segments = []
    for segment in page.segments:
        entry = {
            "class": segment.image_class.value,
            "root_path": child_index_path(tree, segment.root),
        }
        if segment.child_range is not None:
            entry["child_range"] = list(segment.child_range)
        entry["images"] = [_image_json(image) for image in segment.images]
        entry["texts"] = list(segment.context_texts)
        segments.append(entry)
    return {
        "source": tree.source_identifier,
        "title": tree.page_title,
        "segments": segments,
        "skipped": [{"src": skip.src, "reason": skip.reason} for skip in page.skipped],
    }


def _dump(document: dict) -> str:
    return json.dumps(document, ensure_ascii=False, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_segment(args) -> int:
    try:
        policy = _policy_from(args)
        tolerance = check_fraction("tolerance", args.tolerance)
        data, source = _read_input(args.input)
        tree = parse_html(data, source_identifier=source, options=IngestOptions())
    except (OSError, ValueError) as error:
        print(f"imgseg: {error}", file=sys.stderr)
        return 2
    page = segment_page(tree, policy=policy, tolerance=tolerance)
    _emit(_dump(_page_json(tree, page)), args.out)
    return 0


def _render_one(path_str: str, policy: FilterPolicy, tolerance: float) -> tuple[str, int, float]:
    """Worker body for batch: returns (json_text, segment_count, seconds)."""
    data = Path(path_str).read_bytes()
    source = Path(path_str).name
    started = time.perf_counter()
    tree = parse_html(data, source_identifier=source, options=IngestOptions())
    page = segment_page(tree, policy=policy, tolerance=tolerance)
    elapsed = time.perf_counter() - started
    return _dump(_page_json(tree, page)), len(page.segments), elapsed


def cmd_batch(args) -> int:
    try:
        policy = _policy_from(args)
        tolerance = check_fraction("tolerance", args.tolerance)
        if args.workers < 1:
            raise ValueError("--workers must be >= 1")
        input_dir = Path(args.input)
        if not input_dir.is_dir():
            raise ValueError(f"not a directory: {input_dir}")
    except ValueError as error:
        print(f"imgseg: {error}", file=sys.stderr)
        return 2

    files = sorted(input_dir.glob("*.html"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    results: dict[Path, tuple[str, int, float]] = {}
    failures: list[tuple[Path, str]] = []
    if args.workers == 1 or len(files) <= 1:
        for path in files:
            try:
                results[path] = _render_one(str(path), policy, tolerance)
            except (OSError, ValueError) as error:
                failures.append((path, str(error)))
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = {path: pool.submit(_render_one, str(path), policy, tolerance)
                       for path in files}
            for path, future in futures.items():
                try:
                    results[path] = future.result()
                except (OSError, ValueError) as error:
                    failures.append((path, str(error)))

    total_segments = 0
    total_elapsed = 0.0
    for path in files:
        if path not in results:
            continue
        text, segment_count, elapsed = results[path]
        (out_dir / (path.stem + ".json")).write_text(text, encoding="utf-8")
        total_segments += segment_count
        total_elapsed += elapsed

    processed = len(results)
    mean_ms = (total_elapsed / processed * 1000.0) if processed else 0.0
    print(
        f"pages={processed} failed={len(failures)} segments={total_segments} "
        f"mean_ms_per_page={mean_ms:.1f}"
    )
    for path, message in sorted(failures):
        print(f"imgseg: failed {path}: {message}", file=sys.stderr)
    return 1 if failures else 0


def _counts_report(correct: int, extracted: int, actual: int) -> EvalReport:
    precision, recall = precision_recall(correct, extracted, actual)
    return EvalReport(
        actual=actual,
        extracted=extracted,
        correct=correct,
        precision=precision,
        recall=recall,
        config_echo={"mode": "counts-only"},
    )


def cmd_eval(args) -> int:
    try:
        tolerance = check_fraction("tolerance", args.tolerance)
        match = MatchPolicy(
            mode=MatchMode(args.match), jaccard_threshold=args.jaccard_threshold
        )
        policy = _policy_from(args)
    except ValueError as error:
        print(f"imgseg: {error}", file=sys.stderr)
        return 2

    if args.counts:
        correct, extracted, actual = args.counts
        report = _counts_report(correct, extracted, actual)
    else:
        if not args.input or not args.truth:
            print("imgseg: eval needs an input directory and --truth (or --counts)",
                  file=sys.stderr)
            return 2
        try:
            truth_pages = load_ground_truth(Path(args.truth))
            input_dir = Path(args.input)
            if not input_dir.is_dir():
                raise ValueError(f"not a directory: {input_dir}")
            files = sorted(input_dir.glob("*.html"))
            missing = [path.name for path in files if path.name not in truth_pages]
            if missing:
                raise ValueError("no ground truth for: " + ", ".join(missing))
            pairs = []
            for path in files:
                tree = parse_html(path.read_bytes(), source_identifier=path.name,
                                  options=IngestOptions())
                pairs.append((tree, truth_pages[path.name]))
            report = evaluate_corpus(pairs, policy=policy, tolerance=tolerance, match=match)
        except (OSError, ValueError, KeyError) as error:
            print(f"imgseg: {error}", file=sys.stderr)
            return 2

    print(format_report_table(report))
    if args.out:
        Path(args.out).write_text(_dump(report.to_dict()), encoding="utf-8")
    return 0


def cmd_baseline_window(args) -> int:
    try:
        if args.window_n < 0:
            raise ValueError("--window-n must be >= 0")
        policy = _policy_from(args)
        data, source = _read_input(args.input)
        tree = parse_html(data, source_identifier=source, options=IngestOptions())
    except (OSError, ValueError) as error:
        print(f"imgseg: {error}", file=sys.stderr)
        return 2
    windows = [
        {
            "src": context.image.src,
            "alt": context.image.alt,
            "filename": context.image.filename,
            "before": list(context.before_words),
            "after": list(context.after_words),
        }
        for context in (
            fixed_window_context(tree, descriptor, args.window_n)
            for descriptor in collect_valid_images(tree, policy)
        )
    ]
    document = {
        "source": tree.source_identifier,
        "title": tree.page_title,
        "n": args.window_n,
        "windows": windows,
    }
    _emit(_dump(document), args.out)
    return 0


_HANDLERS = {
    "segment": cmd_segment,
    "batch": cmd_batch,
    "eval": cmd_eval,
    "baseline-window": cmd_baseline_window,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
