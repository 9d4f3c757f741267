#!/usr/bin/env python3
"""
Compile labeled point sets into width-one perceptron chains and check them.

Usage:
    python scripts/python/hull_chain.py compile --input data.csv --output net.json [--positive-class pos] [--bound B] [--svg out.svg]
    python scripts/python/hull_chain.py classify --network net.json --input points.csv --output labels.csv
    python scripts/python/hull_chain.py trace --network net.json --point "0.2,0.2"
    python scripts/python/hull_chain.py verify --network net.json --samples 100000 --epsilon 1e-6 --seed 42 [--store]
    python scripts/python/hull_chain.py render --network net.json --output region.svg --resolution 256
    python scripts/python/hull_chain.py info --network net.json
    python scripts/python/hull_chain.py fuzz --datasets 50 --samples 100000 [--store]

Exit codes: 0 success, 1 failed check or bad input, 2 usage error.
Failures are also written to stderr as `ERROR <code>: <detail>`.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

from hullchain.datasets import load_dataset, load_points, write_dataset, write_labels
from hullchain.errors import HullChainError
from hullchain.evaluator import classify_batch, forward
from hullchain.geometry import ClassLabel
from hullchain.harness import (
    DB_PATH,
    DEFAULT_EPSILON,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    CompileOptions,
    VerifyConfig,
    build_network,
    create_run_json_blob,
    report_payload,
    run_fuzz_campaign,
    store_run_json,
    verify_network,
)
from hullchain.network import summarize, validate
from hullchain.peeling import dataset_summary
from hullchain.render import render_svg
from hullchain.serialization import load_network, save_network

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

logger = logging.getLogger("hull_chain")


def configure_logging(verbose: bool) -> None:
    """Progress logs go to stderr as `[HH:MM:SS] [module] message`."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="[%(asctime)s] [%(name)s] %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


def report_error(code: str, detail: str) -> None:
    print(f"ERROR {code}: {detail}", file=sys.stderr)


class HullChainArgumentParser(argparse.ArgumentParser):
    """Usage errors also get an `ERROR Usage: <message>` line before argparse exits with 2."""

    def error(self, message: str):
        report_error("Usage", message)
        super().error(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from exc


def _facet_line(summary) -> str:
    return ", ".join(
        f"R{k}={facets} {label}"
        for k, (facets, label) in enumerate(zip(summary.facet_counts, summary.generator_classes), start=1)
    )


def cmd_compile(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.input)
    stats = dataset_summary(dataset)
    options = CompileOptions(
        positive_class=ClassLabel(args.positive_class),
        bound=args.bound,
        dedup_strategy=args.dedup,
        seed=args.seed,
    )
    built = build_network(dataset, options)
    summary = summarize(built.network)

    print(
        f"dataset: {len(dataset.points)} points (pos={stats.pos_count}, neg={stats.neg_count}), "
        f"{stats.conflicting_coordinates} conflicting coordinates, "
        f"{stats.within_class_duplicates} within-class duplicates"
    )
    print(f"after dedup ({args.dedup}): {len(built.dataset.points)} points")
    print(f"regions: m={summary.region_count}")
    print(f"units: {summary.unit_count}")
    print(f"facets per level: {_facet_line(summary)}")
    print(f"domain bound: B={summary.domain_bound!r}")

    if built.diagnostics:
        for diagnostic in built.diagnostics:
            report_error(diagnostic.code, str(diagnostic))
        return EXIT_FAILED

    save_network(built.network, args.output)
    print(f"saved network to {args.output}")
    if args.svg:
        Path(args.svg).write_text(render_svg(built.network, built.dataset, resolution=args.resolution), encoding="utf-8")
        print(f"rendered decision region to {args.svg}")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    points = load_points(args.input)
    labels = classify_batch(net, points, workers=args.workers)
    write_labels(args.output, points, labels)
    counts = Counter(str(label) for label in labels)
    print(f"classified {len(labels)} points (pos={counts['pos']}, neg={counts['neg']}) -> {args.output}")
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    trace = forward(net, args.point)
    print(f"bits: {trace.format_bits()}, label: {trace.label}")
    modules = ", ".join("-" if i is None else str(i) for i in trace.fired_units)
    print(f"first firing cut per module: {modules}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    config = VerifyConfig.get_config(
        samples=args.samples, epsilon=args.epsilon, seed=args.seed, workers=args.workers,
    )
    report = verify_network(net, config)
    print(
        f"samples: {report.samples} (retained {report.retained}, "
        f"near a cut {report.near_cut}, out of domain {report.out_of_domain})"
    )
    print(report.summary_line())
    if args.store:
        store_run_json(create_run_json_blob('verify', report_payload(report)), args.db_path)
        print(f"stored run in {args.db_path or DB_PATH}")

    if report.retained == 0:
        report_error("NoSamplesRetained", f"all {report.samples} samples were near a cut or out of domain")
        return EXIT_FAILED
    if not report.passed:
        for mismatch in report.mismatches:
            report_error(
                "VerificationMismatch",
                f"x={mismatch.point} network={mismatch.network_label} oracle={mismatch.oracle_label}",
            )
        print(f"✗ {report.mismatch_count} mismatches")
        return EXIT_FAILED
    print("✓ network agrees with the oracle")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    dataset = load_dataset(args.input) if args.input else None
    svg = render_svg(net, dataset, resolution=args.resolution, workers=args.workers)
    Path(args.output).write_text(svg, encoding="utf-8")
    print(f"rendered {args.resolution}x{args.resolution} raster to {args.output}")
    return EXIT_OK


def cmd_info(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    summary = summarize(net)
    print(f"dimension: {summary.dimension}")
    print(f"positive class: {summary.positive_class}")
    print(f"domain bound: B={summary.domain_bound!r}")
    print(f"regions: m={summary.region_count}")
    print(f"units: {summary.unit_count}")
    print(f"facets per level: {_facet_line(summary)}")
    diagnostics = validate(net)
    for diagnostic in diagnostics:
        report_error(diagnostic.code, str(diagnostic))
    return EXIT_FAILED if diagnostics else EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    print(
        f"Fuzzing {args.datasets} random datasets "
        f"(up to {args.points} points per class, {args.samples} samples each, seed {args.seed})...\n"
    )
    outcomes = run_fuzz_campaign(
        datasets=args.datasets,
        max_points_per_class=args.points,
        duplicate_rate=args.duplicate_rate,
        samples=args.samples,
        epsilon=args.epsilon,
        seed=args.seed,
        workers=args.workers,
        on_outcome=lambda outcome: print(outcome.summary_line(), flush=True),
    )
    failed = [o for o in outcomes if not o.passed]
    print(f"\n{'=' * 80}")
    print(f"Datasets passed: {len(outcomes) - len(failed)}/{len(outcomes)}")
    print(f"{'=' * 80}")

    if args.store:
        payload = {
            "datasets": len(outcomes),
            "failed": [o.index for o in failed],
            "seed": args.seed,
            "outcomes": [o.summary_line() for o in outcomes],
        }
        store_run_json(create_run_json_blob('fuzz', payload), args.db_path)
        print(f"stored run in {args.db_path or DB_PATH}")

    for outcome in failed:
        details = outcome.diagnostics + outcome.problems
        if outcome.training_errors:
            details.append(f"{outcome.training_errors} training points misclassified")
        if outcome.report is not None and outcome.report.retained == 0:
            details.append("no samples retained")
        elif outcome.report is not None and not outcome.report.passed:
            details.append(f"{outcome.report.mismatch_count} oracle mismatches")
        report_error("FuzzFailure", f"dataset {outcome.index}: {'; '.join(details)}")
        if args.dump_dir and outcome.dataset is not None:
            dump = Path(args.dump_dir) / f"fuzz_{args.seed}_{outcome.index:03d}.csv"
            dump.parent.mkdir(parents=True, exist_ok=True)
            write_dataset(dump, outcome.dataset)
            print(f"wrote dataset {outcome.index} to {dump}")
    return EXIT_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = HullChainArgumentParser(
        description="Compile two-class point sets into deep width-one perceptron chains and verify them."
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Show debug progress on stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('compile', help='dedup -> peel -> compile -> validate -> save')
    p.add_argument('--input', required=True, help='Labeled CSV with header x1,...,xn,label')
    p.add_argument('--output', required=True, help='Network JSON to write')
    p.add_argument('--positive-class', choices=['pos', 'neg'], default='pos',
                   help='Class enclosed by the outermost hull R1 (default: pos)')
    p.add_argument('--bound', type=float, default=None,
                   help='Domain bound B on ||x~|| (default: 2 x the largest training ||x~||)')
    p.add_argument('--dedup', choices=['drop', 'random'], default='drop',
                   help='Cross-class duplicates: drop both, or keep one label at random (default: drop)')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Seed for --dedup random')
    p.add_argument('--svg', default=None, help='Also render the decision region to this SVG')
    p.add_argument('--resolution', type=_positive_int, default=64, help='Raster resolution for --svg (default: 64)')
    p.set_defaults(handler=cmd_compile)

    p = sub.add_parser('classify', help='Label every row of a points CSV')
    p.add_argument('--network', required=True)
    p.add_argument('--input', required=True, help='CSV with header x1,...,xn[,label]')
    p.add_argument('--output', required=True, help='CSV to write with columns x1,...,xn,label')
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser('trace', help='Print the per-unit bit trace for one point')
    p.add_argument('--network', required=True)
    p.add_argument('--point', required=True, type=_parse_point, help='Comma-separated coordinates, e.g. "0.2,0.2"')
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser('verify', help='Differential test against the geometric oracle')
    p.add_argument('--network', required=True)
    p.add_argument('--samples', type=_positive_int, default=DEFAULT_SAMPLES)
    p.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON,
                   help='Skip samples closer than this to any cut (default: 1e-6)')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    p.add_argument('--store', action='store_true', help='Append the report to the DuckDB run ledger')
    p.add_argument('--db-path', default=None, help=f'DuckDB file for --store (default: {DB_PATH})')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('render', help='Render the decision region as SVG')
    p.add_argument('--network', required=True)
    p.add_argument('--output', required=True)
    p.add_argument('--resolution', type=_positive_int, default=256)
    p.add_argument('--input', default=None, help='Optional labeled CSV to overlay')
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    p.set_defaults(handler=cmd_render)

    p = sub.add_parser('info', help='Summarize and validate a stored network')
    p.add_argument('--network', required=True)
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser('fuzz', help='Run the full pipeline on random datasets')
    p.add_argument('--datasets', type=_positive_int, default=50)
    p.add_argument('--points', type=_positive_int, default=200, help='Max points per class (default: 200)')
    p.add_argument('--duplicate-rate', type=float, default=0.01)
    p.add_argument('--samples', type=_positive_int, default=DEFAULT_SAMPLES)
    p.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON)
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    p.add_argument('--store', action='store_true', help='Append the campaign summary to the DuckDB run ledger')
    p.add_argument('--dump-dir', default=None,
                   help='Write each failing dataset here as CSV, ready for compile --input')
    p.add_argument('--db-path', default=None, help=f'DuckDB file for --store (default: {DB_PATH})')
    p.set_defaults(handler=cmd_fuzz)
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except HullChainError as e:
        report_error(e.code, e.detail)
        return EXIT_FAILED
    except Exception as e:
        logger.debug("unexpected failure", exc_info=True)
        report_error("Internal", str(e))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
