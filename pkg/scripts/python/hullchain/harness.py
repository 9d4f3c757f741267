"""Pipeline orchestration and differential verification.

``build_network`` runs dedup -> peel -> compile; ``verify_network`` compares
the chain against the geometric oracle on seeded uniform samples;
``run_fuzz_campaign`` repeats the whole pipeline on random datasets. Reports
can be stored as raw JSON blobs in DuckDB.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Callable, Literal

import duckdb
import numpy as np

from .datasets import random_dataset
from .errors import EmptyInput, EmptyPositiveClass, MissingHulls
from .evaluator import classify_batch, forward_batch, in_domain
from .geometry import TOLERANCE, BoundingBox, ClassLabel, LabeledPoint, Polytope, dot_lifted, polytope_contains
from .network import DEFAULT_BOUND_FACTOR, ChainNetwork, Diagnostic, compile_network, default_bound, validate
from .oracle import oracle_classify
from .peeling import Dataset, DedupStrategy, dedup, peel

logger = logging.getLogger(__name__)

# Configuration
DB_PATH = os.getenv('HULLCHAIN_DB_PATH', 'data/duckdb/runs.duckdb')
DEFAULT_WORKERS = int(os.getenv('HULLCHAIN_WORKERS', '4'))
DEFAULT_SAMPLES = int(os.getenv('HULLCHAIN_VERIFY_SAMPLES', '100000'))
DEFAULT_EPSILON = float(os.getenv('HULLCHAIN_VERIFY_EPSILON', '1e-6'))
DEFAULT_SEED = int(os.getenv('HULLCHAIN_SEED', '42'))

MAX_REPORTED_MISMATCHES = 10


@dataclass
class CompileOptions:
    """How a dataset becomes a network."""
    positive_class: ClassLabel = ClassLabel.POS
    bound: float | None = None
    bound_factor: float = DEFAULT_BOUND_FACTOR
    dedup_strategy: DedupStrategy = 'drop'
    seed: int = DEFAULT_SEED


@dataclass
class VerifyConfig:
    """Sampling parameters for a differential verification run."""
    samples: int
    epsilon: float
    seed: int
    workers: int
    padding: float = 0.1

    @classmethod
    def get_config(
        cls,
        samples: int | None = None,
        epsilon: float | None = None,
        seed: int | None = None,
        workers: int | None = None,
        padding: float | None = None,
    ) -> 'VerifyConfig':
        """Resolve unset fields from the environment defaults."""
        return cls(
            samples=DEFAULT_SAMPLES if samples is None else samples,
            epsilon=DEFAULT_EPSILON if epsilon is None else epsilon,
            seed=DEFAULT_SEED if seed is None else seed,
            workers=DEFAULT_WORKERS if workers is None else workers,
            padding=0.1 if padding is None else padding,
        )


@dataclass
class Mismatch:
    point: tuple[float, ...]
    network_label: str
    oracle_label: str


@dataclass
class VerificationReport:
    samples: int
    retained: int
    near_cut: int
    out_of_domain: int
    agreements: int
    seed: int
    epsilon: float
    padding: float = 0.1
    mismatches: list[Mismatch] = field(default_factory=list)
    mismatch_count: int = 0

    @property
    def passed(self) -> bool:
        return self.retained > 0 and self.mismatch_count == 0 and self.agreements == self.retained

    def summary_line(self) -> str:
        return f"agreement: {self.agreements}/{self.retained}"


@dataclass
class BuildResult:
    dataset: Dataset
    hulls: list[Polytope]
    network: ChainNetwork
    diagnostics: list[Diagnostic]


def build_network(dataset: Dataset, options: CompileOptions | None = None) -> BuildResult:
    """dedup -> peel -> compile -> validate."""
    options = options or CompileOptions()
    labeled = dataset.with_positive_class(options.positive_class)
    deduped = dedup(labeled, strategy=options.dedup_strategy, seed=options.seed)
    hulls = peel(deduped)
    bound = options.bound
    if bound is None:
        bound = default_bound((p.coords for p in deduped.points), factor=options.bound_factor)
    net = compile_network(hulls, bound)
    diagnostics = validate(net)
    logger.debug("built network: %d regions, %d units, %d diagnostics", len(hulls), len(net.units), len(diagnostics))
    return BuildResult(deduped, hulls, net, diagnostics)


def nearest_cut_distances(hulls: list[Polytope] | tuple[Polytope, ...], points: np.ndarray) -> np.ndarray:
    """Column-wise ``nearest_cut_distance`` over many points."""
    columns = [points[:, j] for j in range(points.shape[1])] + [1.0]
    best = np.full(len(points), np.inf)
    for hull in hulls:
        for cut in hull.cuts:
            norm = math.hypot(*cut.normal)
            if norm > 0.0:
                best = np.minimum(best, np.abs(dot_lifted(cut.weights, columns)) / norm)
    return best


def sample_points(box: BoundingBox, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(box.lower, box.upper, size=(samples, len(box.lower)))


def _oracle_labels(hulls, points: np.ndarray, workers: int, chunk_size: int = 4096) -> list[ClassLabel]:
    chunks = [points[i:i + chunk_size] for i in range(0, len(points), chunk_size)]

    def label_chunk(chunk: np.ndarray) -> list[ClassLabel]:
        return [oracle_classify(hulls, x) for x in chunk.tolist()]

    if workers <= 1 or len(chunks) <= 1:
        results = [label_chunk(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(label_chunk, chunks))
    return [label for result in results for label in result]


def verify_network(net: ChainNetwork, config: VerifyConfig | None = None) -> VerificationReport:
    """Differential test of the chain against ``oracle_classify`` on uniform samples."""
    config = config or VerifyConfig.get_config()
    if not net.hulls:
        raise MissingHulls("network carries no hulls to verify against")
    if config.samples < 1:
        raise EmptyInput(f"need at least one sample, got {config.samples}")

    box = BoundingBox.around(v for hull in net.hulls for v in hull.vertices).padded(config.padding)
    points = sample_points(box, config.samples, config.seed)

    domain = in_domain(net, points)
    if not domain.all():
        logger.warning("%d samples fall outside the domain bound and are skipped", int((~domain).sum()))
    near = nearest_cut_distances(net.hulls, points) < config.epsilon
    keep = domain & ~near
    retained = points[keep]
    logger.debug("verify: %d samples, %d retained", len(points), len(retained))

    network_labels = classify_batch(net, retained, workers=config.workers)
    oracle_labels = _oracle_labels(net.hulls, retained, config.workers)

    mismatches = [
        Mismatch(tuple(x), str(a), str(b))
        for x, a, b in zip(retained.tolist(), network_labels, oracle_labels)
        if a is not b
    ]
    return VerificationReport(
        samples=len(points),
        retained=len(retained),
        near_cut=int((domain & near).sum()),
        out_of_domain=int((~domain).sum()),
        agreements=len(retained) - len(mismatches),
        seed=config.seed,
        epsilon=config.epsilon,
        padding=config.padding,
        mismatches=mismatches[:MAX_REPORTED_MISMATCHES],
        mismatch_count=len(mismatches),
    )


def training_errors(net: ChainNetwork, dataset: Dataset) -> list[LabeledPoint]:
    """Training points the network labels differently from their own label."""
    if not dataset.points:
        return []
    bits = forward_batch(net, [p.coords for p in dataset.points])
    return [
        p for p, last in zip(dataset.points, bits[:, -1].tolist())
        if (net.positive_class if last == 1 else net.negative_class) is not p.label
    ]


def peel_problems(hulls: list[Polytope], point_count: int) -> list[str]:
    """Termination and strict-progress checks on a peel result."""
    problems = []
    if len(hulls) > point_count + 1:
        problems.append(f"{len(hulls)} regions for {point_count} points")
    for outer, inner in zip(hulls, hulls[1:]):
        inside = [v for v in outer.vertices if polytope_contains(inner, v)]
        if inside:
            problems.append(f"vertex {inside[0]} of R{outer.level} lies inside R{inner.level}")
    return problems


@dataclass
class DatasetOutcome:
    index: int
    points: int
    regions: int = 0
    units: int = 0
    training_errors: int = 0
    diagnostics: list[str] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)
    report: VerificationReport | None = None
    skipped: str | None = None
    # the generated dataset before dedup, for replaying failures
    dataset: Dataset | None = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return (
            not self.training_errors
            and not self.diagnostics
            and not self.problems
            and self.report is not None
            and self.report.passed
        )

    def summary_line(self) -> str:
        if self.skipped:
            return f"dataset {self.index:3d}: skipped ({self.skipped})"
        status = "ok" if self.passed else "FAIL"
        agreement = self.report.summary_line() if self.report else "agreement: n/a"
        return (
            f"dataset {self.index:3d}: {status} | points={self.points} regions={self.regions} "
            f"units={self.units} training_errors={self.training_errors} | {agreement}"
        )


def run_fuzz_campaign(
    datasets: int,
    max_points_per_class: int = 200,
    duplicate_rate: float = 0.01,
    samples: int = DEFAULT_SAMPLES,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    on_outcome: Callable[[DatasetOutcome], None] | None = None,
) -> list[DatasetOutcome]:
    """Random datasets through the full pipeline, each verified against the oracle."""
    rng = np.random.default_rng(seed)
    outcomes = []
    for index in range(1, datasets + 1):
        raw = random_dataset(rng, max_points_per_class, duplicate_rate)
        try:
            built = build_network(raw, CompileOptions(seed=seed))
        except EmptyPositiveClass as exc:
            outcome = DatasetOutcome(index, len(raw.points), skipped=exc.detail, dataset=raw)
        else:
            outcome = DatasetOutcome(
                index,
                points=len(built.dataset.points),
                regions=len(built.hulls),
                units=len(built.network.units),
                training_errors=len(training_errors(built.network, built.dataset)),
                diagnostics=[str(d) for d in built.diagnostics],
                problems=peel_problems(built.hulls, len(built.dataset.points)),
                report=verify_network(
                    built.network,
                    VerifyConfig.get_config(samples=samples, epsilon=epsilon, seed=seed + index, workers=workers),
                ),
                dataset=raw,
            )
        if on_outcome is not None:
            on_outcome(outcome)
        outcomes.append(outcome)
    return outcomes


def create_run_json_blob(
    kind: Literal['verify', 'fuzz'],
    payload: dict,
    source: str = 'cli',
) -> dict:
    """Standard run-ledger record (ready to JSON serialize)."""
    return {
        "run_kind": kind,
        "generated_at": datetime.now().isoformat(),
        "tolerance": TOLERANCE,
        "source": source,
        "result": payload,
    }


def report_payload(report: VerificationReport) -> dict:
    payload = asdict(report)
    payload["passed"] = report.passed
    return payload


def store_run_json(run_json: dict, db_path: str | None = None) -> None:
    """Insert a run record into raw_verification_runs (creates the table if missing)."""
    db_path = db_path or DB_PATH
    directory = os.path.dirname(db_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with duckdb.connect(db_path) as conn:
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS raw_verification_runs (
                raw_run_id UUID DEFAULT gen_random_uuid(),
                run_json JSON,
                loaded_at TIMESTAMP DEFAULT now()
            )
            """
        )
        conn.execute(
            "INSERT INTO raw_verification_runs (run_json) VALUES (?)",
            [json.dumps(run_json)]
        )
