"""Seeded experiment harness: batch runs, aggregate tables, value-space export.

Within one experiment every variant sees the identical initial point for each
seed index, so iteration counts are comparable across variants.  All random
streams derive from a single seed through numpy's SeedSequence spawning, and
results are collected in seed order regardless of execution order, so a fixed
seed reproduces every output byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cones import ConeSpec
from .linesearch import WolfeParams
from .manifolds import ManifoldPoint, manifold_from_name
from .objectives import VectorObjective, problem_from_spec
from .solver import BetaKind, RunReport, nvrcg_run, parse_beta_kind


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Everything needed to reproduce one batch experiment."""

    problem: dict
    manifold: str
    variants: tuple
    wolfe: WolfeParams
    runs: int
    seed: int
    max_iter: int = 10000
    output_dir: Path | None = None
    assert_level: str = "descent"
    workers: int = 1
    transport_eval: str = "current"
    qp_tol: float = 1e-10

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        variants = tuple(
            v if isinstance(v, BetaKind) else parse_beta_kind(v) for v in self.variants
        )
        if not variants:
            raise ValueError("at least one variant is required")
        object.__setattr__(self, "variants", variants)
        if self.output_dir is not None:
            object.__setattr__(self, "output_dir", Path(self.output_dir))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        wolfe = d.get("wolfe", {})
        if not isinstance(wolfe, WolfeParams):
            wolfe = WolfeParams.from_dict(wolfe)
        return cls(
            problem=d["problem"],
            manifold=d["manifold"],
            variants=tuple(d["variants"]),
            wolfe=wolfe,
            runs=int(d["runs"]),
            seed=int(d["seed"]),
            max_iter=int(d.get("max_iter", 10000)),
            output_dir=d.get("output_dir"),
            assert_level=d.get("assert_level", "descent"),
            workers=int(d.get("workers", 1)),
            transport_eval=d.get("transport_eval", "current"),
            qp_tol=float(d.get("qp_tol", 1e-10)),
        )

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def scientific_dict(self) -> dict:
        """Fields that determine the results (excludes output location/workers)."""
        w = self.wolfe
        return {
            "problem": self.problem,
            "manifold": self.manifold,
            "variants": [v.value for v in self.variants],
            "wolfe": {
                "c1": w.c1,
                "c2": w.c2,
                "t_init": w.t_init,
                "t_min": w.t_min,
                "max_expansions": w.max_expansions,
                "max_zoom": w.max_zoom,
                "strong": w.strong,
            },
            "runs": self.runs,
            "seed": self.seed,
            "max_iter": self.max_iter,
            "assert_level": self.assert_level,
            "transport_eval": self.transport_eval,
            "qp_tol": self.qp_tol,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.scientific_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class AggregateRow:
    """One table row: per-variant means and termination counts."""

    variant: BetaKind
    mean_iterations: float
    success_count: int
    stagnation_count: int
    mean_final_norm_v: float


def initial_points(config: ExperimentConfig) -> list[ManifoldPoint]:
    """Seeded initial points, one per run index, shared by every variant."""
    man = manifold_from_name(config.manifold)
    root = np.random.SeedSequence(config.seed)
    return [
        man.random_point(np.random.default_rng(child))
        for child in root.spawn(config.runs)
    ]


def _run_one(
    cone: ConeSpec,
    obj: VectorObjective,
    x0: ManifoldPoint,
    variant: BetaKind,
    config: ExperimentConfig,
) -> RunReport:
    return nvrcg_run(
        cone,
        obj,
        x0,
        variant,
        config.wolfe,
        max_iter=config.max_iter,
        assert_level=config.assert_level,
        qp_tol=config.qp_tol,
        transport_eval=config.transport_eval,
    )


def run_batch(config: ExperimentConfig) -> dict[BetaKind, list[RunReport]]:
    """Execute runs x variants solver runs; reports keyed by variant, seed order."""
    obj = problem_from_spec(config.problem)
    cone = ConeSpec.multiobjective(obj.m)
    points = initial_points(config)
    tasks = [(v, s) for v in config.variants for s in range(config.runs)]
    results: dict[tuple, RunReport] = {}
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {
                (v, s): pool.submit(_run_one, cone, obj, points[s], v, config)
                for v, s in tasks
            }
        results = {key: fut.result() for key, fut in futures.items()}
    else:
        for v, s in tasks:
            results[(v, s)] = _run_one(cone, obj, points[s], v, config)
    return {
        v: [results[(v, s)] for s in range(config.runs)] for v in config.variants
    }


def aggregate(config: ExperimentConfig, batch: dict) -> list[AggregateRow]:
    rows = []
    for variant in config.variants:
        reports = batch[variant]
        rows.append(
            AggregateRow(
                variant=variant,
                mean_iterations=float(np.mean([r.iterations for r in reports])),
                success_count=sum(r.termination == "critical" for r in reports),
                stagnation_count=sum(r.termination == "step_stagnated" for r in reports),
                mean_final_norm_v=float(np.mean([r.final_norm_v for r in reports])),
            )
        )
    return rows


def run_experiment(config: ExperimentConfig) -> list[AggregateRow]:
    """Run the full batch and aggregate one row per variant.

    Stagnated runs are included in the iteration means; the success and
    stagnation counts report the split separately.
    """
    return aggregate(config, run_batch(config))


_COLUMNS = (
    "variant",
    "mean_iterations",
    "success_count",
    "stagnation_count",
    "mean_final_norm_v",
)


def _formatted_cells(row: AggregateRow) -> list[str]:
    return [
        row.variant.value,
        f"{row.mean_iterations:.2f}",
        str(row.success_count),
        str(row.stagnation_count),
        f"{row.mean_final_norm_v:.2e}",
    ]


def emit_table(rows: list[AggregateRow], format: str = "csv") -> str:
    """Render aggregate rows as csv, json, or markdown text.

    The json form keeps full float precision so it round-trips exactly; the
    tabular forms format iteration means to two decimals.
    """
    if not rows:
        raise ValueError("rows must be nonempty")
    if format == "csv":
        lines = [",".join(_COLUMNS)]
        lines += [",".join(_formatted_cells(r)) for r in rows]
        return "\n".join(lines) + "\n"
    if format == "json":
        payload = [
            {
                "variant": r.variant.value,
                "mean_iterations": r.mean_iterations,
                "success_count": r.success_count,
                "stagnation_count": r.stagnation_count,
                "mean_final_norm_v": r.mean_final_norm_v,
            }
            for r in rows
        ]
        return json.dumps(payload, indent=2) + "\n"
    if format == "markdown":
        lines = ["| " + " | ".join(_COLUMNS) + " |"]
        lines.append("|" + "|".join(" --- " for _ in _COLUMNS) + "|")
        lines += ["| " + " | ".join(_formatted_cells(r)) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {format!r}")


def rows_from_json(text: str) -> list[AggregateRow]:
    return [
        AggregateRow(
            variant=BetaKind(d["variant"]),
            mean_iterations=d["mean_iterations"],
            success_count=d["success_count"],
            stagnation_count=d["stagnation_count"],
            mean_final_norm_v=d["mean_final_norm_v"],
        )
        for d in json.loads(text)
    ]


def _header_comments(config: ExperimentConfig) -> str:
    return (
        f"# seed={config.seed}\n"
        f"# config_hash={config.config_hash()}\n"
        f"# version={__version__}\n"
    )


def write_experiment(
    config: ExperimentConfig, format: str = "csv"
) -> tuple[list[AggregateRow], Path]:
    """Run the experiment and write the aggregate table under output_dir."""
    if config.output_dir is None:
        raise ValueError("config has no output_dir")
    rows = run_experiment(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = {"csv": "csv", "json": "json", "markdown": "md"}[format]
    path = out / f"table.{ext}"
    body = emit_table(rows, format)
    if format == "csv":
        body = _header_comments(config) + body
    path.write_text(body, newline="\n")
    return rows, path


def export_pareto_cloud(config: ExperimentConfig, out_dir=None) -> list[Path]:
    """Write per-variant final-value clouds and, on the circle, the image curve.

    ``values_<variant>.csv`` holds the objective vectors of runs that
    terminated critical.  ``front_curve.csv`` samples the objective over a
    dense angular grid when the manifold is the circle in R^2.
    """
    obj = problem_from_spec(config.problem)
    if obj.m != 2:
        raise ValueError(f"value-space export needs m = 2, got m = {obj.m}")
    out = Path(out_dir) if out_dir is not None else config.output_dir
    if out is None:
        raise ValueError("no output directory given")
    out.mkdir(parents=True, exist_ok=True)
    header = _header_comments(config)
    batch = run_batch(config)
    written = []
    for variant in config.variants:
        rows = [
            r.final_F for r in batch[variant] if r.termination == "critical"
        ]
        path = out / f"values_{variant.value}.csv"
        lines = [header + "f1,f2"]
        lines += [f"{f[0]:.17g},{f[1]:.17g}" for f in rows]
        path.write_text("\n".join(lines) + "\n", newline="\n")
        written.append(path)
    man = manifold_from_name(config.manifold)
    if man.name == "sphere:2":
        grid = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
        path = out / "front_curve.csv"
        lines = [header + "f1,f2"]
        for ang in grid:
            x = ManifoldPoint(np.array([np.cos(ang), np.sin(ang)]), man)
            f = obj.eval_F(x)
            lines.append(f"{f[0]:.17g},{f[1]:.17g}")
        path.write_text("\n".join(lines) + "\n", newline="\n")
        written.append(path)
    return written
