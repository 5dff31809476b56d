"""Success probability, repetition counts, and time-to-solution bookkeeping.

A run "succeeds" when its best assignment decodes and passes the feasibility
checker (the default criterion) or when its energy reaches a target. The
repetition count to reach a solution with probability 0.99 follows
log(1 - 0.99) / log(1 - theta), clamped below at one run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, asdict, replace
from pathlib import Path
from statistics import median
from typing import Sequence

from .encoder import EncodeOptions, FuelCounts, encode
from .feasibility import check_bits
from .geometry import CoreLayout, builtin_core
from .model import to_ising
from .solvers import SolveParams, run_single_restart

# numerator of the repetition formula; shared with the denominator's log so
# theta = 0.99 gives exactly 1.0
_LOG_MISS = math.log(1.0 - 0.99)

RESULTS_DIR_ENV = "CORELOAD_RESULTS_DIR"

# The seven built-in benchmark instances: core name -> per-level batch sizes.
TABLE1_SUITE: tuple[tuple[str, FuelCounts], ...] = (
    ("core13", FuelCounts(8, 4, 1)),
    ("core37", FuelCounts(16, 17, 4)),
    ("core69", FuelCounts(33, 21, 15)),
    ("core97", FuelCounts(36, 36, 25)),
    ("core121", FuelCounts(49, 45, 36)),
    ("pwr193", FuelCounts(64, 80, 49)),
    ("core241", FuelCounts(75, 100, 65)),
)

TABLE1_COUNTS: dict[str, FuelCounts] = dict(TABLE1_SUITE)


def r99(theta: float) -> float:
    """Repetitions needed to succeed with probability 0.99, clamped to >= 1.

    theta = 0 returns +inf; theta outside [0, 1] is rejected.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"success probability {theta} outside [0, 1]")
    if theta == 0.0:
        return math.inf
    if theta == 1.0:
        return 1.0
    return max(1.0, _LOG_MISS / math.log(1.0 - theta))


def tts(tau_ms: float, theta: float) -> float:
    """Time to solution: single-run time times the repetition count."""
    if tau_ms <= 0:
        raise ValueError("single-run time must be positive")
    return tau_ms * r99(theta)


@dataclass(frozen=True)
class SuccessEstimate:
    runs: int
    successes: int
    criterion: str  # "feasible" or "energy"
    run_times_ms: tuple[float, ...] = ()

    @property
    def theta(self) -> float:
        return self.successes / self.runs


def estimate_success(model, layout: CoreLayout, counts: FuelCounts,
                     options: EncodeOptions, method: str, params: SolveParams,
                     runs: int, seed: int | None = None, *,
                     criterion: str = "feasible",
                     energy_target: float = 0.0) -> SuccessEstimate:
    """Run `runs` independent single-restart solves and score each one.

    Run r draws from stream (seed, r), so estimates are reproducible and agree
    with the per-restart energies of one multi-restart solve.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    if criterion not in ("feasible", "energy"):
        raise ValueError(f"unknown success criterion {criterion!r}")
    if seed is not None:
        params = replace(params, seed=seed)
    if method == "simcim" and isinstance(model, QuboModel):
        model = to_ising(model)  # convert once instead of per run
    successes = 0
    times = []
    for r in range(runs):
        bits, energy, ms = run_single_restart(model, method, params, r)
        times.append(ms)
        if criterion == "feasible":
            if check_bits(bits, layout, counts, options).feasible:
                successes += 1
        elif energy <= energy_target:
            successes += 1
    return SuccessEstimate(
        runs=runs,
        successes=successes,
        criterion=criterion,
        run_times_ms=tuple(times),
    )


@dataclass(frozen=True)
class BenchmarkRecord:
    instance: str
    solver: str
    n_vars: int
    params_digest: str
    runs: int
    successes: int
    theta: float
    r99: float
    tau_ms: float
    tts_ms: float
    seed: int
    timestamp: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "BenchmarkRecord":
        return cls(**json.loads(line))


def params_digest(params: SolveParams) -> str:
    doc = json.dumps(asdict(params), sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()[:12]


def default_results_dir() -> Path:
    return Path(os.environ.get(RESULTS_DIR_ENV, "results"))


def append_records(path, records: Sequence[BenchmarkRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_records(path) -> list[BenchmarkRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [BenchmarkRecord.from_json(line) for line in lines if line.strip()]


def export_csv(records: Sequence[BenchmarkRecord], path) -> None:
    """Plot-ready table, one row per (instance, solver)."""
    header = "instance,solver,n_vars,theta,r99,tau_ms,tts_ms,seed"
    rows = [header]
    for rec in records:
        rows.append(
            f"{rec.instance},{rec.solver},{rec.n_vars},{rec.theta!r},"
            f"{rec.r99!r},{rec.tau_ms!r},{rec.tts_ms!r},{rec.seed}"
        )
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def run_suite(solvers: Sequence[str], runs: int = 100,
              params: SolveParams = SolveParams(),
              options: EncodeOptions = EncodeOptions(),
              max_core: int | None = None,
              log_path=None, inner_depth: int = 2) -> list[BenchmarkRecord]:
    """Benchmark the built-in instances with each named solver.

    One record per (instance, solver); records are appended to the results log
    as they complete. Append failures are reported and the suite continues.
    """
    for tag in solvers:
        if tag not in ("sa", "simcim"):
            raise ValueError(f"unknown solver tag {tag!r}; suite accepts sa and simcim")
    if log_path is None:
        log_path = default_results_dir() / "benchmarks.jsonl"
    digest = params_digest(params)
    records = []
    for core_name, counts in TABLE1_SUITE:
        layout = builtin_core(core_name, inner_depth)
        if max_core is not None and layout.n > max_core:
            continue
        model = encode(layout, counts, options)
        for tag in solvers:
            estimate = estimate_success(
                model, layout, counts, options, tag, params, runs
            )
            theta = estimate.theta
            tau = float(median(estimate.run_times_ms))
            rec = BenchmarkRecord(
                instance=core_name,
                solver=tag,
                n_vars=model.n,
                params_digest=digest,
                runs=estimate.runs,
                successes=estimate.successes,
                theta=theta,
                r99=r99(theta),
                tau_ms=tau,
                tts_ms=tau * r99(theta),
                seed=params.seed,
                timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            )
            records.append(rec)
            try:
                append_records(log_path, [rec])
            except OSError as exc:
                print(f"warning: could not append record for {core_name}/{tag}: {exc}",
                      file=sys.stderr)
    return records
