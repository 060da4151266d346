"""Throughput and setup-cost experiment drivers.

Throughput methodology: per configuration the kernel output is first
verified against the linear-scan oracle (timing never assumes
correctness), one warm-up pass runs untimed, the pass count per
measurement is scaled so each measurement spans at least ``min_time``
seconds on the monotonic clock, and the reported figure is the median
over the requested repetitions, converted to million searches per
second.  Setup cost is excluded: structures are prepared before timing
starts.

Setup-cost methodology: per size, ``samples`` independent partitions are
generated, and for each one the scale-factor computation plus table
construction is timed; the report aggregates the growth-loop increment
count and nanoseconds divided by the array size.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from ..batch import ALGORITHMS, LaneConfig, batch_search, prepare
from ..direct import build_index, compute_h_r
from ..errors import InfeasibleError
from ..partition import gen_uniform_gap_partition, linear_scan_oracle_batch


@dataclass(frozen=True)
class ThroughputRow:
    algorithm: str
    precision: str
    lane_width: int
    size: int
    throughput_msps: float
    queries: int
    repetitions: int


@dataclass(frozen=True)
class InfeasibleSkipped:
    algorithm: str
    size: int
    precision: str
    cause: str


@dataclass(frozen=True)
class ThroughputReport:
    rows: list[ThroughputRow] = field(default_factory=list)
    skipped: list[InfeasibleSkipped] = field(default_factory=list)


@dataclass(frozen=True)
class SetupStatsRow:
    size: int
    samples: int
    h_updates_mean: float
    h_updates_min: float
    h_updates_max: float
    h_updates_stdev: float
    setup_ns_per_elem_mean: float
    setup_ns_per_elem_min: float
    setup_ns_per_elem_max: float
    setup_ns_per_elem_stdev: float


@dataclass(frozen=True)
class SetupStatsReport:
    precision: str
    rows: list[SetupStatsRow] = field(default_factory=list)
    infeasible: dict[int, int] = field(default_factory=dict)


def aligned_empty(count: int, dtype, boundary: int = 32) -> np.ndarray:
    """Uninitialized array whose data pointer sits on ``boundary`` bytes."""
    itemsize = np.dtype(dtype).itemsize
    raw = np.empty(count * itemsize + boundary, dtype=np.uint8)
    offset = (-raw.ctypes.data) % boundary
    return raw[offset : offset + count * itemsize].view(dtype)


def _aligned_queries(p, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.uniform(float(p.values[0]), float(p.values[-1]), size=count)
    z = z.astype(p.values.dtype)
    top = p.values[-1]
    z[z >= top] = np.nextafter(top, p.values.dtype.type(-np.inf))
    out = aligned_empty(count, p.values.dtype)
    out[:] = z
    return out


def _measure(run, repetitions: int, min_time: float) -> float:
    """Median seconds per pass, scaling passes to fill ``min_time`` each."""
    t0 = time.perf_counter()
    run()  # warm-up, also calibrates
    once = time.perf_counter() - t0
    inner = max(1, int(min_time / max(once, 1e-9)) + 1) if once < min_time else 1
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        for _ in range(inner):
            run()
        samples.append((time.perf_counter() - t0) / inner)
    return statistics.median(samples)


def run_throughput(
    sizes,
    precisions,
    algorithms,
    d_widths,
    queries: int = 1 << 20,
    seed: int = 42,
    repetitions: int = 5,
    gap_lo: float = 1.0,
    gap_hi: float = 5.0,
    qbits: int = 32,
    threads: int | None = None,
    min_time: float = 0.1,
) -> ThroughputReport:
    """Time every (algorithm, precision, size, lane width) combination.

    Direct-family configurations whose construction is infeasible are
    recorded as skipped, never fatal.  Every timed configuration is
    verified against the oracle first.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if queries < 1:
        raise ValueError("queries must be >= 1")
    unknown = set(algorithms) - set(ALGORITHMS)
    if unknown:
        raise ValueError(f"unknown algorithms: {sorted(unknown)}")

    rows: list[ThroughputRow] = []
    skipped: list[InfeasibleSkipped] = []
    root = np.random.SeedSequence(seed)
    for precision in precisions:
        for size in sizes:
            part_seed, query_seed = root.spawn(1)[0].generate_state(2)
            p = gen_uniform_gap_partition(
                size, gap_lo, gap_hi, seed=int(part_seed), precision=precision
            )
            z = _aligned_queries(p, queries, int(query_seed))
            expected = linear_scan_oracle_batch(p, z)
            out = np.empty(queries, dtype=np.int64)
            for algorithm in algorithms:
                try:
                    prep = prepare(algorithm, p, qbits=qbits)
                except InfeasibleError as exc:
                    skipped.append(
                        InfeasibleSkipped(algorithm, size, precision, repr(exc))
                    )
                    continue
                for d in d_widths:
                    cfg = LaneConfig(d=d, kernel=algorithm, structure=prep)

                    def run_pass(cfg=cfg):
                        batch_search(cfg, z, out, threads)

                    # Validity gate: check the kernel against the oracle
                    # once per configuration before any timing.
                    run_pass()
                    mismatches = int(np.count_nonzero(out != expected))
                    if mismatches:
                        raise RuntimeError(
                            f"{algorithm} d={d} size={size} {precision}: "
                            f"{mismatches} outputs disagree with the oracle"
                        )
                    per_pass = _measure(run_pass, repetitions, min_time)
                    rows.append(
                        ThroughputRow(
                            algorithm=algorithm,
                            precision=precision,
                            lane_width=d,
                            size=size,
                            throughput_msps=queries / per_pass / 1e6,
                            queries=queries,
                            repetitions=repetitions,
                        )
                    )
    return ThroughputReport(rows=rows, skipped=skipped)


def run_setup_stats(
    sizes,
    precision: str,
    samples: int = 1000,
    seed: int = 42,
    gap_lo: float = 1.0,
    gap_hi: float = 5.0,
    qbits: int = 32,
) -> SetupStatsReport:
    """Distribution of growth-loop increments and per-element setup time.

    Builds the gap-1 direct index for ``samples`` fresh partitions per
    size; infeasible samples (none expected under the default layout)
    are counted, not fatal.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rows: list[SetupStatsRow] = []
    infeasible: dict[int, int] = {}
    root = np.random.SeedSequence(seed)
    for size in sizes:
        seeds = root.spawn(1)[0].generate_state(samples)
        updates: list[int] = []
        per_elem_ns: list[float] = []
        failed = 0
        for s in seeds:
            p = gen_uniform_gap_partition(
                size, gap_lo, gap_hi, seed=int(s), precision=precision
            )
            t0 = time.perf_counter_ns()
            try:
                h, r, stats = compute_h_r(p, qbits=qbits, q=1)
                build_index(p, h, r, q=1, qbits=qbits)
            except InfeasibleError:
                failed += 1
                continue
            elapsed = time.perf_counter_ns() - t0
            updates.append(stats.increments)
            per_elem_ns.append(elapsed / size)
        if failed:
            infeasible[size] = failed
        if updates:
            rows.append(
                SetupStatsRow(
                    size=size,
                    samples=len(updates),
                    h_updates_mean=float(np.mean(updates)),
                    h_updates_min=float(np.min(updates)),
                    h_updates_max=float(np.max(updates)),
                    h_updates_stdev=float(np.std(updates)),
                    setup_ns_per_elem_mean=float(np.mean(per_elem_ns)),
                    setup_ns_per_elem_min=float(np.min(per_elem_ns)),
                    setup_ns_per_elem_max=float(np.max(per_elem_ns)),
                    setup_ns_per_elem_stdev=float(np.std(per_elem_ns)),
                )
            )
    return SetupStatsReport(precision=precision, rows=rows, infeasible=infeasible)
