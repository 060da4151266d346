"""Data-parallel batch execution of any search kernel.

Every fixed-iteration kernel admits lock-step execution: the per-query
state advances through an iteration count that depends only on N, with
conditional assignments instead of data-dependent control flow.  The
portable implementation here evaluates those lock-step lanes with numpy
array operations.  Because the per-lane computations never interact, the
lane width d only determines how queries are grouped, never what any
lane computes, so results are bit-identical for every d; the final
``M mod d`` queries always go through the plain scalar kernel.

The classical search is the one exception: its loop exit depends on the
data, so its batch form is simply the scalar kernel applied per query,
whatever d says.

Batches may additionally be split across worker threads (contiguous
spans, outputs written disjointly, so out[j] is always query j's
answer).  The ``FASTSEARCH_THREADS`` environment variable supplies the
thread count when none is passed explicitly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import binsearch, direct, eytzinger
from .errors import OutOfDomain
from .partition import QueryBatch, SortedPartition, pad_right_pow2

ALGORITHMS = (
    "classic",
    "bitset1",
    "bitset2",
    "bitset3",
    "offset",
    "eytzinger",
    "direct",
    "direct-gap2",
    "direct-cache",
)

THREADS_ENV = "FASTSEARCH_THREADS"


def _compile_kernel(lines, table) -> Callable:
    """exec an unrolled scalar kernel with its table bound as a default arg.

    The fixed-iteration kernels run a probe count that is a pure function
    of N, so their loops can be fully unrolled with every constant inlined;
    that is the same property that makes them lane-parallel.  The unrolled
    form is bit-identical to the reference ``*_seq`` loops (asserted in the
    test suite) and roughly twice as fast per query under CPython.
    """
    src = "def kernel(z, xs=_table):\n" + "\n".join(f"    {ln}" for ln in lines)
    namespace = {"_table": table}
    exec(src, namespace)
    return namespace["kernel"]


def _unrolled_bitset1(xs_list, n, probe) -> Callable:
    lines = ["i = 0"]
    k = probe
    while k:
        if k == probe:
            lines.append(f"if {k} < {n} and z >= xs[{k}]: i = {k}")
        else:
            lines.append(f"r = i | {k}")
            lines.append(f"if r < {n} and z >= xs[r]: i = r")
        k >>= 1
    lines.append("return i")
    return _compile_kernel(lines, xs_list)


def _unrolled_bitset2(padded_list, probe) -> Callable:
    lines = ["i = 0"]
    k = probe
    while k:
        if k == probe:
            lines.append(f"if z >= xs[{k}]: i = {k}")
        else:
            lines.append(f"r = i | {k}")
            lines.append("if z >= xs[r]: i = r")
        k >>= 1
    lines.append("return i")
    return _compile_kernel(lines, padded_list)


def _unrolled_bitset3(xs_list, n, probe) -> Callable:
    lines = ["i = 0"]
    k = probe
    while k:
        if k == probe:
            lines.append(f"if z >= xs[{min(k, n)}]: i = {k}")
        else:
            lines.append(f"r = i | {k}")
            lines.append(f"w = r if r < {n} else {n}")
            lines.append("if z >= xs[w]: i = r")
        k >>= 1
    lines.append("return i")
    return _compile_kernel(lines, xs_list)


def _unrolled_offset(xs_list, c) -> Callable:
    # The range size halves deterministically, so the whole size sequence
    # is a compile-time constant.
    lines = ["i = 0", f"if z >= xs[{c.F}]: i = {c.F}"]
    s = c.S
    for _ in range(c.J):
        half = s >> 1
        lines.append(f"f = i + {half}")
        lines.append("if z >= xs[f]: i = f")
        s -= half
    lines.append("return i")
    return _compile_kernel(lines, xs_list)


def _unrolled_eytzinger(tree_list, depth) -> Callable:
    # 0-based descent: p <- 2p + 1 + [z >= tree[p]]; afterwards p - 2**depth
    # is the count of knots <= z, minus one.
    lines = ["p = 1 + (z >= xs[0])"]
    for _ in range(depth - 1):
        lines.append("p = p + p + 1 + (z >= xs[p])")
    lines.append(f"return p - {1 << depth}")
    return _compile_kernel(lines, tree_list)


@dataclass(frozen=True)
class PreparedKernel:
    """A search structure plus its scalar and lock-step entry points."""

    algorithm: str
    partition: SortedPartition
    structure: object
    scalar: Callable
    lanes: Callable | None


@dataclass(frozen=True)
class LaneConfig:
    """Lane width, kernel name, and the prepared structure to run."""

    d: int
    kernel: str
    structure: PreparedKernel

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("lane width must be >= 1")


def prepare(algorithm: str, p: SortedPartition, qbits: int = 32) -> PreparedKernel:
    """Build the search structure for ``algorithm`` and wrap its kernels.

    Direct-family preparation propagates NotDistinguishable/Overflow from
    index construction.
    """
    xs_arr = p.values
    xs = xs_arr.tolist()
    n = p.n_intervals

    if algorithm == "classic":
        def scalar(z, _xs=xs, _n=n):
            return binsearch.classic_seq(_xs, _n, z)

        return PreparedKernel(algorithm, p, p, scalar, None)

    if algorithm == "bitset1":
        probe = binsearch.probe_constant(n)
        scalar = _unrolled_bitset1(xs, n, probe)

        def lanes(z, _xs=xs_arr, _n=n, _p=probe):
            i = np.zeros(len(z), dtype=np.int64)
            k = _p
            while k:
                r = i | k
                within = r < _n
                take = within & (z >= _xs[np.minimum(r, _n)])
                i = np.where(take, r, i)
                k >>= 1
            return i

        return PreparedKernel(algorithm, p, probe, scalar, lanes)

    if algorithm == "bitset2":
        pp = pad_right_pow2(p)
        scalar = _unrolled_bitset2(pp.padded.tolist(), pp.probe)

        def lanes(z, _xs=pp.padded, _p=pp.probe):
            i = np.zeros(len(z), dtype=np.int64)
            k = _p
            while k:
                r = i | k
                i = np.where(z >= _xs[r], r, i)
                k >>= 1
            return i

        return PreparedKernel(algorithm, p, pp, scalar, lanes)

    if algorithm == "bitset3":
        probe = binsearch.probe_constant(n)
        scalar = _unrolled_bitset3(xs, n, probe)

        def lanes(z, _xs=xs_arr, _n=n, _p=probe):
            i = np.zeros(len(z), dtype=np.int64)
            k = _p
            while k:
                r = i | k
                take = z >= _xs[np.minimum(r, _n)]
                i = np.where(take, r, i)
                k >>= 1
            return i

        return PreparedKernel(algorithm, p, probe, scalar, lanes)

    if algorithm == "offset":
        c = binsearch.offset_constants(n)
        scalar = _unrolled_offset(xs, c)

        def lanes(z, _xs=xs_arr, _c=c):
            # The range size is data-independent, so it stays a plain int
            # shared by every lane; only the start index is per-lane state.
            i = np.where(z >= _xs[_c.F], _c.F, 0).astype(np.int64)
            s = _c.S
            for _ in range(_c.J):
                half = s >> 1
                f = i + half
                i = np.where(z >= _xs[f], f, i)
                s -= half
            return i

        return PreparedKernel(algorithm, p, c, scalar, lanes)

    if algorithm == "eytzinger":
        lay = eytzinger.build_layout(p)
        scalar = _unrolled_eytzinger(lay.tree.tolist(), lay.L)

        def lanes(z, _t=lay.tree, _L=lay.L):
            k = np.ones(len(z), dtype=np.int64)
            for _ in range(_L):
                k = 2 * k + (z >= _t[k - 1])
            return k - (1 << _L) - 1

        return PreparedKernel(algorithm, p, lay, scalar, lanes)

    if algorithm in ("direct", "direct-gap2", "direct-cache"):
        q = 2 if algorithm == "direct-gap2" else 1
        idx, _ = direct.build(p, qbits=qbits, q=q, fused=(algorithm == "direct-cache"))
        return PreparedKernel(algorithm, p, idx, *_direct_callables(algorithm, idx, p))

    raise ValueError(f"unknown algorithm {algorithm!r}; pick one of {ALGORITHMS}")


#: Guard band half-width around integer bucket boundaries inside which a
#: float64 emulation of the float32 bucket product may disagree with the
#: real thing.  The disagreement is bounded by prod * 2**-23 (one rounding
#: of the offset, one of the product, plus binary64 noise) plus an absolute
#: 2**-22 term for subnormal offsets (h stays below 2**128).  The margin
#: used is (r + 1) * 2**-22 + 2**-20: an upper bound over every reachable
#: product, with >= 2x slack on both terms.  Falling back more often than
#: necessary is safe; the fallback recomputes in genuine float32.
_F32_GUARD = 2.0 ** -22
_F32_GUARD_ABS = 2.0 ** -20


def _direct_callables(algorithm: str, idx: direct.DirectIndex, p: SortedPartition):
    """Scalar and lane closures with the index's own arithmetic precision.

    Double-precision scalars run on Python floats outright (they are
    binary64, identical to the vector path bit for bit).  Single-precision
    scalars emulate the float32 bucket product in binary64, whose
    truncation can drift from the real one only inside the guard band
    around integer boundaries: the gap-1 kernel absorbs the potential
    one-bucket drift with a widened three-comparison correction, while
    the gap-2 and fused kernels detect the band and recompute the bucket
    in genuine float32 there.  Either way the answers match the float32
    lane path exactly.
    """
    xs_arr = p.values
    k_arr = idx.k
    k_list = k_arr.tolist()
    xs = xs_arr.tolist()
    single = idx.precision == "single"
    h64 = float(idx.h)
    x064 = float(idx.x0)

    if algorithm == "direct":
        if single and (idx.r + 1) * _F32_GUARD + _F32_GUARD_ABS < 1.0:
            # binary64 emulation drifts the bucket by at most one, and the
            # gap-1 table steps by at most one knot per bucket, so the
            # candidate sits within [i-1, i+2] of the true index i; one
            # upward and two downward comparisons resolve it exactly.  The
            # table gets one extra top entry and the knots sentinels on
            # both ends so every drifted read stays in range.
            kp = k_list + [idx.n]
            xp3 = [xs[0]] + xs + [xs[-1]]  # X_w = xp3[w + 1]

            def scalar(z, _h=h64, _x0=x064, _k=kp, _xp=xp3):
                t = _k[int(_h * (z - _x0))]
                return t + (z >= _xp[t + 2]) - (z < _xp[t + 1]) - (z < _xp[t])
        elif single:
            def scalar(z, _h32=idx.h, _x32=idx.x0, _f32=np.float32,
                       _k=k_list, _xs=xs):
                t = _k[int(_h32 * (_f32(z) - _x32))]
                return t - (z < _xs[t])
        else:
            def scalar(z, _h=h64, _x0=x064, _k=k_list, _xs=xs):
                t = _k[int(_h * (z - _x0))]
                return t - (z < _xs[t])

        def lanes(z, _h=idx.h, _x0=idx.x0, _k=k_arr, _xs=xs_arr):
            t = _k[(_h * (z - _x0)).astype(np.int64)].astype(np.int64)
            return t - (z < _xs[t])

        return scalar, lanes

    if algorithm == "direct-gap2":
        xpad_arr = np.concatenate([idx.left_pad, xs_arr])  # xpad[w+1] is X_w
        xpad = xpad_arr.tolist()

        if single:
            def scalar(z, _h=h64, _x0=x064, _h32=idx.h, _x32=idx.x0,
                       _f32=np.float32, _k=k_list, _xp=xpad,
                       _margin=(idx.r + 1) * _F32_GUARD + _F32_GUARD_ABS):
                prod = _h * (z - _x0)
                j = int(prod)
                frac = prod - j
                if frac < _margin or 1.0 - frac < _margin:
                    j = int(_h32 * (_f32(z) - _x32))
                t = _k[j]
                return t - (z < _xp[t + 1]) - (z < _xp[t])
        else:
            def scalar(z, _h=h64, _x0=x064, _k=k_list, _xp=xpad):
                t = _k[int(_h * (z - _x0))]
                return t - (z < _xp[t + 1]) - (z < _xp[t])

        def lanes(z, _h=idx.h, _x0=idx.x0, _k=k_arr, _xp=xpad_arr):
            t = _k[(_h * (z - _x0)).astype(np.int64)].astype(np.int64)
            return t - (z < _xp[t + 1]) - (z < _xp[t])

        return scalar, lanes

    # direct-cache: candidate index and knot value come from one fused record.
    fi = idx.fused["idx"].tolist()
    fv = idx.fused["val"].tolist()

    if single:
        def scalar(z, _h=h64, _x0=x064, _h32=idx.h, _x32=idx.x0,
                   _f32=np.float32, _fi=fi, _fv=fv,
                   _margin=(idx.r + 1) * _F32_GUARD + _F32_GUARD_ABS):
            prod = _h * (z - _x0)
            j = int(prod)
            frac = prod - j
            if frac < _margin or 1.0 - frac < _margin:
                j = int(_h32 * (_f32(z) - _x32))
            t = _fi[j]
            return t - (z < _fv[j])
    else:
        def scalar(z, _h=h64, _x0=x064, _fi=fi, _fv=fv):
            j = int(_h * (z - _x0))
            t = _fi[j]
            return t - (z < _fv[j])

    def lanes(z, _h=idx.h, _x0=idx.x0, _f=idx.fused):
        j = (_h * (z - _x0)).astype(np.int64)
        rec = _f[j]
        return rec["idx"].astype(np.int64) - (z < rec["val"])

    return scalar, lanes


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        if threads < 1:
            raise ValueError("thread count must be >= 1")
        return threads
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def _spans(total: int, parts: int, granularity: int):
    """Split [0, total) into <= parts contiguous spans at granularity bounds."""
    units = total // granularity
    parts = min(parts, units) or 1
    base, extra = divmod(units, parts)
    start = 0
    for w in range(parts):
        stop = start + (base + (w < extra)) * granularity
        yield start, stop
        start = stop
    if start < total:
        yield start, total


def batch_search(cfg: LaneConfig, queries, out: np.ndarray, threads: int | None = None) -> int:
    """Resolve every query into ``out``; returns the number resolved.

    out[j] is the scalar-kernel answer for query j, independent of the
    lane width and thread count.  Raises OutOfDomain identifying the
    first query outside [X_0, X_N); nothing is written in that case.
    """
    z = queries.values if isinstance(queries, QueryBatch) else np.asarray(queries)
    m = len(z)
    if len(out) < m:
        raise ValueError("output array is smaller than the query batch")
    p = cfg.structure.partition
    bad = ~((z >= p.values[0]) & (z < p.values[-1]))  # also catches NaN
    if bad.any():
        raise OutOfDomain(position=int(np.argmax(bad)))

    kern = cfg.structure
    nthreads = resolve_threads(threads)
    lane_stop = (m // cfg.d) * cfg.d if (kern.lanes is not None and cfg.d > 1) else 0

    def run_span(a: int, b: int):
        if a >= b:
            return
        if b <= lane_stop:
            out[a:b] = kern.lanes(z[a:b])
        else:
            scalar = kern.scalar
            out[a:b] = [scalar(q) for q in z[a:b].tolist()]

    if nthreads == 1:
        run_span(0, lane_stop)
        run_span(lane_stop, m)
    else:
        if lane_stop:
            spans = list(_spans(lane_stop, nthreads, cfg.d))
            if lane_stop < m:
                spans.append((lane_stop, m))
        else:
            spans = list(_spans(m, nthreads, 1))
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            for fut in [pool.submit(run_span, a, b) for a, b in spans]:
                fut.result()
    return m


def run_batch(
    prepared: PreparedKernel, queries, d: int = 1, threads: int | None = None
) -> np.ndarray:
    """Allocate the output array and run :func:`batch_search`."""
    z = queries.values if isinstance(queries, QueryBatch) else np.asarray(queries)
    out = np.empty(len(z), dtype=np.int64)
    batch_search(LaneConfig(d=d, kernel=prepared.algorithm, structure=prepared), z, out, threads)
    return out
