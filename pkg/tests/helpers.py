"""Shared test utilities: probe generation and instrumented sequences."""

from __future__ import annotations

import numpy as np

from fastsearch.partition import SortedPartition


class CountingList:
    """List wrapper that counts reads and rejects out-of-range indices.

    Negative indices are rejected too, so accidental Python-style
    wraparound in a kernel shows up as a failure instead of a wrong answer.
    """

    def __init__(self, data):
        self.data = list(data)
        self.reads = 0

    def __getitem__(self, i):
        if not 0 <= i < len(self.data):
            raise IndexError(f"probe index {i} outside [0, {len(self.data)})")
        self.reads += 1
        return self.data[i]

    def __len__(self):
        return len(self.data)


def boundary_probes(p: SortedPartition) -> np.ndarray:
    """Every knot, every in-domain nextafter-perturbed knot, every midpoint."""
    xs = p.values
    up = np.nextafter(xs, xs.dtype.type(np.inf))
    down = np.nextafter(xs, xs.dtype.type(-np.inf))
    mids = xs[:-1] + (xs[1:] - xs[:-1]) / xs.dtype.type(2)
    z = np.concatenate([xs, up, down, mids])
    z = z[(z >= xs[0]) & (z < xs[-1])]
    return np.unique(z)


def random_queries(p: SortedPartition, count: int, seed: int) -> np.ndarray:
    """Uniform in-domain queries in the partition's dtype."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(float(p.values[0]), float(p.values[-1]), size=count)
    z = z.astype(p.values.dtype)
    top = p.values[-1]
    z[z >= top] = np.nextafter(top, p.values.dtype.type(-np.inf))
    return z
