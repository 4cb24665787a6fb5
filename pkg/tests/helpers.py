"""Shared randomized-signal helpers for the test suite."""

from __future__ import annotations

import zlib

import numpy as np

from stftpr.spectral import CyclicSignal


def rng_for(*branch) -> np.random.Generator:
    words = [zlib.crc32(b.encode()) if isinstance(b, str) else int(b) for b in branch]
    return np.random.default_rng([101, *words])


def random_entries(rng, n: int) -> np.ndarray:
    # magnitudes bounded away from zero keep support detection unambiguous
    return rng.uniform(0.5, 1.5, size=n) * np.exp(2j * np.pi * rng.uniform(size=n))


def random_signal(rng, d: int, support=None) -> CyclicSignal:
    v = np.zeros(d, dtype=np.complex128)
    idx = list(range(d)) if support is None else list(support)
    v[idx] = random_entries(rng, len(idx))
    return CyclicSignal(d, v)


def random_short_window(rng, d: int, L: int) -> CyclicSignal:
    v = np.zeros(d, dtype=np.complex128)
    v[: L + 1] = random_entries(rng, L + 1)
    return CyclicSignal(d, v)
