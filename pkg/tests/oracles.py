"""Naive reference implementations, independent of the package's FFT paths.

Everything here evaluates defining sums directly: literal Python loops for tiny
dimensions and explicit exponent matrices for the bulk checks.  These are the
oracles the fast transforms must match to 1e-12 relative.
"""

from __future__ import annotations

import cmath

import numpy as np


def naive_dft_loops(v) -> np.ndarray:
    d = len(v)
    out = np.zeros(d, dtype=np.complex128)
    for l in range(d):
        acc = 0.0 + 0.0j
        for j in range(d):
            acc += v[j] * cmath.exp(-2j * cmath.pi * j * l / d)
        out[l] = acc
    return out


def naive_inverse_dft_loops(v) -> np.ndarray:
    d = len(v)
    out = np.zeros(d, dtype=np.complex128)
    for j in range(d):
        acc = 0.0 + 0.0j
        for l in range(d):
            acc += v[l] * cmath.exp(2j * cmath.pi * j * l / d)
        out[j] = acc / d
    return out


def naive_stft_loops(f, g) -> np.ndarray:
    d = len(f)
    out = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            acc = 0.0 + 0.0j
            for j in range(d):
                acc += f[j] * g[(j - k) % d].conjugate() * cmath.exp(-2j * cmath.pi * j * l / d)
            out[k, l] = acc
    return out


def _exponent_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(j, j) / d)


def naive_dft(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return _exponent_matrix(len(v)) @ v


def naive_stft(f, g) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    d = len(f)
    j = np.arange(d)
    shifted = g[(j[None, :] - j[:, None]) % d]
    return (f[None, :] * np.conj(shifted)) @ _exponent_matrix(d)


def naive_relation(sq_mag) -> np.ndarray:
    """Entrywise double sum (1/d) sum X[k',l'] e^(-2 pi i k'l/d) e^(+2 pi i l'k/d)."""
    X = np.asarray(sq_mag, dtype=np.float64)
    d = X.shape[0]
    kp = np.arange(d)
    out = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        col = np.exp(2j * np.pi * kp * k / d)  # over l'
        for l in range(d):
            row = np.exp(-2j * np.pi * kp * l / d)  # over k'
            out[k, l] = (row @ X @ col) / d
    return out


def naive_autocorrelation(f, k: int) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    d = len(f)
    return np.array([f[j] * f[(j - k) % d].conjugate() for j in range(d)])
