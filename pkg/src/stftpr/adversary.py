"""Self-verifying counterexample generators.

Every generator returns a bundle of two or more signals together with a window
such that the signals' measurements coincide entrywise while no global phase
maps one signal onto another.  Construction and verification are separate: a
generator raises rather than hand back a bundle that fails its own check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBundle, StftprError
from .recovery import compare_up_to_phase
from .spectral import CyclicSignal, ambiguity, embed_line, measure, stft
from .windows import difference_set

GAP_REL_TOL = 1e-9
PHASE_DISTANCE_MIN = 1e-3


@dataclass(frozen=True)
class CounterexampleBundle:
    """Signals sharing a measurement but not a global phase, plus the window."""

    window: CyclicSignal
    signals: tuple[CyclicSignal, ...]
    max_measurement_gap: float
    measurement_scale: float
    pairwise_phase_err: float

    def is_valid(
        self, gap_tol: float = GAP_REL_TOL, phase_min: float = PHASE_DISTANCE_MIN
    ) -> bool:
        return (
            self.max_measurement_gap < gap_tol * self.measurement_scale
            and self.pairwise_phase_err > phase_min
        )


def _bundle(window: CyclicSignal, signals: list[CyclicSignal], label: str) -> CounterexampleBundle:
    measurements = [measure(f, window).sq_mag for f in signals]
    scale = max(float(m.max()) for m in measurements)
    gap = 0.0
    for i in range(len(measurements)):
        for j in range(i + 1, len(measurements)):
            gap = max(gap, float(np.abs(measurements[i] - measurements[j]).max()))
    phase_err = min(
        compare_up_to_phase(signals[i], signals[j])[1]
        for i in range(len(signals))
        for j in range(i + 1, len(signals))
    )
    bundle = CounterexampleBundle(window, tuple(signals), gap, scale, phase_err)
    if not bundle.is_valid():
        raise InvalidBundle(
            f"{label}: gap={gap:.3e} (scale {scale:.3e}), phase distance={phase_err:.3e}"
        )
    return bundle


def periodic_family(d: int, L: int, r: int) -> CounterexampleBundle:
    """Box window and comb signal whose r cyclic translates share one measurement.

    Requires r >= 2 dividing both d and L+1 with L < d/2.  The window's
    ambiguity vanishes on every entry where the translates' autocorrelation
    spectra disagree, which the generator checks explicitly.
    """
    if r < 2:
        raise StftprError("need r >= 2")
    if d % r != 0 or (L + 1) % r != 0:
        raise StftprError(f"r={r} must divide both d={d} and L+1={L + 1}")
    if not (0 <= L < d / 2):
        raise StftprError(f"need 0 <= L < d/2, got L={L}, d={d}")
    g_entries = np.zeros(d, dtype=np.complex128)
    g_entries[: L + 1] = 1.0
    g = CyclicSignal(d, g_entries)

    f_entries = np.zeros(d, dtype=np.complex128)
    f_entries[::r] = 1.0
    base = CyclicSignal(d, f_entries)
    signals = [base.shifted(m) for m in range(r)]

    amb = np.abs(ambiguity(g).values)
    required_zero = [
        (k, l)
        for k in range(0, d, r)
        for l in range(0, d, d // r)
        if l != 0
    ]
    worst = max(amb[k, l] for k, l in required_zero)
    if worst > GAP_REL_TOL * amb.max():
        raise InvalidBundle(f"box-window ambiguity fails to vanish where required ({worst:.3e})")
    return _bundle(g, signals, "periodic_family")


def delta_pair(
    k: int, window: CyclicSignal | dict[int, complex], d: int | None = None
) -> CounterexampleBundle:
    """Two-spike signals delta_0 +- delta_k, indistinguishable when the window's
    support differences never produce k.

    Cyclic mode: pass a cyclic window (and optionally d for validation).  Line
    mode: pass a line support map; both window and signals are embedded into a
    wrap-free common dimension first.
    """
    if isinstance(window, dict):
        if int(k) == 0:
            raise StftprError("shift 0 is always a support difference")
        dg = difference_set(window.keys(), None)
        if int(k) in dg:
            raise StftprError(f"shift {k} is a support difference of the window")
        f_map = {0: 1.0 + 0.0j, int(k): 1.0 + 0.0j}
        f_emb, g_emb, d_emb = embed_line(f_map, window)
        k_emb = (int(k)) % d_emb
        plus = f_emb
        minus_map = {0: 1.0 + 0.0j, int(k): -1.0 + 0.0j}
        minus_emb, _, _ = embed_line(minus_map, window)
        pair = [plus, minus_emb]
        _check_two_spike_rows(plus, k_emb)
        return _bundle(g_emb, pair, "delta_pair(line)")

    g = window
    dd = g.d if d is None else d
    if dd != g.d:
        raise StftprError(f"window has d={g.d}, expected {dd}")
    kk = int(k) % dd
    if kk == 0:
        raise StftprError("shift 0 is always a support difference")
    dg = difference_set(g.support(), dd)
    if kk in dg:
        raise StftprError(f"shift {k} is a support difference of the window")
    plus = np.zeros(dd, dtype=np.complex128)
    plus[0] = 1.0
    plus[kk] = 1.0
    minus = plus.copy()
    minus[kk] = -1.0
    pair = [CyclicSignal(dd, plus), CyclicSignal(dd, minus)]
    _check_two_spike_rows(pair[0], kk)
    return _bundle(g, pair, "delta_pair(cyclic)")


def _check_two_spike_rows(f: CyclicSignal, k: int) -> None:
    # autocorrelation rows vanish away from shifts {0, k, -k}
    table = np.abs(stft(f, f).values)
    scale = table.max()
    d = f.d
    for row in range(d):
        if row in (0, k % d, (-k) % d):
            continue
        if table[row].max() > GAP_REL_TOL * scale:
            raise InvalidBundle(f"two-spike autocorrelation row {row} unexpectedly nonzero")


def real_even_pair(
    d: int, window: CyclicSignal | None = None, seed: int | None = None
) -> CounterexampleBundle:
    """Conjugate two-spike pair that defeats every real window in even dimension.

    The pair places 1 at index 0 and 1 +- i at index d/2; their measurements
    agree for any real-valued window because the center ambiguity row of a real
    window vanishes at all odd frequencies.
    """
    if d % 2 != 0 or d < 2:
        raise StftprError(f"need even d >= 2, got {d}")
    if window is None:
        if seed is None:
            raise StftprError("a seed is required when no window is supplied")
        rng = np.random.default_rng(seed)
        window = CyclicSignal(d, rng.uniform(0.5, 1.5, size=d).astype(np.complex128))
    else:
        peak = float(np.abs(window.entries).max())
        if peak == 0.0 or np.abs(window.entries.imag).max() > 1e-12 * peak:
            raise StftprError("window must be real-valued")
    half = d // 2
    f = np.zeros(d, dtype=np.complex128)
    f[0] = 1.0
    f[half] = 1.0 + 1.0j
    ft = f.copy()
    ft[half] = 1.0 - 1.0j
    return _bundle(window, [CyclicSignal(d, f), CyclicSignal(d, ft)], "real_even_pair")


_SQRT3 = math.sqrt(3.0)

# base signal pair whose autocorrelation tables agree except on the orbit
# {(1,1),(2,2)}; modulating the middle entry moves the disagreement orbit
_D3_F = np.array(
    [1.0, np.exp(-1j * math.pi / 6) / _SQRT3, np.exp(5j * math.pi / 6) / _SQRT3],
    dtype=np.complex128,
)
_D3_FT = np.array(
    [1.0, np.exp(-1j * math.pi / 2) / _SQRT3, np.exp(-5j * math.pi / 6) / _SQRT3],
    dtype=np.complex128,
)


def _d3_modulated(vec: np.ndarray, sign: int) -> np.ndarray:
    out = vec.copy()
    out[1] = out[1] * np.exp(sign * 2j * math.pi / 3)
    return out


def small_d_witness(d: int, zero_at: tuple[int, int]) -> CounterexampleBundle:
    """Witness pair for a single punctured ambiguity entry in dimension 2 or 3.

    For each admissible entry (and its conjugate orbit) returns signals whose
    autocorrelation tables agree everywhere else, plus a window whose ambiguity
    vanishes there, so the measurements coincide.  Puncturing (0, 0) forces the
    zero window and admits no witness.
    """
    if d not in (2, 3):
        raise StftprError(f"witness tables exist only for d in {{2, 3}}, got {d}")
    k, l = int(zero_at[0]) % d, int(zero_at[1]) % d
    if (k, l) == (0, 0):
        raise StftprError("puncturing (0, 0) forces the zero window")

    if d == 2:
        table = {
            (0, 1): (np.array([1.0, 1.0]), np.array([2.0, 1.0]), np.array([1.0, 2.0])),
            (1, 0): (np.array([1.0, 1.0j]), np.array([2.0, 1.0]), np.array([2.0, -1.0])),
            (1, 1): (np.array([2.0, 1.0]), np.array([2.0, 1.0j]), np.array([2.0, -1.0j])),
        }
        g, f, ft = table[(k, l)]
        orbit = {(k, l)}
    else:
        orbit = {(k, l), ((-k) % 3, (-l) % 3)}
        if k == 0:
            g = np.array([1.0, 1.0, 1.0])
            f = np.array([1.0, 0.0, 0.0])
            ft = np.array([0.0, 1.0, 0.0])
            orbit = {(0, 1), (0, 2)}
        elif orbit == {(1, 1), (2, 2)}:
            g = np.array([1.0, 1.0, (1.0 + _SQRT3) + 1.0j])
            f, ft = _D3_F, _D3_FT
        elif orbit == {(1, 2), (2, 1)}:
            g = np.array([1.0, 1.0, (1.0 + _SQRT3) - 1.0j])
            f, ft = _d3_modulated(_D3_F, +1), _d3_modulated(_D3_FT, +1)
        else:  # orbit {(1,0),(2,0)}
            g = np.array([1.0, 1.0, -0.5 + 0.5j])
            f, ft = _d3_modulated(_D3_F, -1), _d3_modulated(_D3_FT, -1)

    window = CyclicSignal(d, np.asarray(g, dtype=np.complex128))
    sig_f = CyclicSignal(d, np.asarray(f, dtype=np.complex128))
    sig_ft = CyclicSignal(d, np.asarray(ft, dtype=np.complex128))

    amb = np.abs(ambiguity(window).values)
    if amb[k, l] > GAP_REL_TOL * amb.max():
        raise InvalidBundle(f"window ambiguity does not vanish at {(k, l)}")
    vf = stft(sig_f, sig_f).values
    vft = stft(sig_ft, sig_ft).values
    diff = np.abs(vf - vft)
    scale = max(np.abs(vf).max(), 1.0)
    for kk in range(d):
        for ll in range(d):
            if (kk, ll) in orbit:
                if diff[kk, ll] <= GAP_REL_TOL * scale:
                    raise InvalidBundle(f"witness pair agrees on the punctured entry {(kk, ll)}")
            elif diff[kk, ll] > GAP_REL_TOL * scale:
                raise InvalidBundle(f"witness pair disagrees off the orbit at {(kk, ll)}")
    return _bundle(window, [sig_f, sig_ft], f"small_d_witness(d={d})")
