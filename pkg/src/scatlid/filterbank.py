"""Constant-Q Morlet wavelet filterbanks.

Each scattering layer uses one bank: analytic Morlet bandpass filters with
geometrically spaced centers lambda = lambda_max * 2^(-k/Q) down to
2*pi*Q/T, then Q-1 equally spaced constant-bandwidth filters covering the
band below, plus a Gaussian lowpass of bandwidth ~2*pi/T.  All responses
live in the frequency domain on the n_fft grid.

The bank is normalized so the Littlewood-Paley frame function

    A(w) = |phi(w)|^2 + 0.5 * sum_l (|psi_l(w)|^2 + |psi_l(-w)|^2)

has max 1 over (0, pi], which makes the wavelet transform non-expansive
for real inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "FilterbankConfig",
    "BandpassFilter",
    "WaveletFilterbank",
    "ScatteringPath",
    "geometric_filter_count",
    "build_filterbank",
    "littlewood_paley",
    "admissible_paths",
]

LAMBDA_MAX = np.pi

# Width factors (in units of 2*pi/T) for the constant-bandwidth low-band
# filters and the Gaussian lowpass.  Tuned together with ALPHA_NYQUIST so
# the frame function stays within [0.8, 1.0] of its peak over (0, pi] for
# every supported (T, Q); see tests for the sweep.
W_LINEAR = 0.72
W_LOWPASS = 0.80

# The filter centered exactly at Nyquist sits on a self-paired FFT bin and
# would otherwise count double in the frame function.
ALPHA_NYQUIST = 1.0 / math.sqrt(2.0)


def bump_sharpness(Q: int) -> float:
    """Sharpness r of the geometric Morlet Gaussian, sigma = lam*sqrt(r)/Q,
    chosen so adjacent filters (centers a ratio 2^(1/Q) apart, widths
    proportional to center) cross exactly at half power."""
    a = 2.0 ** (-1.0 / Q)
    return Q * Q * (1.0 - a) ** 2 / ((1.0 + a) ** 2 * math.log(2.0))

_SUPPORTED_Q = (1, 2, 4, 8)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FilterbankConfig:
    """Averaging span T (samples), octave resolution Q, transform size n_fft."""

    T: int
    Q: int
    n_fft: int

    def __post_init__(self):
        if not _is_pow2(self.T) or not 256 <= self.T <= 16384:
            raise ValueError(f"T must be a power of two in [256, 16384], got {self.T}")
        if self.Q not in _SUPPORTED_Q:
            raise ValueError(f"Q must be one of {_SUPPORTED_Q}, got {self.Q}")
        if not _is_pow2(self.n_fft) or self.n_fft < 2 * self.T:
            raise ValueError(f"n_fft must be a power of two >= 2*T, got {self.n_fft}")


@dataclass(frozen=True)
class BandpassFilter:
    """One analytic bandpass response on the n_fft frequency grid."""

    center: float          # normalized rad/sample
    kind: str              # "geometric" | "linear"
    response: np.ndarray   # real, length n_fft


@dataclass(frozen=True)
class WaveletFilterbank:
    """Ordered bandpass filters (center frequency descending) plus lowpass."""

    bandpass: tuple
    lowpass: np.ndarray
    config: FilterbankConfig

    @property
    def n_fft(self) -> int:
        return self.lowpass.size

    def centers(self) -> np.ndarray:
        return np.array([f.center for f in self.bandpass])

    def geometric(self) -> tuple:
        return tuple(f for f in self.bandpass if f.kind == "geometric")


@dataclass(frozen=True)
class ScatteringPath:
    """Channel index into the scattering output: order 0, 1 or 2."""

    order: int
    lambda1: Optional[float] = None
    lambda2: Optional[float] = None

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {self.order}")
        if self.order >= 1 and self.lambda1 is None:
            raise ValueError("order >= 1 requires lambda1")
        if self.order == 2:
            if self.lambda2 is None:
                raise ValueError("order 2 requires lambda2")
            if not self.lambda2 < self.lambda1:
                raise ValueError(
                    f"order-2 path needs lambda2 < lambda1, got {self.lambda2} >= {self.lambda1}"
                )


def geometric_filter_count(T: int, Q: int, lambda_max: float = LAMBDA_MAX) -> int:
    """Number of geometric centers lambda_max * 2^(-k/Q) >= 2*pi*Q/T."""
    ratio = lambda_max * T / (2.0 * np.pi * Q)
    if ratio < 1.0:
        return 0
    return int(math.floor(Q * math.log2(ratio))) + 1


def _periodized_gaussian(n_fft: int, center: float, sigma: float) -> np.ndarray:
    """exp(-(w - center)^2 / (2 sigma^2)) sampled on the FFT grid, summed
    over three 2*pi periods so near-Nyquist and near-DC tails wrap
    correctly."""
    w = 2.0 * np.pi * np.arange(n_fft) / n_fft
    out = np.zeros(n_fft)
    for m in (-1, 0, 1):
        out += np.exp(-((w + 2.0 * np.pi * m - center) ** 2) / (2.0 * sigma ** 2))
    return out


def _morlet(n_fft: int, center: float, sigma: float) -> np.ndarray:
    """Gaussian bump minus a DC-centered correction, zero at bin 0,
    peak-normalized."""
    bump = _periodized_gaussian(n_fft, center, sigma)
    corr = _periodized_gaussian(n_fft, 0.0, sigma)
    resp = bump - (bump[0] / corr[0]) * corr
    return resp / resp.max()


def _build_bank(T: int, Q: int, n_fft: int, lambda_max: float = LAMBDA_MAX):
    """Unvalidated construction shared by the audio banks and the
    log-frequency banks (whose T and Q fall outside FilterbankConfig's
    audio ranges)."""
    bw = 2.0 * np.pi / T
    omega_min = Q * bw
    r = bump_sharpness(Q)
    filters = []
    n_geo = geometric_filter_count(T, Q, lambda_max)
    for k in range(n_geo):
        lam = lambda_max * 2.0 ** (-k / Q)
        resp = _morlet(n_fft, lam, lam * math.sqrt(r) / Q)
        if k == 0 and abs(lam - np.pi) < 1e-12:
            resp = resp * ALPHA_NYQUIST
        filters.append(BandpassFilter(center=lam, kind="geometric", response=resp))
    for j in range(Q - 1, 0, -1):
        lam = j * omega_min / Q
        resp = _morlet(n_fft, lam, W_LINEAR * bw)
        filters.append(BandpassFilter(center=lam, kind="linear", response=resp))
    lowpass = _periodized_gaussian(n_fft, 0.0, W_LOWPASS * bw)

    # Single global scale on the bandpass part so max A(w) = 1 on (0, pi]:
    # A(w) = lowpass^2 + s^2 * B(w), so s^2 = min (1 - lowpass^2) / B.
    half = n_fft // 2
    idx = np.arange(1, half + 1)
    bsum = np.zeros(half)
    for f in filters:
        sq = f.response ** 2
        bsum += 0.5 * (sq[idx] + sq[(-idx) % n_fft])
    scale = math.sqrt(np.min((1.0 - lowpass[idx] ** 2) / bsum))
    filters = [
        BandpassFilter(f.center, f.kind, f.response * scale) for f in filters
    ]
    return filters, lowpass


def _frame_function(filters, lowpass: np.ndarray) -> np.ndarray:
    n_fft = lowpass.size
    half = n_fft // 2
    acc = np.zeros(half + 1)
    idx = np.arange(half + 1)
    mirror = (-idx) % n_fft
    for f in filters:
        sq = f.response ** 2
        acc += 0.5 * (sq[idx] + sq[mirror])
    return lowpass[idx] ** 2 + acc


def build_filterbank(config: FilterbankConfig) -> WaveletFilterbank:
    """Construct the Morlet bank for one scattering layer.

    Returns filters ordered by strictly decreasing center frequency:
    geometric centers pi * 2^(-k/Q) down to 2*pi*Q/T, then the Q-1
    constant-bandwidth filters below.  Every bandpass response has zero
    gain at DC and the bank satisfies the Littlewood-Paley bound
    0.8 <= A(w) <= 1 on (0, pi].
    """
    filters, lowpass = _build_bank(config.T, config.Q, config.n_fft)
    return WaveletFilterbank(bandpass=tuple(filters), lowpass=lowpass, config=config)


def littlewood_paley(bank: WaveletFilterbank) -> np.ndarray:
    """Frame function A(w) on the non-negative half of the n_fft grid
    (bins 0 .. n_fft/2 inclusive)."""
    return _frame_function(bank.bandpass, bank.lowpass)


def admissible_paths(bank1: WaveletFilterbank, bank2: WaveletFilterbank):
    """All order-1 paths followed by the order-2 paths with lambda2 < lambda1.

    Ordering is (lambda1 desc, lambda2 desc), which fixes the feature
    channel layout.  bank2 must have been built with Q = 1.
    """
    if bank2.config.Q != 1:
        raise ValueError(f"second-layer bank must use Q = 1, got Q = {bank2.config.Q}")
    paths = [ScatteringPath(order=1, lambda1=f.center) for f in bank1.bandpass]
    for f1 in bank1.bandpass:
        for f2 in bank2.bandpass:
            if f2.center < f1.center:
                paths.append(
                    ScatteringPath(order=2, lambda1=f1.center, lambda2=f2.center)
                )
    return paths
