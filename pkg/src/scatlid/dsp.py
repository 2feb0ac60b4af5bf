"""Core signal operations: FFT spectra, frequency-domain filtering with
subsampling, reflect padding, and the time-shift / time-warp operators used
by the stability tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AudioBuffer",
    "next_pow2",
    "reflect_pad",
    "spectrum",
    "inverse_spectrum",
    "fold_spectrum",
    "filter_apply",
    "time_shift",
    "time_warp",
]

# Half-width of the windowed-sinc interpolator (16 taps total).
_WARP_HALF_TAPS = 8


@dataclass(frozen=True)
class AudioBuffer:
    """Mono PCM signal plus its sample rate.

    Samples are stored as float64 with nominal range [-1, 1]; every sample
    must be finite.  An empty buffer is legal (it is the result of running
    a voice-activity detector over silence).
    """

    samples: np.ndarray
    sample_rate_hz: int = 8000

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        rate = int(self.sample_rate_hz)
        if rate <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (>= 1)."""
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


def reflect_pad(x: np.ndarray, pad_left: int, pad_right: int) -> np.ndarray:
    """Mirror-pad without repeating the edge sample.

    Matches ``np.pad(..., mode='reflect')`` but also supports pads longer
    than the signal (the mirror pattern tiles with period 2*(len-1)).
    """
    x = np.asarray(x)
    if pad_left < 0 or pad_right < 0:
        raise ValueError("pad sizes must be non-negative")
    n = x.size
    if n == 0:
        raise ValueError("cannot pad an empty signal")
    if n == 1:
        return np.full(pad_left + 1 + pad_right, x[0], dtype=x.dtype)
    period = 2 * (n - 1)
    pos = np.arange(-pad_left, n + pad_right) % period
    pos = np.where(pos >= n, period - pos, pos)
    return x[pos]


def spectrum(x: np.ndarray) -> np.ndarray:
    """Complex DFT of a real or complex sequence.

    Callers are expected to pad to a power-of-two length first; the
    round-trip with :func:`inverse_spectrum` and the Parseval identity
    Sum|x|^2 == (1/N) Sum|x_hat|^2 hold to ~1e-9 relative error.
    """
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("spectrum of an empty sequence is undefined")
    return np.fft.fft(x)


def inverse_spectrum(x_spec: np.ndarray) -> np.ndarray:
    """Inverse DFT (complex output)."""
    x_spec = np.asarray(x_spec)
    if x_spec.size == 0:
        raise ValueError("inverse of an empty spectrum is undefined")
    return np.fft.ifft(x_spec)


def fold_spectrum(x_spec: np.ndarray, subsample: int) -> np.ndarray:
    """Alias-sum a length-N spectrum into N/subsample bins.

    Folding with the mean realizes time-domain decimation:
    ``ifft(fold_spectrum(X, k)) == ifft(X)[::k]`` exactly.
    """
    if subsample == 1:
        return x_spec
    n = x_spec.shape[-1]
    if n % subsample:
        raise ValueError(f"subsample {subsample} does not divide length {n}")
    return x_spec.reshape(subsample, n // subsample).mean(axis=0)


def filter_apply(x_spec: np.ndarray, h_spec: np.ndarray, subsample: int = 1) -> np.ndarray:
    """Circular convolution in the frequency domain, decimated by `subsample`.

    Both spectra must share length N; `subsample` must be a power of two
    dividing N.  Returns the complex time-domain result of length
    N/subsample, equal to the full convolution taken every `subsample`-th
    sample.
    """
    x_spec = np.asarray(x_spec)
    h_spec = np.asarray(h_spec)
    if x_spec.shape != h_spec.shape or x_spec.ndim != 1:
        raise ValueError(
            f"spectra must be 1-D with equal length, got {x_spec.shape} and {h_spec.shape}"
        )
    n = x_spec.size
    if subsample < 1 or (subsample & (subsample - 1)):
        raise ValueError(f"subsample must be a positive power of two, got {subsample}")
    if n % subsample:
        raise ValueError(f"subsample {subsample} does not divide length {n}")
    return np.fft.ifft(fold_spectrum(x_spec * h_spec, subsample))


def time_shift(x: AudioBuffer, c: int) -> AudioBuffer:
    """Circular shift: output[n] = x[n - c]."""
    c = int(c)
    if abs(c) >= len(x):
        raise ValueError(f"|shift| {abs(c)} must be smaller than the signal length {len(x)}")
    return AudioBuffer(np.roll(x.samples, c), x.sample_rate_hz)


def time_warp(x: AudioBuffer, eps: float) -> AudioBuffer:
    """Linear time-warp: output[n] ~= x((1 - eps) * n).

    Uses 16-tap windowed-sinc (Hann) interpolation; samples outside the
    signal count as zero and the output keeps the original length.
    eps = 0 returns the input exactly.
    """
    if not 0.0 <= eps < 0.1:
        raise ValueError(f"eps must lie in [0, 0.1), got {eps}")
    s = x.samples
    n = s.size
    if n == 0 or eps == 0.0:
        return AudioBuffer(s.copy(), x.sample_rate_hz)
    pos = (1.0 - eps) * np.arange(n)
    base = np.floor(pos).astype(np.int64)
    frac = pos - base
    offsets = np.arange(-_WARP_HALF_TAPS + 1, _WARP_HALF_TAPS + 1)
    t = offsets[None, :] - frac[:, None]
    kernel = np.sinc(t) * (0.5 + 0.5 * np.cos(np.pi * t / _WARP_HALF_TAPS))
    idx = base[:, None] + offsets[None, :]
    valid = (idx >= 0) & (idx < n)
    out = np.sum(np.where(valid, s[np.clip(idx, 0, n - 1)], 0.0) * kernel, axis=1)
    return AudioBuffer(out, x.sample_rate_hz)
