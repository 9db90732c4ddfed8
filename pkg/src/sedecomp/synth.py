"""Synthetic test material and STFT-domain oracle enhancers.

Everything here exists so that decomposition and observation-adding claims
can be exercised without any trained model: SNR-controlled mixtures, an
exactly decomposable span enhancer, a Hann STFT/ISTFT pair with per-sample
overlap normalization, and two classic oracle enhancers (Wiener mask and
spectral subtraction) driven by the true references.  Given the same seeds
and configuration, outputs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .decomp import ReferencePair, Signal, check_compatible
from .errors import NonColaError, ValidationError

DEFAULT_SAMPLE_RATE = 16000


def mix_at_snr(s: Signal, n: Signal, target_snr_db: float) -> tuple[Signal, Signal]:
    """Scale the noise so the mixture hits the target energy-ratio SNR.

    Returns the mixture and the scaled noise; the gain is the closed form
    ||s|| / (||n|| * 10^(target/20)).
    """
    check_compatible(s, n, "mixing")
    s_energy = float(s.samples @ s.samples)
    n_energy = float(n.samples @ n.samples)
    if s_energy == 0.0 or n_energy == 0.0:
        raise ValidationError("mixing requires nonzero speech and noise")
    gain = math.sqrt(s_energy) / (math.sqrt(n_energy) * 10.0 ** (target_snr_db / 20.0))
    scaled = gain * n.samples
    return Signal(s.samples + scaled, s.sample_rate), Signal(scaled, s.sample_rate)


@dataclass(frozen=True)
class SpanMixSpec:
    """Coefficients for a synthetic enhanced signal a*s + b*n + c*r.

    r is a seeded unit vector orthogonal to the speech/noise plane, so the
    decomposition of the output has known closed-form components.
    """

    a: float
    b: float
    c: float


def unit_residual_direction(pair: ReferencePair, seed: int) -> np.ndarray:
    """Seeded unit vector orthogonal to the plane of the reference pair."""
    length = len(pair.speech)
    if length < 3:
        raise ValidationError(
            "an out-of-plane direction needs at least 3 samples"
        )
    rng = np.random.default_rng(seed)
    for _ in range(16):
        draw = rng.standard_normal(length)
        resid = draw - pair.project_plane(draw)
        # Second pass keeps the direction orthogonal to working precision.
        resid = resid - pair.project_plane(resid)
        norm = float(np.linalg.norm(resid))
        if norm > 1e-8 * float(np.linalg.norm(draw)):
            return resid / norm
    raise ValidationError("could not draw a direction outside the reference plane")


def span_enhancer(pair: ReferencePair, spec: SpanMixSpec, seed: int) -> Signal:
    """Build a*s + b*n + c*r with r the seeded out-of-plane unit direction.

    Decomposing the output recovers a*s + b*P_s(n) as target, b*(n - P_s(n))
    as noise error, and c*r as artifact error, which makes this the analytic
    ground truth for decomposition tests.
    """
    r = unit_residual_direction(pair, seed)
    samples = (
        spec.a * pair.speech.samples + spec.b * pair.noise.samples + spec.c * r
    )
    return Signal(samples, pair.speech.sample_rate)


@dataclass(frozen=True)
class StftConfig:
    """Hann-window STFT framing in milliseconds (25 ms window, 10 ms hop)."""

    window_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int | None = None

    def __post_init__(self) -> None:
        if not self.window_ms > 0.0:
            raise ValidationError("window_ms must be positive")
        if not 0.0 < self.hop_ms <= self.window_ms:
            raise ValidationError("hop_ms must lie in (0, window_ms]")

    def window_length(self, sample_rate: int) -> int:
        return _geometry(self.window_ms, self.hop_ms, self.fft_size, sample_rate)[0]

    def hop_length(self, sample_rate: int) -> int:
        return _geometry(self.window_ms, self.hop_ms, self.fft_size, sample_rate)[1]


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)


@lru_cache(maxsize=64)
def _geometry(
    window_ms: float, hop_ms: float, fft_size: int | None, sample_rate: int
) -> tuple[int, int, int, np.ndarray]:
    win = int(round(window_ms * sample_rate / 1000.0))
    hop = int(round(hop_ms * sample_rate / 1000.0))
    if win < 2:
        raise ValidationError(f"window of {window_ms} ms at {sample_rate} Hz is too short")
    if hop < 1 or hop > win:
        raise ValidationError("hop must lie in [1, window] samples")
    nfft = fft_size if fft_size is not None else 1 << (win - 1).bit_length()
    if nfft < win or nfft & (nfft - 1):
        raise ValidationError(
            f"fft_size must be a power of two >= window length ({win}), got {nfft}"
        )
    window = hann_window(win)
    # Overlap-added window energy per steady-state offset; a (near-)zero
    # means some sample positions are never observed and the transform
    # cannot be inverted there.
    coverage = np.zeros(hop)
    np.add.at(coverage, np.arange(win) % hop, window * window)
    if coverage.min() <= 1e-8 * coverage.max():
        raise NonColaError(
            f"window {win} / hop {hop} leaves unrecoverable sample positions"
        )
    window.setflags(write=False)
    return win, hop, nfft, window


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Complex time-frequency grid: (frames, fft_size//2 + 1)."""

    frames: np.ndarray
    sample_rate: int


def stft(x: Signal, cfg: StftConfig | None = None) -> Spectrogram:
    """Short-time Fourier transform with window-length zero padding at both ends."""
    cfg = cfg or StftConfig()
    win, hop, nfft, window = _geometry(
        cfg.window_ms, cfg.hop_ms, cfg.fft_size, x.sample_rate
    )
    pad = win
    total = len(x) + 2 * pad
    num_frames = (total - win + hop - 1) // hop + 1
    ext = (num_frames - 1) * hop + win
    buf = np.zeros(ext)
    buf[pad : pad + len(x)] = x.samples
    idx = hop * np.arange(num_frames)[:, None] + np.arange(win)[None, :]
    frames = buf[idx] * window
    return Spectrogram(np.fft.rfft(frames, n=nfft, axis=1), x.sample_rate)


def istft(grid: Spectrogram, cfg: StftConfig | None, out_len: int) -> Signal:
    """Invert an STFT grid back to out_len samples.

    Overlap-add with per-sample division by the accumulated squared window,
    which reconstructs every covered sample exactly for any window/hop pair
    that passes the coverage check.
    """
    cfg = cfg or StftConfig()
    win, hop, nfft, window = _geometry(
        cfg.window_ms, cfg.hop_ms, cfg.fft_size, grid.sample_rate
    )
    frames = np.asarray(grid.frames)
    if frames.ndim != 2 or frames.shape[1] != nfft // 2 + 1:
        raise ValidationError(
            f"grid shape {frames.shape} does not match fft_size {nfft}"
        )
    if out_len < 1:
        raise ValidationError("out_len must be at least 1")
    num_frames = frames.shape[0]
    ext = (num_frames - 1) * hop + win
    pad = win
    if pad + out_len > ext:
        raise ValidationError(
            f"out_len {out_len} exceeds the {ext - pad} samples covered by the grid"
        )
    time_frames = np.fft.irfft(frames, n=nfft, axis=1)[:, :win] * window
    acc = np.zeros(ext)
    den = np.zeros(ext)
    wsq = window * window
    for k in range(num_frames):
        start = k * hop
        acc[start : start + win] += time_frames[k]
        den[start : start + win] += wsq
    floor = den.max() * 1e-12
    out = np.divide(acc, den, out=np.zeros(ext), where=den > floor)
    return Signal(out[pad : pad + out_len], grid.sample_rate)


def verify_cola(cfg: StftConfig, sample_rate: int) -> float:
    """End-to-end constant-reconstruction check of a framing configuration.

    Runs a constant signal through the transform pair and returns the largest
    absolute deviation from 1; raises when it exceeds 1e-6.
    """
    win = cfg.window_length(sample_rate)
    probe = Signal(np.ones(4 * win), sample_rate)
    rec = istft(stft(probe, cfg), cfg, len(probe))
    deviation = float(np.abs(rec.samples - 1.0).max())
    if deviation > 1e-6:
        raise NonColaError(
            f"framing reconstructs a constant only to {deviation:.3e} (> 1e-6)"
        )
    return deviation


def wiener_mask(speech_power, noise_power) -> np.ndarray:
    """Per-bin ratio speech/(speech+noise) in [0, 1]; 0 where both are silent."""
    sp = np.asarray(speech_power, dtype=np.float64)
    den = sp + np.asarray(noise_power, dtype=np.float64)
    out = np.zeros(np.broadcast(sp, den).shape)
    np.divide(sp, den, out=out, where=den > 0)
    return out


def wiener_oracle(
    y: Signal, pair: ReferencePair, cfg: StftConfig | None = None
) -> Signal:
    """Apply the oracle Wiener mask built from the true references to a mixture."""
    cfg = cfg or StftConfig()
    check_compatible(y, pair.speech, "wiener oracle")
    speech_grid = stft(pair.speech, cfg)
    noise_grid = stft(pair.noise, cfg)
    mixture_grid = stft(y, cfg)
    mask = wiener_mask(
        np.abs(speech_grid.frames) ** 2, np.abs(noise_grid.frames) ** 2
    )
    return istft(Spectrogram(mask * mixture_grid.frames, y.sample_rate), cfg, len(y))


def subtracted_magnitude(mag_mixture, mag_noise, oversub: float, floor: float):
    """Spectral-subtraction magnitude: max(|Y| - oversub*|N|, floor*|Y|)."""
    return np.maximum(
        np.asarray(mag_mixture) - oversub * np.asarray(mag_noise),
        floor * np.asarray(mag_mixture),
    )


def spectral_subtract(
    y: Signal,
    pair: ReferencePair,
    cfg: StftConfig | None = None,
    oversub: float = 1.0,
    floor: float = 0.05,
) -> Signal:
    """Over-subtract the true noise magnitude from the mixture spectrogram.

    Mixture phase is kept.  Raising oversub trades noise suppression for
    artifacts: decomposed SNR goes up while SAR goes down, which makes this
    the standard knob for generating artifact-heavy test signals.
    """
    cfg = cfg or StftConfig()
    check_compatible(y, pair.speech, "spectral subtraction")
    if oversub < 0.0:
        raise ValidationError("oversub must be >= 0")
    if not 0.0 < floor < 1.0:
        raise ValidationError("floor must lie in (0, 1)")
    noise_grid = stft(pair.noise, cfg)
    mixture_grid = stft(y, cfg)
    mag_y = np.abs(mixture_grid.frames)
    target = subtracted_magnitude(mag_y, np.abs(noise_grid.frames), oversub, floor)
    scale = np.zeros_like(mag_y)
    np.divide(target, mag_y, out=scale, where=mag_y > 0)
    return istft(
        Spectrogram(scale * mixture_grid.frames, y.sample_rate), cfg, len(y)
    )


def synthetic_speech(
    duration_s: float = 0.5,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    seed: int = 0,
) -> Signal:
    """Deterministic speech-like fixture: drifting harmonic stack with a slow envelope."""
    rng = np.random.default_rng(seed)
    n = max(8, int(round(duration_s * sample_rate)))
    t = np.arange(n) / sample_rate
    f0 = 110.0 + 30.0 * np.sin(2.0 * np.pi * 1.3 * t + rng.uniform(0, 2 * np.pi))
    phase = 2.0 * np.pi * np.cumsum(f0) / sample_rate
    x = np.zeros(n)
    for k in range(1, 6):
        x += (0.6 / k) * np.sin(k * phase + rng.uniform(0, 2 * np.pi))
    envelope = 0.3 + 0.7 * np.sin(np.pi * (2.7 * t + rng.uniform(0, 1))) ** 2
    x = envelope * x + 1e-3 * rng.standard_normal(n)
    x *= 0.3 / np.abs(x).max()
    return Signal(x, sample_rate)


def synthetic_noise(
    duration_s: float = 0.5,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    seed: int = 1,
) -> Signal:
    """Deterministic low-passed Gaussian noise fixture."""
    rng = np.random.default_rng(seed)
    n = max(8, int(round(duration_s * sample_rate)))
    raw = rng.standard_normal(n + 64)
    kernel = np.exp(-np.arange(32) / 8.0)
    kernel /= kernel.sum()
    x = np.convolve(raw, kernel, mode="full")[32 : 32 + n]
    x *= 0.3 / np.abs(x).max()
    return Signal(x, sample_rate)
