"""Waveform containers and orthogonal-projection error decomposition.

An enhanced signal is split into three mutually orthogonal parts: the
component along the clean speech reference (retained target), the remaining
component inside the plane spanned by speech and noise (residual noise), and
the leftover outside that plane (processing artifacts).  Projections use
rank-1/rank-2 closed forms in double precision; no projection matrix is ever
materialized, so memory stays linear in signal length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, ValidationError

# Hard ceiling on the condition number of the 2x2 Gram matrix of the
# reference pair.  Beyond it the plane projection is numerically meaningless
# and we refuse outright instead of regularizing.
GRAM_COND_LIMIT = 1e12


def _validated_samples(values: object) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValidationError(f"samples must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("a signal needs at least one sample")
    if not np.isfinite(arr).all():
        raise ValidationError("signal contains NaN or Inf samples")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Mono, finite-valued waveform at a fixed sample rate.

    Samples are stored as an immutable float64 array, so instances are safe
    to share between threads and to reuse across operations.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _validated_samples(self.samples))
        rate = self.sample_rate
        try:
            ok = float(rate).is_integer() and int(rate) > 0
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise ValidationError(f"sample_rate must be a positive integer, got {rate!r}")
        object.__setattr__(self, "sample_rate", int(rate))

    def __len__(self) -> int:
        return int(self.samples.size)


def check_compatible(a: Signal, b: Signal, what: str) -> None:
    """Raise unless both signals share length and sample rate."""
    if len(a) != len(b):
        raise ValidationError(f"{what}: length mismatch ({len(a)} vs {len(b)})")
    if a.sample_rate != b.sample_rate:
        raise ValidationError(
            f"{what}: sample rate mismatch ({a.sample_rate} vs {b.sample_rate})"
        )


def _gram_condition(s_energy: float, n_energy: float, cross: float) -> float:
    # Closed-form eigenvalues of the symmetric 2x2 Gram matrix.
    trace = s_energy + n_energy
    disc = math.hypot(s_energy - n_energy, 2.0 * cross)
    low = 0.5 * (trace - disc)
    high = 0.5 * (trace + disc)
    if low <= 0.0:
        return math.inf
    return high / low


@dataclass(frozen=True, eq=False)
class ReferencePair:
    """Clean speech and noise references spanning the evaluation plane.

    Construction validates shapes, rejects zero vectors, and refuses
    (near-)collinear pairs.  The noise is orthogonalized against the speech
    once and cached, so repeated projections against the same pair are cheap
    and the line projection is an exact restriction of the plane projection.
    """

    speech: Signal
    noise: Signal

    def __post_init__(self) -> None:
        check_compatible(self.speech, self.noise, "reference pair")
        s = self.speech.samples
        n = self.noise.samples
        s_energy = float(s @ s)
        n_energy = float(n @ n)
        if s_energy == 0.0:
            raise ValidationError("reference speech is the all-zero vector")
        if n_energy == 0.0:
            raise ValidationError("reference noise is the all-zero vector")
        cross = float(s @ n)
        cond = _gram_condition(s_energy, n_energy, cross)
        if not cond <= GRAM_COND_LIMIT:
            raise DegenerateBasisError(
                f"gram condition number {cond:.3e} exceeds {GRAM_COND_LIMIT:.0e}; "
                "speech and noise references span a degenerate plane"
            )
        resid = n - (cross / s_energy) * s
        resid_energy = float(resid @ resid)
        if resid_energy <= 0.0:
            raise DegenerateBasisError("noise reference is numerically parallel to speech")
        resid.setflags(write=False)
        object.__setattr__(self, "_s_energy", s_energy)
        object.__setattr__(self, "_noise_resid", resid)
        object.__setattr__(self, "_resid_energy", resid_energy)
        object.__setattr__(self, "_gram_cond", cond)

    @property
    def gram_condition(self) -> float:
        return self._gram_cond

    def plane_coefficients(self, x: np.ndarray) -> tuple[float, float]:
        """Coefficients of the plane projection in the (speech, residual-noise) frame."""
        alpha = float(x @ self.speech.samples) / self._s_energy
        beta = float(x @ self._noise_resid) / self._resid_energy
        return alpha, beta

    def project_plane(self, x: np.ndarray) -> np.ndarray:
        alpha, beta = self.plane_coefficients(x)
        return alpha * self.speech.samples + beta * self._noise_resid


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Orthogonal split of an enhanced signal: target + noise error + artifact error.

    The three parts sum to the decomposed signal and are mutually orthogonal
    up to rounding, so their squared norms add up to its energy.
    """

    s_target: Signal
    e_noise: Signal
    e_artif: Signal

    def __post_init__(self) -> None:
        check_compatible(self.s_target, self.e_noise, "decomposition")
        check_compatible(self.s_target, self.e_artif, "decomposition")

    @property
    def e_total(self) -> Signal:
        """Total error: noise and artifact parts combined."""
        return Signal(
            self.e_noise.samples + self.e_artif.samples, self.s_target.sample_rate
        )


def project_span1(x: Signal, basis: Signal) -> Signal:
    """Project x onto the line spanned by a single basis signal."""
    check_compatible(x, basis, "rank-1 projection")
    b = basis.samples
    b_energy = float(b @ b)
    if b_energy == 0.0:
        raise ValidationError("projection basis is the all-zero vector")
    coeff = float(x.samples @ b) / b_energy
    return Signal(coeff * b, x.sample_rate)


def project_span2(x: Signal, pair: ReferencePair) -> Signal:
    """Project x onto the plane spanned by the reference pair.

    Least-squares over the two basis vectors, computed from the cached
    orthogonalized frame; the residual is orthogonal to both references.
    """
    check_compatible(x, pair.speech, "plane projection")
    return Signal(pair.project_plane(x.samples), x.sample_rate)


def decompose(shat: Signal, pair: ReferencePair) -> Decomposition:
    """Split an enhanced signal into target, noise-error, and artifact-error parts.

    The target is the line projection onto the clean speech, the noise error
    is what the speech/noise plane adds beyond that line, and the artifact
    error is everything the plane cannot explain.  The parts sum to the input
    exactly by construction.
    """
    check_compatible(shat, pair.speech, "decomposition")
    alpha, beta = pair.plane_coefficients(shat.samples)
    target = alpha * pair.speech.samples
    noise_err = beta * pair._noise_resid
    artifact = shat.samples - target - noise_err
    rate = shat.sample_rate
    return Decomposition(
        Signal(target, rate), Signal(noise_err, rate), Signal(artifact, rate)
    )
