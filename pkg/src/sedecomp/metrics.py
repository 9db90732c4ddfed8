"""Energy-ratio metrics in dB over decomposed components, SI-SNR, and WER.

Ratios are formed first and only then capped: a denominator below 1e-30 of
the numerator reports positive infinity, the mirror case negative infinity,
and a 0/0 ratio is an error.  No epsilon is ever folded into a denominator,
so finite values are exact energy ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .decomp import Decomposition, Signal, check_compatible
from .errors import UndefinedMetricError, ValidationError

# Relative energy threshold below which a ratio is reported as +/-inf.
INFINITY_CAP = 1e-30


def _energy(arr: np.ndarray) -> float:
    return float(arr @ arr)


def db_from_energies(numerator: float, denominator: float) -> float:
    """10*log10(numerator/denominator) with capped-infinity semantics."""
    if numerator <= 0.0 and denominator <= 0.0:
        raise UndefinedMetricError("energy ratio undefined: both terms are zero")
    if denominator <= INFINITY_CAP * numerator:
        return math.inf
    if numerator <= INFINITY_CAP * denominator:
        return -math.inf
    return 10.0 * math.log10(numerator / denominator)


def sdr(d: Decomposition) -> float:
    """Target energy over total-error energy, in dB."""
    total_err = d.e_noise.samples + d.e_artif.samples
    return db_from_energies(_energy(d.s_target.samples), _energy(total_err))


def snr(d: Decomposition) -> float:
    """Target energy over noise-error energy, in dB."""
    return db_from_energies(_energy(d.s_target.samples), _energy(d.e_noise.samples))


def sar(d: Decomposition) -> float:
    """In-plane energy (target plus noise error) over artifact energy, in dB."""
    in_plane = d.s_target.samples + d.e_noise.samples
    return db_from_energies(_energy(in_plane), _energy(d.e_artif.samples))


def si_snr_energies(shat: Signal, reference: Signal) -> tuple[float, float]:
    """Projection and residual energies behind SI-SNR (useful for pooling)."""
    check_compatible(shat, reference, "si-snr")
    ref = reference.samples - reference.samples.mean()
    est = shat.samples - shat.samples.mean()
    ref_energy = _energy(ref)
    raw_energy = _energy(reference.samples)
    if ref_energy <= 1e-24 * raw_energy or ref_energy == 0.0:
        raise UndefinedMetricError("si-snr reference is constant after mean removal")
    coeff = float(est @ ref) / ref_energy
    proj = coeff * ref
    resid = est - proj
    return _energy(proj), _energy(resid)


def si_snr(shat: Signal, reference: Signal) -> float:
    """Scale-invariant ratio of the enhanced signal against a clean reference.

    Both signals are mean-removed first (unlike the decomposition metrics,
    which operate on raw waveforms), then the enhanced signal is projected
    onto the reference line; the value is projection energy over residual
    energy in dB.  Invariant to rescaling of the enhanced signal.
    """
    proj, resid = si_snr_energies(shat, reference)
    return db_from_energies(proj, resid)


@dataclass(frozen=True)
class MetricsReport:
    """SDR/SNR/SAR (and optionally SI-SNR) in dB; values may be +/-inf."""

    sdr_db: float
    snr_db: float
    sar_db: float
    si_snr_db: float | None = None


def metrics_report(
    d: Decomposition,
    *,
    enhanced: Signal | None = None,
    reference: Signal | None = None,
) -> MetricsReport:
    """Compute all decomposition metrics; SI-SNR when both signals are given."""
    si = None
    if enhanced is not None and reference is not None:
        si = si_snr(enhanced, reference)
    return MetricsReport(sdr_db=sdr(d), snr_db=snr(d), sar_db=sar(d), si_snr_db=si)


def format_db(value: float | None, decimals: int = 1) -> str:
    """Human-facing dB cell: one decimal by default, 'inf'/'-inf' tokens."""
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{decimals}f}"


def machine_value(value: float | None) -> str:
    """Full-precision cell for machine-readable output; empty for missing."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    """Whitespace tokenization; case-sensitive unless asked otherwise."""
    if lowercase:
        text = text.lower()
    return text.split()


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    """Minimum number of substitutions, deletions, and insertions (unit costs)."""
    if len(ref) < len(hyp):
        # DP rows sized by the shorter sequence; distance is symmetric.
        ref, hyp = hyp, ref
    previous = list(range(len(hyp) + 1))
    for i, rtok in enumerate(ref, start=1):
        current = [i]
        for j, htok in enumerate(hyp, start=1):
            if rtok == htok:
                current.append(previous[j - 1])
            else:
                current.append(1 + min(previous[j - 1], previous[j], current[-1]))
        previous = current
    return previous[-1]


def wer(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """Edit-distance errors divided by reference length."""
    if len(ref_tokens) == 0:
        raise ValidationError("WER undefined for an empty reference")
    return edit_distance(ref_tokens, hyp_tokens) / len(ref_tokens)


def corpus_wer(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Pooled WER: total errors over total reference tokens across utterances."""
    total_edits = 0
    total_ref = 0
    for ref_tokens, hyp_tokens in pairs:
        if len(ref_tokens) == 0:
            raise ValidationError("WER undefined for an empty reference")
        total_edits += edit_distance(ref_tokens, hyp_tokens)
        total_ref += len(ref_tokens)
    if total_ref == 0:
        raise ValidationError("corpus WER needs at least one reference utterance")
    return total_edits / total_ref
