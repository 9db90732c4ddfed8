"""WAV files, JSON-lines manifests, score files, and metric reports.

This is the bit-exact boundary of the toolkit: PCM16 follows the divide-by-
32768 amplitude convention, float32 data round-trips losslessly, clipping on
integer write is counted rather than hidden, and report cells use the token
"inf" instead of sentinel numbers.  Sample-rate mismatches are errors; no
resampling is bundled.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .decomp import Signal
from .errors import DataIOError, ManifestError, ValidationError, WavFormatError
from .metrics import format_db, machine_value

PCM_SCALE = 32768.0

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


def _read_exact(handle, count: int, what: str) -> bytes:
    data = handle.read(count)
    if len(data) != count:
        raise WavFormatError(f"truncated file while reading {what}")
    return data


def read_wav(path: str) -> Signal:
    """Read a mono RIFF/WAVE file (PCM16 or IEEE float32).

    PCM16 samples are decoded to amplitudes in [-1, 1) by dividing by 32768.
    Multichannel files and any other encoding are rejected.
    """
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise DataIOError(f"cannot open {path}: {exc.strerror or exc}") from exc
    with handle:
        head = _read_exact(handle, 12, "RIFF header")
        if head[0:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise WavFormatError(f"{path}: not a RIFF/WAVE file")
        fmt = None
        while True:
            chunk = handle.read(8)
            if len(chunk) == 0:
                raise WavFormatError(f"{path}: no data chunk found")
            if len(chunk) < 8:
                raise WavFormatError(f"{path}: truncated chunk header")
            chunk_id, size = struct.unpack("<4sI", chunk)
            if chunk_id == b"fmt ":
                if size < 16:
                    raise WavFormatError(f"{path}: fmt chunk too short ({size} bytes)")
                body = _read_exact(handle, size + (size & 1), "fmt chunk")
                fmt = struct.unpack("<HHIIHH", body[:16])
            elif chunk_id == b"data":
                if fmt is None:
                    raise WavFormatError(f"{path}: data chunk before fmt chunk")
                raw = _read_exact(handle, size, "data chunk")
                return _decode_samples(path, fmt, raw)
            else:
                handle.seek(size + (size & 1), io.SEEK_CUR)


def _decode_samples(path: str, fmt: tuple, raw: bytes) -> Signal:
    audio_format, channels, rate, _byte_rate, _block, bits = fmt
    if channels != 1:
        raise WavFormatError(f"{path}: only mono is supported, file has {channels} channels")
    if rate == 0:
        raise WavFormatError(f"{path}: sample rate of zero")
    if audio_format == _WAVE_FORMAT_PCM:
        if bits != 16:
            raise WavFormatError(f"{path}: only 16-bit PCM is supported, got {bits}-bit")
        if len(raw) % 2:
            raise WavFormatError(f"{path}: data size is not a whole number of samples")
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / PCM_SCALE
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise WavFormatError(f"{path}: only 32-bit float is supported, got {bits}-bit")
        if len(raw) % 4:
            raise WavFormatError(f"{path}: data size is not a whole number of samples")
        samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(
            f"{path}: unsupported format tag {audio_format} (PCM16 and IEEE float32 only)"
        )
    if samples.size == 0:
        raise WavFormatError(f"{path}: empty data chunk")
    return Signal(samples, int(rate))


def write_wav(path: str, signal: Signal, encoding: str = "float32") -> int:
    """Write a mono WAV file; returns the number of clipped samples.

    float32 writes are lossless for float32-valued data.  PCM16 writes scale
    by 32768, round to nearest, and clip to [-32768, 32767]; every clipped
    sample is counted and reported via the return value.
    """
    rate = signal.sample_rate
    clipped = 0
    if encoding == "float32":
        data = signal.samples.astype("<f4").tobytes()
        fmt_body = struct.pack("<HHIIHHH", _WAVE_FORMAT_IEEE_FLOAT, 1, rate, rate * 4, 4, 32, 0)
        chunks = [(b"fmt ", fmt_body), (b"fact", struct.pack("<I", len(signal))), (b"data", data)]
    elif encoding == "pcm16":
        scaled = np.rint(signal.samples * PCM_SCALE)
        clipped = int(np.count_nonzero((scaled < -32768.0) | (scaled > 32767.0)))
        data = np.clip(scaled, -32768.0, 32767.0).astype("<i2").tobytes()
        fmt_body = struct.pack("<HHIIHH", _WAVE_FORMAT_PCM, 1, rate, rate * 2, 2, 16)
        chunks = [(b"fmt ", fmt_body), (b"data", data)]
    else:
        raise ValidationError(f"unknown encoding {encoding!r} (float32 or pcm16)")
    payload = bytearray(b"WAVE")
    for chunk_id, body in chunks:
        payload += struct.pack("<4sI", chunk_id, len(body)) + body
        if len(body) & 1:
            payload += b"\x00"
    blob = b"RIFF" + struct.pack("<I", len(payload)) + bytes(payload)
    try:
        with open(path, "wb") as handle:
            handle.write(blob)
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return clipped


def align_lengths(signals: Sequence[Signal], trim: bool = False) -> list[Signal]:
    """Equal-length check with an explicit opt-in trim to the shortest."""
    lengths = sorted({len(s) for s in signals})
    if len(lengths) == 1:
        return list(signals)
    if not trim:
        raise ValidationError(
            f"signal lengths differ {lengths}; pass trim to cut to the shortest"
        )
    shortest = lengths[0]
    return [Signal(s.samples[:shortest], s.sample_rate) for s in signals]


@dataclass(frozen=True)
class UtteranceRecord:
    """One manifest entry binding an id to reference/observed/enhanced files."""

    id: str
    speech_path: str
    noise_path: str
    observed_path: str | None = None
    enhanced_path: str | None = None
    transcript_ref: str | None = None
    transcript_hyp: str | None = None


_KEY_TO_FIELD = {
    "id": "id",
    "s": "speech_path",
    "n": "noise_path",
    "y": "observed_path",
    "shat": "enhanced_path",
    "ref_text": "transcript_ref",
    "hyp_text": "transcript_hyp",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}
_PATH_FIELDS = ("speech_path", "noise_path", "observed_path", "enhanced_path")


def resolve_path(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def load_manifest(path: str, *, check_files: bool = True) -> list[UtteranceRecord]:
    """Read a JSON-lines manifest, preserving order and rejecting duplicates.

    Relative file paths are resolved against the manifest directory for the
    existence check but stored as written.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise DataIOError(f"cannot open {path}: {exc.strerror or exc}") from exc
    base_dir = os.path.dirname(os.path.abspath(path))
    records: list[UtteranceRecord] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ManifestError(f"{path}: line {lineno}: expected a JSON object")
        unknown = sorted(set(obj) - set(_KEY_TO_FIELD))
        if unknown:
            raise ManifestError(f"{path}: line {lineno}: unknown keys {unknown}")
        for key in ("id", "s", "n"):
            if not isinstance(obj.get(key), str) or not obj.get(key):
                raise ManifestError(
                    f"{path}: line {lineno}: missing or empty required key {key!r}"
                )
        if not obj.get("y") and not obj.get("shat"):
            raise ManifestError(
                f"{path}: line {lineno}: record {obj['id']!r} needs 'y' or 'shat'"
            )
        for key in ("y", "shat", "ref_text", "hyp_text"):
            if key in obj and not isinstance(obj[key], str):
                raise ManifestError(f"{path}: line {lineno}: key {key!r} must be a string")
        rec_id = obj["id"]
        if rec_id in seen:
            raise ManifestError(
                f"{path}: line {lineno}: duplicate id {rec_id!r} (first on line {seen[rec_id]})"
            )
        seen[rec_id] = lineno
        record = UtteranceRecord(
            **{_KEY_TO_FIELD[k]: v for k, v in obj.items()}
        )
        if check_files:
            for field_name in _PATH_FIELDS:
                value = getattr(record, field_name)
                if value is not None and not os.path.exists(resolve_path(base_dir, value)):
                    raise DataIOError(
                        f"{path}: line {lineno}: record {rec_id!r}: file not found: {value}"
                    )
        records.append(record)
    return records


def save_manifest(records: Iterable[UtteranceRecord], path: str) -> None:
    """Write records as JSON lines with a stable key order."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for record in records:
                obj = {}
                for field in fields(UtteranceRecord):
                    value = getattr(record, field.name)
                    if value is not None:
                        obj[_FIELD_TO_KEY[field.name]] = value
                handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def load_scores_csv(path: str) -> list[tuple[float, float]]:
    """Read the external score file: CSV with header 'omega,score'."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            rows = list(reader)
    except OSError as exc:
        raise DataIOError(f"cannot open {path}: {exc.strerror or exc}") from exc
    if not rows or [cell.strip().lower() for cell in rows[0]] != ["omega", "score"]:
        raise ValidationError(f"{path}: score file must start with header 'omega,score'")
    scores = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"{path}: line {lineno}: expected two columns")
        try:
            scores.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
    if not scores:
        raise ValidationError(f"{path}: score file has no rows")
    return scores


@dataclass
class ReportRow:
    """One report line: id, metrics, and optional OA/WER columns."""

    id: str
    sdr_db: float | None = None
    snr_db: float | None = None
    sar_db: float | None = None
    si_snr_db: float | None = None
    omega: float | None = None
    oa_sdr_db: float | None = None
    oa_snr_db: float | None = None
    oa_sar_db: float | None = None
    oa_si_snr_db: float | None = None
    wer: float | None = None


_COLUMN_ORDER = (
    "id",
    "sdr_db",
    "snr_db",
    "sar_db",
    "si_snr_db",
    "omega",
    "oa_sdr_db",
    "oa_snr_db",
    "oa_sar_db",
    "oa_si_snr_db",
    "wer",
)
_MD_LABELS = {
    "id": "id",
    "sdr_db": "SDR↑",
    "snr_db": "SNR↑",
    "sar_db": "SAR↑",
    "si_snr_db": "SI-SNR↑",
    "omega": "omega",
    "oa_sdr_db": "OA-SDR↑",
    "oa_snr_db": "OA-SNR↑",
    "oa_sar_db": "OA-SAR↑",
    "oa_si_snr_db": "OA-SI-SNR↑",
    "wer": "WER↓",
}
_DB_COLUMNS = frozenset(
    c for c in _COLUMN_ORDER if c.endswith("_db")
)
REPORT_FORMATS = ("csv", "json", "markdown")


def _active_columns(rows: Sequence[ReportRow]) -> list[str]:
    if not rows:
        raise ValidationError("report needs at least one row")
    active = ["id"]
    for column in _COLUMN_ORDER[1:]:
        present = [getattr(r, column) is not None for r in rows]
        if any(present):
            if not all(present):
                raise ValidationError(
                    f"report rows are not homogeneous: column {column!r} is partially filled"
                )
            active.append(column)
    return active


def _human_cell(column: str, value) -> str:
    if value is None:
        return ""
    if column in _DB_COLUMNS:
        return format_db(value)
    if column == "omega":
        return f"{value:g}"
    if column == "wer":
        return f"{value:.3f}"
    return str(value)


def render_report(rows: Sequence[ReportRow], fmt: str) -> str:
    """Render rows as csv (machine precision), json, or markdown (human)."""
    columns = _active_columns(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [
                    getattr(row, c) if c == "id" else machine_value(getattr(row, c))
                    for c in columns
                ]
            )
        return buf.getvalue()
    if fmt == "json":
        payload = []
        for row in rows:
            obj = {}
            for c in columns:
                value = getattr(row, c)
                if isinstance(value, float) and math.isinf(value):
                    value = "inf" if value > 0 else "-inf"
                obj[c] = value
            payload.append(obj)
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "markdown":
        header = [_MD_LABELS[c] for c in columns]
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in columns) + " |",
        ]
        for row in rows:
            lines.append(
                "| " + " | ".join(_human_cell(c, getattr(row, c)) for c in columns) + " |"
            )
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown report format {fmt!r} (csv, json, markdown)")


def report_format_for(path: str) -> str:
    suffix = os.path.splitext(path)[1].lower()
    mapping = {".csv": "csv", ".json": "json", ".md": "markdown", ".markdown": "markdown"}
    if suffix not in mapping:
        raise ValidationError(f"cannot infer report format from {path!r} (.csv/.json/.md)")
    return mapping[suffix]


def write_report(rows: Sequence[ReportRow], path: str, fmt: str | None = None) -> None:
    """Write a report file, inferring the format from the suffix when absent."""
    fmt = fmt or report_format_for(path)
    text = render_report(rows, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
