"""Command-line surface: decompose, oa, mix, enhance, wer.

Exit codes: 0 success, 1 validation/usage, 2 numerical degeneracy, 3 I/O.
Any nonzero exit prints a single machine-parsable line on stderr.  Utterance
processing can be parallelized with --jobs; results are reduced in manifest
order, so outputs are byte-identical regardless of the worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .dataio import (
    ReportRow,
    UtteranceRecord,
    align_lengths,
    load_manifest,
    load_scores_csv,
    read_wav,
    resolve_path,
    write_report,
    write_wav,
)
from .decomp import Decomposition, ReferencePair, Signal, decompose, project_span1
from .errors import DataIOError, SedecompError, ValidationError
from .metrics import (
    corpus_wer,
    db_from_energies,
    edit_distance,
    metrics_report,
    si_snr_energies,
    tokenize,
)
from .oa import _OAContext, observation_add, select_weight
from .synth import (
    SpanMixSpec,
    StftConfig,
    mix_at_snr,
    span_enhancer,
    spectral_subtract,
    wiener_oracle,
)

DEFAULT_SEED = 0
JOBS_ENV_VAR = "SEDECOMP_JOBS"

_RECORD_FIELD = {
    "s": "speech_path",
    "n": "noise_path",
    "y": "observed_path",
    "shat": "enhanced_path",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise ValidationError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sedecomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose utterances and report metrics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="report path (.csv/.json/.md)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--per-utt", action="store_true", help="summary row is the mean of per-utterance dB (default)")
    group.add_argument("--pooled", action="store_true", help="summary row pools energies across utterances")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--trim", action="store_true", help="trim signals of one record to the shortest length")
    p.add_argument("--json", action="store_true", help="JSON summary on stdout")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("oa", help="observation adding: fixed weight or grid sweep")
    p.add_argument("--manifest", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--omega", type=float, default=None, help="single interpolation weight in [0, 1]")
    mode.add_argument("--sweep", action="store_true", help="evaluate the whole weight grid")
    p.add_argument("--grid", default="0:1:0.1", help='weight grid "start:end:step" (default 0:1:0.1)')
    p.add_argument("--scores", default=None, help="CSV with header omega,score used to select a weight")
    p.add_argument("--lower-is-better", dest="lower_is_better", action="store_true", default=True)
    p.add_argument("--higher-is-better", dest="lower_is_better", action="store_false")
    p.add_argument("--emit-audio", default=None, help="directory for interpolated audio (with --omega)")
    p.add_argument("--out", default=None, help="report path (.csv/.json/.md)")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--trim", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oa)

    p = sub.add_parser("mix", help="mix speech and noise at a target SNR")
    p.add_argument("speech")
    p.add_argument("noise")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--write-noise", default=None, help="also write the scaled noise")
    p.add_argument("--orthogonalize-noise", action="store_true",
                   help="remove the noise component along the speech before mixing")
    p.add_argument("--encoding", choices=("float32", "pcm16"), default="float32")
    p.add_argument("--trim", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("enhance", help="run an oracle enhancer over reference signals")
    p.add_argument("--method", choices=("wiener", "specsub", "span"), required=True)
    p.add_argument("--speech", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--observed", default=None, help="mixture input (wiener/specsub)")
    p.add_argument("--out", required=True)
    p.add_argument("--oversub", type=float, default=1.0)
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--window-ms", type=float, default=25.0)
    p.add_argument("--hop-ms", type=float, default=10.0)
    p.add_argument("--fft-size", type=int, default=None)
    p.add_argument("--encoding", choices=("float32", "pcm16"), default="float32")
    p.add_argument("--trim", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("wer", help="word error rate between transcript files")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--by-id", action="store_true", help="lines are 'id token...' keyed by id")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_wer)

    return parser


def _resolve_jobs(requested: int | None) -> int:
    if requested is None:
        env = os.environ.get(JOBS_ENV_VAR)
        if env is None:
            return 1
        try:
            requested = int(env)
        except ValueError:
            raise ValidationError(f"{JOBS_ENV_VAR} must be an integer, got {env!r}")
    if requested < 1:
        raise ValidationError("jobs must be >= 1")
    return requested


def _parallel_map(fn, items, jobs: int) -> list:
    if jobs == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _load_signals(
    record: UtteranceRecord, base_dir: str, names: tuple[str, ...], trim: bool
) -> dict[str, Signal]:
    signals = {}
    for name in names:
        path = getattr(record, _RECORD_FIELD[name])
        if path is None:
            raise ValidationError(f"record lacks the {name!r} file")
        signals[name] = read_wav(resolve_path(base_dir, path))
    rates = sorted({sig.sample_rate for sig in signals.values()})
    if len(rates) > 1:
        raise ValidationError(f"sample rates differ {rates}; resampling is not supported")
    aligned = align_lengths(list(signals.values()), trim=trim)
    return dict(zip(signals, aligned))


def _with_record_context(fn, record: UtteranceRecord):
    try:
        return fn()
    except SedecompError as exc:
        raise type(exc)(f"record {record.id!r}: {exc}") from exc


def _component_energies(d: Decomposition) -> dict[str, float]:
    target = d.s_target.samples
    noise = d.e_noise.samples
    artifact = d.e_artif.samples
    total_err = noise + artifact
    plane = target + noise
    return {
        "target": float(target @ target),
        "noise": float(noise @ noise),
        "artifact": float(artifact @ artifact),
        "total_err": float(total_err @ total_err),
        "plane": float(plane @ plane),
    }


@dataclass
class _UttMetrics:
    row: ReportRow
    energies: dict[str, float]
    si_parts: tuple[float, float]
    wer_counts: tuple[int, int] | None


def _wer_counts(record: UtteranceRecord) -> tuple[int, int] | None:
    if record.transcript_ref is None or record.transcript_hyp is None:
        return None
    ref = tokenize(record.transcript_ref)
    hyp = tokenize(record.transcript_hyp)
    if not ref:
        raise ValidationError("empty reference transcript")
    return edit_distance(ref, hyp), len(ref)


def _decompose_record(record: UtteranceRecord, base_dir: str, trim: bool) -> _UttMetrics:
    def work():
        signals = _load_signals(record, base_dir, ("s", "n", "shat"), trim)
        pair = ReferencePair(signals["s"], signals["n"])
        d = decompose(signals["shat"], pair)
        report = metrics_report(d, enhanced=signals["shat"], reference=signals["s"])
        counts = _wer_counts(record)
        row = ReportRow(
            id=record.id,
            sdr_db=report.sdr_db,
            snr_db=report.snr_db,
            sar_db=report.sar_db,
            si_snr_db=report.si_snr_db,
            wer=(counts[0] / counts[1]) if counts else None,
        )
        return _UttMetrics(
            row=row,
            energies=_component_energies(d),
            si_parts=si_snr_energies(signals["shat"], signals["s"]),
            wer_counts=counts,
        )

    return _with_record_context(work, record)


def _check_wer_homogeneous(results: list[_UttMetrics]) -> bool:
    have = [r.wer_counts is not None for r in results]
    if any(have) and not all(have):
        raise ValidationError(
            "some records carry transcripts and some do not; "
            "WER reporting needs all or none"
        )
    return all(have) and bool(have)


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def _summary_row(results: list[_UttMetrics], pooled: bool, with_wer: bool) -> ReportRow:
    rows = [r.row for r in results]
    if pooled:
        total = {}
        for key in ("target", "noise", "artifact", "total_err", "plane"):
            total[key] = sum(r.energies[key] for r in results)
        si_proj = sum(r.si_parts[0] for r in results)
        si_resid = sum(r.si_parts[1] for r in results)
        row = ReportRow(
            id="pooled",
            sdr_db=db_from_energies(total["target"], total["total_err"]),
            snr_db=db_from_energies(total["target"], total["noise"]),
            sar_db=db_from_energies(total["plane"], total["artifact"]),
            si_snr_db=db_from_energies(si_proj, si_resid),
        )
    else:
        row = ReportRow(
            id="mean",
            sdr_db=_mean([r.sdr_db for r in rows]),
            snr_db=_mean([r.snr_db for r in rows]),
            sar_db=_mean([r.sar_db for r in rows]),
            si_snr_db=_mean([r.si_snr_db for r in rows]),
        )
    if with_wer:
        edits = sum(r.wer_counts[0] for r in results)
        ref_total = sum(r.wer_counts[1] for r in results)
        row.wer = edits / ref_total
    return row


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(_jsonable(payload)))
    else:
        print(human)


def _write_json_file(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_jsonable(payload), handle, indent=2)
        handle.write("\n")


def cmd_decompose(args) -> int:
    records = load_manifest(args.manifest)
    if not records:
        raise ValidationError(f"manifest {args.manifest} is empty")
    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    jobs = _resolve_jobs(args.jobs)
    results = _parallel_map(
        lambda rec: _decompose_record(rec, base_dir, args.trim), records, jobs
    )
    with_wer = _check_wer_homogeneous(results)
    summary = _summary_row(results, pooled=args.pooled, with_wer=with_wer)
    rows = [r.row for r in results] + [summary]
    write_report(rows, args.out)
    payload = {
        "utterances": len(records),
        "out": args.out,
        "summary": {
            "id": summary.id,
            "sdr_db": summary.sdr_db,
            "snr_db": summary.snr_db,
            "sar_db": summary.sar_db,
            "si_snr_db": summary.si_snr_db,
            "wer": summary.wer,
        },
    }
    _emit(
        args,
        payload,
        f"decomposed {len(records)} utterances -> {args.out} "
        f"({summary.id} SDR {summary.sdr_db:.1f} dB, SNR {summary.snr_db:.1f}, "
        f"SAR {summary.sar_db:.1f})",
    )
    return 0


def _oa_record_context(record: UtteranceRecord, base_dir: str, trim: bool) -> _OAContext:
    signals = _load_signals(record, base_dir, ("s", "n", "y", "shat"), trim)
    pair = ReferencePair(signals["s"], signals["n"])
    return _OAContext(signals["shat"], signals["y"], pair)


def _oa_fixed_weight(record: UtteranceRecord, base_dir: str, args, weight: float):
    def work():
        ctx = _oa_record_context(record, base_dir, args.trim)
        before = ctx.report(0.0)
        after = ctx.report(weight)
        if args.emit_audio:
            blended = observation_add(ctx.shat, ctx.y, weight)
            write_wav(os.path.join(args.emit_audio, f"{record.id}.wav"), blended)
        return ReportRow(
            id=record.id,
            sdr_db=before.sdr_db,
            snr_db=before.snr_db,
            sar_db=before.sar_db,
            si_snr_db=before.si_snr_db,
            omega=weight,
            oa_sdr_db=after.sdr_db,
            oa_snr_db=after.snr_db,
            oa_sar_db=after.sar_db,
            oa_si_snr_db=after.si_snr_db,
        )

    return _with_record_context(work, record)


def _oa_sweep_record(record: UtteranceRecord, base_dir: str, args, grid: list[float]):
    def work():
        ctx = _oa_record_context(record, base_dir, args.trim)
        rows = []
        for w in grid:
            report = ctx.report(w)
            rows.append(
                ReportRow(
                    id=record.id,
                    sdr_db=report.sdr_db,
                    snr_db=report.snr_db,
                    sar_db=report.sar_db,
                    si_snr_db=report.si_snr_db,
                    omega=w,
                )
            )
        diag = {
            "id": record.id,
            "alignment": ctx.alignment,
            "sar_monotone_expected": ctx.alignment >= 0.0,
            "observation_residual": ctx.observation_residual,
        }
        return rows, diag

    return _with_record_context(work, record)


def parse_grid(spec: str) -> list[float]:
    """Parse "start:end:step" into an inclusive grid of weights."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f'grid must be "start:end:step", got {spec!r}')
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"grid values must be numbers, got {spec!r}")
    if step <= 0.0:
        raise ValidationError("grid step must be positive")
    if end < start:
        raise ValidationError("grid end must not precede start")
    count = int(math.floor((end - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(count + 1)]


def cmd_oa(args) -> int:
    records = load_manifest(args.manifest)
    if not records:
        raise ValidationError(f"manifest {args.manifest} is empty")
    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    jobs = _resolve_jobs(args.jobs)
    if args.emit_audio:
        if args.omega is None:
            raise ValidationError("--emit-audio requires --omega")
        os.makedirs(args.emit_audio, exist_ok=True)

    if args.omega is not None:
        if not 0.0 <= args.omega <= 1.0:
            raise ValidationError(f"--omega must lie in [0, 1], got {args.omega}")
        rows = _parallel_map(
            lambda rec: _oa_fixed_weight(rec, base_dir, args, args.omega), records, jobs
        )
        mean_row = ReportRow(
            id="mean",
            sdr_db=_mean([r.sdr_db for r in rows]),
            snr_db=_mean([r.snr_db for r in rows]),
            sar_db=_mean([r.sar_db for r in rows]),
            si_snr_db=_mean([r.si_snr_db for r in rows]),
            omega=args.omega,
            oa_sdr_db=_mean([r.oa_sdr_db for r in rows]),
            oa_snr_db=_mean([r.oa_snr_db for r in rows]),
            oa_sar_db=_mean([r.oa_sar_db for r in rows]),
            oa_si_snr_db=_mean([r.oa_si_snr_db for r in rows]),
        )
        all_rows = rows + [mean_row]
        if args.out:
            write_report(all_rows, args.out)
        payload = {
            "mode": "fixed",
            "omega": args.omega,
            "utterances": len(records),
            "out": args.out,
            "emit_audio": args.emit_audio,
            "mean_oa_sdr_db": mean_row.oa_sdr_db,
            "mean_oa_snr_db": mean_row.oa_snr_db,
            "mean_oa_sar_db": mean_row.oa_sar_db,
        }
        _emit(
            args,
            payload,
            f"observation adding at omega={args.omega:g} over {len(records)} utterances"
            + (f" -> {args.out}" if args.out else ""),
        )
        return 0

    grid = parse_grid(args.grid)
    outputs = _parallel_map(
        lambda rec: _oa_sweep_record(rec, base_dir, args, grid), records, jobs
    )
    rows = [row for per_record, _ in outputs for row in per_record]
    diagnostics = [diag for _, diag in outputs]
    mean_rows = []
    for i, w in enumerate(grid):
        at_w = [per_record[i] for per_record, _ in outputs]
        mean_rows.append(
            ReportRow(
                id="mean",
                sdr_db=_mean([r.sdr_db for r in at_w]),
                snr_db=_mean([r.snr_db for r in at_w]),
                sar_db=_mean([r.sar_db for r in at_w]),
                si_snr_db=_mean([r.si_snr_db for r in at_w]),
                omega=w,
            )
        )
    all_rows = rows + mean_rows
    if args.out:
        write_report(all_rows, args.out)

    selected = None
    rule = "none"
    scores = None
    if args.scores:
        scores = load_scores_csv(args.scores)
        for w, _ in scores:
            if not any(math.isclose(w, g, abs_tol=1e-9) for g in grid):
                raise ValidationError(f"scored omega {w} is not on the grid")
        selected = select_weight(scores, lower_is_better=args.lower_is_better)
        rule = (
            "lowest-score-smallest-weight"
            if args.lower_is_better
            else "highest-score-smallest-weight"
        )
    payload = {
        "mode": "sweep",
        "utterances": len(records),
        "grid": grid,
        "out": args.out,
        "selected_omega": selected,
        "selection_rule": rule,
        "scores": scores,
        "records": diagnostics,
    }
    human = f"swept {len(grid)} weights over {len(records)} utterances"
    if selected is not None:
        human += f"; selected omega {selected:g}"
    if args.out:
        human += f" -> {args.out}"
    _emit(args, payload, human)
    return 0


def cmd_mix(args) -> int:
    speech = read_wav(args.speech)
    noise = read_wav(args.noise)
    if speech.sample_rate != noise.sample_rate:
        raise ValidationError("speech and noise sample rates differ; resampling is not supported")
    speech, noise = align_lengths([speech, noise], trim=args.trim)
    if args.orthogonalize_noise:
        along = project_span1(noise, speech)
        noise = Signal(noise.samples - along.samples, noise.sample_rate)
    mixture, scaled_noise = mix_at_snr(speech, noise, args.snr_db)
    clipped = write_wav(args.out, mixture, args.encoding)
    if args.write_noise:
        clipped += write_wav(args.write_noise, scaled_noise, args.encoding)
    gain = math.sqrt(
        float(scaled_noise.samples @ scaled_noise.samples)
        / float(noise.samples @ noise.samples)
    )
    sidecar = {
        "command": "mix",
        "speech": args.speech,
        "noise": args.noise,
        "snr_db": args.snr_db,
        "orthogonalize_noise": args.orthogonalize_noise,
        "gain": gain,
        "encoding": args.encoding,
        "seed": args.seed,
        "clipped_samples": clipped,
        "out": args.out,
        "scaled_noise_out": args.write_noise,
    }
    _write_json_file(args.out + ".json", sidecar)
    if clipped:
        print(f"sedecomp: warning: {clipped} samples clipped on write", file=sys.stderr)
    _emit(args, sidecar, f"mixed at {args.snr_db:g} dB (gain {gain:.6g}) -> {args.out}")
    return 0


def cmd_enhance(args) -> int:
    speech = read_wav(args.speech)
    noise = read_wav(args.noise)
    if speech.sample_rate != noise.sample_rate:
        raise ValidationError("speech and noise sample rates differ; resampling is not supported")
    observed = None
    if args.method in ("wiener", "specsub"):
        if args.observed is None:
            raise ValidationError(f"--method {args.method} requires --observed")
        observed = read_wav(args.observed)
        if observed.sample_rate != speech.sample_rate:
            raise ValidationError("observed sample rate differs from the references")
        speech, noise, observed = align_lengths([speech, noise, observed], trim=args.trim)
    else:
        speech, noise = align_lengths([speech, noise], trim=args.trim)
    pair = ReferencePair(speech, noise)
    cfg = StftConfig(window_ms=args.window_ms, hop_ms=args.hop_ms, fft_size=args.fft_size)
    params: dict = {"method": args.method}
    if args.method == "wiener":
        enhanced = wiener_oracle(observed, pair, cfg)
        params.update(window_ms=args.window_ms, hop_ms=args.hop_ms)
    elif args.method == "specsub":
        enhanced = spectral_subtract(observed, pair, cfg, oversub=args.oversub, floor=args.floor)
        params.update(
            oversub=args.oversub, floor=args.floor,
            window_ms=args.window_ms, hop_ms=args.hop_ms,
        )
    else:
        enhanced = span_enhancer(pair, SpanMixSpec(args.a, args.b, args.c), args.seed)
        params.update(a=args.a, b=args.b, c=args.c)
    clipped = write_wav(args.out, enhanced, args.encoding)
    sidecar = {
        "command": "enhance",
        "speech": args.speech,
        "noise": args.noise,
        "observed": args.observed,
        "encoding": args.encoding,
        "seed": args.seed,
        "clipped_samples": clipped,
        "out": args.out,
        **params,
    }
    _write_json_file(args.out + ".json", sidecar)
    if clipped:
        print(f"sedecomp: warning: {clipped} samples clipped on write", file=sys.stderr)
    _emit(args, sidecar, f"enhanced with {args.method} -> {args.out}")
    return 0


def _read_transcripts(path: str, by_id: bool, lowercase: bool) -> list[tuple[str, list[str]]]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataIOError(f"cannot open {path}: {exc.strerror or exc}") from exc
    entries: list[tuple[str, list[str]]] = []
    if by_id:
        seen = set()
        for lineno, line in enumerate(lines, start=1):
            tokens = tokenize(line, lowercase)
            if not tokens:
                raise ValidationError(f"{path}: line {lineno}: blank line in --by-id mode")
            utt_id, text = tokens[0], tokens[1:]
            if utt_id in seen:
                raise ValidationError(f"{path}: line {lineno}: duplicate id {utt_id!r}")
            seen.add(utt_id)
            entries.append((utt_id, text))
    else:
        for index, line in enumerate(lines, start=1):
            entries.append((str(index), tokenize(line, lowercase)))
    return entries


def cmd_wer(args) -> int:
    refs = _read_transcripts(args.ref, args.by_id, args.lowercase)
    hyps = _read_transcripts(args.hyp, args.by_id, args.lowercase)
    if args.by_id:
        hyp_map = dict(hyps)
        ref_ids = [utt_id for utt_id, _ in refs]
        missing = [i for i in ref_ids if i not in hyp_map]
        extra = [i for i, _ in hyps if i not in set(ref_ids)]
        if missing or extra:
            raise ValidationError(
                f"transcript ids mismatch (missing from hyp: {missing[:5]}, "
                f"unmatched in hyp: {extra[:5]})"
            )
        pairs = [(utt_id, ref, hyp_map[utt_id]) for utt_id, ref in refs]
    else:
        if len(refs) != len(hyps):
            raise ValidationError(
                f"transcript line counts differ ({len(refs)} vs {len(hyps)})"
            )
        pairs = [(rid, ref, hyp) for (rid, ref), (_, hyp) in zip(refs, hyps)]
    if not pairs:
        raise ValidationError("no utterances to score")
    utterances = []
    for utt_id, ref, hyp in pairs:
        if not ref:
            raise ValidationError(f"utterance {utt_id!r}: empty reference")
        edits = edit_distance(ref, hyp)
        utterances.append(
            {"id": utt_id, "wer": edits / len(ref), "edits": edits, "ref_tokens": len(ref)}
        )
    pooled = corpus_wer([(ref, hyp) for _, ref, hyp in pairs])
    if args.json:
        print(
            json.dumps(
                {
                    "utterances": utterances,
                    "corpus_wer": pooled,
                    "total_edits": sum(u["edits"] for u in utterances),
                    "total_ref_tokens": sum(u["ref_tokens"] for u in utterances),
                }
            )
        )
    else:
        for utt in utterances:
            print(f"{utt['id']}\t{utt['wer']:.6f}\t{utt['edits']}/{utt['ref_tokens']}")
        print(f"corpus\t{pooled:.6f}")
    return 0


def _print_error(exc: SedecompError) -> None:
    message = " ".join(str(exc).split()).replace('"', "'")
    print(
        f'sedecomp: error code={exc.exit_code} kind={exc.kind} msg="{message}"',
        file=sys.stderr,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return code if isinstance(code, int) else 0
    except SedecompError as exc:
        _print_error(exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
