"""Speech-enhancement error analysis toolkit.

Decomposes single-channel enhancement error into noise and artifact parts via
orthogonal projection, scores SDR/SNR/SAR/SI-SNR (and WER for transcripts),
and applies/tunes observation-adding post-processing over a weight grid.
"""

from .decomp import (
    Decomposition,
    ReferencePair,
    Signal,
    decompose,
    project_span1,
    project_span2,
)
from .errors import (
    DataIOError,
    DegenerateBasisError,
    ManifestError,
    NonColaError,
    SedecompError,
    UndefinedMetricError,
    ValidationError,
    WavFormatError,
)
from .metrics import (
    MetricsReport,
    corpus_wer,
    db_from_energies,
    edit_distance,
    metrics_report,
    sar,
    sdr,
    si_snr,
    snr,
    tokenize,
    wer,
)
from .oa import (
    DEFAULT_GRID,
    SweepPoint,
    SweepResult,
    attach_scores,
    evaluate_weight,
    observation_add,
    select_weight,
    sweep,
)
from .synth import (
    SpanMixSpec,
    Spectrogram,
    StftConfig,
    istft,
    mix_at_snr,
    span_enhancer,
    spectral_subtract,
    stft,
    synthetic_noise,
    synthetic_speech,
    unit_residual_direction,
    verify_cola,
    wiener_oracle,
)
from .dataio import (
    ReportRow,
    UtteranceRecord,
    load_manifest,
    load_scores_csv,
    read_wav,
    render_report,
    save_manifest,
    write_report,
    write_wav,
)

__version__ = "0.1.0"
