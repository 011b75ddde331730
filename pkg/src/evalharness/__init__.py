from .attacks import DEFAULT_ATTACKS, AttackKind, AttackSpec, attack
from .corpus import (
    MANIFEST_NAME,
    load_corpus,
    noise_image,
    read_manifest,
    synthetic_corpus,
    synthetic_image,
    write_corpus,
    write_manifest,
)
from .metrics import EvalRow, evaluate_multi_bit, evaluate_zero_bit
from .montecarlo import NoiseSweep, monte_carlo_fpr, noise_false_positives
from .pool import parallel_map
from .report import HEADER, plot_tpr_curves, read_report, write_report
from .runner import (
    MarkedSample,
    fpr_sweep,
    mark_corpus,
    mark_corpus_multi_bit,
    psnr_sweep,
)
from .errors import (
    EvaluationError,
    InvalidAttackError,
    EmptyCorpusError,
    ManifestError,
    ReportWriteError,
    SampleSizeError,
)

__all__ = [
    "DEFAULT_ATTACKS",
    "AttackKind",
    "AttackSpec",
    "attack",
    "MANIFEST_NAME",
    "load_corpus",
    "noise_image",
    "read_manifest",
    "synthetic_corpus",
    "synthetic_image",
    "write_corpus",
    "write_manifest",
    "EvalRow",
    "evaluate_multi_bit",
    "evaluate_zero_bit",
    "NoiseSweep",
    "monte_carlo_fpr",
    "noise_false_positives",
    "parallel_map",
    "HEADER",
    "plot_tpr_curves",
    "read_report",
    "write_report",
    "MarkedSample",
    "fpr_sweep",
    "mark_corpus",
    "mark_corpus_multi_bit",
    "psnr_sweep",
    "EvaluationError",
    "InvalidAttackError",
    "EmptyCorpusError",
    "ManifestError",
    "ReportWriteError",
    "SampleSizeError",
]
