"""Corpus-level marking and trade-off sweeps."""

from dataclasses import dataclass
from typing import List, Optional, Sequence

from config.logger import get_logger
from features import FeatureSpace
from imaging import Image
from keys import Message, MultiBitKey, ZeroBitKey
from watermark import EmbedConfig, EmbedReport, embed
from .attacks import AttackSpec
from .errors import EmptyCorpusError, EvaluationError
from .metrics import EvalRow, evaluate_zero_bit
from .pool import parallel_map

logger = get_logger(__name__)


@dataclass(frozen=True)
class MarkedSample:
    original: Image
    marked: Image
    report: EmbedReport
    message: Optional[Message] = None


def mark_corpus(
    images: Sequence[Image],
    key: ZeroBitKey,
    cfg: EmbedConfig,
    space: FeatureSpace,
    jobs: int = 1,
) -> List[MarkedSample]:
    """Zero-bit marks every image; image i runs with seed ``cfg.seed + i``."""
    if not images:
        raise EmptyCorpusError("Cannot mark an empty corpus")

    def run(i: int) -> MarkedSample:
        c = cfg.model_copy(update={"seed": cfg.seed + i})
        marked, report = embed(images[i], key, c, space)
        return MarkedSample(images[i], marked, report)

    return parallel_map(run, list(range(len(images))), jobs)


def mark_corpus_multi_bit(
    images: Sequence[Image],
    key: MultiBitKey,
    messages: Sequence[Message],
    cfg: EmbedConfig,
    space: FeatureSpace,
    jobs: int = 1,
) -> List[MarkedSample]:
    """Marks image i with ``messages[i]``; ``cfg.message`` is replaced per image."""
    if not images:
        raise EmptyCorpusError("Cannot mark an empty corpus")
    if len(messages) != len(images):
        raise EvaluationError(f"{len(messages)} messages for {len(images)} images")

    def run(i: int) -> MarkedSample:
        c = cfg.model_copy(update={"seed": cfg.seed + i, "message": messages[i]})
        marked, report = embed(images[i], key, c, space)
        return MarkedSample(images[i], marked, report, messages[i])

    return parallel_map(run, list(range(len(images))), jobs)


def fpr_sweep(
    images: Sequence[Image],
    key: ZeroBitKey,
    cfg: EmbedConfig,
    fprs: Sequence[float],
    attacks: Sequence[AttackSpec],
    space: FeatureSpace,
    jobs: int = 1,
) -> List[EvalRow]:
    """Re-marks the corpus at every target FPR and evaluates TPR per attack."""
    rows: List[EvalRow] = []
    for fpr in fprs:
        c = cfg.model_copy(update={"target_fpr": fpr})
        samples = mark_corpus(images, key, c, space, jobs)
        rows += evaluate_zero_bit(
            [s.marked for s in samples], key, c.theta(space.dim), attacks, space, jobs,
            setting=f"fpr={fpr:g}",
        )
    return rows


def psnr_sweep(
    images: Sequence[Image],
    key: ZeroBitKey,
    cfg: EmbedConfig,
    psnrs: Sequence[float],
    attacks: Sequence[AttackSpec],
    space: FeatureSpace,
    jobs: int = 1,
) -> List[EvalRow]:
    """Re-marks the corpus at every target PSNR (fixed FPR) and evaluates TPR."""
    rows: List[EvalRow] = []
    theta = cfg.theta(space.dim)
    for target in psnrs:
        c = cfg.model_copy(update={"target_psnr": target})
        samples = mark_corpus(images, key, c, space, jobs)
        rows += evaluate_zero_bit(
            [s.marked for s in samples], key, theta, attacks, space, jobs,
            setting=f"psnr={target:g}",
        )
    return rows
