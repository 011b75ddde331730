"""TPR, BER and WER over a marked corpus under a grid of attacks."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from config.logger import get_logger
from features import FeatureSpace
from imaging import Image
from keys import Message, MultiBitKey, ZeroBitKey
from watermark import decode_features, detect_features
from .attacks import AttackSpec, attack
from .errors import EmptyCorpusError, EvaluationError
from .pool import parallel_map

logger = get_logger(__name__)


@dataclass(frozen=True)
class EvalRow:
    """Aggregated result of one attack over a corpus.

    Zero-bit rows carry ``tpr``; multi-bit rows carry ``ber``, ``wer``, the
    iid prediction ``wer_iid = 1 - (1 - ber)^k`` and ``below_iid`` when the
    observed WER falls below it. ``setting`` labels trade-off sweeps.
    """

    attack: AttackSpec
    n: int
    tpr: Optional[float] = None
    ber: Optional[float] = None
    wer: Optional[float] = None
    k: Optional[int] = None
    setting: str = ""

    @property
    def wer_iid(self) -> Optional[float]:
        if self.ber is None or self.k is None:
            return None
        return 1.0 - (1.0 - self.ber) ** self.k

    @property
    def below_iid(self) -> Optional[bool]:
        if self.wer is None or self.wer_iid is None:
            return None
        return self.wer < self.wer_iid

    def metrics(self) -> List[Tuple[str, float]]:
        """``(name, value)`` pairs in report order."""
        suffix = f"@{self.setting}" if self.setting else ""
        if self.tpr is not None:
            return [(f"tpr{suffix}", self.tpr)]
        return [
            (f"ber{suffix}", self.ber),
            (f"wer{suffix}", self.wer),
            (f"wer_iid{suffix}", self.wer_iid),
            (f"below_iid{suffix}", float(self.below_iid)),
        ]


def _attacked(img: Image, spec: AttackSpec, space: FeatureSpace) -> Optional[Image]:
    """The attacked image, or None when it is too small for the extractor."""
    out = attack(img, spec)
    if min(out.height, out.width) < space.min_input_size:
        logger.warning(
            f"{spec} leaves a {out.height}x{out.width} image, below the extractor "
            f"minimum of {space.min_input_size}; counted as a miss"
        )
        return None
    return out


def _check_corpus(marked: Sequence[Image], attacks: Sequence[AttackSpec]) -> None:
    if not marked:
        raise EmptyCorpusError("Cannot evaluate an empty corpus")
    if not attacks:
        raise EvaluationError("No attacks to evaluate")


def evaluate_zero_bit(
    marked: Sequence[Image],
    key: ZeroBitKey,
    theta: float,
    attacks: Sequence[AttackSpec],
    space: FeatureSpace,
    jobs: int = 1,
    setting: str = "",
) -> List[EvalRow]:
    """TPR per attack: the fraction of attacked marked images that are detected."""
    _check_corpus(marked, attacks)

    def hits(img: Image) -> List[bool]:
        result = []
        for spec in attacks:
            attacked = _attacked(img, spec, space)
            result.append(
                attacked is not None
                and detect_features(space.extract(attacked), key, theta).detected
            )
        return result

    per_image = parallel_map(hits, list(marked), jobs)
    n = len(per_image)
    rows = []
    for j, spec in enumerate(attacks):
        tpr = sum(h[j] for h in per_image) / n
        logger.info(f"{spec}{' ' + setting if setting else ''}: TPR={tpr:.4f} (n={n})")
        rows.append(EvalRow(attack=spec, n=n, tpr=tpr, setting=setting))
    return rows


def evaluate_multi_bit(
    marked: Sequence[Image],
    key: MultiBitKey,
    messages: Sequence[Message],
    attacks: Sequence[AttackSpec],
    space: FeatureSpace,
    jobs: int = 1,
    setting: str = "",
) -> List[EvalRow]:
    """BER and WER per attack.

    An attacked image too small to decode counts as k wrong bits.
    """
    _check_corpus(marked, attacks)
    if len(messages) != len(marked):
        raise EvaluationError(
            f"{len(messages)} messages for {len(marked)} marked images"
        )
    k = key.k
    if any(m.k != k for m in messages):
        raise EvaluationError(f"Every message must have k={k} bits")

    def bit_errors(pair: Tuple[Image, Message]) -> List[int]:
        img, message = pair
        result = []
        for spec in attacks:
            attacked = _attacked(img, spec, space)
            if attacked is None:
                result.append(k)
                continue
            decoded = decode_features(space.extract(attacked), key)
            result.append(sum(1 for a, b in zip(decoded.bits, message.bits) if a != b))
        return result

    per_image = parallel_map(bit_errors, list(zip(marked, messages)), jobs)
    n = len(per_image)
    rows = []
    for j, spec in enumerate(attacks):
        errors = [e[j] for e in per_image]
        ber = sum(errors) / (n * k)
        wer = sum(1 for e in errors if e > 0) / n
        row = EvalRow(attack=spec, n=n, ber=ber, wer=wer, k=k, setting=setting)
        logger.info(
            f"{spec}{' ' + setting if setting else ''}: BER={ber:.4f} WER={wer:.4f} "
            f"(iid {row.wer_iid:.4f}, n={n})"
        )
        rows.append(row)
    return rows
