"""CSV reports and TPR curve plots."""

import csv
import os
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from config.logger import get_logger  # noqa: E402
from .attacks import AttackKind  # noqa: E402
from .errors import ReportWriteError  # noqa: E402
from .metrics import EvalRow  # noqa: E402

logger = get_logger(__name__)

PathLike = Union[str, os.PathLike]

HEADER = ("attack", "param", "metric", "value", "n")


def _format(value: float) -> str:
    # repr never uses the locale's decimal separator.
    return repr(float(value))


def write_report(rows: Sequence[EvalRow], path: PathLike) -> None:
    """Writes ``attack,param,metric,value,n`` lines, one per metric of each row."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(HEADER)
            for row in rows:
                for metric, value in row.metrics():
                    writer.writerow(
                        (row.attack.label, row.attack.param_text, metric, _format(value), row.n)
                    )
    except OSError as e:
        logger.error(f"Failed to write report {path}: {e}")
        raise ReportWriteError(f"Failed to write report {path}: {e}") from e
    logger.info(f"Wrote {len(rows)} rows to {path}")


def read_report(path: PathLike) -> List[Dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def plot_tpr_curves(rows: Sequence[EvalRow], path: PathLike, title: str = "") -> None:
    """SVG line chart of TPR against the attack parameter, one panel per attack
    kind and one curve per sweep setting."""
    curves: Dict[AttackKind, Dict[str, List]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row.tpr is None or row.attack.kind == AttackKind.IDENTITY:
            continue
        curves[row.attack.kind][row.setting].append((row.attack.param, row.tpr))
    if not curves:
        raise ReportWriteError("No parametrized TPR rows to plot")

    kinds = list(curves)
    fig, axes = plt.subplots(1, len(kinds), figsize=(3.2 * len(kinds), 3.0), squeeze=False)
    for ax, kind in zip(axes[0], kinds):
        for setting, points in curves[kind].items():
            points.sort()
            xs, ys = zip(*points)
            ax.plot(xs, ys, marker="o", label=setting or None)
        ax.set_title(kind.value)
        ax.set_ylim(-0.05, 1.05)
        ax.set_xlabel("parameter")
        ax.grid(alpha=0.3)
    axes[0][0].set_ylabel("TPR")
    if any(setting for c in curves.values() for setting in c):
        axes[0][-1].legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg")
    except OSError as e:
        raise ReportWriteError(f"Failed to write plot {path}: {e}") from e
    finally:
        plt.close(fig)
    logger.info(f"Wrote plot {path}")
