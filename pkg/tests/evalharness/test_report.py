import pytest

from evalharness import (
    HEADER,
    AttackKind,
    AttackSpec,
    EvalRow,
    ReportWriteError,
    plot_tpr_curves,
    read_report,
    write_report,
)


def _rows():
    return [
        EvalRow(attack=AttackSpec(AttackKind.IDENTITY), n=8, tpr=1.0, setting="fpr=1e-06"),
        EvalRow(attack=AttackSpec(AttackKind.JPEG, 50), n=8, tpr=0.875, setting="fpr=1e-06"),
        EvalRow(attack=AttackSpec(AttackKind.JPEG, 90), n=8, tpr=1.0, setting="fpr=1e-06"),
        EvalRow(attack=AttackSpec(AttackKind.JPEG, 50), n=8, tpr=0.5, setting="fpr=1e-12"),
    ]


def test_empty_report_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_report([], path)
    assert path.read_text(encoding="utf-8") == ",".join(HEADER) + "\n"


def test_report_roundtrip(tmp_path):
    path = tmp_path / "out" / "report.csv"
    write_report(_rows(), path)
    parsed = read_report(path)
    assert len(parsed) == 4
    assert parsed[0] == {"attack": "identity", "param": "", "metric": "tpr@fpr=1e-06", "value": "1.0", "n": "8"}
    assert parsed[1]["param"] == "50"
    assert float(parsed[1]["value"]) == 0.875


def test_multi_bit_rows_expand(tmp_path):
    path = tmp_path / "multi.csv"
    row = EvalRow(attack=AttackSpec(AttackKind.CROP, 0.5), n=4, ber=0.25, wer=0.5, k=2)
    write_report([row], path)
    metrics = [r["metric"] for r in read_report(path)]
    assert metrics == ["ber", "wer", "wer_iid", "below_iid"]


def test_decimal_point_is_locale_independent(tmp_path):
    path = tmp_path / "r.csv"
    write_report([EvalRow(attack=AttackSpec(AttackKind.BLUR, 1.5), n=3, tpr=2 / 3)], path)
    line = path.read_text(encoding="utf-8").splitlines()[1]
    assert line == f"blur,1.5,tpr,{2 / 3!r},3"


def test_unwritable_report(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ReportWriteError):
        write_report(_rows(), blocker / "report.csv")


def test_plot_writes_svg(tmp_path):
    path = tmp_path / "tpr.svg"
    plot_tpr_curves(_rows(), path, title="JPEG")
    assert path.read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_plot_needs_parametrized_rows(tmp_path):
    with pytest.raises(ReportWriteError):
        plot_tpr_curves(_rows()[:1], tmp_path / "none.svg")
