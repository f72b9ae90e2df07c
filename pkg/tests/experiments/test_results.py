import math

import pytest

from lsro.experiments.report import render_report
from lsro.experiments.results import ResultRow, ResultStore, read_results, summarize
from lsro_core.errors import LabError, LabErrorCode


def _row(strategy="lsro", count=10, seed=0, rank1=0.5, mAP=0.4, top1=float("nan")):
    return ResultRow(strategy, "gan", count, seed, 20, rank1, 0.7, 0.8, mAP, top1, 1.25, wall_time_seconds=3.0)


def test_record_layout():
    assert _row().result_record() == ["lsro", "gan", "10", "0", "20", "0.500000", "0.700000", "0.800000", "0.400000", "", "1.250000"]
    assert _row().timing_record() == ["lsro", "gan", "10", "0", "3.000"]


def test_metric_range_is_checked():
    with pytest.raises(LabError) as exc:
        _row(rank1=1.5)
    assert exc.value.code is LabErrorCode.INTERNAL_ERROR


def test_store_round_trip(tmp_path):
    store = ResultStore(tmp_path / "out")
    store.append(_row(seed=0))
    store.append(_row(seed=1, top1=0.25))
    rows = read_results(store.results_path)
    assert [r.key for r in rows] == [("lsro", "gan", 10, 0), ("lsro", "gan", 10, 1)]
    assert math.isnan(rows[0].top1) and rows[1].top1 == 0.25
    assert rows[0].wall_time_seconds == 0.0
    assert store.timings_path.read_text().count("\n") == 3


def test_header_mismatch_is_a_format_error(tmp_path):
    path = tmp_path / "results.csv"
    path.write_text("strategy,seed\nlsro,0\n")
    with pytest.raises(LabError) as exc:
        read_results(path)
    assert exc.value.code is LabErrorCode.FORMAT_ERROR


def test_summary_groups_and_orders():
    rows = [
        _row("pseudo_label", 10, 0, mAP=0.2),
        _row("lsro", 20, 0, mAP=0.6),
        _row("lsro", 10, 1, mAP=0.3),
        _row("lsro", 10, 0, mAP=0.5),
        _row("baseline", 0, 0, mAP=0.1),
    ]
    summary = summarize(rows, ["lsro", "pseudo_label"])
    assert [(s.strategy, s.num_generated) for s in summary] == [
        ("baseline", 0),
        ("lsro", 10),
        ("lsro", 20),
        ("pseudo_label", 10),
    ]
    lsro10 = summary[1]
    assert lsro10.runs == 2
    assert lsro10.means["map"] == pytest.approx(0.4)
    assert lsro10.stds["map"] == pytest.approx(0.1)
    assert math.isnan(lsro10.means["top1"])


def test_report_lists_baseline_first_and_best_map():
    text = render_report(summarize([_row("lsro", mAP=0.6), _row("baseline", 0, mAP=0.3)], ["lsro"]))
    lines = text.splitlines()
    assert lines[0].startswith("LSRO sweep summary (2 cells")
    assert lines[3].startswith("baseline") and lines[4].startswith("lsro")
    assert "0.6000 +/- 0.0000" in lines[4]
    assert lines[-1] == "best mAP: lsro / gan / 10 generated"
