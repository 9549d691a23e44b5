import json

import pytest

from src.errors import InvalidParameterError, SerializationError
from src.report import ExperimentReport, MetricResult, report_emit, report_from_json


def _report():
    report = ExperimentReport(suite='coupon_collector', seed=0x2A, trials=100, params={'n': (10, 20)})
    report.add(
        MetricResult('mean_rounds', 29.1, 29.29, 0.5, "4-standard-error band"),
        MetricResult('max_rounds', 80, 70, 0.0, "hard assertion", comparison='upper'),
    )
    return report


@pytest.mark.parametrize("comparison,observed,expected", [
    ('band', 10.4, True), ('band', 10.6, False),
    ('upper', 10.4, True), ('upper', 9.0, True), ('upper', 10.6, False),
    ('lower', 9.6, True), ('lower', 11.0, True), ('lower', 9.4, False),
])
def test_verdicts(comparison, observed, expected):
    metric = MetricResult('m', observed, 10.0, 0.5, "test", comparison=comparison)
    assert metric.passed is expected


def test_exact_comparison_ignores_tolerance():
    assert MetricResult('m', 3, 3, 0.0, "hard", comparison='exact').passed
    assert not MetricResult('m', 3, 4, 0.0, "hard", comparison='exact').passed


def test_metric_validation():
    with pytest.raises(InvalidParameterError):
        MetricResult('m', 1.0, 1.0, -0.1, "test")
    with pytest.raises(InvalidParameterError):
        MetricResult('m', 1.0, 1.0, 0.1, "test", comparison='roughly')


def test_report_passes_only_when_every_metric_does():
    report = _report()
    assert not report.passed
    assert ExperimentReport(suite='empty', seed=0, trials=1).passed


def test_json_round_trip():
    # GIVEN
    report = _report()

    # WHEN
    text = report_emit(report)
    restored = report_from_json(text)

    # THEN
    assert json.loads(text)['params'] == {'n': [10, 20]}
    assert json.loads(text)['runtime_ms'] is None
    assert [m.to_dict() for m in restored.metrics] == [m.to_dict() for m in report.metrics]
    assert report_emit(restored) == text


def test_csv_has_one_row_per_metric():
    lines = report_emit(_report(), 'csv').strip().split("\n")
    assert lines[0].startswith("suite,seed,trials,name")
    assert len(lines) == 3


def test_text_marks_verdicts():
    text = report_emit(_report(), 'text')
    assert "[PASS] mean_rounds" in text
    assert "[FAIL] max_rounds" in text
    assert "Verdict: FAIL (1/2 metrics)" in text


def test_unknown_format():
    with pytest.raises(InvalidParameterError):
        report_emit(_report(), 'xml')


def test_tampered_verdict_is_rejected():
    data = json.loads(report_emit(_report()))
    data['metrics'][1]['pass'] = True
    with pytest.raises(SerializationError):
        report_from_json(json.dumps(data))


def test_bad_report_json():
    data = json.loads(report_emit(_report()))
    data['version'] = "0"
    with pytest.raises(SerializationError):
        report_from_json(json.dumps(data))
    with pytest.raises(SerializationError):
        report_from_json("{not json")
    del data['version']
    data['version'] = "1"
    del data['suite']
    with pytest.raises(SerializationError):
        report_from_json(json.dumps(data))
