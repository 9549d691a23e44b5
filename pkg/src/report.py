"""
Experiment reports - metric verdicts and their JSON / CSV / text forms

Reports hold no timestamps, so identical (suite, params, seed, trials)
runs serialize to identical bytes. runtime_ms stays null unless timing
output is requested.
"""
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

from .errors import InvalidParameterError, SerializationError

SCHEMA_VERSION = "1"
COMPARISONS = ('band', 'upper', 'lower', 'exact')
METRIC_COLUMNS = ['name', 'observed', 'predicted', 'tolerance', 'tolerance_source', 'pass', 'comparison']


@dataclass
class MetricResult:
    """
    One checked statistic

    comparison:
        band   |observed - predicted| <= tolerance
        upper  observed <= predicted + tolerance (one-sided bound)
        lower  observed >= predicted - tolerance (one-sided bound)
        exact  observed == predicted
    """
    name: str
    observed: float
    predicted: float
    tolerance: float
    tolerance_source: str
    comparison: str = 'band'
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.comparison not in COMPARISONS:
            raise InvalidParameterError(f"Unknown comparison: {self.comparison}")
        if self.tolerance < 0 or math.isnan(self.tolerance):
            raise InvalidParameterError(f"tolerance must be >= 0, got {self.tolerance}")
        self.passed = self._verdict()

    def _verdict(self) -> bool:
        if self.comparison == 'band':
            return abs(self.observed - self.predicted) <= self.tolerance
        if self.comparison == 'upper':
            return self.observed <= self.predicted + self.tolerance
        if self.comparison == 'lower':
            return self.observed >= self.predicted - self.tolerance
        return self.observed == self.predicted

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'observed': _plain(self.observed),
            'predicted': _plain(self.predicted),
            'tolerance': _plain(self.tolerance),
            'tolerance_source': self.tolerance_source,
            'pass': self.passed,
            'comparison': self.comparison,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MetricResult':
        metric = cls(name=data['name'], observed=data['observed'], predicted=data['predicted'],
                     tolerance=data['tolerance'], tolerance_source=data['tolerance_source'],
                     comparison=data.get('comparison', 'band'))
        if metric.passed != data['pass']:
            raise SerializationError(f"stored verdict for {metric.name} disagrees with its values")
        return metric


@dataclass
class ExperimentReport:
    suite: str
    seed: int
    trials: int
    params: Dict[str, Any] = field(default_factory=dict)
    metrics: List[MetricResult] = field(default_factory=list)
    bits_consumed: int = 0
    runtime_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.metrics)

    def add(self, *metrics: MetricResult) -> None:
        self.metrics.extend(metrics)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'version': SCHEMA_VERSION,
            'suite': self.suite,
            'seed': self.seed,
            'trials': self.trials,
            'params': {k: _plain(v) for k, v in self.params.items()},
            'bits_consumed': self.bits_consumed,
            'metrics': [m.to_dict() for m in self.metrics],
            'runtime_ms': self.runtime_ms,
        }


def _plain(value):
    """numpy scalars and tuples to JSON-friendly builtins"""
    if hasattr(value, 'item') and not isinstance(value, (list, dict)):
        return value.item()
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def report_emit(report: ExperimentReport, fmt: str = 'json') -> str:
    """Serialize a report as json, csv or text"""
    if fmt == 'json':
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if fmt == 'csv':
        rows = [{'suite': report.suite, 'seed': report.seed, 'trials': report.trials, **m.to_dict()}
                for m in report.metrics]
        df = pd.DataFrame(rows, columns=['suite', 'seed', 'trials'] + METRIC_COLUMNS)
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, encoding='utf-8', lineterminator='\n')
        return buffer.getvalue()
    if fmt == 'text':
        return _emit_text(report)
    raise InvalidParameterError(f"Unknown report format: {fmt}")


def _emit_text(report: ExperimentReport) -> str:
    lines = ["=" * 70, f"SUITE: {report.suite}", "=" * 70,
             f"Seed: {report.seed:#x}", f"Trials: {report.trials}",
             f"Random bits: {report.bits_consumed}"]
    if report.params:
        lines.append("Params: " + ", ".join(f"{k}={v}" for k, v in report.params.items()))
    lines.append("-" * 70)
    for m in report.metrics:
        mark = "PASS" if m.passed else "FAIL"
        lines.append(f"[{mark}] {m.name}")
        lines.append(f"    observed={m.observed:.6g} predicted={m.predicted:.6g} "
                     f"{m.comparison} tol={m.tolerance:.3g}")
        lines.append(f"    tolerance from: {m.tolerance_source}")
    lines.append("-" * 70)
    lines.append(f"Verdict: {'PASS' if report.passed else 'FAIL'} "
                 f"({sum(m.passed for m in report.metrics)}/{len(report.metrics)} metrics)")
    lines.append("=" * 70)
    return "\n".join(lines) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    """Parse a JSON report produced by report_emit"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"Invalid report JSON: {e}")
    if data.get('version') != SCHEMA_VERSION:
        raise SerializationError(f"Unsupported report schema version: {data.get('version')}")
    try:
        return ExperimentReport(
            suite=data['suite'], seed=data['seed'], trials=data['trials'],
            params=data.get('params', {}),
            metrics=[MetricResult.from_dict(m) for m in data['metrics']],
            bits_consumed=data.get('bits_consumed', 0),
            runtime_ms=data.get('runtime_ms'))
    except KeyError as e:
        raise SerializationError(f"Report JSON missing field {e}")
