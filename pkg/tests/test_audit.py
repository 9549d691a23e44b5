import json

from rich.console import Console

from src.audit import AuditTrail


def test_audit_trail_writes_session_files(config, tmp_path):
    # GIVEN
    trail = AuditTrail(config, str(tmp_path), Console(quiet=True))

    # WHEN
    trail.log_suite_start('coupon_collector', 0x5EED, 100)
    trail.log_suite_complete('coupon_collector', True, 4096, results_path="out.json")
    trail.log_suite_start('treap_depth', 1, 10)
    trail.log_error('treap_depth', "trial 3 failed")
    trail.finalize()

    # THEN
    log = json.loads(next(tmp_path.glob("audit_log_*.json")).read_text(encoding='utf-8'))
    assert [s['status'] for s in log['suites']] == ['passed', 'error']
    assert log['suites'][0]['bits_consumed'] == 4096
    assert log['errors'][0]['suite'] == 'treap_depth'
    assert next(tmp_path.glob("system_info_*.json")).exists()
    summary = next(tmp_path.glob("summary_report_*.txt")).read_text(encoding='utf-8')
    assert "coupon_collector" in summary
    assert "trial 3 failed" in summary


def test_completion_without_start_is_ignored(config, tmp_path):
    trail = AuditTrail(config, str(tmp_path), Console(quiet=True))
    trail.log_suite_complete('never_started', False, 0)
    assert trail.audit_data['suites'] == []
