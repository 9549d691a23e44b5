"""
Audit Trail - session log for harness and CLI runs

Records which suites ran, their verdicts, timings and errors. Audit files
carry wall-clock timestamps; experiment reports never do.
"""
import json
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from rich.console import Console


class AuditTrail:
    """Session audit trail written under output/audit/"""

    def __init__(self, config: Dict[str, Any], output_dir: str, console: Optional[Console] = None):
        self.config = config
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.console = console or Console()

        self.session_id = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.audit_data = {
            'session_id': self.session_id,
            'start_time': datetime.now().isoformat(),
            'config': config,
            'suites': [],
            'errors': [],
        }

    def log_suite_start(self, suite: str, seed: int, trials: int):
        """Log start of a suite run"""
        self.audit_data['suites'].append({
            'suite': suite,
            'seed': seed,
            'trials': trials,
            'start_time': datetime.now().isoformat(),
            'status': 'started',
        })
        self.console.print(f"\n📝 Audit: {suite} started (seed={seed:#x}, trials={trials})")

    def log_suite_complete(self, suite: str, passed: bool, bits_consumed: int,
                           results_path: Optional[str] = None):
        """Log verdict of a suite run"""
        entry = self._get_suite(suite)
        if entry is None:
            return
        entry['end_time'] = datetime.now().isoformat()
        entry['status'] = 'passed' if passed else 'failed'
        entry['bits_consumed'] = bits_consumed
        if results_path:
            entry['results_path'] = results_path
        start = datetime.fromisoformat(entry['start_time'])
        end = datetime.fromisoformat(entry['end_time'])
        entry['duration_seconds'] = (end - start).total_seconds()
        mark = "✓" if passed else "⚠️"
        self.console.print(f"{mark} Audit: {suite} {entry['status']} ({entry['duration_seconds']:.1f}s)")

    def log_error(self, suite: str, error_message: str, context: str = ""):
        self.audit_data['errors'].append({
            'timestamp': datetime.now().isoformat(),
            'suite': suite,
            'error': error_message,
            'context': context,
        })
        entry = self._get_suite(suite)
        if entry is not None:
            entry['status'] = 'error'
            entry['error'] = error_message

    def finalize(self):
        """Write audit log, system info and summary report"""
        self.audit_data['end_time'] = datetime.now().isoformat()
        start = datetime.fromisoformat(self.audit_data['start_time'])
        end = datetime.fromisoformat(self.audit_data['end_time'])
        self.audit_data['total_duration_seconds'] = (end - start).total_seconds()

        self._save_audit_log()
        self._save_system_info()
        self._save_summary_report()

        self.console.print(f"\n✅ Audit trail completed: {self.output_dir}/")
        self.console.print(f"   Session ID: {self.session_id}")

    def _get_suite(self, suite: str) -> Optional[Dict[str, Any]]:
        for entry in reversed(self.audit_data['suites']):
            if entry['suite'] == suite:
                return entry
        return None

    def _save_audit_log(self):
        filepath = self.output_dir / f"audit_log_{self.session_id}.json"
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(self.audit_data, f, indent=2, ensure_ascii=False, default=str)
        self.console.print(f"✓ Audit log: {filepath}")

    def _save_system_info(self):
        filepath = self.output_dir / f"system_info_{self.session_id}.json"
        system_info = {
            'session_id': self.session_id,
            'python': platform.python_version(),
            'platform': platform.platform(),
            'numpy': np.__version__,
            'generator': 'numpy Philox (counter-based)',
            'seed': self.config.get('randsrc', {}).get('seed'),
        }
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(system_info, f, indent=2, ensure_ascii=False, default=str)
        self.console.print(f"✓ System info: {filepath}")

    def _save_summary_report(self):
        filepath = self.output_dir / f"summary_report_{self.session_id}.txt"
        suites = self.audit_data['suites']
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write("=" * 80 + "\n")
            f.write("RANDLAB - AUDIT REPORT\n")
            f.write("=" * 80 + "\n\n")
            f.write(f"Session ID: {self.session_id}\n")
            f.write(f"Start: {self.audit_data['start_time']}\n")
            f.write(f"End: {self.audit_data['end_time']}\n")
            f.write(f"Total duration: {self.audit_data.get('total_duration_seconds', 0):.1f} seconds\n\n")

            f.write("-" * 80 + "\n")
            f.write("SUITES\n")
            f.write("-" * 80 + "\n\n")
            for entry in suites:
                f.write(f"{entry['suite']}\n")
                f.write(f"  Status: {entry['status']}\n")
                f.write(f"  Seed: {entry['seed']:#x}  Trials: {entry['trials']}\n")
                if 'duration_seconds' in entry:
                    f.write(f"  Duration: {entry['duration_seconds']:.1f}s\n")
                if 'bits_consumed' in entry:
                    f.write(f"  Random bits: {entry['bits_consumed']}\n")
                if 'results_path' in entry:
                    f.write(f"  Report: {entry['results_path']}\n")
                if entry['status'] == 'error':
                    f.write(f"  ⚠️ ERROR: {entry.get('error', 'Unknown')}\n")
                f.write("\n")

            if self.audit_data['errors']:
                f.write("-" * 80 + "\n")
                f.write("ERRORS\n")
                f.write("-" * 80 + "\n\n")
                for error in self.audit_data['errors']:
                    f.write(f"[{error['timestamp']}] {error['suite']}\n")
                    f.write(f"  {error['error']}\n")
                    if error['context']:
                        f.write(f"  Context: {error['context']}\n")
                    f.write("\n")

            f.write("-" * 80 + "\n")
            f.write("STATISTICS\n")
            f.write("-" * 80 + "\n")
            f.write(f"Passed: {sum(1 for s in suites if s['status'] == 'passed')}\n")
            f.write(f"Failed: {sum(1 for s in suites if s['status'] == 'failed')}\n")
            f.write(f"Errors: {len(self.audit_data['errors'])}\n\n")
            f.write("=" * 80 + "\n")
            f.write("End of report\n")
            f.write("=" * 80 + "\n")
        self.console.print(f"✓ Summary report: {filepath}")
