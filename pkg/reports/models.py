# reports/models.py
from dataclasses import dataclass, field
from pathlib import Path
from typing import List


@dataclass
class RunResult:
    """Files written and gated checks evaluated by one command."""
    command: str
    files: List[Path] = field(default_factory=list)
    reports: list = field(default_factory=list)

    @property
    def failures(self):
        return [report for report in self.reports if not report.passed]

    @property
    def passed(self):
        return not self.failures

    def summary(self):
        lines = [f"{self.command}: {len(self.files)} file(s) written"]
        for report in self.reports:
            status = 'ok' if report.passed else 'FAIL'
            lines.append(f"  [{status}] {report.name}: achieved {report.achieved:.3g}, "
                         f"required {report.required:.3g}")
        return '\n'.join(lines)
