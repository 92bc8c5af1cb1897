"""Result type shared by the numeric verifications."""
from dataclasses import dataclass, field
from typing import Optional

from django.conf import settings


def tolerance(name, overrides=None):
    """Gate for check ``name``, honouring per-run overrides."""
    if overrides and name in overrides:
        return float(overrides[name])
    return float(settings.FOURTERM_CHECK_TOLERANCES[name])


@dataclass(eq=False)
class CheckReport:
    """Outcome of one check: achieved error against the required gate.

    ``table`` holds the per-point rows (a pandas DataFrame) written out
    by the CLI.
    """
    name: str
    achieved: float
    required: float
    passed: bool
    details: dict = field(default_factory=dict)
    table: Optional[object] = field(default=None, repr=False)

    @classmethod
    def gate(cls, name, achieved, required, table=None, **details):
        """Pass when achieved <= required."""
        return cls(name=name, achieved=float(achieved), required=float(required),
                   passed=bool(achieved <= required), details=details, table=table)
