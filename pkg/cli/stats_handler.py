from typing import Dict

from g2moduli.moduli.classifier import ClassificationRecord, Outcome


class ScanStatsHandler:
    """Callback handler that tallies classification outcomes as records arrive.

    Records are delivered on the scanning thread (the pool returns them through
    ``map``), so no locking is needed.
    """

    def __init__(self) -> None:
        self.completed = 0
        self.outcomes = {outcome.value: 0 for outcome in Outcome}
        self.errors = 0
        self.last_parameter = None

    def on_record(self, record: ClassificationRecord) -> None:
        """Count one finished record."""
        self.completed += 1
        self.outcomes[record.outcome.value] += 1
        if record.error:
            self.errors += 1
        self.last_parameter = record.parameter

    def get_stats(self) -> Dict[str, object]:
        """Return current statistics."""
        return {
            "completed": self.completed,
            "errors": self.errors,
            "last_parameter": self.last_parameter,
            **self.outcomes,
        }

    def describe(self) -> str:
        """One-line live tally for the progress bar."""
        seen = ", ".join(f"{name} {count}" for name, count in self.outcomes.items() if count)
        if self.last_parameter is None:
            return "waiting for first run"
        return f"at {self.last_parameter:+.4g}: {seen}"
