"""Parameter Scanner: classify every member of a family on a parameter grid.

Usage:
    from g2moduli.moduli.scanner import ParameterScanner

    scanner = ParameterScanner(config)
    records = scanner.scan("tprime", -1.5, 1.5, 0.05)
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np

from g2moduli.config import GridConfig, resolve_config, section
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.exceptions import G2ModuliError
from g2moduli.instantons.local_families import Family, seed_jet
from g2moduli.moduli.classifier import ClassificationRecord, ModuliClassifier, Outcome

logger = logging.getLogger(__name__)


def parameter_grid(start: float, stop: float, step: float) -> np.ndarray:
    return GridConfig(start=start, stop=stop, step=step).values()


def classify_member(family: Family, parameter: float, config: dict = None, keep_trajectory: bool = False) -> ClassificationRecord:
    """Integrate and classify one family member; library errors become Inconclusive records."""
    family = Family(family)
    try:
        trajectory = TrajectoryEngine(config).integrate(seed_jet(family, parameter))
        record = ModuliClassifier(config).classify(trajectory)
    except G2ModuliError as e:
        logger.warning("%s %.6g: %s", family.value, parameter, e)
        return ClassificationRecord(family=family, parameter=parameter, outcome=Outcome.INCONCLUSIVE, error=str(e))
    if not keep_trajectory:
        record.trajectory = None
    return record


def _classify_args(args) -> ClassificationRecord:
    return classify_member(*args)


class ParameterScanner:
    """Runs classifications over a grid, sequentially or in a process pool.

    Every record is appended to ``<results_dir>/scan_log.jsonl`` when logging is on.
    """

    def __init__(self, config: dict = None, log_runs: bool = True):
        # resolved once so pool workers see the same settings as this process
        self.config = resolve_config(config)
        self.workers = int(self.config["workers"])
        self.log_runs = log_runs
        self.results_log = os.path.join(self.config["results_dir"], "scan_log.jsonl")

    def scan(
        self,
        family: Family,
        start: float,
        stop: float,
        step: float,
        keep_trajectories: bool = False,
        on_record: Optional[Callable[[ClassificationRecord], None]] = None,
    ) -> List[ClassificationRecord]:
        """Classify each grid member.

        Args:
            family: tgamma or tprime
            start, stop, step: grid; values are rounded so decimal steps land exactly
            keep_trajectories: attach trajectories to the records
            on_record: called with each record as it completes

        Returns:
            Records sorted by parameter
        """
        family = Family(family)
        grid = parameter_grid(start, stop, step)
        logger.info("Scanning %s over %d parameters with %d worker(s)", family.value, len(grid), self.workers)

        records = []
        if self.workers > 1:
            jobs = [(family, float(p), self.config, keep_trajectories) for p in grid]
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                for record in pool.map(_classify_args, jobs):
                    self._finish(record, on_record)
                    records.append(record)
        else:
            for p in grid:
                record = classify_member(family, float(p), self.config, keep_trajectories)
                self._finish(record, on_record)
                records.append(record)

        return sorted(records, key=lambda item: item.parameter)

    def scan_grid(self, family: Family, **kwargs) -> List[ClassificationRecord]:
        """Scan the grid named after the family in the ``grids`` config section."""
        family = Family(family)
        grid = section(self.config, "grids")[family.value]
        return self.scan(family, grid["start"], grid["stop"], grid["step"], **kwargs)

    def _finish(self, record: ClassificationRecord, on_record):
        if self.log_runs:
            self._log_result(record)
        if on_record is not None:
            on_record(record)

    def _log_result(self, record: ClassificationRecord):
        """Append one record to the JSONL run log."""
        try:
            os.makedirs(os.path.dirname(os.path.abspath(self.results_log)), exist_ok=True)
            with open(self.results_log, "a", encoding="utf-8") as f:
                f.write(json.dumps(record.to_json_dict(), default=str) + "\n")
        except OSError as e:
            logger.warning("Could not append to %s: %s", self.results_log, e)


def summarize(records: List[ClassificationRecord]) -> Dict[str, int]:
    counts = {outcome.value: 0 for outcome in Outcome}
    for record in records:
        counts[record.outcome.value] += 1
    return counts
