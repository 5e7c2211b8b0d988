"""CSV and JSON artefacts.

CSV headers are fixed per artefact (see ``COLUMNS``); JSON record arrays are
sorted by parameter and validated against the shipped schema before writing.
"""

import json
import logging
import os
from importlib import resources
from typing import Dict, Iterable, List

import jsonschema
import pandas as pd

from g2moduli.dynamics.trajectory_engine import Trajectory
from g2moduli.moduli.classifier import ClassificationRecord

logger = logging.getLogger(__name__)

COLUMNS = {
    "trajectory": ["t", "r", "f_plus", "f_minus"],
    "metric": ["r", "t", "A", "B", "dr_dt"],
    "scan": ["family", "parameter", "outcome", "mu", "nu", "fitted_exponent", "residual", "connection_rate", "t_escape"],
    "vector_field": ["g_plus", "g_minus", "dg_plus", "dg_minus"],
    "streamlines": ["line", "g_plus", "g_minus"],
    "tprime_fan": ["gamma_prime", "t", "f_plus", "f_minus"],
}

# 17 significant digits round-trip doubles exactly
FLOAT_FORMAT = "%.17g"


def _ensure_parent(path: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def write_frame(frame: pd.DataFrame, path: str, kind: str) -> str:
    """Write ``frame`` with the documented column order for ``kind``."""
    _ensure_parent(path)
    frame[COLUMNS[kind]].to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug("wrote %s (%d rows)", path, len(frame))
    return path


def write_trajectory_csv(trajectory: Trajectory, path: str) -> str:
    return write_frame(trajectory.to_frame(), path, "trajectory")


def record_schema() -> Dict:
    schema_file = resources.files("g2moduli").joinpath("schemas/classification_record.schema.json")
    return json.loads(schema_file.read_text(encoding="utf-8"))


def records_payload(records: Iterable[ClassificationRecord]) -> List[Dict]:
    ordered = sorted(records, key=lambda record: record.parameter)
    return [record.to_json_dict() for record in ordered]


def validate_records(payload: List[Dict]):
    """Raise ``jsonschema.ValidationError`` unless every record matches the schema."""
    schema = record_schema()
    jsonschema.validate(instance=payload, schema={"type": "array", "items": schema})


def write_records_json(records: Iterable[ClassificationRecord], path: str) -> str:
    payload = records_payload(records)
    validate_records(payload)
    return write_json(payload, path)


def write_records_csv(records: Iterable[ClassificationRecord], path: str) -> str:
    frame = pd.DataFrame(records_payload(records), columns=COLUMNS["scan"])
    return write_frame(frame, path, "scan")


def write_json(payload, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, default=str)
        f.write("\n")
    return path
