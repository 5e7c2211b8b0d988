import json

import jsonschema
import pandas as pd
import pytest

from g2moduli.instantons.local_families import Family
from g2moduli.moduli.classifier import ClassificationRecord, Outcome, classify
from g2moduli.reports.writers import (
    COLUMNS,
    record_schema,
    records_payload,
    validate_records,
    write_records_csv,
    write_records_json,
    write_trajectory_csv,
)


@pytest.fixture
def records():
    return [
        ClassificationRecord(family=Family.TPRIME, parameter=1.5, outcome=Outcome.BLOW_UP, t_escape=3.2, termination="Escaped"),
        ClassificationRecord(family=Family.TPRIME, parameter=1.0, outcome=Outcome.FLAT, flat_point="flat_plus_plus"),
        ClassificationRecord(
            family=Family.TPRIME,
            parameter=0.0,
            outcome=Outcome.CONVERGES_TO_NK,
            mu=0.6667,
            nu=0.0,
            fitted_exponent=-2.0,
            residual=1e-6,
            connection_rate=-3.0,
        ),
        ClassificationRecord(family=Family.TPRIME, parameter=0.5, outcome=Outcome.INCONCLUSIVE, error="step failed"),
    ]


def test_schema_matches_record_fields():
    fields = set(ClassificationRecord.model_fields) - {"trajectory"}
    assert set(record_schema()["properties"]) == fields


def test_payload_sorted_and_valid(records):
    payload = records_payload(records)
    assert [item["parameter"] for item in payload] == [0.0, 0.5, 1.0, 1.5]
    validate_records(payload)


def test_records_json(records, tmp_path):
    path = write_records_json(records, str(tmp_path / "out" / "scan.json"))
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    assert len(payload) == 4
    assert payload[3]["outcome"] == "BlowUp"


@pytest.mark.parametrize(
    "broken",
    [
        {"outcome": "ConvergesToNK", "mu": None},
        {"outcome": "BlowUp"},
        {"outcome": "Diverges"},
        {"family": "tdouble"},
        {"extra": 1},
    ],
)
def test_invalid_records_rejected(broken):
    base = {"family": "tprime", "parameter": 0.5, "outcome": "Inconclusive"}
    with pytest.raises(jsonschema.ValidationError):
        validate_records([{**base, **broken}])


def test_records_csv_header(records, tmp_path):
    path = write_records_csv(records, str(tmp_path / "scan.csv"))
    frame = pd.read_csv(path)
    assert list(frame.columns) == COLUMNS["scan"]
    assert frame["outcome"].tolist() == ["ConvergesToNK", "Inconclusive", "Flat", "BlowUp"]


def test_trajectory_csv_round_trips_doubles(tprime_half, tmp_path):
    path = write_trajectory_csv(tprime_half, str(tmp_path / "traj.csv"))
    frame = pd.read_csv(path, float_precision="round_trip")
    assert list(frame.columns) == COLUMNS["trajectory"]
    assert len(frame) == len(tprime_half)
    assert frame["f_minus"].to_numpy()[-1] == tprime_half.f_minus[-1]


def test_real_record_validates(tprime_escape):
    validate_records([classify(tprime_escape).to_json_dict()])
