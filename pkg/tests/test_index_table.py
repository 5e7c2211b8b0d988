import pytest

from g2moduli.exceptions import DomainError, UnsupportedWeightError
from g2moduli.moduli.index_table import CRITICAL_WEIGHT, INDEX_TABLE, index_lookup


@pytest.mark.parametrize("weight,index", [(-1.0, 1), (-0.001, 1), (-1.999, 1), (-3.0, -1), (-2.001, -1), (-3.999, -1)])
def test_index_lookup(weight, index):
    assert index_lookup(weight) == index


@pytest.mark.parametrize("weight", [CRITICAL_WEIGHT, -4.0, 0.0, 1.0, -5.0])
def test_unsupported_weights(weight):
    with pytest.raises(UnsupportedWeightError):
        index_lookup(weight)


def test_unsupported_weight_is_a_domain_error():
    with pytest.raises(DomainError):
        index_lookup(-2.0)


def test_table_jumps_only_at_critical_weight():
    assert [entry.index for entry in INDEX_TABLE] == [1, -1]
    assert INDEX_TABLE[0].lower == INDEX_TABLE[1].upper == CRITICAL_WEIGHT
