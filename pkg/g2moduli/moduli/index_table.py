"""Index of the deformation operator against the Sobolev weight.

For weights in (-4, 0) the index only jumps at the critical weight -2.
"""

from dataclasses import dataclass
from typing import List

from g2moduli.exceptions import UnsupportedWeightError

CRITICAL_WEIGHT = -2.0


@dataclass(frozen=True)
class IndexTableEntry:
    lower: float
    upper: float
    index: int

    def contains(self, weight: float) -> bool:
        return self.lower < weight < self.upper


INDEX_TABLE: List[IndexTableEntry] = [
    IndexTableEntry(-2.0, 0.0, 1),
    IndexTableEntry(-4.0, -2.0, -1),
]


def index_lookup(weight: float) -> int:
    if weight == CRITICAL_WEIGHT:
        raise UnsupportedWeightError(f"weight {weight} is the critical weight")
    for entry in INDEX_TABLE:
        if entry.contains(weight):
            return entry.index
    raise UnsupportedWeightError(f"weight {weight} outside the tabulated range (-4, 0)")
