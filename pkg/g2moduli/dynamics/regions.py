"""Forward-invariant regions of the (f+, f-) plane."""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from g2moduli.exceptions import ConfigError

INF = math.inf


@dataclass(frozen=True)
class Region:
    """Open rectangle (plus_lo, plus_hi) x (minus_lo, minus_hi); bounds may be infinite."""

    name: str
    plus_lo: float = -INF
    plus_hi: float = INF
    minus_lo: float = -INF
    minus_hi: float = INF

    def contains(self, f_plus: float, f_minus: float, band: float = 0.0) -> bool:
        """Membership, widened by ``band`` on every side."""
        return (
            self.plus_lo - band < f_plus < self.plus_hi + band
            and self.minus_lo - band < f_minus < self.minus_hi + band
        )

    def mask(self, f_plus: np.ndarray, f_minus: np.ndarray, band: float = 0.0) -> np.ndarray:
        """Vectorised ``contains`` over sample arrays."""
        f_plus = np.asarray(f_plus)
        f_minus = np.asarray(f_minus)
        return (
            (f_plus > self.plus_lo - band)
            & (f_plus < self.plus_hi + band)
            & (f_minus > self.minus_lo - band)
            & (f_minus < self.minus_hi + band)
        )

    def distance_outside(self, f_plus: float, f_minus: float) -> float:
        """How far a point lies outside the closed rectangle (0 inside)."""
        dx = max(self.plus_lo - f_plus, 0.0, f_plus - self.plus_hi)
        dy = max(self.minus_lo - f_minus, 0.0, f_minus - self.minus_hi)
        return max(dx, dy)

    def bounds(self) -> Tuple[float, float, float, float]:
        return self.plus_lo, self.plus_hi, self.minus_lo, self.minus_hi


H_PLUS = Region("H_PLUS", minus_lo=0.0)
H_MINUS = Region("H_MINUS", minus_hi=0.0)
R_ZERO = Region("R_ZERO", plus_lo=2.0 / 3.0, plus_hi=1.0, minus_lo=0.0, minus_hi=1.0)
R_INFINITY = Region("R_INFINITY", plus_lo=1.0, minus_lo=1.0)

REGIONS: Dict[str, Region] = {region.name: region for region in (H_PLUS, H_MINUS, R_ZERO, R_INFINITY)}


def resolve_regions(names: Iterable[str]) -> List[Region]:
    regions = []
    for name in names:
        try:
            regions.append(REGIONS[name.upper()])
        except KeyError:
            raise ConfigError(f"unknown region {name!r}; expected one of {sorted(REGIONS)}") from None
    return regions
