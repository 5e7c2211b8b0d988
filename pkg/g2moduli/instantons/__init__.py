from .instanton_system import (
    CriticalKind,
    CriticalPoint,
    InstantonState,
    critical_points,
    reflect,
    rhs_autonomous,
    rhs_cone,
    rhs_full,
    rotate_cone,
)
from .local_families import (
    Family,
    SeriesJet,
    clarke_closed_form,
    lotay_oliveira_closed_form,
    seed_jet,
    t_gamma_series,
    tprime_series,
)

__all__ = [
    "CriticalKind",
    "CriticalPoint",
    "InstantonState",
    "critical_points",
    "reflect",
    "rhs_autonomous",
    "rhs_cone",
    "rhs_full",
    "rotate_cone",
    "Family",
    "SeriesJet",
    "clarke_closed_form",
    "lotay_oliveira_closed_form",
    "seed_jet",
    "t_gamma_series",
    "tprime_series",
]
