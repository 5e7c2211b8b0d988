"""g2moduli: SU(2)^3-invariant G2-instantons on the Bryant-Salamon metric.

Evaluates the metric, integrates the invariant instanton equations from
series data at the singular orbit, classifies each solution against the
conical limit system and locates the edges of the moduli space.
"""

__version__ = "0.1.0"
