from .bs_metric import (
    BRYANT_SALAMON,
    CONE,
    MetricProfile,
    MetricSample,
    dr_dt,
    hitchin_residual,
    metric_at_r,
    metric_at_t,
    metric_table,
    r_of_t,
    t_of_r,
)

__all__ = [
    "BRYANT_SALAMON",
    "CONE",
    "MetricProfile",
    "MetricSample",
    "dr_dt",
    "hitchin_residual",
    "metric_at_r",
    "metric_at_t",
    "metric_table",
    "r_of_t",
    "t_of_r",
]
