from .betainc import reg_inc_beta
from .hypercone import (
    HyperconeParams,
    angle_of_fpr,
    fpr_of_angle,
    fpr_of_cosine,
    p_value,
)
from .errors import StatsError, DomainError, ConvergenceError

__all__ = [
    "reg_inc_beta",
    "HyperconeParams",
    "angle_of_fpr",
    "fpr_of_angle",
    "fpr_of_cosine",
    "p_value",
    "StatsError",
    "DomainError",
    "ConvergenceError",
]
