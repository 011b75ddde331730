"""False positive rate of the dual-hypercone detector.

For a key uniformly distributed on the unit sphere of R^d, the squared
cosine between a fixed feature and the key follows Beta(1/2, (d-1)/2), so

    FPR(theta) = P(|cos| > cos theta) = 1 - I_{cos^2 theta}(1/2, (d-1)/2)
               = I_{sin^2 theta}((d-1)/2, 1/2).

The second form is used so that tiny rates keep full relative precision.
"""

import math
from dataclasses import dataclass

import torch

from .betainc import reg_inc_beta
from .errors import DomainError, StatsError

BISECTION_ITERATIONS = 200


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise DomainError(f"Dimension must be an integer >= 2, got {d}")


def fpr_of_cosine(cosine: float, d: int) -> float:
    """Probability that a uniform key has |cos| above ``cosine``."""
    _check_dim(d)
    c = min(abs(float(cosine)), 1.0)
    sin2 = max(0.0, (1.0 - c) * (1.0 + c))
    return reg_inc_beta(sin2, (d - 1) / 2.0, 0.5)


def fpr_of_angle(theta: float, d: int) -> float:
    if not (0.0 <= theta <= math.pi / 2):
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    _check_dim(d)
    if theta == math.pi / 2:
        return 1.0
    return reg_inc_beta(math.sin(theta) ** 2, (d - 1) / 2.0, 0.5)


def angle_of_fpr(fpr: float, d: int) -> float:
    """Half-angle theta with ``fpr_of_angle(theta, d) == fpr``, by bisection."""
    if not (0.0 < fpr < 1.0):
        raise DomainError(f"fpr must lie in (0, 1), got {fpr}")
    _check_dim(d)
    lo, hi = 0.0, math.pi / 2
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fpr_of_angle(mid, d) < fpr:
            lo = mid
        else:
            hi = mid
    # Return whichever end of the final bracket is closer in rate.
    if abs(fpr_of_angle(lo, d) - fpr) <= abs(fpr_of_angle(hi, d) - fpr):
        return lo
    return hi


def p_value(x: torch.Tensor, a: torch.Tensor) -> float:
    """FPR at the observed cosine between feature ``x`` and unit carrier ``a``.

    Smaller means stronger evidence of a mark.
    """
    x = torch.as_tensor(x, dtype=torch.float64)
    a = torch.as_tensor(a, dtype=torch.float64)
    if x.shape != a.shape or x.ndim != 1:
        raise DomainError(f"Feature {tuple(x.shape)} and carrier {tuple(a.shape)} differ")
    norm = float(torch.linalg.vector_norm(x))
    if norm == 0.0:
        raise DomainError("p-value undefined for the zero feature vector")
    cosine = float(torch.dot(x, a)) / (norm * float(torch.linalg.vector_norm(a)))
    return fpr_of_cosine(cosine, x.shape[0])


@dataclass(frozen=True)
class HyperconeParams:
    """Detection region parameters; theta and fpr are kept consistent."""

    d: int
    theta: float
    fpr: float

    def __post_init__(self):
        _check_dim(self.d)
        if not (0.0 < self.theta < math.pi / 2):
            raise DomainError(f"theta must lie in (0, pi/2), got {self.theta}")
        if abs(fpr_of_angle(self.theta, self.d) - self.fpr) > 1e-12:
            raise StatsError(
                f"fpr={self.fpr} does not match theta={self.theta} at d={self.d}"
            )

    @classmethod
    def from_fpr(cls, fpr: float, d: int) -> "HyperconeParams":
        theta = angle_of_fpr(fpr, d)
        return cls(d=d, theta=theta, fpr=fpr_of_angle(theta, d))

    @classmethod
    def from_angle(cls, theta: float, d: int) -> "HyperconeParams":
        return cls(d=d, theta=theta, fpr=fpr_of_angle(theta, d))

    @property
    def cos2(self) -> float:
        return math.cos(self.theta) ** 2
