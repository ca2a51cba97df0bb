"""Problem parameters, curvature profiles, scaling law and regime logic.

The model is posed on the half-space R^N_+ with a prescribed (negative)
scalar-curvature magnitude K and boundary mean curvature H that are radial
power-law perturbations of constants near a reference radius r0:

    K(r) = 1 - c0 |r - r0|^m            (normalized so K(r0) = 1)
    H(r) = H0 - d0 |r - r0|^n,   H0 = Dfrak / sqrt(N (N-1))

with exponents m, n in [2, N-2) and the invariant ratio Dfrak > 1.  Outside
the locality window |r - r0| < delta both profiles are clamped at their
window-edge value, which keeps them bounded and continuous.

The ring ansatz concentrates at radius mu * r0 where the scaling parameter
is mu = k^((N-2)/(N-2-frak_m)) with frak_m = min(m, n).  Which of the two
profile perturbations drives the reduced energy is the "regime": the smaller
exponent wins, ties are balanced.  The sign conditions for an admissible
regime come from the existence theorem's sign table.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import (
    DimensionTooSmall,
    ExponentOutOfRange,
    NonPhysicalD,
    ProfileNotPositive,
    ValidationError,
)

__all__ = [
    "ProblemParams",
    "Regime",
    "RegimeTag",
    "validate",
    "curvature_K",
    "curvature_H",
    "regime",
    "mu",
]


class RegimeTag(enum.Enum):
    M_DOMINANT = "M_DOMINANT"   # m < n: interior profile drives the expansion
    BALANCED = "BALANCED"       # m = n: both profiles enter at the same order
    N_DOMINANT = "N_DOMINANT"   # m > n: boundary profile drives the expansion


@dataclass(frozen=True)
class ProblemParams:
    """Immutable parameter set; see the module docstring for meanings.

    theta, delta, theta_bar, sigma are "small constants" of the asymptotic
    analysis; the defaults are conservative choices that keep the search box
    inside the profile window at moderate k.  delta=None means 0.5 * r0.
    """

    N: int
    m: float
    n: float
    c0: float
    d0: float
    r0: float = 1.0
    Dfrak: float = 2.0
    theta: float = 0.5
    delta: float | None = None
    theta_bar: float = 0.05
    sigma: float = 0.1

    def __post_init__(self) -> None:
        if self.delta is None:
            object.__setattr__(self, "delta", 0.5 * self.r0)

    # Derived quantities -------------------------------------------------

    @property
    def frak_m(self) -> float:
        return min(self.m, self.n)

    @property
    def c_N(self) -> float:
        return 4.0 * (self.N - 1) / (self.N - 2)

    @property
    def alpha_N(self) -> float:
        return (4.0 * self.N * (self.N - 1)) ** ((self.N - 2) / 4.0)

    @property
    def two_star(self) -> float:
        """Critical Sobolev exponent 2N/(N-2)."""
        return 2.0 * self.N / (self.N - 2)

    @property
    def two_sharp(self) -> float:
        """Critical boundary-trace exponent 2(N-1)/(N-2)."""
        return 2.0 * (self.N - 1) / (self.N - 2)

    @property
    def H0(self) -> float:
        """Boundary mean curvature at the reference radius."""
        return self.Dfrak / math.sqrt(self.N * (self.N - 1))

    # JSON round trip ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemParams":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown ProblemParams keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ProblemParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    frak_m: float
    admissible: bool
    # active exponent j of the reduced functional; always equals frak_m but
    # kept separate so reports can name the driving mechanism
    j: float = field(default=0.0)


def validate(params: ProblemParams) -> ProblemParams:
    """Checks every structural invariant; returns params unchanged on success."""
    p = params
    if int(p.N) != p.N or p.N < 5:
        raise DimensionTooSmall(f"need integer N >= 5, got N={p.N}")
    if not (2.0 <= p.m < p.N - 2):
        raise ExponentOutOfRange(f"need 2 <= m < N-2, got m={p.m}, N={p.N}")
    if not (2.0 <= p.n < p.N - 2):
        raise ExponentOutOfRange(f"need 2 <= n < N-2, got n={p.n}, N={p.N}")
    if not p.Dfrak > 1.0:
        raise NonPhysicalD(f"need Dfrak > 1, got {p.Dfrak}")
    if not p.r0 > 0:
        raise ValidationError(f"need r0 > 0, got {p.r0}")
    if not p.delta > 0:
        raise ValidationError(f"need delta > 0, got {p.delta}")
    if not p.theta > 0:
        raise ValidationError(f"need theta > 0, got {p.theta}")
    if not 0.0 < p.theta_bar < 1.0:
        raise ValidationError(f"need theta_bar in (0,1), got {p.theta_bar}")
    if not 0.0 < p.sigma < 1.0:
        raise ValidationError(f"need sigma in (0,1), got {p.sigma}")
    return p


def _clamped_offset(r, r0: float, delta: float):
    """|r - r0| clamped at the window edge delta."""
    return np.minimum(np.abs(np.asarray(r, dtype=float) - r0), delta)


def curvature_K(r, params: ProblemParams):
    """K(r) = 1 - c0 |r-r0|^m inside the window, clamped outside; positive.

    Accepts scalars or arrays (vectorized over r).
    """
    p = params
    # worst value inside the window sits at the edge when c0 > 0
    if 1.0 - p.c0 * p.delta ** p.m <= 0.0:
        raise ProfileNotPositive(
            f"K touches zero inside the window: c0={p.c0}, delta={p.delta}, m={p.m}"
        )
    h = _clamped_offset(r, p.r0, p.delta)
    out = 1.0 - p.c0 * h ** p.m
    return out if np.ndim(r) else float(out)


def curvature_H(r, params: ProblemParams):
    """H(r) = H0 - d0 |r-r0|^n inside the window, clamped outside; positive."""
    p = params
    if p.H0 - p.d0 * p.delta ** p.n <= 0.0:
        raise ProfileNotPositive(
            f"H touches zero inside the window: d0={p.d0}, delta={p.delta}, n={p.n}"
        )
    h = _clamped_offset(r, p.r0, p.delta)
    out = p.H0 - p.d0 * h ** p.n
    return out if np.ndim(r) else float(out)


def regime(params: ProblemParams) -> Regime:
    """Classifies the driving mechanism and applies the sign table."""
    p = params
    if p.m < p.n:
        tag = RegimeTag.M_DOMINANT
        admissible = p.c0 < 0
    elif p.m > p.n:
        tag = RegimeTag.N_DOMINANT
        admissible = p.d0 > 0
    else:
        tag = RegimeTag.BALANCED
        admissible = p.c0 < 0 and p.d0 > 0
    fm = p.frak_m
    return Regime(tag=tag, frak_m=fm, admissible=admissible, j=fm)


def mu(k: int, params: ProblemParams) -> float:
    """Scaling parameter mu = k^((N-2)/(N-2-frak_m)); mu(1) = 1."""
    if k < 1:
        raise ValidationError(f"need k >= 1, got {k}")
    p = params
    return float(k) ** ((p.N - 2) / (p.N - 2 - p.frak_m))
