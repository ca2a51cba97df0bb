"""All constants of the reduced energy expansion.

Interior integrals (over R^N_+, U = U_{0,1}):
  a_N = int U^(2*)                     d1 = alpha_N int U^(2*-1)
  d3  = int |y1|^m U^(2*)              d4  = int |y1|^(m-2) U^(2*)
Boundary integrals (over the plane y_N = 0):
  b_N = int U^(2#)                     d2 = alpha_N int U^(2#-1)
  d5  = int |y1|^n U^(2#)              d6  = int |y1|^(n-2) U^(2#)
(2* = 2N/(N-2), 2# = 2(N-1)/(N-2); d1 and d2 carry the alpha_N prefactor —
the alpha-power bookkeeping is the likeliest implementation bug, so the
closed forms below double as regression oracles.)

Assembled constants, with H0 = Dfrak/sqrt(N(N-1)):
  A  = (1/2* - 1/2) a_N + H0 b_N
  B  = -d1/2 + (N-1) H0 d2            (interaction strength; Dfrak-free)
  B2 = -c0/2* d3 + d0 (N-2) d5
  B3 = -fm(fm-1) c0/(2 2*) d4 + fm(fm-1) d0 (N-2)/2 d6,  fm = min(m,n)
  A1, A2 select the regime-active pieces; B1 = B * B0 where B0 is the
  ring-sum constant extrapolated from exact finite sums.

Closed form for B (independent of Dfrak):
  B = (alpha_N^(2*)/2) * sphere_area(N-1) * I_integral(N-2, N/2+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitIllConditioned, InadmissibleRegime
from .model import ProblemParams, Regime, RegimeTag, validate
from .quad import I_integral, IntegralResult, QuadratureSpec, integrate_reduced, sphere_area

__all__ = [
    "ExpansionConstants",
    "compute_constants",
    "B_closed_form",
    "ring_sum",
    "B0Fit",
    "B0_extrapolate",
    "lambda0",
    "zeta",
]


@dataclass(frozen=True)
class ExpansionConstants:
    a_N: float
    b_N: float
    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float
    A: float
    B: float
    B0: float
    B1: float
    B2: float
    B3: float
    A1: float
    A2: float
    provenance: dict = field(default_factory=dict)
    params: ProblemParams | None = None

    def as_dict(self) -> dict:
        out = {
            k: getattr(self, k)
            for k in ("a_N", "b_N", "d1", "d2", "d3", "d4", "d5", "d6",
                      "A", "B", "B0", "B1", "B2", "B3", "A1", "A2")
        }
        out["provenance"] = dict(self.provenance)
        return out


def _bubble_pow(params: ProblemParams):
    """Returns f(rho, yN, p) = U_{0,1}(rho, yN)^p, vectorized."""
    al, D, N = params.alpha_N, params.Dfrak, params.N

    def f(rho, yN, p):
        g = rho * rho + (yN + D) ** 2 - 1.0
        return (al / g ** ((N - 2) / 2.0)) ** p

    return f


def compute_constants(params: ProblemParams, quadspec: QuadratureSpec | None = None) -> ExpansionConstants:
    """Computes every expansion constant by reduced quadrature and assembly."""
    p = validate(params)
    spec = quadspec or QuadratureSpec()
    N = p.N
    U = _bubble_pow(p)
    ts, tsh = p.two_star, p.two_sharp
    prov: dict = {}

    def interior(weight_pow: float | None, upow: float, pref: float = 1.0) -> float:
        if weight_pow is None:
            res = integrate_reduced(
                lambda rho, yN: pref * U(rho, yN, upow), "radial2", spec, N
            )
        else:
            res = integrate_reduced(
                lambda y1, s, yN: pref
                * np.abs(y1) ** weight_pow
                * U(np.sqrt(y1 * y1 + s * s), yN, upow),
                "axial3", spec, N,
            )
        return res.value

    def boundary(weight_pow: float | None, upow: float, pref: float = 1.0) -> float:
        if weight_pow is None:
            res = integrate_reduced(
                lambda rho: pref * U(rho, np.zeros_like(rho), upow),
                "boundary_radial1", spec, N,
            )
        else:
            res = integrate_reduced(
                lambda y1, s: pref
                * np.abs(y1) ** weight_pow
                * U(np.sqrt(y1 * y1 + s * s), np.zeros_like(y1), upow),
                "boundary_axial2", spec, N,
            )
        return res.value

    a_N = interior(None, ts)
    d1 = interior(None, ts - 1.0, pref=p.alpha_N)
    d3 = interior(p.m, ts)
    d4 = a_N if p.m == 2.0 else interior(p.m - 2.0, ts)
    b_N = boundary(None, tsh)
    d2 = boundary(None, tsh - 1.0, pref=p.alpha_N)
    d5 = boundary(p.n, tsh)
    d6 = b_N if p.n == 2.0 else boundary(p.n - 2.0, tsh)
    for name in ("a_N", "b_N", "d1", "d2", "d3", "d5"):
        prov[name] = "quadrature"
    prov["d4"] = "quadrature" if p.m != 2.0 else "quadrature (= a_N, exponent 0)"
    prov["d6"] = "quadrature" if p.n != 2.0 else "quadrature (= b_N, exponent 0)"

    A = (1.0 / ts - 0.5) * a_N + p.H0 * b_N
    B = -0.5 * d1 + (N - 1) * p.H0 * d2
    fm = p.frak_m
    B2 = -p.c0 / ts * d3 + p.d0 * (N - 2) * d5
    B3 = (
        -fm * (fm - 1.0) * p.c0 / (2.0 * ts) * d4
        + fm * (fm - 1.0) * p.d0 * (N - 2) / 2.0 * d6
    )
    prov.update(A="assembled", B="assembled", B2="assembled", B3="assembled")

    from .model import regime as _regime  # local import avoids cycle at module load

    reg = _regime(p)
    if reg.tag is RegimeTag.M_DOMINANT:
        A1 = -p.c0 / ts * d3
        A2 = -p.m * (p.m - 1.0) * p.c0 / (2.0 * ts) * d4
    elif reg.tag is RegimeTag.N_DOMINANT:
        A1 = (N - 2) * p.d0 * d5
        A2 = p.n * (p.n - 1.0) * (N - 2) * p.d0 / 2.0 * d6
    else:
        A1 = B2
        A2 = B3
    prov.update(A1=f"assembled ({reg.tag.value})", A2=f"assembled ({reg.tag.value})")

    fit = B0_extrapolate((64, 128, 256, 512), 1.0, N)
    B0 = fit.value
    B1 = B * B0
    prov.update(B0="ring_sum extrapolation k=64..512", B1="assembled (B*B0)")

    return ExpansionConstants(
        a_N=a_N, b_N=b_N, d1=d1, d2=d2, d3=d3, d4=d4, d5=d5, d6=d6,
        A=A, B=B, B0=B0, B1=B1, B2=B2, B3=B3, A1=A1, A2=A2,
        provenance=prov, params=p,
    )


def B_closed_form(params: ProblemParams) -> float:
    """B = (alpha_N^(2*)/2) sphere_area(N-1) I_integral(N-2, N/2+1); Dfrak-free."""
    p = params
    return (
        p.alpha_N**p.two_star / 2.0
        * sphere_area(p.N - 1)
        * I_integral(p.N - 2, p.N / 2.0 + 1.0)
    )


# --- ring sums ---------------------------------------------------------------

def ring_sum(k: int, r: float, beta0: float) -> float:
    """Exact sum over the ring: sum_{j=2}^k (2 r sin((j-1) pi / k))^(-beta0)."""
    if k < 2:
        raise DomainError(f"ring_sum needs k >= 2, got {k}")
    j = np.arange(1, k)
    return float(np.sum((2.0 * r * np.sin(j * np.pi / k)) ** (-beta0)))


@dataclass(frozen=True)
class B0Fit:
    value: float
    correction: float       # coefficient of the k^-(N-3) correction term
    fit_residual: float     # max absolute residual of the 2-parameter fit


def B0_extrapolate(k_list, r: float, N: int) -> B0Fit:
    """Extrapolates ring_sum(k, r, N-2) * r^(N-2) / k^(N-2) -> B0 as k -> inf.

    Fits y_k = B0 + c k^-(N-3) by linear least squares.  The combination is
    exactly r-independent (ring_sum is homogeneous of degree -(N-2) in r).
    """
    ks = np.asarray(sorted(k_list), dtype=float)
    if len(ks) < 4:
        raise FitIllConditioned("need at least 4 ring sizes for the extrapolation")
    y = np.array([ring_sum(int(k), r, N - 2) * r ** (N - 2) / k ** (N - 2) for k in ks])
    X = np.stack([np.ones_like(ks), ks ** (-(N - 3.0))], axis=1)
    coef, res, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 2:
        raise FitIllConditioned("extrapolation design matrix is singular")
    resid = float(np.max(np.abs(X @ coef - y)))
    return B0Fit(value=float(coef[0]), correction=float(coef[1]), fit_residual=resid)


def lambda0(reg: Regime, constants: ExpansionConstants, params: ProblemParams) -> float:
    """Scale Lambda0 that zeroes the leading dF/dLambda bracket for the regime."""
    if not reg.admissible:
        raise InadmissibleRegime(
            f"regime {reg.tag.value} with c0={params.c0}, d0={params.d0} is not admissible"
        )
    p, c = params, constants
    N = p.N
    rpow = p.r0 ** (N - 2)
    if reg.tag is RegimeTag.M_DOMINANT:
        base = p.two_star * c.B1 * (N - 2) / (-p.c0 * p.m * c.d3 * rpow)
        return base ** (1.0 / (N - 2 - p.m))
    if reg.tag is RegimeTag.N_DOMINANT:
        base = c.B1 / (p.d0 * p.n * c.d5 * rpow)
        return base ** (1.0 / (N - 2 - p.n))
    base = c.B1 * (N - 2) / (c.B2 * p.frak_m * rpow)
    return base ** (1.0 / (N - 2 - p.frak_m))


# --- Riemann zeta (Euler-Maclaurin) ------------------------------------------

# Bernoulli numbers B_2..B_12 for the correction terms
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0)


def zeta(s: float) -> float:
    """Riemann zeta for s > 1 by Euler-Maclaurin with M=20 explicit terms.

    Partial sum + M^(1-s)/(s-1) + M^(-s)/2 + Bernoulli corrections; at least
    12 correct digits for s >= 2.
    """
    if not s > 1.0:
        raise DomainError(f"zeta requires s > 1, got {s}")
    M = 20
    total = sum(n ** (-s) for n in range(1, M))
    total += M ** (1.0 - s) / (s - 1.0) + 0.5 * M ** (-s)
    # term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * M^(-s-2j+1)
    rising = s
    fact = 2.0
    for j, b2j in enumerate(_BERNOULLI, start=1):
        total += b2j / fact * rising * M ** (-s - 2.0 * j + 1.0)
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j)
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0)
    return total
