"""Energy functional on the ring ansatz and the reduced expansion checks.

The functional is

  J(u) = c_N/2 int |grad u|^2 + (1/2*) int K(|y|/mu) u^(2*)
         - (N-2) int_bd H(|ybar|/mu) u^(2#)

evaluated on W = W_{r,Lambda}.  J_full splits it into pieces that each admit
an accurate engine:

  * gradient term: integration by parts against the exact bubble equations
    turns c_N int grad U_i . grad U_j into
    -int U_i^(2*-1) U_j + 2 (N-1) H0 int_bd U_i^(2#-1) U_j,
    so the whole term is a combination of the single-bubble masses a_N, b_N
    (radial reductions) and pairwise interaction integrals (bipolar
    reductions) - no MC noise at all;
  * curvature terms: sector symmetry gives k times the integral over the
    wedge around the first bubble; Monte Carlo evaluates only the difference
    K W^(2*) - U_1^(2*) (resp. H W^(2#) - H0 U_1^(2#)) against the exactly
    known control-variate mass, which shrinks the MC variance to the size of
    the profile/interaction corrections being measured.

F_reduced / F_reduced_grad are the closed-form leading expansions; the error
fields and weighted norms drive the decay-rate experiment, and
expansion_check compares J_full against the k(A - B sum - profile terms)
bracket with the exact finite ring sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bubble import BubbleParams, RingConfig, bubble_derivatives, bubble_eval, w_eval
from .coeffs import ExpansionConstants, lambda0, ring_sum
from .errors import (
    BudgetExhausted,
    EmptyGrid,
    FitIllConditioned,
    OutsideBox,
    ValidationError,
    NotOnBoundary,
)
from .model import ProblemParams, Regime, curvature_H, curvature_K, mu, regime
from .quad import (
    HeavyTailMixture,
    IntegralResult,
    QuadratureSpec,
    integrate_mc_halfspace,
    integrate_reduced,
)

__all__ = [
    "MCSpec",
    "WeightedNormSpec",
    "ExpansionCheck",
    "JFullResult",
    "dj_bounds",
    "J_full",
    "F_reduced",
    "F_reduced_grad",
    "error_field",
    "sector_grid",
    "weighted_norm",
    "decay_fit",
    "pairing_Z",
    "expansion_check",
]


@dataclass(frozen=True)
class MCSpec:
    samples: int = 1_000_000
    seed: int = 1


@dataclass(frozen=True)
class WeightedNormSpec:
    tau: float = 0.2
    cutoff_radius: float | None = None   # None: half the ring circumference
    n_log: int = 24                      # points per log-spaced ray
    n_arc: int = 16                      # points along the sector arc

    def validated(self, N: int) -> "WeightedNormSpec":
        if not 0.0 < self.tau < (N - 2) / 2.0:
            raise ValidationError(f"need 0 < tau < (N-2)/2, got tau={self.tau}")
        return self


@dataclass(frozen=True)
class JFullResult(IntegralResult):
    mc_error: float = 0.0        # combined MC standard error inside `value`
    components: tuple = ()       # (name, value) pairs for diagnostics


@dataclass(frozen=True)
class ExpansionCheck:
    k: int
    r: float
    Lambda: float
    J_full_value: float
    J_full_error: float
    mc_error: float
    leading_value: float
    residual: float
    residual_bound_prediction: float   # k mu^-(frak_m + sigma) scale
    gate: float                        # max(3 mc_error, tol * k * mu^-frak_m)
    passed: bool


# --- box bounds ---------------------------------------------------------------

def dj_bounds(k: int, constants: ExpansionConstants, params: ProblemParams):
    """Bounds of the shrinking box D_j around (mu r0, Lambda0).

    r in mu r0 -+ mu^-theta_bar, Lambda in Lambda0 -+ mu^-(3/2) theta_bar.
    At desk-scale k the nominal Lambda interval can cross zero, so it is
    intersected with the a-priori admissible range [Lambda0/4, 4 Lambda0].
    Returns (r_lo, r_hi, L_lo, L_hi, Lambda0, j).
    """
    reg = regime(params)
    lam0 = lambda0(reg, constants, params)
    mu_val = mu(k, params)
    hw_r = mu_val ** (-params.theta_bar)
    hw_L = mu_val ** (-1.5 * params.theta_bar)
    r_lo, r_hi = mu_val * params.r0 - hw_r, mu_val * params.r0 + hw_r
    L_lo = max(lam0 - hw_L, lam0 / 4.0)
    L_hi = min(lam0 + hw_L, 4.0 * lam0)
    return r_lo, r_hi, L_lo, L_hi, lam0, reg.j


# --- reduced functional --------------------------------------------------------

def _check_box(r: float, Lambda: float, k: int,
               constants: ExpansionConstants, params: ProblemParams) -> float:
    r_lo, r_hi, L_lo, L_hi, _, j = dj_bounds(k, constants, params)
    if not (r_lo <= r <= r_hi and L_lo <= Lambda <= L_hi):
        raise OutsideBox(
            f"(r, Lambda)=({r}, {Lambda}) outside D_j box "
            f"[{r_lo}, {r_hi}] x [{L_lo}, {L_hi}]"
        )
    return j


def F_reduced(r: float, Lambda: float, k: int,
              constants: ExpansionConstants, params: ProblemParams) -> float:
    """Leading-order reduced energy on the box D_j:

    F = k [ A + (A1/Lambda^j - B1/(Lambda^(N-2) r0^(N-2))) / mu^j
            + A2 (mu r0 - r)^2 / (Lambda^(j-2) mu^j) ].
    """
    j = _check_box(r, Lambda, k, constants, params)
    p, c = params, constants
    N = p.N
    mu_val = mu(k, p)
    bracket = (
        c.A
        + (c.A1 / Lambda**j - c.B1 / (Lambda ** (N - 2) * p.r0 ** (N - 2))) / mu_val**j
        + c.A2 * (mu_val * p.r0 - r) ** 2 / (Lambda ** (j - 2.0) * mu_val**j)
    )
    return k * bracket


def F_reduced_grad(r: float, Lambda: float, k: int,
                   constants: ExpansionConstants, params: ProblemParams):
    """Analytic (dF/dr, dF/dLambda) of F_reduced."""
    j = _check_box(r, Lambda, k, constants, params)
    p, c = params, constants
    N = p.N
    mu_val = mu(k, p)
    dF_dr = -2.0 * k * c.A2 * (mu_val * p.r0 - r) / (Lambda ** (j - 2.0) * mu_val**j)
    dF_dL = k * (
        (-c.A1 * j / Lambda ** (j + 1.0)
         + c.B1 * (N - 2) / (Lambda ** (N - 1) * p.r0 ** (N - 2))) / mu_val**j
        - (j - 2.0) * c.A2 * (mu_val * p.r0 - r) ** 2
        / (Lambda ** (j - 1.0) * mu_val**j)
    )
    return dF_dr, dF_dL


# --- error fields ----------------------------------------------------------------

def error_field(y, ring: RingConfig, params: ProblemParams, which: str):
    """Pointwise residual of the ansatz in the scaled problem.

    which="in":  K(|y|/mu) W^p - sum_j U_j^p          (p = (N+2)/(N-2); the
                 second term is c_N Delta W by the exact bubble equation)
    which="bd":  H(|ybar|/mu) W^q - H0 sum_j U_j^q    (q = N/(N-2); requires
                 y_N = 0; the second term is -(2/(N-2)) dW/dy_N exactly)
    """
    y = np.asarray(y, dtype=float)
    p = params
    N = p.N
    mu_val = mu(ring.k, p)
    W = w_eval(y, ring)

    if which == "in":
        pexp = (N + 2.0) / (N - 2.0)
        K = curvature_K(np.linalg.norm(y, axis=-1) / mu_val, p)
        lap_sum = sum(bubble_eval(y, b) ** pexp for b in ring.bubbles)
        return K * W**pexp - lap_sum

    if which == "bd":
        if np.any(y[..., -1] != 0.0):
            raise NotOnBoundary("boundary error field requires y_N = 0")
        qexp = N / (N - 2.0)
        H = curvature_H(np.linalg.norm(y[..., :-1], axis=-1) / mu_val, p)
        bd_sum = sum(bubble_eval(y, b) ** qexp for b in ring.bubbles)
        return H * W**qexp - p.H0 * bd_sum

    raise ValidationError(f"unknown error field selector: {which!r}")


# --- weighted norms ----------------------------------------------------------------

_NORM_EXP = {"star": lambda N, tau: (N - 2) / 2.0 + tau,
             "dstar": lambda N, tau: (N + 2) / 2.0 + tau,
             "tstar": lambda N, tau: N / 2.0 + tau}


def envelope(y, ring: RingConfig, exponent: float):
    """sum_j (1 + |y - x_j|)^(-exponent)."""
    y = np.asarray(y, dtype=float)
    out = 0.0
    for pt in ring.points:
        out = out + (1.0 + np.linalg.norm(y - pt, axis=-1)) ** (-exponent)
    return out


def sector_grid(ring: RingConfig, normspec: WeightedNormSpec, boundary: bool) -> np.ndarray:
    """Graded grid covering the first sector: dense log-spaced rays around the
    first bubble, points along the sector arc out to the mid-point with the
    neighbor, and an inward/outward radial sweep.  Interior grids add height
    levels in y_N; boundary grids stay at y_N = 0.
    """
    p = ring.params
    N = p.N
    k = ring.k
    r = ring.r
    x1 = ring.points[0]
    cutoff = normspec.cutoff_radius or (math.pi * r)

    e1 = np.zeros(N); e1[0] = 1.0       # radial at x1
    e2 = np.zeros(N); e2[1] = 1.0       # tangential
    eN = np.zeros(N); eN[-1] = 1.0      # vertical
    dirs = [e1, -e1, e2, -e2, (e1 + e2) / math.sqrt(2), (e1 - e2) / math.sqrt(2),
            (-e1 + e2) / math.sqrt(2), (-e1 - e2) / math.sqrt(2)]
    if N >= 4:
        e3 = np.zeros(N); e3[2] = 1.0   # transverse boundary direction
        dirs += [e3, -e3, (e2 + e3) / math.sqrt(2)]
    if not boundary:
        dirs += [eN, (e1 + eN) / math.sqrt(2), (e2 + eN) / math.sqrt(2),
                 (e1 + e2 + eN) / math.sqrt(3), (-e1 + eN) / math.sqrt(2)]

    mags = np.concatenate([[0.0], np.logspace(-2, math.log10(cutoff), normspec.n_log)])
    pts = [x1 + m * d for d in dirs for m in mags]

    # sector arc out to the bisector with the neighbor, at several radii/heights
    angles = np.linspace(0.0, math.pi / k, normspec.n_arc)
    radii = r * np.array([0.9, 1.0, 1.1])
    heights = [0.0] if boundary else [0.0, 0.5, 2.0]
    for a in angles:
        for rr in radii:
            for h in heights:
                q = np.zeros(N)
                q[0] = rr * math.cos(a)
                q[1] = rr * math.sin(a)
                q[-1] = h
                pts.append(q)

    # inward ray toward the origin and outward continuation
    for frac in np.concatenate([np.linspace(0.05, 0.95, 10), np.linspace(1.05, 2.0, 6)]):
        q = x1 * frac
        pts.append(q)
        if not boundary:
            pts.append(q + eN)

    grid = np.array(pts)
    if boundary:
        grid[:, -1] = 0.0
    else:
        grid = grid[grid[:, -1] >= 0.0]
        grid[:, -1] = np.abs(grid[:, -1])
    return grid


def weighted_norm(fieldvals, ring: RingConfig, which: str,
                  normspec: WeightedNormSpec, grid: np.ndarray | None = None) -> float:
    """Grid sup of |field| / envelope for the chosen weight exponent.

    fieldvals is a callable(points)->values (or an object with .value).
    which selects the exponent: star (N-2)/2+tau, dstar (N+2)/2+tau,
    tstar N/2+tau with a boundary grid.  The result is a lower bound of the
    true sup over the half-space, taken on the graded sector grid.
    """
    if which not in _NORM_EXP:
        raise ValidationError(f"unknown norm selector {which!r}")
    spec = normspec.validated(ring.params.N)
    if grid is None:
        grid = sector_grid(ring, spec, boundary=(which == "tstar"))
    if len(grid) == 0:
        raise EmptyGrid("weighted norm needs a non-empty grid")
    f = fieldvals.value if hasattr(fieldvals, "value") else fieldvals
    vals = np.abs(np.asarray(f(grid), dtype=float))
    env = envelope(grid, ring, _NORM_EXP[which](ring.params.N, spec.tau))
    return float(np.max(vals / env))


def decay_fit(k_list, params: ProblemParams, which: str, Lambda: float = 1.0,
              normspec: WeightedNormSpec | None = None, field_factory=None) -> dict:
    """Least-squares slope of log ||E|| versus log mu over the given ring sizes.

    which="in" measures the interior residual in the dstar norm, "bd" the
    boundary residual in the tstar norm, always at r = mu r0.  field_factory
    optionally replaces the error field (used by control experiments); it
    receives the RingConfig and returns a callable(points)->values.
    """
    if len(k_list) < 4:
        raise FitIllConditioned("need at least 4 ring sizes for the decay fit")
    spec = normspec or WeightedNormSpec()
    norm_kind = "dstar" if which == "in" else "tstar"
    logs_mu, logs_norm = [], []
    for k in sorted(k_list):
        mu_val = mu(k, params)
        ring = RingConfig(k=k, r=mu_val * params.r0, Lambda=Lambda, params=params)
        if field_factory is None:
            fld = lambda pts, _ring=ring: error_field(pts, _ring, params, which)
        else:
            fld = field_factory(ring)
        nrm = weighted_norm(fld, ring, norm_kind, spec)
        if nrm <= 0.0:
            raise FitIllConditioned("zero norm encountered; cannot fit log decay")
        logs_mu.append(math.log(mu_val))
        logs_norm.append(math.log(nrm))
    x = np.array(logs_mu)
    y = np.array(logs_norm)
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


# --- full functional ---------------------------------------------------------------

def _pair_interactions(ring: RingConfig, quadspec: QuadratureSpec):
    """Pairwise interaction integrals of bubble 1 against bubbles 2..k.

    Both are scale invariant, so they are computed at unit scale with the
    separations multiplied by Lambda:
      interior  int U_{0,1}^(2*-1) U_{z,1}   (bipolar3)
      boundary  int_bd U_{0,1}^(2#-1) U_{z,1} (boundary_axial2)
    Returns (sum_int, sum_bd, err, evals) over i = 2..k with multiplicity.
    """
    p = ring.params
    N = p.N
    al = p.alpha_N
    D = p.Dfrak
    k = ring.k
    if k == 1:
        return 0.0, 0.0, 0.0, 0
    seps = 2.0 * ring.r * np.sin(np.arange(1, k) * np.pi / k) * ring.Lambda
    groups: dict[float, int] = {}
    for s in seps:
        key = round(float(s), 12)
        groups[key] = groups.get(key, 0) + 1

    sum_int = sum_bd = err = 0.0
    evals = 0
    nu = (N - 2) / 2.0
    for L, mult in sorted(groups.items()):
        # U1^(2*-1) U2 = al^(2*) g1^(-(N+2)/2) g2^(-nu) in bipolar distances
        def f_int(d1, d2, yN):
            g1 = d1 * d1 + (yN + D) ** 2 - 1.0
            g2 = d2 * d2 + (yN + D) ** 2 - 1.0
            return al ** p.two_star * g1 ** (-(N + 2) / 2.0) * g2 ** (-nu)

        res_i = integrate_reduced(f_int, "bipolar3", quadspec, N, separation=L)

        def f_bd(y1, s):
            g1 = y1 * y1 + s * s + D * D - 1.0
            g2 = (y1 - L) ** 2 + s * s + D * D - 1.0
            return al ** p.two_sharp * g1 ** (-N / 2.0) * g2 ** (-nu)

        R = quadspec.truncation_radius
        res_b = integrate_reduced(f_bd, "boundary_axial2", quadspec, N,
                                  axial_range=(-R, L + R))
        sum_int += mult * res_i.value
        sum_bd += mult * res_b.value
        err += mult * (res_i.error_estimate + 2.0 * (N - 1) * p.H0 * res_b.error_estimate)
        evals += res_i.evals + res_b.evals
    return sum_int, sum_bd, err, evals


def _sector_mask_interior(pts: np.ndarray, k: int) -> np.ndarray:
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    return np.abs(phi) <= np.pi / k + 1e-15


def J_full(ring: RingConfig, quadspec: QuadratureSpec | None = None,
           mc_spec: MCSpec | None = None) -> JFullResult:
    """Full functional J(W_{r,Lambda}); see the module docstring for the split."""
    quadspec = quadspec or QuadratureSpec()
    mc_spec = mc_spec or MCSpec()
    p = ring.params
    N = p.N
    k = ring.k
    Lam = ring.Lambda
    mu_val = mu(k, p)
    ts, tsh = p.two_star, p.two_sharp
    H0 = p.H0
    x1 = ring.points[0]

    # single-bubble masses (scale invariant)
    al, D = p.alpha_N, p.Dfrak

    def upow(rho, yN, power):
        g = rho * rho + (yN + D) ** 2 - 1.0
        return (al / g ** ((N - 2) / 2.0)) ** power

    res_a = integrate_reduced(lambda rho, yN: upow(rho, yN, ts), "radial2", quadspec, N)
    res_b = integrate_reduced(lambda rho: upow(rho, np.zeros_like(rho), tsh),
                              "boundary_radial1", quadspec, N)
    a_N, b_N = res_a.value, res_b.value

    sum_int, sum_bd, pair_err, pair_evals = _pair_interactions(ring, quadspec)

    grad_term = 0.5 * k * (
        -a_N + 2.0 * (N - 1) * H0 * b_N
        - sum_int + 2.0 * (N - 1) * H0 * sum_bd
    )

    # --- K-term over the first sector, control variate U1^(2*) ---------------
    b1 = ring.bubbles[0]
    mix_in = HeavyTailMixture(centers=x1[None, :], scales=np.array([1.0 / Lam]),
                              dim=N, tail=2 * N - 2, halfspace=True)

    # the sector indicator hits only the W-term; the control variate U1^(2*)
    # is subtracted over the whole half-space, so k (a_N + MC) is exactly
    # int K W^(2*) with no sector-tail correction
    def diff_in(pts):
        mask = _sector_mask_interior(pts, k)
        W = w_eval(pts, ring)
        U1 = bubble_eval(pts, b1)
        K = curvature_K(np.linalg.norm(pts, axis=-1) / mu_val, p)
        return np.where(mask, K * W**ts, 0.0) - U1**ts

    mc_in = integrate_mc_halfspace(diff_in, mix_in, mc_spec.samples, mc_spec.seed)
    K_term = (1.0 / ts) * k * (a_N + mc_in.value)

    # --- H-term over the boundary sector, control variate H0 U1^(2#) ---------
    mix_bd = HeavyTailMixture(centers=x1[None, :-1], scales=np.array([1.0 / Lam]),
                              dim=N - 1, tail=2 * N - 3, halfspace=False)

    def diff_bd(pts_bar):
        pts = np.concatenate([pts_bar, np.zeros((len(pts_bar), 1))], axis=1)
        mask = _sector_mask_interior(pts, k)
        W = w_eval(pts, ring)
        U1 = bubble_eval(pts, b1)
        H = curvature_H(np.linalg.norm(pts_bar, axis=-1) / mu_val, p)
        return np.where(mask, H * W**tsh, 0.0) - H0 * U1**tsh

    mc_bd = integrate_mc_halfspace(diff_bd, mix_bd, mc_spec.samples, mc_spec.seed + 1)
    H_term = -(N - 2) * k * (H0 * b_N + mc_bd.value)

    value = grad_term + K_term + H_term
    mc_error = (
        (k / ts) * mc_in.error_estimate + (N - 2) * k * mc_bd.error_estimate
    )
    quad_error = (
        0.5 * k * (res_a.error_estimate + 2 * (N - 1) * H0 * res_b.error_estimate)
        + 0.5 * k * pair_err
        + (k / ts) * res_a.error_estimate
        + (N - 2) * k * H0 * res_b.error_estimate
    )
    evals = (res_a.evals + res_b.evals + pair_evals + mc_in.evals + mc_bd.evals)
    if evals > quadspec.max_evals + 2 * mc_spec.samples + 10_000_000:
        raise BudgetExhausted("J_full exceeded its evaluation budget")
    components = (
        ("grad_term", grad_term), ("K_term", K_term), ("H_term", H_term),
        ("a_N", a_N), ("b_N", b_N), ("pair_interior", sum_int),
        ("pair_boundary", sum_bd), ("mc_in", mc_in.value), ("mc_bd", mc_bd.value),
    )
    return JFullResult(value=value, error_estimate=quad_error + mc_error,
                       evals=evals, truncation_tail_bound=0.0,
                       mc_error=mc_error, components=components)


# --- pairings -----------------------------------------------------------------

def pairing_Z(phi, i: int, ell: int, ring: RingConfig,
              quadspec: QuadratureSpec | None = None,
              mc_spec: MCSpec | None = None) -> float:
    """Duality pairing of phi against the i-th bubble's kernel direction:

    <Z_{i,ell}, phi> = 2 sqrt(N(N-1)) D int_bd U_i^(2/(N-2)) Z_{i,ell} phi
                       - (N+2) int U_i^(4/(N-2)) Z_{i,ell} phi

    with Z_{i,1} = dU_i/dr (ring radius) and Z_{i,2} = dU_i/dLambda.  By the
    linearized bubble equations this equals (N-2) c_N int grad Z . grad phi,
    a Dirichlet form; the overall sign is fixed so the diagonal pairing
    <Z, Z> = (N-2) c_N int |grad Z|^2 is strictly positive.
    Both integrals are Monte Carlo with a mixture centered at x_i.
    """
    if ell not in (1, 2):
        raise ValidationError(f"ell must be 1 or 2, got {ell}")
    if not 1 <= i <= ring.k:
        raise ValidationError(f"bubble index i must be in 1..{ring.k}")
    mc_spec = mc_spec or MCSpec()
    p = ring.params
    N = p.N
    b = ring.bubbles[i - 1]
    xi = ring.points[i - 1]
    Lam = ring.Lambda

    def Z(pts):
        der = bubble_derivatives(pts, b, ring_radius=ring.r)
        return der.d_r if ell == 1 else der.d_Lambda

    f = phi.value if hasattr(phi, "value") else phi

    mix_in = HeavyTailMixture(centers=xi[None, :], scales=np.array([1.0 / Lam]),
                              dim=N, tail=N + 2, halfspace=True)

    def g_in(pts):
        return bubble_eval(pts, b) ** (4.0 / (N - 2)) * Z(pts) * f(pts)

    part_in = integrate_mc_halfspace(g_in, mix_in, mc_spec.samples, mc_spec.seed + 2)

    mix_bd = HeavyTailMixture(centers=xi[None, :-1], scales=np.array([1.0 / Lam]),
                              dim=N - 1, tail=N, halfspace=False)

    def g_bd(pts_bar):
        pts = np.concatenate([pts_bar, np.zeros((len(pts_bar), 1))], axis=1)
        return bubble_eval(pts, b) ** (2.0 / (N - 2)) * Z(pts) * f(pts)

    part_bd = integrate_mc_halfspace(g_bd, mix_bd, mc_spec.samples, mc_spec.seed + 3)

    return (
        2.0 * math.sqrt(N * (N - 1)) * p.Dfrak * part_bd.value
        - (N + 2.0) * part_in.value
    )


# --- expansion agreement -----------------------------------------------------------

def expansion_check(k: int, constants: ExpansionConstants, params: ProblemParams,
                    quadspec: QuadratureSpec | None = None,
                    mc_spec: MCSpec | None = None,
                    Lambda: float | None = None,
                    tolerance: float = 0.05) -> ExpansionCheck:
    """Compares J_full against the leading bracket with the exact ring sum:

    k [ A - B ring_sum / Lambda^(N-2) - (1/2*) c0 d3 / (Lambda^m mu^m)
        + (N-2) d0 d5 / (Lambda^n mu^n) ].

    Pass when |J_full - leading| <= max(3 mc_error, tolerance k mu^-frak_m).
    """
    p = params
    c = constants
    N = p.N
    mu_val = mu(k, p)
    r = mu_val * p.r0
    if Lambda is None:
        Lambda = lambda0(regime(p), c, p)
    ring = RingConfig(k=k, r=r, Lambda=Lambda, params=p)
    jf = J_full(ring, quadspec, mc_spec)

    interaction = ring_sum(k, r, N - 2) / Lambda ** (N - 2) if k >= 2 else 0.0
    bracket = (
        c.A
        - c.B * interaction
        - (1.0 / p.two_star) * p.c0 * c.d3 / (Lambda**p.m * mu_val**p.m)
        + (N - 2) * p.d0 * c.d5 / (Lambda**p.n * mu_val**p.n)
    )
    leading = k * bracket
    residual = jf.value - leading
    bound = k * mu_val ** (-(p.frak_m + p.sigma))
    gate = max(3.0 * jf.mc_error, tolerance * k * mu_val ** (-p.frak_m))
    return ExpansionCheck(
        k=k, r=r, Lambda=Lambda,
        J_full_value=jf.value, J_full_error=jf.error_estimate,
        mc_error=jf.mc_error, leading_value=leading, residual=residual,
        residual_bound_prediction=bound, gate=gate,
        passed=bool(abs(residual) <= gate),
    )
