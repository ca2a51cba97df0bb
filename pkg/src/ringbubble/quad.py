"""Quadrature engines for the half-space integrals.

Everything the expansion needs is either
  * axially symmetric around the y_N axis (depends on |ybar|, y_N),
  * axially symmetric around the y_1 axis on the boundary plane
    (depends on y_1, |y''|, y_N), or
  * symmetric around the axis through two boundary centers (bipolar),
so N- and (N-1)-dimensional integrals collapse to 1-3 dimensional ones with
a sphere-area weight.  The reduced integrals are done by deterministic
adaptive subdivision with an embedded rule pair per cell:
  * 1D: Gauss-Kronrod 7/15,
  * 2D/3D: Genz-Malik degree 7 rule with its embedded degree 5 companion
    (weights verified by polynomial-exactness tests).

Integrands without a usable symmetry (k bubble centers) go through
importance-sampled Monte Carlo with a heavy-tail mixture sampler whose
polynomial tail is matched to the integrand decay.

The 1D reference integrals are
  I_integral(alpha, m) = int_0^inf rho^alpha / (1+rho^2)^m drho
                       = (1/2) B((alpha+1)/2, m-(alpha+1)/2)
  phi_integral(m, D)   = int_D^inf dt / (t^2-1)^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergentIntegral,
    SymmetryMismatch,
    ToleranceNotMet,
    ValidationError,
)

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "sphere_area",
    "adaptive_cubature",
    "integrate_reduced",
    "HeavyTailMixture",
    "integrate_mc_halfspace",
    "I_integral",
    "phi_integral",
]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-7
    abs_tol: float = 1e-12
    max_evals: int = 20_000_000
    truncation_radius: float = 50.0   # in units of the integrand's decay scale
    subdivision_limit: int = 60       # max halvings of any one dimension

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValidationError("tolerances must be positive")
        if self.truncation_radius <= 0:
            raise ValidationError("truncation_radius must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evals: int
    truncation_tail_bound: float = 0.0


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1) in R^d: 2 pi^(d/2)/Gamma(d/2)."""
    if d < 1:
        raise ValidationError(f"need d >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


# --- embedded rules ---------------------------------------------------------

# Gauss-Kronrod 7/15 node/weight table on [-1, 1] (standard published values).
_GK_NODES = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
    -0.207784955007898, -0.405845151377397, -0.586087235467691,
    -0.741531185599394, -0.864864423359769, -0.949107912342759,
    -0.991455371120813,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_GK_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
])


def _genz_malik_rule(d: int):
    """Offsets (P,d) on [-1,1]^d and weight vectors (degree 7, degree 5)."""
    l2 = math.sqrt(9.0 / 70.0)
    l3 = math.sqrt(9.0 / 10.0)
    l4 = math.sqrt(9.0 / 10.0)
    l5 = math.sqrt(9.0 / 19.0)
    offsets = [np.zeros(d)]
    groups = [0]
    for i in range(d):
        for s in (+1.0, -1.0):
            v = np.zeros(d); v[i] = s * l2
            offsets.append(v); groups.append(1)
    for i in range(d):
        for s in (+1.0, -1.0):
            v = np.zeros(d); v[i] = s * l3
            offsets.append(v); groups.append(2)
    for i in range(d):
        for j in range(i + 1, d):
            for si in (+1.0, -1.0):
                for sj in (+1.0, -1.0):
                    v = np.zeros(d); v[i] = si * l4; v[j] = sj * l4
                    offsets.append(v); groups.append(3)
    for corner in range(2**d):
        v = np.full(d, l5)
        for i in range(d):
            if corner >> i & 1:
                v[i] = -l5
        offsets.append(v); groups.append(4)
    offsets = np.array(offsets)
    groups = np.array(groups)

    two_d = 2.0**d
    w7 = np.array([
        two_d * (12824.0 - 9120.0 * d + 400.0 * d * d) / 19683.0,
        two_d * 980.0 / 6561.0,
        two_d * (1820.0 - 400.0 * d) / 19683.0,
        two_d * 200.0 / 19683.0,
        6859.0 / 19683.0,
    ])
    w5 = np.array([
        two_d * (729.0 - 950.0 * d + 50.0 * d * d) / 729.0,
        two_d * 245.0 / 486.0,
        two_d * (265.0 - 100.0 * d) / 1458.0,
        two_d * 25.0 / 729.0,
        0.0,
    ])
    # per-point weights normalized by the reference volume 2^d, so the cell
    # estimate is vol(cell) * sum(w * f)
    return offsets, w7[groups] / two_d, w5[groups] / two_d


_RULES: dict[int, tuple] = {}


def _rule(d: int):
    if d not in _RULES:
        if d == 1:
            _RULES[d] = (_GK_NODES[:, None], _GK_WK / 2.0, _GK_WG / 2.0)
        else:
            _RULES[d] = _genz_malik_rule(d)
    return _RULES[d]


def _eval_cells(f, lo: np.ndarray, hi: np.ndarray):
    """Apply the embedded pair on a batch of cells; returns (values, errors)."""
    offsets, w_hi, w_lo = _rule(lo.shape[1])
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = center[:, None, :] + half[:, None, :] * offsets[None, :, :]
    vals = np.asarray(f(pts.reshape(-1, lo.shape[1])), dtype=float)
    vals = vals.reshape(lo.shape[0], -1)
    vol = np.prod(hi - lo, axis=1)
    est_hi = vol * (vals @ w_hi)
    est_lo = vol * (vals @ w_lo)
    return est_hi, np.abs(est_hi - est_lo), pts.shape[0] * pts.shape[1]


def adaptive_cubature(f, lo, hi, spec: QuadratureSpec, breakpoints=None):
    """Adaptive integration of f over the box [lo, hi] in 1-3 dimensions.

    f maps an (M, d) array of points to (M,) values.  breakpoints is an
    optional per-dimension list of interior split locations used to seed the
    initial cell list (helps when the integrand is sharply peaked at known
    places).  Deterministic: cells are refined in a fixed worst-error-first
    order, ties broken by insertion index.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    d = lo.size
    if d > 3:
        raise ValidationError("adaptive_cubature supports 1-3 dimensions")

    edges = []
    for i in range(d):
        pts = [lo[i], hi[i]]
        if breakpoints is not None and breakpoints[i]:
            pts += [b for b in breakpoints[i] if lo[i] < b < hi[i]]
        edges.append(np.array(sorted(set(pts))))
    mesh = np.meshgrid(*[np.arange(len(e) - 1) for e in edges], indexing="ij")
    cell_lo = np.stack([edges[i][mesh[i].ravel()] for i in range(d)], axis=1)
    cell_hi = np.stack([edges[i][mesh[i].ravel() + 1] for i in range(d)], axis=1)

    vals, errs, n = _eval_cells(f, cell_lo, cell_hi)
    evals = n
    depth = np.zeros(len(vals), dtype=int)

    while True:
        total = float(vals.sum())
        total_err = float(errs.sum())
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err, evals
        if evals >= spec.max_evals:
            raise ToleranceNotMet(
                f"cubature budget exhausted: err={total_err:.3e} > tol={tol:.3e} "
                f"after {evals} evaluations"
            )
        # refine the worst cells in a deterministic batch
        batch = min(64, len(errs))
        order = np.argsort(-errs, kind="stable")[:batch]
        order = order[errs[order] > tol / max(len(errs), 1)]
        if order.size == 0:
            order = np.argsort(-errs, kind="stable")[:1]
        if np.any(depth[order] >= spec.subdivision_limit):
            raise ToleranceNotMet(
                f"subdivision limit {spec.subdivision_limit} reached with "
                f"err={total_err:.3e} > tol={tol:.3e}"
            )
        split_lo, split_hi = cell_lo[order], cell_hi[order]
        widths = split_hi - split_lo
        axis = np.argmax(widths, axis=1)
        mid = split_lo[np.arange(len(order)), axis] + 0.5 * widths[
            np.arange(len(order)), axis
        ]
        left_hi = split_hi.copy()
        left_hi[np.arange(len(order)), axis] = mid
        right_lo = split_lo.copy()
        right_lo[np.arange(len(order)), axis] = mid

        new_lo = np.concatenate([split_lo, right_lo])
        new_hi = np.concatenate([left_hi, split_hi])
        new_vals, new_errs, n = _eval_cells(f, new_lo, new_hi)
        evals += n
        new_depth = np.concatenate([depth[order], depth[order]]) + 1

        keep = np.ones(len(vals), dtype=bool)
        keep[order] = False
        cell_lo = np.concatenate([cell_lo[keep], new_lo])
        cell_hi = np.concatenate([cell_hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        depth = np.concatenate([depth[keep], new_depth])


# --- symmetry reductions ----------------------------------------------------

_REDUCTIONS = ("radial2", "axial3", "boundary_radial1", "boundary_axial2", "bipolar3")


def _geom_breaks(scale: float, R: float) -> list:
    """Geometric ladder of split points between the decay scale and R."""
    out = []
    b = scale
    while b < R:
        out.append(b)
        b *= 8.0
    return out


def _tail_bound(g, R: float, dim: int) -> float:
    """Crude analytic bound on the mass beyond the truncation radius.

    Samples the weighted reduced integrand at radii 0.8R and R along a few
    directions, extracts a local power-law decay q, and bounds the tail by
    max|g(R)| * R^dim / (q - dim), i.e. the integral of the continued power
    law over the removed outer region.  Returns inf when no decay is seen.
    """
    dirs = np.linspace(0.05, 1.0, 8)
    g1 = np.abs(g(0.8 * R, dirs))
    g2 = np.abs(g(R, dirs))
    m1, m2 = float(np.max(g1)), float(np.max(g2))
    if m2 == 0.0:
        return 0.0
    if m1 <= m2:
        return math.inf
    q = math.log(m1 / m2) / math.log(1.0 / 0.8)
    if q <= dim + 0.5:
        return math.inf
    return m2 * R**dim / (q - dim)


def integrate_reduced(
    integrand,
    reduction: str,
    spec: QuadratureSpec,
    N: int,
    decay_scale: float = 1.0,
    separation: float | None = None,
    axial_range: tuple | None = None,
) -> IntegralResult:
    """Full half-space / boundary integral via a symmetry reduction.

    reduction and the expected integrand signature (all args are arrays):
      radial2          f(rho, yN)    with rho = |ybar|         (interior)
      axial3           f(y1, s, yN)  with s = |y''|            (interior)
      boundary_radial1 f(rho)                                  (boundary)
      boundary_axial2  f(y1, s)                                (boundary)
      bipolar3         f(d1, d2, yN) distances to two boundary centers at
                       mutual distance `separation` on the y1 axis (interior)

    axial_range optionally widens the y1 interval (defaults to [-R, R] with
    R = truncation_radius * decay_scale).  The result's error_estimate
    includes the truncation tail bound.  When the sampled tail bound exceeds
    half the tolerance the domain is enlarged geometrically and the integral
    recomputed (slowly decaying boundary traces need radii far beyond the
    default 50 decay scales).
    """
    if reduction not in _REDUCTIONS:
        raise SymmetryMismatch(f"unknown reduction {reduction!r}; use one of {_REDUCTIONS}")
    best = None
    R0 = spec.truncation_radius * decay_scale
    evals_total = 0
    for attempt in range(10):
        R = R0 * 4.0**attempt
        best = _integrate_reduced_at(
            integrand, reduction, spec, N, decay_scale, separation, axial_range, R
        )
        evals_total += best.evals
        tol = max(spec.abs_tol, spec.rel_tol * abs(best.value))
        if best.truncation_tail_bound <= 0.5 * tol:
            break
    return IntegralResult(
        value=best.value,
        error_estimate=best.error_estimate,
        evals=evals_total,
        truncation_tail_bound=best.truncation_tail_bound,
    )


def _integrate_reduced_at(
    integrand,
    reduction: str,
    spec: QuadratureSpec,
    N: int,
    decay_scale: float,
    separation: float | None,
    axial_range: tuple | None,
    R: float,
) -> IntegralResult:
    w_rad = sphere_area(N - 1)      # sphere in the (N-1)-dim boundary plane
    w_ax = sphere_area(N - 2)       # sphere in the (N-2)-dim residual plane

    if reduction == "radial2":
        def f(x):
            rho, yN = x[:, 0], x[:, 1]
            return w_rad * rho ** (N - 2) * integrand(rho, yN)
        lo, hi = [0.0, 0.0], [R, R]
        breaks = [_geom_breaks(decay_scale, R), _geom_breaks(decay_scale, R)]

        def shell(rad, t):
            return w_rad * (rad * t) ** (N - 2) * integrand(rad * t, rad * np.sqrt(1 - t**2))
        dim = 2

    elif reduction == "axial3":
        def f(x):
            y1, s, yN = x[:, 0], x[:, 1], x[:, 2]
            return w_ax * s ** (N - 3) * integrand(y1, s, yN)
        x_lo, x_hi = axial_range if axial_range else (-R, R)
        lo, hi = [x_lo, 0.0, 0.0], [x_hi, R, R]
        gb = _geom_breaks(decay_scale, R)
        breaks = [[-b for b in gb] + [0.0] + gb, gb, gb]

        def shell(rad, t):
            s = rad * t * 0.7
            return w_ax * s ** (N - 3) * integrand(rad * t * 0.7, s, rad * np.sqrt(np.abs(1 - 0.98 * t**2)))
        dim = 3

    elif reduction == "boundary_radial1":
        def f(x):
            rho = x[:, 0]
            return w_rad * rho ** (N - 2) * integrand(rho)
        lo, hi = [0.0], [R]
        breaks = [_geom_breaks(decay_scale, R)]

        def shell(rad, t):
            return w_rad * rad ** (N - 2) * integrand(np.full_like(t, rad))
        dim = 1

    elif reduction == "boundary_axial2":
        def f(x):
            y1, s = x[:, 0], x[:, 1]
            return w_ax * s ** (N - 3) * integrand(y1, s)
        x_lo, x_hi = axial_range if axial_range else (-R, R)
        lo, hi = [x_lo, 0.0], [x_hi, R]
        gb = _geom_breaks(decay_scale, R)
        breaks = [[-b for b in gb] + [0.0] + gb, gb, gb][:2]

        def shell(rad, t):
            return w_ax * (rad * t) ** (N - 3) * integrand(rad * np.sqrt(1 - t**2), rad * t)
        dim = 2

    else:  # bipolar3
        if separation is None:
            raise SymmetryMismatch("bipolar3 requires the separation of the two centers")
        L = float(separation)

        def f(x):
            u, s, yN = x[:, 0], x[:, 1], x[:, 2]
            d1 = np.sqrt(u * u + s * s)
            d2 = np.sqrt((u - L) ** 2 + s * s)
            return w_ax * s ** (N - 3) * integrand(d1, d2, yN)
        lo, hi = [-R, 0.0, 0.0], [L + R, R, R]
        gb = _geom_breaks(decay_scale, R)
        breaks = [
            [-b for b in gb] + [0.0] + gb + [L / 2.0]
            + [L - b for b in gb] + [L] + [L + b for b in gb],
            gb,
            gb,
        ]

        def shell(rad, t):
            u = L / 2.0 + rad * t * 0.7
            s = rad * (1 - t * 0.5)
            d1 = np.sqrt(u * u + s * s)
            d2 = np.sqrt((u - L) ** 2 + s * s)
            return w_ax * s ** (N - 3) * integrand(d1, d2, rad * t * 0.3)
        dim = 3

    value, err, evals = adaptive_cubature(f, lo, hi, spec, breakpoints=breaks)
    tail = _tail_bound(shell, R, dim)
    if not math.isfinite(tail):
        tail = abs(value) * spec.rel_tol  # no decay detected at R; flag modestly
    return IntegralResult(value=value, error_estimate=err + tail, evals=evals,
                          truncation_tail_bound=tail)


# --- Monte Carlo ------------------------------------------------------------

@dataclass(frozen=True)
class HeavyTailMixture:
    """Mixture of center-shifted spherically symmetric heavy-tail densities.

    Component radial law: F(rho) = 1 - (1 + rho^s)^(-a) with s = dim and
    a = (tail - dim)/dim, giving a density with |y|^(-tail) far-field decay.
    Centers sit on the boundary plane; with halfspace=True samples are folded
    to y_N >= 0 (density doubles by mirror symmetry of the components).
    """

    centers: np.ndarray          # (M, dim); last coord 0 for interior use
    scales: np.ndarray           # (M,)
    dim: int
    tail: float
    halfspace: bool = True
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", c)
        s = np.broadcast_to(np.asarray(self.scales, dtype=float), (len(c),)).copy()
        object.__setattr__(self, "scales", s)
        w = self.weights
        w = np.full(len(c), 1.0 / len(c)) if w is None else np.asarray(w, float)
        object.__setattr__(self, "weights", w / w.sum())
        if self.tail <= self.dim:
            raise ValidationError("tail exponent must exceed the dimension")
        if self.halfspace and np.any(np.abs(c[:, -1]) > 0):
            raise ValidationError("halfspace mixture centers must sit on the boundary")

    @property
    def _a(self) -> float:
        return (self.tail - self.dim) / self.dim

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        comp = rng.choice(len(self.centers), size=n, p=self.weights)
        u = rng.random(n)
        rho = ((1.0 - u) ** (-1.0 / self._a) - 1.0) ** (1.0 / self.dim)
        direc = rng.normal(size=(n, self.dim))
        direc /= np.linalg.norm(direc, axis=1, keepdims=True)
        pts = self.centers[comp] + (self.scales[comp] * rho)[:, None] * direc
        if self.halfspace:
            pts[:, -1] = np.abs(pts[:, -1])
        return pts

    def pdf(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d, a = self.dim, self._a
        area = sphere_area(d)
        out = np.zeros(len(pts))
        for c, sc, w in zip(self.centers, self.scales, self.weights):
            rho = np.linalg.norm(pts - c, axis=1) / sc
            rho = np.maximum(rho, 1e-300)
            f_rad = a * d * rho ** (d - 1) * (1.0 + rho**d) ** (-a - 1.0)
            out += w * f_rad / (area * rho ** (d - 1)) / sc**d
        if self.halfspace:
            out *= 2.0
        return out


def integrate_mc_halfspace(
    integrand,
    sampler: HeavyTailMixture,
    n_samples: int,
    seed: int,
    chunk: int = 1_000_000,
) -> IntegralResult:
    """Importance-sampled MC estimate of the integral of `integrand` over the
    sampler's support (half-space or boundary plane).  Deterministic by seed.
    """
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        pts = sampler.sample(rng, n)
        ratio = np.asarray(integrand(pts), dtype=float) / sampler.pdf(pts)
        total += float(ratio.sum())
        total_sq += float((ratio * ratio).sum())
        done += n
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) / n_samples
    return IntegralResult(value=mean, error_estimate=math.sqrt(var), evals=n_samples)


# --- 1D reference integrals ---------------------------------------------------

def I_integral(alpha: float, mexp: float) -> float:
    """I_m^alpha = int_0^inf rho^alpha (1+rho^2)^(-m) drho via the Beta identity."""
    if alpha <= -1.0 or alpha + 1.0 >= 2.0 * mexp:
        raise DivergentIntegral(
            f"I_integral needs -1 < alpha and alpha+1 < 2m, got alpha={alpha}, m={mexp}"
        )
    x = (alpha + 1.0) / 2.0
    y = mexp - x
    return 0.5 * math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def phi_integral(mexp: float, Dfrak: float, spec: QuadratureSpec | None = None) -> float:
    """phi_m = int_D^inf (t^2-1)^(-m) dt, computed on the compactified variable
    t = D + u/(1-u), u in [0,1)."""
    if not Dfrak > 1.0:
        raise DivergentIntegral(f"phi_integral needs Dfrak > 1, got {Dfrak}")
    if not mexp > 0.5:
        raise DivergentIntegral(f"phi_integral needs m > 1/2, got {mexp}")
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)

    def f(x):
        u = np.clip(x[:, 0], 0.0, 1.0 - 1e-14)
        t = Dfrak + u / (1.0 - u)
        return (t * t - 1.0) ** (-mexp) / (1.0 - u) ** 2

    value, _, _ = adaptive_cubature(f, [0.0], [1.0], spec)
    return value
