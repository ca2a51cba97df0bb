"""Boundary bubbles on the half-space, their derivatives and the ring ansatz.

The bubble family solves the constant-curvature half-space problem

    c_N Delta U = U^((N+2)/(N-2))          in R^N_+,
    -(2/(N-2)) dU/dy_N = H0 U^(N/(N-2))    on y_N = 0,

with c_N = 4(N-1)/(N-2), H0 = Dfrak / sqrt(N(N-1)) and takes the explicit form

    U_{z,L}(y) = alpha_N L^((N-2)/2) / (L^2 |ybar - z|^2 + (L y_N + Dfrak)^2 - 1)^((N-2)/2)

with alpha_N = (4 N (N-1))^((N-2)/4), center z on the boundary plane and scale
L > 0.  Dfrak > 1 makes the denominator >= Dfrak^2 - 1 > 0 everywhere on the
closed half-space.

The kernel functions z^0..z^(N-1) span all solutions of the problem linearized
at U_{0,1}; z^i (i >= 1) are the center derivatives and z^0 is (up to sign) the
scale derivative.  The k-ring ansatz W_{r,L} is the sum of k bubbles centered
at the vertices of a regular k-gon of radius r in the first two boundary
coordinates.

Points are plain numpy arrays of shape (..., N), last coordinate y_N >= 0;
all evaluations broadcast over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    CenterAtOrigin,
    CoincidentPoints,
    DegenerateAxis,
    IndexOutOfRange,
    NotOnBoundary,
    ValidationError,
)
from .model import ProblemParams, curvature_H, curvature_K

__all__ = [
    "alpha_N",
    "unit_ball_volume",
    "BubbleParams",
    "RingConfig",
    "bubble_eval",
    "bubble_derivatives",
    "BubbleDerivatives",
    "kernel_eval",
    "residual",
    "ring_points",
    "w_eval",
    "sector_index",
    "greens_function",
    "inversion_map",
    "BubbleField",
    "KernelField",
    "RingField",
    "LinearCombinationField",
]


def alpha_N(N: int) -> float:
    """Normalization constant (4 N (N-1))^((N-2)/4)."""
    return (4.0 * N * (N - 1)) ** ((N - 2) / 4.0)


def unit_ball_volume(N: int) -> float:
    """Volume of the unit ball in R^N, pi^(N/2) / Gamma(N/2 + 1)."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


@dataclass(frozen=True)
class BubbleParams:
    """One bubble: boundary center z (length N-1), scale Lambda, Dfrak, N."""

    center: tuple
    Lambda: float
    Dfrak: float
    N: int

    def __post_init__(self) -> None:
        center = tuple(float(c) for c in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        if len(center) != self.N - 1:
            raise ValidationError(
                f"center must have N-1={self.N - 1} coords, got {len(center)}"
            )
        if not self.Lambda > 0:
            raise ValidationError(f"need Lambda > 0, got {self.Lambda}")
        if not self.Dfrak > 1:
            raise ValidationError(f"need Dfrak > 1, got {self.Dfrak}")

    @property
    def alpha(self) -> float:
        return alpha_N(self.N)


def _split(y: np.ndarray, N: int):
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != N:
        raise ValidationError(f"points must have {N} coordinates, got {y.shape[-1]}")
    return y[..., :-1], y[..., -1]


def _den(y: np.ndarray, b: BubbleParams):
    """Denominator base g = L^2 |ybar - z|^2 + (L y_N + D)^2 - 1 and parts."""
    ybar, yN = _split(y, b.N)
    diff = ybar - np.asarray(b.center)
    g = b.Lambda**2 * np.sum(diff * diff, axis=-1) + (b.Lambda * yN + b.Dfrak) ** 2 - 1.0
    return g, diff, yN


def bubble_eval(y, b: BubbleParams):
    """U_{z,Lambda}(y); vectorized over leading axes of y."""
    g, _, _ = _den(np.asarray(y, dtype=float), b)
    nu = (b.N - 2) / 2.0
    return b.alpha * b.Lambda**nu / g**nu


@dataclass(frozen=True)
class BubbleDerivatives:
    gradient: np.ndarray     # (..., N)
    laplacian: np.ndarray    # (...,)
    d_Lambda: np.ndarray     # (...,)
    d_r: np.ndarray | None   # (...,) or None when no ring radius applies


def bubble_derivatives(y, b: BubbleParams, ring_radius: float | None = None) -> BubbleDerivatives:
    """Analytic gradient, Laplacian, scale derivative and ring-radius derivative.

    With U = alpha L^nu g^(-nu), nu = (N-2)/2:
      grad g = (2 L^2 (ybar - z), 2 L (L y_N + D)),  Delta g = 2 N L^2,
      |grad g|^2 = 4 L^2 (g + 1),
    so grad U = -nu U grad g / g and
      Delta U = nu U [ (nu+1) |grad g|^2 / g^2 - Delta g / g ].

    d_Lambda is dU/dLambda = U (N-2)/(2L) (D^2 - L^2 y_N^2 - L^2|ybar-z|^2 - 1)/g.
    d_r (requested via ring_radius) is the derivative of U when the center
    moves radially outward along z/|z|:
      d_r = U (N-2) L^2 (ybar - z) . (z/r) / g.
    """
    y = np.asarray(y, dtype=float)
    g, diff, yN = _den(y, b)
    L, N = b.Lambda, b.N
    nu = (N - 2) / 2.0
    U = b.alpha * L**nu / g**nu

    grad_g = np.empty(np.broadcast_shapes(diff.shape[:-1], yN.shape) + (N,))
    grad_g[..., :-1] = 2.0 * L**2 * diff
    grad_g[..., -1] = 2.0 * L * (L * yN + b.Dfrak)
    gradient = -nu * (U / g)[..., None] * grad_g

    grad_g_sq = 4.0 * L**2 * (g + 1.0)
    laplacian = nu * U * ((nu + 1.0) * grad_g_sq / g**2 - 2.0 * N * L**2 / g)

    d_Lambda = (
        U
        * (N - 2)
        / (2.0 * L)
        * (b.Dfrak**2 - L**2 * yN**2 - L**2 * np.sum(diff * diff, axis=-1) - 1.0)
        / g
    )

    d_r = None
    if ring_radius is not None:
        z = np.asarray(b.center)
        r = float(np.linalg.norm(z))
        if r == 0.0:
            raise CenterAtOrigin("d_r undefined for a bubble centered at the origin")
        d_r = U * (N - 2) * L**2 * np.sum(diff * (z / r), axis=-1) / g

    return BubbleDerivatives(gradient=gradient, laplacian=laplacian,
                             d_Lambda=d_Lambda, d_r=d_r)


# --- nondegeneracy kernel -------------------------------------------------

def _kernel_parts(y, index: int, Dfrak: float, N: int):
    """P and g with z^index = P * g^(-N/2) at the reference bubble (z,L)=(0,1)."""
    y = np.asarray(y, dtype=float)
    ybar, yN = _split(y, N)
    g = np.sum(ybar * ybar, axis=-1) + (yN + Dfrak) ** 2 - 1.0
    a = alpha_N(N)
    if index == 0:
        P = a * (N - 2) / 2.0 * (np.sum(y * y, axis=-1) + 1.0 - Dfrak**2)
    elif 1 <= index <= N - 1:
        P = a * (2.0 - N) * y[..., index - 1]
    else:
        raise IndexOutOfRange(f"kernel index must be in 0..{N - 1}, got {index}")
    return P, g, y


def kernel_eval(y, index: int, Dfrak: float, N: int):
    """Kernel function z^index of the linearization at U_{0,1}.

    z^i(y) = alpha_N (2-N) y_i / g^(N/2) for i=1..N-1 and
    z^0(y) = alpha_N (N-2)/2 (|y|^2 + 1 - D^2) / g^(N/2) with
    g = |ybar|^2 + (y_N + D)^2 - 1.  Note z^0 equals the composite expression
    (2-N)/2 U - grad U . (y + D e_N) + D dU/dy_N, which is the negative of
    dU/dLambda at (z,L)=(0,1); either sign spans the same kernel direction.
    """
    P, g, _ = _kernel_parts(y, index, Dfrak, N)
    return P / g ** (N / 2.0)


def _kernel_derivatives(y, index: int, Dfrak: float, N: int):
    """Gradient and Laplacian of z^index = P g^(-s), s = N/2.

    grad g = 2 (y + D e_N), Delta g = 2N, |grad g|^2 = 4 (g + 1).
    """
    P, g, y = _kernel_parts(y, index, Dfrak, N)
    a = alpha_N(N)
    s = N / 2.0

    grad_g = 2.0 * y.copy()
    grad_g[..., -1] += 2.0 * Dfrak
    grad_g_sq = 4.0 * (g + 1.0)

    grad_P = np.zeros_like(y)
    if index == 0:
        grad_P[...] = a * (N - 2) * y
        lap_P = np.full(g.shape, a * (N - 2) * N, dtype=float)
    else:
        grad_P[..., index - 1] = a * (2.0 - N)
        lap_P = np.zeros(g.shape, dtype=float)

    gs = g ** (-s)
    gradient = grad_P * gs[..., None] - s * (P * g ** (-s - 1.0))[..., None] * grad_g
    laplacian = (
        lap_P * gs
        - 2.0 * s * g ** (-s - 1.0) * np.sum(grad_P * grad_g, axis=-1)
        - s * P * g ** (-s - 1.0) * 2.0 * N
        + s * (s + 1.0) * P * g ** (-s - 2.0) * grad_g_sq
    )
    return gradient, laplacian


# --- field protocol --------------------------------------------------------

class BubbleField:
    """Evaluable bubble with analytic derivatives (field protocol)."""

    def __init__(self, params: BubbleParams):
        self.params = params

    def value(self, y):
        return bubble_eval(y, self.params)

    def gradient(self, y):
        return bubble_derivatives(y, self.params).gradient

    def laplacian(self, y):
        return bubble_derivatives(y, self.params).laplacian


class KernelField:
    """Kernel function z^index as an evaluable field."""

    def __init__(self, index: int, Dfrak: float, N: int):
        if not 0 <= index <= N - 1:
            raise IndexOutOfRange(f"kernel index must be in 0..{N - 1}, got {index}")
        self.index = index
        self.Dfrak = Dfrak
        self.N = N

    def value(self, y):
        return kernel_eval(y, self.index, self.Dfrak, self.N)

    def gradient(self, y):
        return _kernel_derivatives(y, self.index, self.Dfrak, self.N)[0]

    def laplacian(self, y):
        return _kernel_derivatives(y, self.index, self.Dfrak, self.N)[1]


class LinearCombinationField:
    """sum_i coeff_i * field_i, for perturbation experiments."""

    def __init__(self, fields, coeffs):
        if len(fields) != len(coeffs):
            raise ValidationError("fields and coeffs must have equal length")
        self.fields = list(fields)
        self.coeffs = [float(c) for c in coeffs]

    def value(self, y):
        return sum(c * f.value(y) for c, f in zip(self.coeffs, self.fields))

    def gradient(self, y):
        return sum(c * f.gradient(y) for c, f in zip(self.coeffs, self.fields))

    def laplacian(self, y):
        return sum(c * f.laplacian(y) for c, f in zip(self.coeffs, self.fields))


# --- ring ansatz ------------------------------------------------------------

def ring_points(k: int, r: float, N: int) -> np.ndarray:
    """Vertices of the regular k-gon of radius r in the first two boundary
    coordinates, embedded in R^N with all other coordinates zero; shape (k, N).
    """
    if k < 1:
        raise ValidationError(f"need k >= 1, got {k}")
    if not r > 0:
        raise ValidationError(f"need r > 0, got {r}")
    angles = 2.0 * np.pi * np.arange(k) / k
    pts = np.zeros((k, N))
    pts[:, 0] = r * np.cos(angles)
    pts[:, 1] = r * np.sin(angles)
    return pts


@dataclass(frozen=True)
class RingConfig:
    """k-bubble ring ansatz W_{r,Lambda} built on ProblemParams."""

    k: int
    r: float
    Lambda: float
    params: ProblemParams

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"need k >= 1, got {self.k}")
        if not self.r > 0:
            raise ValidationError(f"need r > 0, got {self.r}")
        if not self.Lambda > 0:
            raise ValidationError(f"need Lambda > 0, got {self.Lambda}")

    @cached_property
    def points(self) -> np.ndarray:
        return ring_points(self.k, self.r, self.params.N)

    @cached_property
    def bubbles(self) -> tuple:
        return tuple(
            BubbleParams(center=tuple(pt[:-1]), Lambda=self.Lambda,
                         Dfrak=self.params.Dfrak, N=self.params.N)
            for pt in self.points
        )


def w_eval(y, ring: RingConfig):
    """W_{r,Lambda}(y) = sum of the k bubbles."""
    out = bubble_eval(y, ring.bubbles[0])
    for b in ring.bubbles[1:]:
        out = out + bubble_eval(y, b)
    return out


class RingField:
    """The ring ansatz W as an evaluable field with analytic derivatives."""

    def __init__(self, ring: RingConfig):
        self.ring = ring

    def value(self, y):
        return w_eval(y, self.ring)

    def gradient(self, y):
        out = None
        for b in self.ring.bubbles:
            g = bubble_derivatives(y, b).gradient
            out = g if out is None else out + g
        return out

    def laplacian(self, y):
        out = None
        for b in self.ring.bubbles:
            lap = bubble_derivatives(y, b).laplacian
            out = lap if out is None else out + lap
        return out


def sector_index(y, ring: RingConfig):
    """Index (1-based) of the angular sector containing each point.

    Sector l is the wedge of angular half-width pi/k around the l-th ring
    center in the plane of the first two coordinates; ties go to the lower
    index.  Raises DegenerateAxis when the first two coordinates vanish.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 1
    y2 = np.atleast_2d(y)
    if np.any((y2[..., 0] == 0.0) & (y2[..., 1] == 0.0)):
        raise DegenerateAxis("sector undefined on the rotation axis y' = 0")
    phi = np.arctan2(y2[..., 1], y2[..., 0])
    step = 2.0 * np.pi / ring.k
    # signed angular distance to each center direction, in (-pi, pi]
    centers = step * np.arange(ring.k)
    dist = np.abs((phi[..., None] - centers[None, :] + np.pi) % (2.0 * np.pi) - np.pi)
    idx = np.argmin(dist, axis=-1) + 1  # argmin takes the lowest index on ties
    return int(idx[0]) if scalar else idx


# --- Green's function and inversion map -------------------------------------

def greens_function(x, y, N: int):
    """Half-space Neumann Green's function by boundary reflection:

    G(x,y) = (|x-y|^(2-N) + |x-y^s|^(2-N)) / (omega_N (N-2)),
    y^s = (ybar, -y_N), omega_N the unit-ball volume.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d1 = np.linalg.norm(x - y, axis=-1)
    ys = y.copy()
    ys[..., -1] = -ys[..., -1]
    d2 = np.linalg.norm(x - ys, axis=-1)
    if np.any(d1 == 0.0):
        raise CoincidentPoints("Green's function diverges at x = y")
    return (d1 ** (2.0 - N) + d2 ** (2.0 - N)) / (unit_ball_volume(N) * (N - 2))


def inversion_map(x) -> np.ndarray:
    """Point map from the closed half-space onto the closed unit ball:

    I(xbar, x_N) = (2 xbar, 1 - |xbar|^2 - x_N^2) / (|xbar|^2 + (x_N + 1)^2).

    |I(x)| <= 1 with equality exactly on the boundary x_N = 0.
    """
    x = np.asarray(x, dtype=float)
    xbar, xN = x[..., :-1], x[..., -1]
    denom = np.sum(xbar * xbar, axis=-1) + (xN + 1.0) ** 2
    out = np.empty_like(x)
    out[..., :-1] = 2.0 * xbar / denom[..., None]
    out[..., -1] = (1.0 - np.sum(xbar * xbar, axis=-1) - xN**2) / denom
    return out


# --- residual operators -----------------------------------------------------

def residual(y, field, which: str, params: ProblemParams, mu_val: float = 1.0):
    """Pointwise residual of the curvature problem or its linearization.

    which:
      "interior":             -c_N Lap(u) + K(|y|/mu) u^((N+2)/(N-2))
      "boundary":             -(2/(N-2)) du/dy_N - H(|ybar|/mu) u^(N/(N-2))
      "linearized_interior":  -c_N Lap(v) + (N+2)/(N-2) U^(4/(N-2)) v
      "linearized_boundary":  -(2/(N-2)) dv/dy_N - (N/(N-2)) H0 U^(2/(N-2)) v
    with U = U_{0,1} in the linearized cases.  Boundary variants require
    y_N = 0 exactly.
    """
    y = np.asarray(y, dtype=float)
    p = params
    N = p.N
    val = field.value(y)

    if which == "interior":
        lap = field.laplacian(y)
        K = curvature_K(np.linalg.norm(y, axis=-1) / mu_val, p)
        return -p.c_N * lap + K * val ** ((N + 2.0) / (N - 2.0))

    if which == "boundary":
        if np.any(y[..., -1] != 0.0):
            raise NotOnBoundary("boundary residual requires y_N = 0")
        dN = field.gradient(y)[..., -1]
        H = curvature_H(np.linalg.norm(y[..., :-1], axis=-1) / mu_val, p)
        return -(2.0 / (N - 2.0)) * dN - H * val ** (N / (N - 2.0))

    ref = BubbleParams(center=(0.0,) * (N - 1), Lambda=1.0, Dfrak=p.Dfrak, N=N)

    if which == "linearized_interior":
        lap = field.laplacian(y)
        U = bubble_eval(y, ref)
        return -p.c_N * lap + (N + 2.0) / (N - 2.0) * U ** (4.0 / (N - 2.0)) * val

    if which == "linearized_boundary":
        if np.any(y[..., -1] != 0.0):
            raise NotOnBoundary("boundary residual requires y_N = 0")
        dN = field.gradient(y)[..., -1]
        U = bubble_eval(y, ref)
        return (
            -(2.0 / (N - 2.0)) * dN
            - (N / (N - 2.0)) * p.H0 * U ** (2.0 / (N - 2.0)) * val
        )

    raise ValidationError(f"unknown residual selector: {which!r}")
