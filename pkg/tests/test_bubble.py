import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringbubble import (
    BubbleField,
    BubbleParams,
    CenterAtOrigin,
    CoincidentPoints,
    DegenerateAxis,
    IndexOutOfRange,
    KernelField,
    LinearCombinationField,
    NotOnBoundary,
    ProblemParams,
    RingConfig,
    ValidationError,
    bubble_derivatives,
    bubble_eval,
    greens_function,
    inversion_map,
    kernel_eval,
    residual,
    ring_points,
    sector_index,
    w_eval,
)

RNG = np.random.default_rng(20240817)


def _halfspace_points(n, N, scale=3.0):
    pts = RNG.standard_normal((n, N)) * scale
    pts[:, -1] = np.abs(pts[:, -1])
    return pts


def test_bubble_positivity_and_value():
    b = BubbleParams(center=(0, 0, 0, 0), Lambda=1.0, Dfrak=2.0, N=5)
    pts = _halfspace_points(500, 5)
    vals = bubble_eval(pts, b)
    assert np.all(vals > 0)
    # closed form at the origin: alpha / (D^2 - 1)^((N-2)/2)
    origin = np.zeros(5)
    assert bubble_eval(origin, b) == pytest.approx(80.0 ** 0.75 / 3.0 ** 1.5)


def test_interior_and_boundary_residuals(flat_params):
    b = BubbleParams(center=(0.3, -0.2, 0, 0.1), Lambda=1.7, Dfrak=2.0, N=5)
    fld = BubbleField(b)
    pts = _halfspace_points(200, 5)
    ref = bubble_eval(pts, b) ** (7.0 / 3.0)
    res = residual(pts, fld, "interior", flat_params)
    assert np.max(np.abs(res / ref)) < 1e-10

    bd = pts.copy()
    bd[:, -1] = 0.0
    ref_bd = bubble_eval(bd, b) ** (5.0 / 3.0)
    res_bd = residual(bd, fld, "boundary", flat_params)
    assert np.max(np.abs(res_bd / ref_bd)) < 1e-10
    with pytest.raises(NotOnBoundary):
        residual(pts + np.array([0, 0, 0, 0, 1.0]), fld, "boundary", flat_params)


def test_kernel_functions_solve_linearized_problem(flat_params):
    N = 5
    pts = _halfspace_points(200, N)
    bd = pts.copy()
    bd[:, -1] = 0.0
    ref_b = BubbleParams(center=(0, 0, 0, 0), Lambda=1.0, Dfrak=2.0, N=N)
    for idx in range(N):
        kf = KernelField(idx, 2.0, N)
        scale = (np.abs(bubble_eval(pts, ref_b) ** (4.0 / 3.0)
                        * kernel_eval(pts, idx, 2.0, N)) + 1e-30)
        res = residual(pts, kf, "linearized_interior", flat_params)
        assert np.max(np.abs(res / scale)) < 1e-9
        scale_bd = (np.abs(bubble_eval(bd, ref_b) ** (2.0 / 3.0)
                           * kernel_eval(bd, idx, 2.0, N)) + 1e-30)
        res_bd = residual(bd, kf, "linearized_boundary", flat_params)
        assert np.max(np.abs(res_bd / scale_bd)) < 1e-9
    with pytest.raises(IndexOutOfRange):
        kernel_eval(pts, N, 2.0, N)


def test_scale_kernel_composite_identity():
    """z^0 equals (2-N)/2 U - grad U . (y + D e_N) + D dU/dy_N at (z,L)=(0,1)."""
    N, D = 5, 2.0
    b = BubbleParams(center=(0, 0, 0, 0), Lambda=1.0, Dfrak=D, N=N)
    pts = _halfspace_points(200, N)
    der = bubble_derivatives(pts, b)
    U = bubble_eval(pts, b)
    shift = pts.copy()
    shift[:, -1] += D
    composite = ((2.0 - N) / 2.0 * U
                 - np.sum(der.gradient * shift, axis=-1)
                 + D * der.gradient[:, -1])
    z0 = kernel_eval(pts, 0, D, N)
    assert np.max(np.abs(composite - z0) / np.abs(z0)) < 1e-10
    # and the composite is exactly -dU/dLambda at the reference bubble
    assert np.max(np.abs(composite + der.d_Lambda)) < 1e-10 * np.max(np.abs(z0))


@pytest.mark.parametrize("h", [1e-4, 1e-5])
def test_scale_and_radius_derivatives_match_fd(h):
    N, D = 5, 2.0
    z = np.array([1.2, 0.5, 0.0, -0.3])
    r = float(np.linalg.norm(z))
    L = 0.8
    pts = _halfspace_points(50, N)
    der = bubble_derivatives(pts, BubbleParams(center=tuple(z), Lambda=L, Dfrak=D, N=N),
                             ring_radius=r)
    up = bubble_eval(pts, BubbleParams(center=tuple(z), Lambda=L + h, Dfrak=D, N=N))
    dn = bubble_eval(pts, BubbleParams(center=tuple(z), Lambda=L - h, Dfrak=D, N=N))
    fd_L = (up - dn) / (2 * h)
    assert np.max(np.abs(fd_L - der.d_Lambda) / np.abs(der.d_Lambda)) < 100 * h**2

    zu, zd = z * (r + h) / r, z * (r - h) / r
    up = bubble_eval(pts, BubbleParams(center=tuple(zu), Lambda=L, Dfrak=D, N=N))
    dn = bubble_eval(pts, BubbleParams(center=tuple(zd), Lambda=L, Dfrak=D, N=N))
    fd_r = (up - dn) / (2 * h)
    scale = np.max(np.abs(der.d_r))
    assert np.max(np.abs(fd_r - der.d_r)) / scale < 100 * h**2


def test_gradient_and_laplacian_match_fd():
    b = BubbleParams(center=(0.4, 0, 0, 0), Lambda=1.3, Dfrak=1.5, N=5)
    pts = _halfspace_points(20, 5) + np.array([0, 0, 0, 0, 0.5])
    der = bubble_derivatives(pts, b)
    h = 1e-5
    h2 = 1e-3   # larger step for second differences to stay above roundoff
    lap_fd = np.zeros(len(pts))
    for i in range(5):
        e = np.zeros(5)
        e[i] = h
        up, dn = bubble_eval(pts + e, b), bubble_eval(pts - e, b)
        grad_fd = (up - dn) / (2 * h)
        assert np.max(np.abs(grad_fd - der.gradient[:, i])) < 1e-6 * np.max(np.abs(up))
        e2 = np.zeros(5)
        e2[i] = h2
        lap_fd += (bubble_eval(pts + e2, b) - 2 * bubble_eval(pts, b)
                   + bubble_eval(pts - e2, b)) / h2**2
    scale = np.max(np.abs(der.laplacian))
    assert np.max(np.abs(lap_fd - der.laplacian)) < 1e-4 * scale


def test_d_r_requires_off_origin_center():
    b = BubbleParams(center=(0, 0, 0, 0), Lambda=1.0, Dfrak=2.0, N=5)
    with pytest.raises(CenterAtOrigin):
        bubble_derivatives(np.zeros(5), b, ring_radius=1.0)


@given(k=st.integers(min_value=2, max_value=24),
       r=st.floats(min_value=0.1, max_value=100.0))
@settings(max_examples=40, deadline=None)
def test_ring_points_geometry(k, r):
    pts = ring_points(k, r, 5)
    assert pts.shape == (k, 5)
    assert np.allclose(np.linalg.norm(pts[:, :2], axis=1), r)
    assert np.allclose(pts[:, 2:], 0.0)
    # neighbor separations equal 2 r sin(pi/k)
    d = np.linalg.norm(pts[0] - pts[1])
    assert d == pytest.approx(2 * r * math.sin(math.pi / k), rel=1e-12)


def test_w_eval_ring_symmetry(desk_params):
    ring = RingConfig(k=6, r=10.0, Lambda=0.5, params=desk_params)
    pts = _halfspace_points(50, 5)
    rot = 2 * math.pi / 6
    R = np.eye(5)
    R[0, 0] = R[1, 1] = math.cos(rot)
    R[0, 1], R[1, 0] = -math.sin(rot), math.sin(rot)
    assert np.allclose(w_eval(pts, ring), w_eval(pts @ R.T, ring), rtol=1e-12)


def test_sector_index(desk_params):
    ring = RingConfig(k=4, r=5.0, Lambda=1.0, params=desk_params)
    assert sector_index(np.array([3.0, 0.1, 0, 0, 1.0]), ring) == 1
    assert sector_index(np.array([0.1, 3.0, 0, 0, 1.0]), ring) == 2
    assert sector_index(np.array([-3.0, -0.1, 0, 0, 0.0]), ring) == 3
    assert sector_index(np.array([0.1, -3.0, 0, 0, 0.0]), ring) == 4
    with pytest.raises(DegenerateAxis):
        sector_index(np.array([0.0, 0.0, 1.0, 0, 1.0]), ring)
    pts = _halfspace_points(200, 5)
    idx = sector_index(pts, ring)
    assert np.all((1 <= idx) & (idx <= 4))


def test_greens_function_properties():
    N = 5
    x = np.array([0.5, 0, 0, 0, 1.0])
    y = np.array([-0.3, 0.2, 0, 0, 0.7])
    # symmetry in its arguments
    assert greens_function(x, y, N) == pytest.approx(greens_function(y, x, N))
    with pytest.raises(CoincidentPoints):
        greens_function(x, x, N)
    # Neumann property: normal derivative vanishes on the boundary (FD in y_N)
    yb = y.copy()
    yb[-1] = 0.0
    h = 1e-6
    up, dn = yb.copy(), yb.copy()
    up[-1], dn[-1] = h, 0.0
    g_deriv = (greens_function(x, up, N) - greens_function(x, dn, N)) / h
    assert abs(g_deriv) < 1e-4 * greens_function(x, yb, N)


@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=4, max_size=4),
       st.floats(min_value=0, max_value=3))
@settings(max_examples=50, deadline=None)
def test_inversion_maps_halfspace_to_ball(xbar, xN):
    x = np.array(xbar + [xN])
    img = inversion_map(x)
    assert np.linalg.norm(img) <= 1.0 + 1e-12
    if xN == 0:
        assert np.linalg.norm(img) == pytest.approx(1.0, abs=1e-12)


def test_linear_combination_field(flat_params):
    N = 5
    f1 = KernelField(0, 2.0, N)
    f2 = KernelField(1, 2.0, N)
    combo = LinearCombinationField([f1, f2], [2.0, -1.0])
    pts = _halfspace_points(20, N)
    assert np.allclose(combo.value(pts), 2 * f1.value(pts) - f2.value(pts))
    res = residual(pts, combo, "linearized_interior", flat_params)
    scale = np.max(np.abs(combo.value(pts)))
    assert np.max(np.abs(res)) < 1e-8 * max(scale, 1.0)
    with pytest.raises(ValidationError):
        LinearCombinationField([f1], [1.0, 2.0])
