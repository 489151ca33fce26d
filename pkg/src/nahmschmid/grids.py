"""Uniform time-grid utilities shared by the flow and shooting modules.

Contains 4th-order finite-difference stencils (matching the order of the
RK4 integrator), cubic interpolation to half-steps, and the two RK4 cores:
one for autonomous/explicitly timed right-hand sides and one for linear
matrix ODEs whose coefficients are only known as grid samples.
"""

import numpy as np

# 4th-order first-derivative stencils / 12h.  Rows 0,1 are the one-sided
# stencils used at the left boundary; the interior stencil is centered.
_D1_LEFT0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D1_LEFT1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
_D1_CENTER = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0

# 4th-order second-derivative stencils / 12h^2 (6-point one-sided rows).
_D2_LEFT0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_D2_LEFT1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0
_D2_CENTER = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# cubic (4-point) interpolation weights to the midpoint of an interval
_MID_EDGE = np.array([5.0, 15.0, -5.0, 1.0]) / 16.0
_MID_CENTER = np.array([-1.0, 9.0, 9.0, -1.0]) / 16.0


def _apply_stencil(samples, weights, start):
    return np.tensordot(weights, samples[start : start + len(weights)], axes=(0, 0))


def derivative(samples, h):
    """4th-order first derivative of grid samples along axis 0.

    Centered in the interior, one-sided at the two ends.  Needs at least
    five samples.
    """
    samples = np.asarray(samples)
    m = samples.shape[0]
    if m < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    out = np.empty_like(samples)
    out[0] = _apply_stencil(samples, _D1_LEFT0, 0)
    out[1] = _apply_stencil(samples, _D1_LEFT1, 0)
    out[-1] = -_apply_stencil(samples[::-1], _D1_LEFT0, 0)
    out[-2] = -_apply_stencil(samples[::-1], _D1_LEFT1, 0)
    core = (
        samples[:-4] * _D1_CENTER[0]
        + samples[1:-3] * _D1_CENTER[1]
        + samples[3:-1] * _D1_CENTER[3]
        + samples[4:] * _D1_CENTER[4]
    )
    out[2:-2] = core
    return out / h


def second_derivative(samples, h):
    """4th-order second derivative of grid samples along axis 0."""
    samples = np.asarray(samples)
    m = samples.shape[0]
    if m < 6:
        raise ValueError("need at least 6 samples for the 4th-order stencil")
    out = np.empty_like(samples)
    out[0] = _apply_stencil(samples, _D2_LEFT0, 0)
    out[1] = _apply_stencil(samples, _D2_LEFT1, 0)
    out[-1] = _apply_stencil(samples[::-1], _D2_LEFT0, 0)
    out[-2] = _apply_stencil(samples[::-1], _D2_LEFT1, 0)
    core = (
        samples[:-4] * _D2_CENTER[0]
        + samples[1:-3] * _D2_CENTER[1]
        + samples[2:-2] * _D2_CENTER[2]
        + samples[3:-1] * _D2_CENTER[3]
        + samples[4:] * _D2_CENTER[4]
    )
    out[2:-2] = core
    return out / (h * h)


def midpoints(samples):
    """Cubic interpolation of grid samples to interval midpoints.

    For samples of shape (m, ...) returns shape (m-1, ...), entry k being
    the interpolant at t_k + h/2.
    """
    samples = np.asarray(samples)
    m = samples.shape[0]
    if m < 4:
        raise ValueError("need at least 4 samples for cubic interpolation")
    out = np.empty((m - 1,) + samples.shape[1:], dtype=samples.dtype)
    out[0] = _apply_stencil(samples, _MID_EDGE, 0)
    out[-1] = _apply_stencil(samples[::-1], _MID_EDGE, 0)
    core = (
        samples[:-3] * _MID_CENTER[0]
        + samples[1:-2] * _MID_CENTER[1]
        + samples[2:-1] * _MID_CENTER[2]
        + samples[3:] * _MID_CENTER[3]
    )
    out[1:-1] = core
    return out


def rk4(f, y0, t0, h, steps, project=None):
    """Classical fixed-step RK4 for dy/dt = f(t, y); returns all samples.

    y may be an ndarray of any shape.  An optional `project` map is applied
    after every step (anti-Hermitian or unitary reprojection).  Raises
    FloatingPointError when the state stops being finite.
    """
    y = np.array(y0, dtype=complex)
    out = np.empty((steps + 1,) + y.shape, dtype=complex)
    out[0] = y
    t = t0
    for k in range(steps):
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if project is not None:
            y = project(y)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"state became non-finite at step {k + 1}")
        out[k + 1] = y
        t = t0 + (k + 1) * h
    return out


def rk4_sampled(rhs, coeff_nodes, coeff_mids, y0, h, project=None):
    """RK4 for a linear ODE whose coefficient path is sampled on the grid.

    rhs(coeff, y) evaluates the right-hand side; coeff_nodes has shape
    (m, ...) and coeff_mids (m-1, ...) holds the half-step values (from
    :func:`midpoints` or a closed form).
    """
    y = np.array(y0, dtype=complex)
    m = coeff_nodes.shape[0]
    out = np.empty((m,) + y.shape, dtype=complex)
    out[0] = y
    for k in range(m - 1):
        k1 = rhs(coeff_nodes[k], y)
        k2 = rhs(coeff_mids[k], y + 0.5 * h * k1)
        k3 = rhs(coeff_mids[k], y + 0.5 * h * k2)
        k4 = rhs(coeff_nodes[k + 1], y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if project is not None:
            y = project(y)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"state became non-finite at step {k + 1}")
        out[k + 1] = y
    return out


def unitarize(U):
    """Nearest unitary matrix (polar factor) via the SVD."""
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh
