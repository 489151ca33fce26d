"""Degeneracy-locus detection by Dirichlet boundary-value shooting.

A solution lies in the degeneracy locus exactly when the linear operator

    Delta_T(xi) = xi'' + [T0', xi] + 2 [T0, xi'] + [T0,[T0,xi]]
                  + [T1,[T1,xi]] - [T2,[T2,xi]] - [T3,[T3,xi]]

has a nontrivial kernel among paths with xi(0) = xi(1) = 0.  The kernel
test is realised by shooting: the columns of the shooting matrix are xi(1)
for the initial values xi(0) = 0, xi'(0) = basis vector, expressed in an
orthonormal basis of the algebra, and a (near-)singular matrix flags the
locus.  A sampled sup bound 2 sup_t (|T2|^2 + |T3|^2) < pi^2 certifies
nondegeneracy without shooting.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import grids
from .liealg import DEFAULT_SCALE, bracket, inner, norm, orthonormal_basis


@dataclass(frozen=True)
class DegeneracyReport:
    """Shooting matrix, its singular values and the resulting verdict.

    The verdict bands are relative to the spectral norm of the matrix:
    `degenerate` below tol_low, `nondegenerate` above tol_high, and
    `inconclusive` in between (near-degenerate solutions occur along
    continuous families, so a single threshold would misreport).
    """

    shooting_matrix: np.ndarray
    singular_values: np.ndarray
    sigma_min: float
    determinant: float
    verdict: str
    tol_low: float
    tol_high: float

    def as_dict(self):
        return {
            "shooting_matrix": self.shooting_matrix.tolist(),
            "singular_values": self.singular_values.tolist(),
            "sigma_min": self.sigma_min,
            "determinant": self.determinant,
            "verdict": self.verdict,
            "tol_low": self.tol_low,
            "tol_high": self.tol_high,
        }


def _is_traceless(traj, tol=1e-10):
    return bool(np.max(np.abs(np.trace(traj.samples, axis1=-2, axis2=-1))) <= tol)


def algebra_basis(traj, algebra=None, scale=DEFAULT_SCALE):
    """Orthonormal basis used for shooting coordinates.

    Traceless trajectories live in su(n) (dimension n^2 - 1); anything else
    is treated as u(n)-valued.  Pass algebra="su" or "un" to override.
    """
    if algebra is None:
        algebra = "su" if _is_traceless(traj) else "un"
    if algebra not in ("su", "un"):
        raise ValueError("algebra must be 'su' or 'un'")
    return orthonormal_basis(traj.n, traceless=(algebra == "su"), scale=scale)


def delta_apply(traj, xi_path, scale=DEFAULT_SCALE):
    """Apply the degeneracy operator to a path xi on the trajectory's grid.

    Derivatives of xi and of T0 use the same 4th-order stencils as the
    integrator.  Linear in xi; for T0 = 0 this is
    xi'' + (ad(T1)^2 - ad(T2)^2 - ad(T3)^2)(xi).
    """
    xi_path = np.asarray(xi_path, dtype=complex)
    S, h = traj.samples, traj.h
    if xi_path.shape != (S.shape[0], traj.n, traj.n):
        raise ValueError("xi path grid does not match the trajectory")
    xidd = grids.second_derivative(xi_path, h)
    xid = grids.derivative(xi_path, h)
    T0, T1, T2, T3 = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
    T0d = grids.derivative(T0, h)
    out = xidd + bracket(T0d, xi_path) + 2.0 * bracket(T0, xid)
    out = out + bracket(T0, bracket(T0, xi_path))
    out = out + bracket(T1, bracket(T1, xi_path))
    out = out - bracket(T2, bracket(T2, xi_path))
    out = out - bracket(T3, bracket(T3, xi_path))
    return out


def shooting_matrix(traj, algebra=None, scale=DEFAULT_SCALE):
    """Map xi'(0) -> xi(1) for solutions of Delta_T xi = 0 with xi(0) = 0.

    All d initial-value problems are integrated together as one stacked
    first-order system with RK4; trajectory values at half-steps come from
    cubic interpolation of the samples.  Entries are coordinates in the
    orthonormal basis, so the zero trajectory gives the identity matrix.
    """
    basis = algebra_basis(traj, algebra, scale)
    d = basis.shape[0]
    S, h = traj.samples, traj.h
    T0d = grids.derivative(S[:, 0], h)
    coeff_nodes = np.concatenate([S, T0d[:, None]], axis=1)  # (m, 5, n, n)
    coeff_mids = grids.midpoints(coeff_nodes)

    has_T0 = bool(np.max(np.abs(S[:, 0])) > 0)

    def rhs(C, Y):
        xi, xid = Y[0], Y[1]
        acc = -bracket(C[1], bracket(C[1], xi))
        acc = acc + bracket(C[2], bracket(C[2], xi))
        acc = acc + bracket(C[3], bracket(C[3], xi))
        if has_T0:
            acc = acc - bracket(C[4], xi) - 2.0 * bracket(C[0], xid)
            acc = acc - bracket(C[0], bracket(C[0], xi))
        return np.stack([xid, acc])

    Y0 = np.stack([np.zeros_like(basis), basis])
    path = grids.rk4_sampled(rhs, coeff_nodes, coeff_mids, Y0, h)
    xi_final = path[-1, 0]  # (d, n, n)
    return -scale * np.real(np.einsum("jab,kba->jk", basis, xi_final))


def degeneracy_report(traj, tol_low=1e-6, tol_high=1e-3, algebra=None, scale=DEFAULT_SCALE):
    """Run the shooting kernel test and classify the solution.

    sigma_min is compared against tol_low/tol_high times the spectral norm
    of the shooting matrix; between the bands the verdict is
    `inconclusive`.
    """
    M = shooting_matrix(traj, algebra, scale)
    sigma = np.linalg.svd(M, compute_uv=False)
    smin, smax = float(sigma[-1]), float(sigma[0])
    if smin < tol_low * smax:
        verdict = "degenerate"
    elif smin > tol_high * smax:
        verdict = "nondegenerate"
    else:
        verdict = "inconclusive"
    return DegeneracyReport(
        shooting_matrix=M,
        singular_values=sigma,
        sigma_min=smin,
        determinant=float(np.linalg.det(M)),
        verdict=verdict,
        tol_low=tol_low,
        tol_high=tol_high,
    )


def pi_bound_precheck(traj, scale=DEFAULT_SCALE):
    """Sufficient-condition bound: 2 sup_t (|T2|^2 + |T3|^2) against pi^2.

    Returns (bound_value, certified).  A certified solution is guaranteed
    outside the degeneracy locus; the criterion is one-sided, so an
    uncertified solution may still be nondegenerate.
    """
    S = traj.samples
    vals = inner(S[:, 2], S[:, 2], scale) + inner(S[:, 3], S[:, 3], scale)
    bound = 2.0 * float(np.max(vals))
    return bound, bool(bound < math.pi**2)
