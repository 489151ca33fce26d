"""Dense complex-matrix kernel for the Lie algebras u(n) and su(n).

Elements of the algebra are plain complex n x n numpy arrays that are
anti-Hermitian (X* = -X).  The module provides the commutator, the
Ad-invariant inner product <X,Y> = -scale * Re tr(XY), the exponential map
into U(n), the standard su(2) basis with [e1,e2] = e3 (cyclically), and
random element generators.  Everything downstream (flows, shooting,
spectral curves) is built on these few primitives.
"""

import numpy as np

# Default normalisation of the invariant inner product.  scale = 2 makes the
# standard su(2) basis below orthonormal and makes the conserved quantity
# C = 2|T1|^2 + |T2|^2 + |T3|^2 coincide with the zeta^2 trace coefficient
# of the Lax polynomial.
DEFAULT_SCALE = 2.0

ANTIHERM_TOL = 1e-12
UNITARY_TOL = 1e-10


class DimensionMismatchError(ValueError):
    """Raised when two algebra elements of different size are combined."""


def project_antihermitian(X):
    """Orthogonal projection onto anti-Hermitian matrices, X -> (X - X*)/2.

    Applied after floating-point constructions that should land in the
    algebra, so that accumulated rounding never leaks Hermitian parts.
    """
    X = np.asarray(X, dtype=complex)
    return 0.5 * (X - X.conj().swapaxes(-1, -2))


def is_antihermitian(X, tol=ANTIHERM_TOL):
    X = np.asarray(X, dtype=complex)
    return bool(np.max(np.abs(X + X.conj().swapaxes(-1, -2))) <= tol)


def is_unitary(U, tol=UNITARY_TOL):
    U = np.asarray(U, dtype=complex)
    n = U.shape[-1]
    err = U @ U.conj().swapaxes(-1, -2) - np.eye(n)
    return bool(np.max(np.abs(err)) <= tol)


def bracket(X, Y):
    """Commutator [X, Y] = XY - YX.

    Anti-Hermitian inputs give an anti-Hermitian result, so the bracket
    closes on the algebra.  Works on stacks of matrices (leading axes
    broadcast).
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape[-1] != Y.shape[-1] or X.shape[-2] != Y.shape[-2]:
        raise DimensionMismatchError(
            f"incompatible matrix shapes {X.shape} and {Y.shape}"
        )
    return X @ Y - Y @ X


def inner(X, Y, scale=DEFAULT_SCALE):
    """Ad-invariant inner product <X, Y> = -scale * Re tr(XY).

    Positive definite on anti-Hermitian matrices for scale > 0; with the
    default scale the su(2) basis (e1, e2, e3) is orthonormal.
    """
    if scale <= 0:
        raise ValueError("inner-product scale must be positive")
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape[-1] != Y.shape[-2]:
        raise DimensionMismatchError(
            f"incompatible matrix shapes {X.shape} and {Y.shape}"
        )
    tr = np.einsum("...ij,...ji->...", X, Y)
    return -scale * np.real(tr)


def norm(X, scale=DEFAULT_SCALE):
    """Norm induced by :func:`inner`."""
    return np.sqrt(np.maximum(inner(X, X, scale), 0.0))


def exp_unitary(X):
    """Exponential map u(n) -> U(n) via Hermitian eigendecomposition.

    iX is Hermitian, so exp(X) = V diag(exp(-i w)) V* with iX = V w V*.
    This keeps the result unitary to rounding, unlike scaling-and-squaring.
    """
    X = np.asarray(X, dtype=complex)
    w, V = np.linalg.eigh(1j * X)
    return (V * np.exp(-1j * w)) @ V.conj().T


def su2_basis():
    """Standard basis (e1, e2, e3) of su(2) with [ei, ej] = ek cyclically."""
    e1 = 0.5 * np.array([[1j, 0.0], [0.0, -1j]])
    e2 = 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    e3 = 0.5 * np.array([[0.0, 1j], [1j, 0.0]])
    return e1, e2, e3


def su2_from_components(f1, f2, f3):
    """Scale the su(2) basis: returns (f1*e1, f2*e2, f3*e3)."""
    e1, e2, e3 = su2_basis()
    return f1 * e1, f2 * e2, f3 * e3


def random_antihermitian(n, rng, traceless=False):
    """Random anti-Hermitian matrix with Gaussian entries.

    With traceless=True the result lies in su(n).
    """
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = project_antihermitian(G)
    if traceless:
        X = X - (np.trace(X) / n) * np.eye(n)
    return X


def random_unitary(n, rng):
    """Haar-ish random unitary from the QR decomposition of a Gaussian."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    # fix the phase ambiguity of QR so the draw is well conditioned
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def orthonormal_basis(n, traceless=False, scale=DEFAULT_SCALE):
    """Orthonormal basis of u(n) (or su(n)) for the invariant inner product.

    Returns an array of shape (d, n, n) with d = n^2, or n^2 - 1 in the
    traceless case.  Diagonal directions i*E_kk (combined tracelessly for
    su(n)) come first, then the off-diagonal real and imaginary pairs.
    """
    basis = []
    if traceless:
        # diagonal, traceless: i*(E_kk - E_{k+1,k+1}) style ladder
        for k in range(n - 1):
            D = np.zeros((n, n), dtype=complex)
            D[: k + 1, : k + 1] = np.eye(k + 1) * 1j
            D[k + 1, k + 1] = -1j * (k + 1)
            basis.append(D)
    else:
        for k in range(n):
            D = np.zeros((n, n), dtype=complex)
            D[k, k] = 1j
            basis.append(D)
    for k in range(n):
        for l in range(k + 1, n):
            A = np.zeros((n, n), dtype=complex)
            A[k, l], A[l, k] = 1.0, -1.0
            basis.append(A)
            S = np.zeros((n, n), dtype=complex)
            S[k, l], S[l, k] = 1j, 1j
            basis.append(S)
    out = np.array(basis)
    norms = np.sqrt(inner(out, out, scale))
    return out / norms[:, None, None]


def coordinates(X, basis, scale=DEFAULT_SCALE):
    """Coordinates of X in an orthonormal basis (shape (d, n, n))."""
    return inner(basis, np.asarray(X, dtype=complex)[None, :, :], scale)


def from_coordinates(c, basis):
    """Inverse of :func:`coordinates`."""
    return np.tensordot(np.asarray(c), basis, axes=(0, 0))


def ad_matrix(X, basis, scale=DEFAULT_SCALE):
    """Matrix of ad(X) = [X, .] in an orthonormal basis.

    The result is real and skew-symmetric, which is exactly the invariance
    of the inner product in infinitesimal form.
    """
    bX = bracket(np.asarray(X)[None, :, :], basis)
    return np.array([coordinates(col, basis, scale) for col in bX]).T
