import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import schur

from nahmschmid.flow import rhs_reduced
from nahmschmid.liealg import (
    coordinates,
    random_antihermitian,
    su2_basis,
)
from nahmschmid.stability import (
    halfline_convergence,
    stability_spectrum,
    stable_directions,
    triple_from_coordinates,
)

E1, E2, E3 = su2_basis()
Z2 = np.zeros((2, 2), dtype=complex)


def test_spectrum_tau1_only():
    rep = stability_spectrum(E1, Z2, Z2)
    assert_allclose(rep.operator_spectrum, [0.0, 1.0, 1.0], atol=1e-12)
    assert rep.stable
    assert rep.eta == pytest.approx(1.0, abs=1e-10)


def test_spectrum_tau2_only_unstable():
    rep = stability_spectrum(Z2, E1, Z2)
    assert_allclose(rep.operator_spectrum, [-1.0, -1.0, 0.0], atol=1e-12)
    assert not rep.stable
    # DV eigenvalues are then purely imaginary: no exponential approach
    assert np.max(np.abs(rep.dv_spectrum.real)) < 1e-10


def test_spectrum_mixed_triple():
    rep = stability_spectrum(2 * E1, E1, Z2)
    assert_allclose(rep.operator_spectrum, [0.0, 3.0, 3.0], atol=1e-12)
    assert rep.stable
    assert rep.eta == pytest.approx(np.sqrt(3.0), abs=1e-10)
    # DV spectrum is {0 (x5), +-sqrt(3) (x2 each)}
    s = np.sort_complex(rep.dv_spectrum)
    assert np.max(np.abs(s.imag)) < 1e-10


def test_spectrum_collinear_family(rng):
    # (c1 e1, c2 e1, c3 e1): eigenvalues {0, c1^2 - c2^2 - c3^2 twice}
    for _ in range(20):
        c1, c2, c3 = rng.uniform(-2, 2, size=3)
        rep = stability_spectrum(c1 * E1, c2 * E1, c3 * E1)
        lam = c1**2 - c2**2 - c3**2
        expected = np.sort(np.array([0.0, lam, lam]))
        assert_allclose(rep.operator_spectrum, expected, atol=1e-10)
        assert rep.stable == (lam >= -1e-10)


def test_operator_psd_for_pure_tau1(rng):
    for n in (2, 3):
        tau1 = random_antihermitian(n, rng)
        Z = np.zeros((n, n), dtype=complex)
        rep = stability_spectrum(tau1, Z, Z)
        assert rep.operator_spectrum[0] >= -1e-10
        assert rep.stable


def test_dv_matches_finite_difference_jacobian(rng):
    rep = stability_spectrum(2 * E1, E1, Z2)
    basis = rep.basis
    d = basis.shape[0]
    taus = [2 * E1, E1, Z2]
    eps = 1e-6
    FD = np.zeros((3 * d, 3 * d))
    for col in range(3 * d):
        c = np.zeros(3 * d)
        c[col] = 1.0
        direction = triple_from_coordinates(c, basis)
        plus = rhs_reduced(*[taus[i] + eps * direction[i] for i in range(3)])
        minus = rhs_reduced(*[taus[i] - eps * direction[i] for i in range(3)])
        FD[:, col] = np.concatenate(
            [coordinates((p - m) / (2 * eps), basis) for p, m in zip(plus, minus)]
        )
    assert np.max(np.abs(rep.dv_matrix - FD)) < 1e-6
    # eigenvalues agree as well
    fd_eigs = np.sort_complex(np.linalg.eigvals(FD))
    assert np.max(np.abs(np.sort_complex(rep.dv_spectrum) - fd_eigs)) < 1e-6


def test_noncommuting_rejected():
    with pytest.raises(ValueError):
        stability_spectrum(E1, E2, Z2)


def test_stable_directions_shape():
    rep = stability_spectrum(E1, Z2, Z2)
    dirs = stable_directions(rep)
    assert dirs.shape == (9, 2)
    # columns are orthonormal and invariant: DV v stays in the span
    assert_allclose(dirs.T @ dirs, np.eye(2), atol=1e-12)
    proj = dirs @ dirs.T
    assert np.max(np.abs((np.eye(9) - proj) @ rep.dv_matrix @ dirs)) < 1e-10


def test_halfline_rate_matches_eigenvalue():
    rep = stability_spectrum(E1, Z2, Z2)
    direction = triple_from_coordinates(stable_directions(rep)[:, 0], rep.basis)
    res = halfline_convergence(
        [E1, Z2, Z2], direction, amplitude=1e-4, horizon=8.0, steps_per_unit=1000
    )
    assert res.converged and not res.diverged
    assert abs(res.fitted_rate - rep.eta) < 0.1 * rep.eta


def test_halfline_unstable_direction_diverges():
    rep = stability_spectrum(E1, Z2, Z2)
    _, Zm, k = schur(rep.dv_matrix, output="real", sort=lambda re, im: re > 1e-10)
    assert k > 0
    direction = triple_from_coordinates(Zm[:, 0], rep.basis)
    res = halfline_convergence(
        [E1, Z2, Z2], direction, amplitude=1e-4, horizon=12.0, steps_per_unit=400
    )
    assert res.diverged and not res.converged


def test_halfline_zero_amplitude():
    rep = stability_spectrum(E1, Z2, Z2)
    direction = triple_from_coordinates(stable_directions(rep)[:, 0], rep.basis)
    res = halfline_convergence([E1, Z2, Z2], direction, amplitude=0.0, horizon=1.0,
                               steps_per_unit=100)
    assert np.isnan(res.fitted_rate)
    assert res.converged and not res.diverged
