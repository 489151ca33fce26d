"""JSON and CSV serialization of matrices, trajectories and reports.

Complex matrices are encoded row-major as nested lists of [re, im] pairs.
JSON output is rendered with sorted keys and Python's shortest
round-trip float encoding, so identical inputs give byte-identical files.
"""

import json

import numpy as np

from .flow import Trajectory
from .liealg import is_antihermitian, project_antihermitian


def matrix_to_pairs(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_pairs(obj):
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ValueError("matrix encoding must be an n x n array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def quadruple_to_obj(T):
    T = np.asarray(T, dtype=complex)
    return {f"T{i}": matrix_to_pairs(T[i]) for i in range(T.shape[0])}


def quadruple_from_obj(obj, components=("T0", "T1", "T2", "T3"), reproject_tol=1e-8):
    """Read a quadruple (or triple) of algebra elements from decoded JSON.

    Anti-Hermiticity is validated; defects above `reproject_tol` trigger a
    warning and reprojection onto the algebra.
    """
    mats, warnings = [], []
    for name in components:
        if name not in obj:
            raise ValueError(f"initial-data file is missing component {name!r}")
        M = matrix_from_pairs(obj[name])
        if not is_antihermitian(M, tol=reproject_tol):
            defect = float(np.max(np.abs(M + M.conj().T)))
            warnings.append(
                f"{name} is not anti-Hermitian (defect {defect:.2e}); reprojected"
            )
        mats.append(project_antihermitian(M))
    sizes = {m.shape for m in mats}
    if len(sizes) != 1:
        raise ValueError("all components must have the same size")
    return np.array(mats), warnings


def trajectory_to_obj(traj, scale=None):
    obj = {
        "t_start": traj.t_start,
        "t_end": traj.t_end,
        "steps": traj.steps,
        "n": traj.n,
        "samples": [quadruple_to_obj(q) for q in traj.samples],
    }
    if scale is not None:
        obj["scale"] = scale
    return obj


def trajectory_from_obj(obj):
    samples = np.array(
        [quadruple_from_obj(s)[0] for s in obj["samples"]]
    )
    return Trajectory(float(obj["t_start"]), float(obj["t_end"]), samples)


def trajectory_csv_lines(traj):
    """CSV rows: t, then each component row-major with _re/_im columns."""
    n = traj.n
    header = ["t"]
    for i in range(4):
        for r in range(n):
            for c in range(n):
                header.append(f"T{i}_{r}{c}_re")
                header.append(f"T{i}_{r}{c}_im")
    yield ",".join(header)
    for t, q in zip(traj.times, traj.samples):
        row = [repr(float(t))]
        for i in range(4):
            for r in range(n):
                for c in range(n):
                    row.append(repr(float(q[i, r, c].real)))
                    row.append(repr(float(q[i, r, c].imag)))
        yield ",".join(row)


def dumps(obj):
    """Deterministic JSON rendering (sorted keys, round-trip floats)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
