import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nahmschmid import serialize
from nahmschmid.cli import main
from nahmschmid.elliptic import complete_K
from nahmschmid.flow import Trajectory, su2_closed_form_trajectory
from nahmschmid.liealg import random_antihermitian, su2_basis


# ---------------------------------------------------------------------------
# serialization round trips

def test_matrix_round_trip(rng):
    M = random_antihermitian(3, rng)
    back = serialize.matrix_from_pairs(serialize.matrix_to_pairs(M))
    assert_allclose(back, M, atol=0)


def test_trajectory_round_trip():
    traj = su2_closed_form_trajectory(1.0, 0.1, 0.6, (0.0, 1.0), 20)
    obj = serialize.trajectory_to_obj(traj)
    back = serialize.trajectory_from_obj(obj)
    assert back.t_start == traj.t_start and back.t_end == traj.t_end
    assert_allclose(back.samples, traj.samples, atol=0)


def test_csv_layout():
    traj = su2_closed_form_trajectory(1.0, 0.0, 0.6, (0.0, 1.0), 4)
    lines = list(serialize.trajectory_csv_lines(traj))
    header = lines[0].split(",")
    assert header[0] == "t"
    assert header[1] == "T0_00_re" and header[2] == "T0_00_im"
    assert len(header) == 1 + 4 * 4 * 2
    assert len(lines) == 1 + 5
    row = lines[1].split(",")
    assert float(row[0]) == 0.0


def test_quadruple_from_obj_reprojects_with_warning():
    M = np.array([[0.5 + 1j, 0.0], [0.0, -1j]])  # Hermitian defect 1.0
    obj = {f"T{i}": serialize.matrix_to_pairs(np.zeros((2, 2))) for i in range(4)}
    obj["T1"] = serialize.matrix_to_pairs(M)
    quad, warnings = serialize.quadruple_from_obj(obj)
    assert len(warnings) == 1 and "T1" in warnings[0]
    assert np.max(np.abs(quad[1] + quad[1].conj().T)) < 1e-14


# ---------------------------------------------------------------------------
# CLI subcommands

def run_cli(args):
    return main(args)


def test_cli_integrate_json(tmp_path):
    out = tmp_path / "run.json"
    code = run_cli(
        [
            "integrate", "--kappa", "0.8", "--a", "1", "--b", "0",
            "--steps", "500", "--output", str(out),
        ]
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["config"]["kappa"] == 0.8
    assert data["config"]["scale"] == 2.0
    assert max(data["conserved"]["drift"].values()) < 1e-8
    traj = serialize.trajectory_from_obj(data["trajectory"])
    assert traj.steps == 500


def test_cli_integrate_csv(tmp_path):
    out = tmp_path / "run.csv"
    code = run_cli(
        ["integrate", "--steps", "50", "--format", "csv", "--output", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("t,T0_00_re")
    assert len(lines) == 52


def test_cli_integrate_zero_init(tmp_path):
    init = tmp_path / "zero.json"
    obj = {f"T{i}": serialize.matrix_to_pairs(np.zeros((2, 2))) for i in range(4)}
    init.write_text(json.dumps(obj))
    out = tmp_path / "zero_out.json"
    code = run_cli(
        ["integrate", "--init", str(init), "--steps", "50", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    traj = serialize.trajectory_from_obj(data["trajectory"])
    assert np.max(np.abs(traj.samples)) == 0.0


def test_cli_missing_required_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["sweep", "--to", "1", "--points", "3"])
    assert exc.value.code == 2


def test_cli_unknown_param_is_config_error(tmp_path):
    code = run_cli(
        [
            "sweep", "--param", "bogus", "--from", "0", "--to", "1",
            "--points", "2", "--output", str(tmp_path / "s.csv"),
        ]
    )
    assert code == 2


@pytest.mark.filterwarnings("ignore:invalid value encountered")
@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_cli_numerical_failure_exit_3(tmp_path):
    # entries around 1e200 overflow inside the brackets on the first step
    big = 1e200j * np.eye(2)
    obj = {f"T{i}": serialize.matrix_to_pairs(np.zeros((2, 2))) for i in range(4)}
    obj["T2"] = serialize.matrix_to_pairs(big)
    obj["T3"] = serialize.matrix_to_pairs(1e200 * np.array([[0, 1], [-1, 0]]))
    init = tmp_path / "huge.json"
    init.write_text(json.dumps(obj))
    code = run_cli(
        ["integrate", "--init", str(init), "--steps", "10",
         "--output", str(tmp_path / "x.json")]
    )
    assert code == 3


def test_cli_reproducible_bytes(tmp_path):
    args = [
        "integrate", "--algebra", "un", "--n", "3", "--seed", "42",
        "--steps", "100",
    ]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(args + ["--output", str(out1)]) == 0
    assert run_cli(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_closed_form(tmp_path):
    out = tmp_path / "cf.json"
    code = run_cli(
        ["closed-form", "--kappa", "0.8", "--a", "1", "--b", "0",
         "--steps", "40", "--output", str(out)]
    )
    assert code == 0
    traj = serialize.trajectory_from_obj(json.loads(out.read_text())["trajectory"])
    ref = su2_closed_form_trajectory(1.0, 0.0, 0.8, (0.0, 1.0), 40)
    assert_allclose(traj.samples, ref.samples, atol=1e-15)


def test_cli_spectral_matches_formula(tmp_path):
    out = tmp_path / "spec.json"
    code = run_cli(
        ["spectral", "--kappa", "0.8", "--a", "1", "--b", "0",
         "--steps", "400", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    coeffs = {(k, j): re + 1j * im for k, j, re, im in data["curve"]["coefficients"]}
    a, kappa = 1.0, 0.8
    assert abs(coeffs[(2, 2)] - (-(a**2 / 2) * (1 + kappa**2))) < 1e-8
    assert abs(coeffs[(2, 0)] - (a**2 / 4) * (kappa**2 - 1)) < 1e-8
    assert abs(coeffs[(2, 4)] - (a**2 / 4) * (kappa**2 - 1)) < 1e-8
    assert data["isospectral_drift"] < 1e-8
    assert data["lax_residual"] < 1e-6


def test_cli_degeneracy_verdicts(tmp_path):
    K9 = complete_K(0.9)
    out = tmp_path / "deg.json"
    code = run_cli(
        ["degeneracy", "--kappa", "0.9", "--a", repr(2 * K9), "--b", "0",
         "--steps", "1000", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["report"]["verdict"] == "degenerate"
    assert data["report"]["sigma_min"] < 1e-4

    code = run_cli(
        ["degeneracy", "--kappa", "0.9", "--a", "1.0", "--b", "0.5",
         "--steps", "1000", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["report"]["verdict"] == "nondegenerate"


def test_cli_factorize(tmp_path):
    out = tmp_path / "fac.json"
    code = run_cli(
        ["factorize", "--kappa", "0.8", "--a", "1", "--b", "0",
         "--shift", "3.0", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["positivity"]["sampled_positive"]
    assert data["norm_bound"]["holds"]
    B = serialize.matrix_from_pairs(data["factors"]["B"])
    assert np.min(np.linalg.eigvalsh(B)) > 0


def test_cli_stability(tmp_path):
    out = tmp_path / "stab.json"
    code = run_cli(["stability", "--triple", "1,0,0", "--output", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["report"]["stable"]
    assert abs(data["report"]["eta"] - 1.0) < 1e-10

    code = run_cli(["stability", "--triple", "0,1,0", "--output", str(out)])
    data = json.loads(out.read_text())
    assert not data["report"]["stable"]


def test_cli_sweep_sigma_min_crossing(tmp_path):
    # sigma_min dips to zero near a = 2 K(kappa) along the a-sweep
    out = tmp_path / "sweep.csv"
    code = run_cli(
        ["sweep", "--param", "a", "--from", "3.5", "--to", "5.5",
         "--points", "9", "--kappa", "0.9", "--b", "0",
         "--steps", "300", "--output", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].split(",")[0] == "a"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 9
    avals = np.array([float(r[0]) for r in rows])
    smins = np.array([float(r[1]) for r in rows])
    a_star = 2 * complete_K(0.9)
    # the minimum of sigma_min over the grid sits at the grid point closest
    # to the degenerate parameter
    assert abs(avals[np.argmin(smins)] - a_star) == pytest.approx(
        np.min(np.abs(avals - a_star))
    )
    # the shooting determinant changes sign across the locus
    dets = np.array([float(r[3]) for r in rows])
    assert dets[avals < a_star][0] * dets[avals > a_star][-1] < 0


def test_cli_stability_halfline(tmp_path):
    out = tmp_path / "hl.json"
    code = run_cli(
        ["stability", "--triple", "1,0,0", "--halfline",
         "--amplitude", "1e-4", "--horizon", "6.0", "--output", str(out)]
    )
    assert code == 0
    data = json.loads(out.read_text())
    hl = data["halfline"]
    assert hl["converged"]
    assert abs(hl["fitted_rate"] - 1.0) < 0.1


def test_cli_sweep_respects_ns_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("NS_THREADS", "1")
    out = tmp_path / "s1.csv"
    code = run_cli(
        ["sweep", "--param", "kappa", "--from", "0.3", "--to", "0.6",
         "--points", "3", "--steps", "150", "--output", str(out)]
    )
    assert code == 0
    assert len(out.read_text().strip().splitlines()) == 4


def test_cli_sweep_two_parameters(tmp_path):
    out = tmp_path / "sweep2.csv"
    code = run_cli(
        ["sweep", "--param", "a", "--from", "1", "--to", "2", "--points", "2",
         "--param2", "kappa", "--from2", "0.3", "--to2", "0.6", "--points2", "2",
         "--steps", "200", "--output", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("a,kappa,")
    assert len(lines) == 5
