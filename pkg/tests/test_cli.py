import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sphere_coarse import io
from sphere_coarse.cli import main
from sphere_coarse.filtering import RELATIONS, random_fields
from sphere_coarse.sh_core import SpectralScalar, build_gauss_grid, sft_inverse
from sphere_coarse.tensor_sphere import tsft_inverse
from sphere_coarse.vector_sphere import vsft_inverse


@pytest.fixture
def files(tmp_path):
    N = 6
    g = build_gauss_grid(N)
    f, u, T = random_fields(N, 8)
    paths = {}
    for name, field in (("s", sft_inverse(f, g)), ("v", vsft_inverse(u, g)), ("t", tsft_inverse(T, g))):
        paths[name] = tmp_path / f"{name}.sph"
        io.write_field(paths[name], field)
    return paths


def test_verify_acceptance_run(capsys):
    assert main(["verify", "--band", "15", "--kernel", "abelpoisson:0.8", "--seed", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    rows = [line for line in out if line.split()[0] in RELATIONS]
    assert len(rows) == 15
    assert all(line.endswith("PASS") for line in rows)


def test_verify_failure_exit_code(capsys):
    assert main(["verify", "--band", "6", "--kernel", "gaussian:3", "--tol", "1e-30"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_keyvalue(capsys):
    assert main(["verify", "--band", "4", "--kernel", "truncation:2", "--format", "kv"]) == 0
    kv = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert kv["all_passed"] == "true" and kv["band"] == "4"


def test_filter_truncation_zero_gives_mean(files, tmp_path):
    out = tmp_path / "o.sph"
    assert main(["filter", "--in", str(files["s"]), "--kernel", "truncation:0", "--out", str(out)]) == 0
    before, after = io.read_field(files["s"]), io.read_field(out)
    assert_allclose(after.values, before.mean(), atol=1e-13)


@pytest.mark.parametrize("name", ["v", "t"])
def test_filter_vector_and_tensor(files, tmp_path, name):
    out = tmp_path / "o.sph"
    assert main(["filter", "--in", str(files[name]), "--kernel", "abelpoisson:0.5", "--out", str(out)]) == 0
    assert type(io.read_field(out)) is type(io.read_field(files[name]))


def test_spectrum_of_pure_mode(tmp_path, capsys):
    c = SpectralScalar.zeros(6)
    c.coeffs[4, -3 + 6] = 2.5
    coef, field = tmp_path / "c.sphcoef", tmp_path / "f.sph"
    io.write_coeffs(coef, c)
    assert main(["synth", "--coeffs", str(coef), "--grid", "6", "--out", str(field)]) == 0
    assert main(["spectrum", "--in", str(field)]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    power = np.array([float(r.split()[1]) for r in rows])
    assert_allclose(power[4], 6.25, rtol=1e-13)
    assert np.all(np.delete(power, 4) < 1e-25)


def test_spectrum_of_vector_has_family_columns(files, capsys):
    assert main(["spectrum", "--in", str(files["v"])]) == 0
    header = capsys.readouterr().out.splitlines()[0].split()
    assert header == ["degree", "Y", "Psi", "Phi", "total"]


def test_decompose_and_synth_round_trip(files, tmp_path, capsys):
    prefix = tmp_path / "pot"
    assert main(["decompose", "--in", str(files["v"]), "--out-prefix", str(prefix)]) == 0
    written = capsys.readouterr().out.split()
    assert [p.rsplit("_", 1)[1] for p in written] == ["r.sphcoef", "f.sphcoef", "eta.sphcoef"]
    assert main(["decompose", "--in", str(files["t"]), "--out-prefix", str(prefix)]) == 0
    assert len(capsys.readouterr().out.split()) == 9


def test_synth_cartesian(tmp_path):
    _, u, _ = random_fields(3, 1)
    coef, field = tmp_path / "u.sphcoef", tmp_path / "u.sph"
    io.write_coeffs(coef, u)
    assert main(["synth", "--coeffs", str(coef), "--grid", "5", "--out", str(field), "--basis", "cartesian"]) == 0
    back = io.read_field(field)
    assert back.basis == "cartesian"
    assert_allclose(back.to_frame().values, vsft_inverse(u, back.grid).values, atol=1e-14)


def test_check_file(files, tmp_path, capsys):
    assert main(["check-file", "--in", str(files["t"])]) == 0
    assert capsys.readouterr().out.startswith("field kind=tensor nlat=7 nlon=14")
    assert main(["check-file", "--in", str(files["s"]), "--dump-text"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 7 * 14
    bad = tmp_path / "bad.sph"
    bad.write_bytes(files["s"].read_bytes()[:-8])
    assert main(["check-file", "--in", str(bad)]) == 1
    assert "truncated payload" in capsys.readouterr().err


def test_usage_errors(files, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["filter", "--in", str(files["s"])])
    assert exc.value.code == 2
    coef = tmp_path / "c.sphcoef"
    io.write_coeffs(coef, random_fields(5, 0)[0])
    assert main(["synth", "--coeffs", str(coef), "--grid", "3", "--out", str(tmp_path / "x")]) == 2
    assert main(["decompose", "--in", str(files["s"]), "--out-prefix", str(tmp_path / "p")]) == 2
    assert "error" in capsys.readouterr().err


def test_io_errors_exit_one(tmp_path, capsys):
    assert main(["spectrum", "--in", str(tmp_path / "missing.sph")]) == 1
    assert main(["verify", "--band", "4", "--kernel", "nonsense:1"]) == 1
    assert capsys.readouterr().err


def test_deterministic_output(files, tmp_path):
    a, b = tmp_path / "a.sph", tmp_path / "b.sph"
    for out in (a, b):
        main(["filter", "--in", str(files["t"]), "--kernel", "gaussian:6", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sphere_coarse", "verify", "--band", "3", "--kernel", "abelpoisson:0.5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "all passed" in proc.stdout
