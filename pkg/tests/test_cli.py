import subprocess
import sys

import numpy as np
import pytest

from attradon import hilbert
from attradon.cli import main
from attradon.fields import GridField, make_phantom
from attradon.formats import read_field, read_pgm, read_sinogram, write_field, write_sinogram
from attradon.geometry import SinogramGrid
from attradon.radon import Sinogram
from attradon.selftest import run_selftest


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def forward(capsys, path, f="gaussian", a="zero", n_angles=8, n_p=16, p_max=4):
    return run(capsys, "forward", "--f", f, "--a", a, "--n-angles", n_angles, "--n-p", n_p,
               "--p-max", p_max, "--out", path)


def test_forward_radial_rows_equal(tmp_path, capsys):
    path = tmp_path / "s.asg"
    code, out, _ = forward(capsys, path)
    assert code == 0 and "8x16" in out and "wall time" in out
    s = read_sinogram(path)
    assert s.values.shape == (8, 16)
    assert np.max(np.abs(s.values - s.values[0])) < 1e-8


def test_forward_zero_f(tmp_path, capsys):
    path = tmp_path / "z.asg"
    assert forward(capsys, path, f="zero")[0] == 0
    assert not np.any(read_sinogram(path).values)


def test_forward_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "1.asg", tmp_path / "2.asg"
    for p in (p1, p2):
        forward(capsys, p, f="shifted_gaussian_mixture", a="gaussian:A=0.3,sigma=1.5")
    assert p1.read_bytes() == p2.read_bytes()
    p3 = tmp_path / "3.asg"
    run(capsys, "forward", "--f", "shifted_gaussian_mixture", "--a", "gaussian:A=0.3,sigma=1.5",
        "--n-angles", 8, "--n-p", 16, "--p-max", 4, "--out", p3, "--workers", 3)
    assert p3.read_bytes() == p1.read_bytes()


def test_invert_round_trip(tmp_path, capsys):
    sino, field, pgm = tmp_path / "s.asg", tmp_path / "f.afg", tmp_path / "f.pgm"
    a = "gaussian:A=0.3,sigma=1.5"
    assert forward(capsys, sino, a=a, n_angles=180, n_p=256, p_max=6)[0] == 0
    code, out, _ = run(capsys, "invert", "--sino", sino, "--a", a, "--nx", 48, "--ny", 40,
                       "--L", 3, "--out", field, "--pgm", pgm, "--truth", "gaussian")
    assert code == 0
    err = float(out.split("relative L2 error")[1].split()[0])
    assert err < 0.05
    rec = read_field(field)
    assert rec.values.shape == (40, 48) and rec.L == 3.0
    assert read_pgm(pgm).shape == (40, 48)


def test_invert_zero_sinogram(tmp_path, capsys):
    sino, field = tmp_path / "z.asg", tmp_path / "z.afg"
    write_sinogram(sino, Sinogram(SinogramGrid(16, 64, 5.0), np.zeros((16, 64))))
    assert run(capsys, "invert", "--sino", sino, "--nx", 8, "--ny", 8, "--out", field)[0] == 0
    assert not np.any(read_field(field).values)


def test_invert_corrupted_magic_is_io_error(tmp_path, capsys):
    sino = tmp_path / "s.asg"
    forward(capsys, sino)
    sino.write_bytes(b"JUNK" + sino.read_bytes()[4:])
    code, _, err = run(capsys, "invert", "--sino", sino, "--out", tmp_path / "f.afg")
    assert code == 3 and "bad magic" in err


def test_missing_input_is_io_error(tmp_path, capsys):
    code, _, _ = run(capsys, "invert", "--sino", tmp_path / "nope.asg", "--out", tmp_path / "x")
    assert code == 3


def test_invert_outside_offset_range_is_numeric_error(tmp_path, capsys):
    sino = tmp_path / "s.asg"
    forward(capsys, sino, p_max=2)
    code, _, _ = run(capsys, "invert", "--sino", sino, "--L", 3, "--out", tmp_path / "f.afg")
    assert code == 2


def test_pair_zero_f(capsys):
    code, out, _ = run(capsys, "pair", "--f", "zero", "--g", "gaussian", "--n-angles", 16,
                       "--n-p", 128, "--p-max", 8)
    assert code == 0
    assert out.strip() == "value=0.0 stderr=0.0 method=quadrature n=0 seed=none"


def test_pair_gaussians(capsys):
    code, out, _ = run(capsys, "pair", "--f", "gaussian", "--g", "gaussian", "--n-angles", 60,
                       "--n-p", 256, "--p-max", 8, "--csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "value,stderr,method,n,seed"
    assert float(row.split(",")[0]) == pytest.approx(np.pi / 2, rel=1e-3)


def test_pair_from_sinogram_file(tmp_path, capsys):
    sino = tmp_path / "s.asg"
    forward(capsys, sino, n_angles=60, n_p=256, p_max=8)
    code, out, _ = run(capsys, "pair", "--sino", sino, "--g", "gaussian")
    assert code == 0 and float(out.split()[0][6:]) == pytest.approx(np.pi / 2, rel=1e-3)


def test_pair_mc_reproducible(tmp_path, capsys):
    sino = tmp_path / "s.asg"
    forward(capsys, sino, n_angles=60, n_p=256, p_max=8)
    args = ("pair-mc", "--sino", sino, "--g", "gaussian", "--samples", 3000, "--seed", 9,
            "--kernel-table")
    c1, out1, _ = run(capsys, *args)
    c2, out2, _ = run(capsys, *args, "--workers", 2)
    assert c1 == c2 == 0 and out1 == out2
    assert "method=monte_carlo n=3000 seed=9" in out1
    _, out3, _ = run(capsys, *args[:-2], 10, "--kernel-table")
    assert out3 != out1


def test_pair_mc_on_demand_rows(capsys):
    code, out, _ = run(capsys, "pair-mc", "--f", "gaussian", "--g", "gaussian", "--samples", 50,
                       "--seed", 1, "--n-angles", 16, "--n-p", 128, "--p-max", 8)
    assert code == 0 and "n=50 seed=1" in out


def test_pair_sampled_probe_rejected(tmp_path, capsys):
    probe = tmp_path / "g.afg"
    write_field(probe, GridField.sample(make_phantom("gaussian"), 33, 33, 4.0))
    code, _, err = run(capsys, "pair", "--f", "gaussian", "--g", f"file:{probe}",
                       "--n-angles", 8, "--n-p", 64, "--p-max", 6)
    assert code == 2 and "gradient" in err


def test_render(tmp_path, capsys):
    field, pgm = tmp_path / "f.afg", tmp_path / "f.pgm"
    write_field(field, GridField(np.arange(12.0).reshape(3, 4), 1.0))
    assert run(capsys, "render", "--in", field, "--out", pgm)[0] == 0
    assert pgm.read_bytes().startswith(b"P5\n4 3\n255\n")


def test_config_file_overrides_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# grid\nn-angles = 4\nn_p=32\np-max=3.5\n")
    out = tmp_path / "s.asg"
    assert run(capsys, "--config", cfg, "forward", "--f", "gaussian", "--out", out)[0] == 0
    assert read_sinogram(out).grid == SinogramGrid(4, 32, 3.5)
    # explicit flags still win
    run(capsys, "--config", cfg, "forward", "--f", "gaussian", "--n-p", 20, "--out", out)
    assert read_sinogram(out).grid.n_p == 20


@pytest.mark.parametrize("text", ["bogus_key = 3\n", "n-angles\n", "n-angles = many\n"])
def test_bad_config_is_usage_error(tmp_path, capsys, text):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    assert run(capsys, "--config", cfg, "forward", "--f", "gaussian", "--out", "x")[0] == 1


@pytest.mark.parametrize("argv", [
    [],
    ["transmogrify"],
    ["forward", "--f", "gaussian"],
    ["forward", "--f", "no_such_phantom", "--out", "x"],
    ["forward", "--f", "gaussian:radius=2", "--out", "x"],
    ["forward", "--f", "gaussian", "--n-p", "1", "--out", "x"],
    ["pair", "--g", "gaussian"],
    ["pair-mc", "--f", "gaussian", "--g", "gaussian", "--samples", "0"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, "selftest", "--quick")
    assert code == 0 and "6/6 checks passed" in out


def test_selftest_catches_flipped_hilbert_sign(monkeypatch, capsys):
    monkeypatch.setattr(hilbert, "_MULTIPLIER_SIGN", 1.0)
    code, out, _ = run(capsys, "selftest", "--quick")
    assert code == 2
    failed = {r.name for r in run_selftest(quick=True) if not r.passed}
    # a flipped multiplier is still anti-self-adjoint; the closed form and the
    # pairing identity are what expose it
    assert {"hilbert_closed_form", "pairing_vs_oracle"} <= failed
    assert "hilbert_adjointness" not in failed


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.asg"
    proc = subprocess.run([sys.executable, "-m", "attradon", "forward", "--f", "gaussian",
                           "--n-angles", "4", "--n-p", "16", "--p-max", "4", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and out.exists()
    proc = subprocess.run([sys.executable, "-m", "attradon", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "forward" in proc.stdout
