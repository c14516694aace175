import json
import math

import numpy as np
import pytest

from fixtures import circle_document, static_document
from virtimu.cli import format_scalar, main
from virtimu.io import read_imu_csv, read_stats_json, write_embeddings_csv, write_imu_csv, write_matrix_csv
from virtimu.rotation import quat_exp, quat_to_matrix
from virtimu.synthesis import ImuTrace


@pytest.fixture
def files(tmp_path):
    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return put


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_static_pose(files, tmp_path, capsys):
    motion = files("static.json", static_document())
    out = tmp_path / "imu.csv"
    code, _, _ = run(capsys, "simulate", motion, out, "--joint", "arm")
    assert code == 0
    trace = read_imu_csv(out.read_text())
    np.testing.assert_allclose(trace.accel, np.tile([0, 9.8, 0], (len(trace), 1)), atol=1e-12)
    np.testing.assert_array_equal(trace.gyro, 0)


def test_simulate_static_pose_with_mount(files, tmp_path, capsys):
    motion = files("static.json", static_document())
    out = tmp_path / "imu.csv"
    code, _, _ = run(capsys, "simulate", motion, out, "--joint", "arm", "--mount-rot", "0.3,-0.2,1.0",
                     "--mount-off", "0,0.05,0")  # fmt: skip
    assert code == 0
    expected = quat_to_matrix(quat_exp([0.3, -0.2, 1.0])).T @ [0, 9.8, 0]
    np.testing.assert_allclose(read_imu_csv(out.read_text()).accel, np.tile(expected, (10, 1)), atol=1e-12)


def test_simulate_circle(files, tmp_path, capsys):
    motion = files("circle.json", circle_document())
    out, plot = tmp_path / "imu.csv", tmp_path / "imu.dat"
    code, _, _ = run(capsys, "simulate", motion, out, "--joint", "arm", "--plot", plot)
    assert code == 0
    trace = read_imu_csv(out.read_text())
    assert trace.rate == 240.0
    horizontal = np.hypot(trace.accel[:, 0], trace.accel[:, 2])
    assert np.abs(horizontal - 4.0).max() < 1e-3
    np.testing.assert_allclose(trace.accel[:, 1], 9.8, atol=1e-9)
    np.testing.assert_allclose(trace.gyro, np.tile([0, 2, 0], (len(trace), 1)), atol=1e-9)
    assert plot.read_text().startswith("# t ax ay az gx gy gz\n")


def test_simulate_is_byte_deterministic(files, tmp_path, capsys):
    motion = files("circle.json", circle_document(duration=1.0))
    outs = []
    for i in range(3):
        out = tmp_path / f"imu{i}.csv"
        assert run(capsys, "simulate", motion, out, "--joint", "arm", "--mount-rot", "0.1,0.2,0.3")[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_simulate_with_rate(files, tmp_path, capsys):
    motion = files("circle.json", circle_document(duration=1.0))
    out = tmp_path / "imu.csv"
    assert run(capsys, "simulate", motion, out, "--joint", "arm", "--rate", "30")[0] == 0
    trace = read_imu_csv(out.read_text())
    assert trace.rate == 30.0 and len(trace) == 31


def test_simulate_missing_joint(files, tmp_path, capsys):
    motion = files("static.json", static_document())
    out = tmp_path / "imu.csv"
    code, _, err = run(capsys, "simulate", motion, out, "--joint", "left_wrist")
    assert code == 4
    assert "left_wrist" in err and len(err.strip().splitlines()) == 1
    assert not out.exists()


def test_exit_codes(files, tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert run(capsys, "simulate", tmp_path / "nope.json", out, "--joint", "arm")[0] == 5
    bad = files("bad.json", "{ nope")
    assert run(capsys, "simulate", bad, out, "--joint", "arm")[0] == 3
    assert run(capsys, "simulate", bad, out)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "resample", bad, out, "--rate", "-3")[0] == 2
    assert not out.exists()


def test_no_partial_output(files, tmp_path, capsys):
    out = tmp_path / "keep.csv"
    out.write_text("previous")
    bad = files("bad.csv", "# rate_hz=10\nt,ax,ay,az,gx,gy,gz\n0,1,1,1,1,1\n")
    assert run(capsys, "resample", bad, out, "--rate", "5")[0] == 3
    assert out.read_text() == "previous"
    assert [p.name for p in tmp_path.iterdir() if p.name.endswith(".tmp")] == []


def test_resample_calibrate_stats(files, tmp_path, capsys, rng):
    trace = ImuTrace.from_channels(100.0, rng.normal(size=(200, 6)))
    src = files("in.csv", write_imu_csv(trace))
    ref_trace = ImuTrace.from_channels(30.0, rng.normal(loc=2.0, scale=0.5, size=(90, 6)))
    ref_csv = files("ref.csv", write_imu_csv(ref_trace))
    ref_json, cal, cal_json, res = (tmp_path / n for n in ("ref.json", "cal.csv", "cal.json", "res.csv"))

    assert run(capsys, "stats", ref_csv, ref_json)[0] == 0
    assert run(capsys, "calibrate", src, cal, "--ref-stats", ref_json)[0] == 0
    assert run(capsys, "stats", cal, cal_json)[0] == 0
    ref, got = read_stats_json(ref_json.read_text()), read_stats_json(cal_json.read_text())
    assert np.abs(ref.mean - got.mean).max() < 1e-9
    assert np.abs(ref.std - got.std).max() < 1e-9

    assert run(capsys, "resample", src, res, "--rate", "30")[0] == 0
    assert read_imu_csv(res.read_text()).rate == 30.0


def test_loss_infonce(files, capsys, rng):
    q = files("q.csv", write_embeddings_csv(rng.normal(size=(1, 4))))
    k = files("k.csv", write_embeddings_csv(rng.normal(size=(1, 4))))
    code, out, _ = run(capsys, "loss", "--kind", "infonce", "--q", q, "--k", k)
    assert code == 0 and out == "0\n"
    same = files("same.csv", write_embeddings_csv(np.tile([0.6, 0.8], (2, 1))))
    code, out, _ = run(capsys, "loss", "--kind", "infonce", "--q", same, "--k", same)
    assert out == "0.693147180560\n"


def test_loss_total_mse_xent(files, capsys, rng):
    e = files("e.csv", write_embeddings_csv(np.eye(3)))
    code, out, _ = run(capsys, "loss", "--kind", "total", "--text", e, "--pose", e, "--imu-left", e, "--imu-right", e,
                       "--tau", "1.0")  # fmt: skip
    expected = 6 * -math.log(math.e / (math.e + 2))
    assert code == 0 and abs(float(out) - expected) < 1e-11

    v = rng.normal(size=(20, 6))
    xv = files("v.csv", write_imu_csv(ImuTrace.from_channels(10.0, v)))
    xp = files("p.csv", write_imu_csv(ImuTrace.from_channels(10.0, v + 1)))
    code, out, _ = run(capsys, "loss", "--kind", "mse", "--xv", xv, "--xp", xp, "--xs", xv, "--window", "5")
    assert code == 0 and out == "1.00000000000\n"

    logits = files("z.csv", write_matrix_csv(np.zeros((6, 2)), "c"))
    labels = files("y.csv", "label\n0\n1\n0\n1\n1\n0\n")
    code, out, _ = run(capsys, "loss", "--kind", "xent", "--logits", logits, "--labels", labels, "--window", "3")
    assert code == 0 and abs(float(out) - 3 * math.log(2)) < 1e-11


def test_loss_missing_inputs(capsys):
    code, _, err = run(capsys, "loss", "--kind", "infonce")
    assert code == 2 and "--q" in err


def test_check_command(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())


@pytest.mark.parametrize("x, s", [(0.0, "0"), (math.log(2), "0.693147180560"), (1.0, "1.00000000000")])
def test_format_scalar(x, s):
    assert format_scalar(x) == s
