import json

import numpy as np
import pytest

from conftest import random_quats
from fixtures import circle_motion
from virtimu.errors import (
    ColumnMismatchError,
    EmptyTraceError,
    HierarchyError,
    InvalidRateError,
    NonFiniteError,
    ParseError,
    RaggedRowError,
    SchemaError,
    ValidationError,
)
from virtimu.io import (
    parse_motion,
    parse_track_csv,
    read_embeddings_csv,
    read_imu_csv,
    read_labels_csv,
    read_matrix_csv,
    read_stats_json,
    write_embeddings_csv,
    write_imu_csv,
    write_matrix_csv,
    write_motion,
    write_plot_data,
    write_stats_json,
    write_track_csv,
)
from virtimu.rotation import quat_exp
from virtimu.signal import ChannelStats
from virtimu.synthesis import ImuTrace, WorldTrack

MINIMAL = {
    "fps": 30,
    "rotation_format": "axis_angle",
    "skeleton": {"names": ["root"], "parents": [-1], "rest_offsets": [[0, 0, 0]]},
    "frames": [
        {"root_t": [0, 1, 2], "rotations": [[0, 0, 0]]},
        {"root_t": [0, 1, 3], "rotations": [[0, 0, 1.5707963267948966]]},
    ],
}


def doc(**changes):
    d = json.loads(json.dumps(MINIMAL))
    for path, value in changes.items():
        target = d
        *parents, last = path.split("__")
        for p in parents:
            target = target[int(p)] if p.isdigit() else target[p]
        target[int(last) if last.isdigit() else last] = value
    return json.dumps(d)


def test_parse_minimal():
    sk, seq = parse_motion(json.dumps(MINIMAL).encode())
    assert sk.names == ("root",) and list(sk.parents) == [-1]
    assert seq.fps == 30.0 and len(seq) == 2
    np.testing.assert_array_equal(seq.root_translation, [[0, 1, 2], [0, 1, 3]])
    np.testing.assert_array_equal(seq.rotations[0, 0], [1, 0, 0, 0])
    np.testing.assert_allclose(seq.rotations[1, 0], [np.sqrt(0.5), 0, 0, np.sqrt(0.5)], atol=1e-15)


@pytest.mark.parametrize(
    "text, error, match",
    [
        (doc(skeleton__parents=[-1, 2, 1], skeleton__names=["a", "b", "c"],
             skeleton__rest_offsets=[[0, 0, 0]] * 3, frames=[{"root_t": [0, 0, 0], "rotations": [[0, 0, 0]] * 3}]),
         HierarchyError, "parent"),
        (doc(fps=0), InvalidRateError, "fps"),
        (doc(fps=-5), InvalidRateError, "fps"),
        (doc(frames__1__root_t=[0, 1]), SchemaError, r"frames\[1\]\.root_t"),
        (doc(frames__0__rotations=[[0, 0]]), SchemaError, r"frames\[0\]\.rotations\[0\]"),
        (doc(rotation_format="euler"), SchemaError, "rotation_format"),
        (doc(frames__0__root_t=[0, "x", 0]), SchemaError, r"root_t\[1\]"),
        (json.dumps(MINIMAL).replace('"root_t": [0, 1, 2]', '"root_t": [0, NaN, 2]'), NonFiniteError, "NaN"),
        (json.dumps(MINIMAL).replace('"root_t": [0, 1, 2]', '"root_t": [0, 1e999, 2]'), NonFiniteError, "root_t"),
        ("{not json", SchemaError, "JSON"),
        (json.dumps({k: v for k, v in MINIMAL.items() if k != "skeleton"}), SchemaError, "skeleton"),
    ],
)  # fmt: skip
def test_parse_errors(text, error, match):
    with pytest.raises(error, match=match):
        parse_motion(text)


def test_error_categories_are_distinct():
    cats = [SchemaError, NonFiniteError, HierarchyError, InvalidRateError]
    for a in cats:
        for b in cats:
            assert (a is b) == issubclass(a, b)


def test_motion_round_trip_is_byte_identical():
    sk, seq = circle_motion(rate=60.0, duration=0.5)
    text = write_motion(sk, seq)
    sk2, seq2 = parse_motion(text)
    assert write_motion(sk2, seq2) == text
    np.testing.assert_array_equal(seq2.rotations, seq.rotations)
    np.testing.assert_array_equal(sk2.rest_offsets, sk.rest_offsets)


def test_motion_axis_angle_round_trip(rng):
    sk, seq = circle_motion(rate=60.0, duration=0.5)
    sk2, seq2 = parse_motion(write_motion(sk, seq, "axis_angle"))
    np.testing.assert_allclose(seq2.rotations, seq.rotations, atol=1e-12)
    assert json.loads(write_motion(sk, seq, "axis_angle"))["rotation_format"] == "axis_angle"


def random_trace(rng, n=50, rate=100.0):
    return ImuTrace.from_channels(rate, rng.normal(size=(n, 6)) * 10.0 ** rng.integers(-8, 8, size=(n, 6)))


def test_imu_round_trip(rng):
    trace = random_trace(rng)
    text = write_imu_csv(trace)
    assert text.startswith("# rate_hz=100.0\nt,ax,ay,az,gx,gy,gz\n")
    back = read_imu_csv(text.encode())
    assert back.rate == trace.rate
    assert np.abs(back.data - trace.data).max() == 0
    assert write_imu_csv(back) == text


def test_imu_rate_inferred_from_time_column():
    text = "t,ax,ay,az,gx,gy,gz\n0.0,0,0,0,0,0,0\n0.01,0,0,0,0,0,0\n0.02,0,0,0,0,0,0\n"
    assert abs(read_imu_csv(text).rate - 100.0) < 1e-9


def test_track_round_trip(rng):
    track = WorldTrack(60.0, rng.normal(size=(20, 3)), random_quats(rng, 20))
    text = write_track_csv(track)
    back = parse_track_csv(text)
    assert np.array_equal(back.position, track.position)
    assert np.array_equal(back.orientation, track.orientation)
    assert write_track_csv(back) == text


def test_embeddings_round_trip(rng):
    e = rng.normal(size=(7, 5))
    text = write_embeddings_csv(e)
    assert text.splitlines()[0] == "e0,e1,e2,e3,e4"
    assert np.array_equal(read_embeddings_csv(text), e)


def test_embeddings_reject_zero_row():
    with pytest.raises(ValidationError):
        read_embeddings_csv("e0,e1\n1,2\n0,0\n")


def test_matrix_and_labels():
    m = np.array([[0.5, -1.0], [2.0, 3.25]])
    assert np.array_equal(read_matrix_csv(write_matrix_csv(m, "c"), "c"), m)
    np.testing.assert_array_equal(read_labels_csv("label\n0\n3\n1\n"), [0, 3, 1])
    with pytest.raises(ParseError):
        read_labels_csv("label\n0.5\n")


def test_stats_round_trip(rng):
    stats = ChannelStats(rng.normal(size=6), rng.uniform(0, 3, size=6), 1234)
    text = write_stats_json(stats)
    back = read_stats_json(text)
    assert np.array_equal(back.mean, stats.mean) and np.array_equal(back.std, stats.std)
    assert back.count == 1234
    assert write_stats_json(back) == text
    assert set(json.loads(text)["channels"]) == {"ax", "ay", "az", "gx", "gy", "gz"}


def test_stats_missing_channel():
    text = json.dumps({"count": 3, "channels": {"ax": {"mean": 0, "std": 1}}})
    with pytest.raises(SchemaError, match="ay"):
        read_stats_json(text)


def test_empty_trace():
    with pytest.raises(EmptyTraceError, match="empty trace"):
        read_imu_csv("# rate_hz=100\nt,ax,ay,az,gx,gy,gz\n")


def test_swapped_columns():
    with pytest.raises(ColumnMismatchError, match="'ay'"):
        read_imu_csv("# rate_hz=100\nt,ax,az,ay,gx,gy,gz\n0,0,0,0,0,0,0\n")


def test_ragged_row():
    with pytest.raises(RaggedRowError, match="line 4"):
        read_imu_csv("# rate_hz=100\nt,ax,ay,az,gx,gy,gz\n0,0,0,0,0,0,0\n0.01,0,0,0,0,0\n")


@pytest.mark.parametrize("bad", ["nan", "inf", "-inf"])
def test_non_finite_rejected(bad):
    with pytest.raises(NonFiniteError):
        read_imu_csv(f"# rate_hz=100\nt,ax,ay,az,gx,gy,gz\n0,{bad},0,0,0,0,0\n")


def test_non_numeric_rejected():
    with pytest.raises(ParseError, match="'gx'"):
        read_imu_csv("# rate_hz=100\nt,ax,ay,az,gx,gy,gz\n0,0,0,0,abc,0,0\n")


def test_writers_deterministic(rng):
    trace = random_trace(rng)
    assert write_imu_csv(trace) == write_imu_csv(ImuTrace(trace.rate, trace.accel.copy(), trace.gyro.copy()))


def test_plot_data():
    trace = ImuTrace.from_channels(10.0, np.ones((3, 6)))
    lines = write_plot_data(trace).splitlines()
    assert lines[0] == "# t ax ay az gx gy gz"
    assert lines[2].split() == ["0.1"] + ["1.0"] * 6
