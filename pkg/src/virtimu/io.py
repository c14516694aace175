"""Text formats: JSON motion documents, CSV time series, JSON channel stats.

Floats are written with ``repr`` (shortest string that round-trips a
float64), lines end in ``\\n``, and column order is fixed, so writers are
byte-deterministic and every writer/reader pair is lossless.

Motion document::

    {"fps": 60.0, "rotation_format": "axis_angle" | "quaternion_wxyz",
     "skeleton": {"names": [...], "parents": [...], "rest_offsets": [[x, y, z], ...]},
     "frames": [{"root_t": [x, y, z], "rotations": [[...], ...]}, ...]}

IMU CSV starts with ``# rate_hz=<value>`` followed by the header
``t,ax,ay,az,gx,gy,gz``. World-track CSV uses ``t,px,py,pz,qw,qx,qy,qz``
(rate comment optional; inferred from ``t`` otherwise). Embedding CSV has
columns ``e0..e{D-1}``.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .errors import (
    ColumnMismatchError,
    EmptyTraceError,
    InvalidRateError,
    NonFiniteError,
    ParseError,
    RaggedRowError,
    SchemaError,
)
from .losses import as_embeddings
from .rotation import quat_exp, quat_log_angle_axis
from .signal import CHANNELS, ChannelStats
from .skeleton import MotionSequence, Skeleton
from .synthesis import ImuTrace, WorldTrack

__all__ = [
    "parse_motion",
    "write_motion",
    "parse_track_csv",
    "write_track_csv",
    "read_imu_csv",
    "write_imu_csv",
    "read_embeddings_csv",
    "read_labels_csv",
    "write_embeddings_csv",
    "read_matrix_csv",
    "write_matrix_csv",
    "read_stats_json",
    "write_stats_json",
    "write_plot_data",
]

IMU_COLUMNS = ("t",) + CHANNELS
TRACK_COLUMNS = ("t", "px", "py", "pz", "qw", "qx", "qy", "qz")
ROTATION_FORMATS = {"axis_angle": 3, "quaternion_wxyz": 4}


def _text(data: str | bytes) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return data


def _fmt(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------- motion


def _reject_constant(name: str):
    raise NonFiniteError(f"non-finite number {name} in document")


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def _number(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {type(x).__name__}")
    v = float(x)
    if not math.isfinite(v):
        raise NonFiniteError(f"{where}: non-finite number")
    return v


def _vector(x: Any, size: int, where: str) -> list[float]:
    if not isinstance(x, list) or len(x) != size:
        raise SchemaError(f"{where}: expected a list of {size} numbers")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(x)]


def _list(x: Any, where: str) -> list:
    if not isinstance(x, list):
        raise SchemaError(f"{where}: expected a list")
    return x


def parse_motion(data: str | bytes) -> tuple[Skeleton, MotionSequence]:
    """Decode a motion document into a validated skeleton and sequence.

    Raises ``SchemaError``, ``NonFiniteError``, ``HierarchyError`` or
    ``InvalidRateError`` depending on what is wrong.
    """
    try:
        doc = json.loads(_text(data), parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None

    fps = _number(_field(doc, "fps", "document"), "fps")
    if fps <= 0:
        raise InvalidRateError(f"fps must be positive, got {fps}")
    fmt = _field(doc, "rotation_format", "document")
    if fmt not in ROTATION_FORMATS:
        raise SchemaError(f"rotation_format: expected one of {sorted(ROTATION_FORMATS)}, got {fmt!r}")
    width = ROTATION_FORMATS[fmt]

    sk_doc = _field(doc, "skeleton", "document")
    names = _list(_field(sk_doc, "names", "skeleton"), "skeleton.names")
    for i, n in enumerate(names):
        if not isinstance(n, str):
            raise SchemaError(f"skeleton.names[{i}]: expected a string")
    parents = _list(_field(sk_doc, "parents", "skeleton"), "skeleton.parents")
    for i, p in enumerate(parents):
        if isinstance(p, bool) or not isinstance(p, int):
            raise SchemaError(f"skeleton.parents[{i}]: expected an integer")
    offsets = _list(_field(sk_doc, "rest_offsets", "skeleton"), "skeleton.rest_offsets")
    offsets = [_vector(o, 3, f"skeleton.rest_offsets[{i}]") for i, o in enumerate(offsets)]
    if not (len(names) == len(parents) == len(offsets)):
        raise SchemaError("skeleton: names, parents and rest_offsets must have equal length")
    sk = Skeleton(tuple(names), np.array(parents, dtype=np.int64), np.array(offsets).reshape(-1, 3))

    frames = _list(_field(doc, "frames", "document"), "frames")
    if not frames:
        raise SchemaError("frames: at least one frame is required")
    root = np.empty((len(frames), 3))
    raw = np.empty((len(frames), sk.n_joints, width))
    for t, fr in enumerate(frames):
        where = f"frames[{t}]"
        root[t] = _vector(_field(fr, "root_t", where), 3, f"{where}.root_t")
        rots = _list(_field(fr, "rotations", where), f"{where}.rotations")
        if len(rots) != sk.n_joints:
            raise SchemaError(f"{where}.rotations: expected {sk.n_joints} entries, got {len(rots)}")
        for j, r in enumerate(rots):
            raw[t, j] = _vector(r, width, f"{where}.rotations[{j}]")
    if fmt == "axis_angle":
        quats = quat_exp(raw)
    else:
        if np.any(np.linalg.norm(raw, axis=-1) == 0):
            raise SchemaError("frames: zero-length quaternion")
        quats = raw
    return sk, MotionSequence(fps, root, quats)


def write_motion(sk: Skeleton, seq: MotionSequence, rotation_format: str = "quaternion_wxyz") -> str:
    if rotation_format not in ROTATION_FORMATS:
        raise ValueError(f"unknown rotation format {rotation_format!r}")
    rots = seq.rotations if rotation_format == "quaternion_wxyz" else quat_log_angle_axis(seq.rotations)

    def vec(v) -> str:
        return "[" + ", ".join(_fmt(x) for x in v) + "]"

    lines = [
        "{",
        f'  "fps": {_fmt(seq.fps)},',
        f'  "rotation_format": "{rotation_format}",',
        '  "skeleton": {',
        f'    "names": {json.dumps(list(sk.names))},',
        f'    "parents": [{", ".join(str(int(p)) for p in sk.parents)}],',
        f'    "rest_offsets": [{", ".join(vec(o) for o in sk.rest_offsets)}]',
        "  },",
        '  "frames": [',
    ]
    for t in range(len(seq)):
        sep = "," if t < len(seq) - 1 else ""
        body = ", ".join(vec(r) for r in rots[t])
        lines.append(f'    {{"root_t": {vec(seq.root_translation[t])}, "rotations": [{body}]}}{sep}')
    lines += ["  ]", "}", ""]
    return "\n".join(lines)


# ------------------------------------------------------------------------ CSV


def _read_table(data: str | bytes, expected: tuple[str, ...] | None, prefix: str | None = None):
    """Parse ``# key=value`` comments, a header and a float body."""
    meta: dict[str, str] = {}
    header = None
    rows: list[list[float]] = []
    for lineno, line in enumerate(_text(data).splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            header = fields
            if expected is not None:
                if len(header) != len(expected):
                    raise ColumnMismatchError(f"expected {len(expected)} columns {','.join(expected)}, got {line!r}")
                for got, want in zip(header, expected):
                    if got != want:
                        raise ColumnMismatchError(f"column mismatch: expected {want!r}, found {got!r}")
            else:
                for i, got in enumerate(header):
                    if got != f"{prefix}{i}":
                        raise ColumnMismatchError(f"column mismatch: expected {prefix + str(i)!r}, found {got!r}")
            continue
        if len(fields) != len(header):
            raise RaggedRowError(f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
        row = []
        for col, f in zip(header, fields):
            try:
                v = float(f)
            except ValueError:
                raise ParseError(f"line {lineno}, column {col!r}: not a number: {f!r}") from None
            if not math.isfinite(v):
                raise NonFiniteError(f"line {lineno}, column {col!r}: non-finite value {f!r}")
            row.append(v)
        rows.append(row)
    if header is None:
        raise ColumnMismatchError("missing header line")
    if not rows:
        raise EmptyTraceError("empty trace: header present but no data rows")
    return meta, header, np.array(rows)


def _rate(meta: dict[str, str], t: np.ndarray) -> float:
    if "rate_hz" in meta:
        try:
            rate = float(meta["rate_hz"])
        except ValueError:
            raise ParseError(f"bad rate_hz comment {meta['rate_hz']!r}") from None
    else:
        if len(t) < 2:
            raise ParseError("cannot infer the sampling rate from a single row; add '# rate_hz=...'")
        dt = np.diff(t)
        if np.any(dt <= 0) or np.ptp(dt) > 1e-9 * max(1.0, float(np.max(np.abs(t)))):
            raise InvalidRateError("t column is not uniformly increasing")
        rate = (len(t) - 1) / (t[-1] - t[0])
    if not math.isfinite(rate) or rate <= 0:
        raise InvalidRateError(f"rate must be positive, got {rate}")
    return rate


def _write_table(columns: tuple[str, ...], data: np.ndarray, meta: dict[str, float] | None = None) -> str:
    lines = [f"# {k}={_fmt(v)}" for k, v in (meta or {}).items()]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(x) for x in row) for row in data]
    return "\n".join(lines) + "\n"


def parse_track_csv(data: str | bytes) -> WorldTrack:
    meta, _, arr = _read_table(data, TRACK_COLUMNS)
    return WorldTrack(_rate(meta, arr[:, 0]), arr[:, 1:4], arr[:, 4:8])


def write_track_csv(track: WorldTrack) -> str:
    body = np.column_stack([track.times, track.position, track.orientation])
    return _write_table(TRACK_COLUMNS, body, {"rate_hz": track.rate})


def read_imu_csv(data: str | bytes) -> ImuTrace:
    meta, _, arr = _read_table(data, IMU_COLUMNS)
    return ImuTrace.from_channels(_rate(meta, arr[:, 0]), arr[:, 1:])


def write_imu_csv(trace: ImuTrace) -> str:
    body = np.column_stack([trace.times, trace.data])
    return _write_table(IMU_COLUMNS, body, {"rate_hz": trace.rate})


def read_matrix_csv(data: str | bytes, prefix: str) -> np.ndarray:
    """Headerless-schema matrix with columns ``{prefix}0, {prefix}1, ...``."""
    _, _, arr = _read_table(data, None, prefix)
    return arr


def write_matrix_csv(m, prefix: str) -> str:
    m = np.asarray(m, dtype=np.float64)
    return _write_table(tuple(f"{prefix}{i}" for i in range(m.shape[1])), m)


def read_labels_csv(data: str | bytes) -> np.ndarray:
    """Single ``label`` column of integer class ids."""
    _, _, arr = _read_table(data, ("label",))
    labels = arr[:, 0]
    if not np.all(labels == np.round(labels)):
        raise ParseError("labels must be integers")
    return labels.astype(np.int64)


def read_embeddings_csv(data: str | bytes) -> np.ndarray:
    return as_embeddings(read_matrix_csv(data, "e"))


def write_embeddings_csv(e) -> str:
    return write_matrix_csv(as_embeddings(e), "e")


# ---------------------------------------------------------------------- stats


def write_stats_json(stats: ChannelStats) -> str:
    channels = {c: {"mean": float(m), "std": float(s)} for c, m, s in zip(CHANNELS, stats.mean, stats.std)}
    return json.dumps({"count": stats.count, "channels": channels}, indent=2) + "\n"


def read_stats_json(data: str | bytes) -> ChannelStats:
    try:
        doc = json.loads(_text(data), parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    channels = _field(doc, "channels", "stats")
    count = _field(doc, "count", "stats")
    if isinstance(count, bool) or not isinstance(count, int):
        raise SchemaError("stats.count: expected an integer")
    mean, std = [], []
    for c in CHANNELS:
        ch = _field(channels, c, "stats.channels")
        mean.append(_number(_field(ch, "mean", f"channels.{c}"), f"channels.{c}.mean"))
        std.append(_number(_field(ch, "std", f"channels.{c}"), f"channels.{c}.std"))
    return ChannelStats(np.array(mean), np.array(std), count)


def write_plot_data(trace: ImuTrace) -> str:
    """Whitespace-separated columns for gnuplot (``plot 'f' using 1:2``)."""
    lines = ["# " + " ".join(IMU_COLUMNS)]
    lines += [" ".join(_fmt(x) for x in row) for row in np.column_stack([trace.times, trace.data])]
    return "\n".join(lines) + "\n"
