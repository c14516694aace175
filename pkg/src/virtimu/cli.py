"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 parse error, 4 validation error, 5 I/O
error. Outputs are written to a temporary file and renamed into place, so
a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import io as vio
from .checks import run_checks
from .errors import ParseError, ValidationError
from .losses import LossConfig, contrastive_total, cross_entropy, info_nce, mse_multitask
from .rotation import quat_exp
from .signal import calibrate, compute_stats, resample_trace, stack_windows, window
from .skeleton import DEFAULT_HEIGHT, find_feet, normalize_height, rebase_sequence
from .synthesis import SensorAttachment, synthesize

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _vec3(text: str) -> np.ndarray:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z numbers, got {text!r}") from None
    if len(parts) != 3 or not all(np.isfinite(parts)):
        raise argparse.ArgumentTypeError(f"expected three finite numbers x,y,z, got {text!r}")
    return np.array(parts)


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return v


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_scalar(x: float) -> str:
    """12 significant digits, trailing zeros kept; exact zero prints as ``0``."""
    return "0" if x == 0 else f"{x:#.12g}"


# ---------------------------------------------------------------- subcommands


def cmd_simulate(args) -> int:
    sk, seq = vio.parse_motion(_read(args.motion))
    if args.normalize_height:
        sk = normalize_height(sk, args.height)
    if args.rebase:
        if args.feet:
            feet = tuple(args.feet.split(","))
            if len(feet) != 2:
                raise UsageError("--feet takes two joint names separated by a comma")
        else:
            feet = find_feet(sk)
        seq = rebase_sequence(seq, sk, feet)
    att = SensorAttachment(args.joint, quat_exp(args.mount_rot), args.mount_off)
    trace = synthesize(seq, sk, att)
    if args.rate is not None and args.rate != trace.rate:
        trace = resample_trace(trace, args.rate)
    out = vio.write_imu_csv(trace)
    plot = vio.write_plot_data(trace) if args.plot else None
    _write(args.out, out)
    if plot is not None:
        _write(args.plot, plot)
    return EXIT_OK


def cmd_resample(args) -> int:
    trace = resample_trace(vio.read_imu_csv(_read(args.input)), args.rate)
    _write(args.out, vio.write_imu_csv(trace))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    ref = vio.read_stats_json(_read(args.ref_stats))
    trace = calibrate(vio.read_imu_csv(_read(args.input)), ref)
    _write(args.out, vio.write_imu_csv(trace))
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = compute_stats(vio.read_imu_csv(_read(args.input)))
    _write(args.out, vio.write_stats_json(stats))
    return EXIT_OK


def _trace_batch(path: str, length: int | None, stride: int | None) -> np.ndarray:
    trace = vio.read_imu_csv(_read(path))
    length = length or len(trace)
    return stack_windows(window(trace, length, stride or length))


def _need(args, *names: str) -> list[str]:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"--kind {args.kind} requires {flags}")
    return [getattr(args, n) for n in names]


def cmd_loss(args) -> int:
    cfg = LossConfig(args.tau, args.symmetrize)
    if args.kind == "infonce":
        q, k = _need(args, "q", "k")
        value = info_nce(vio.read_embeddings_csv(_read(q)), vio.read_embeddings_csv(_read(k)), cfg)
    elif args.kind == "total":
        paths = _need(args, "text", "pose", "imu_left", "imu_right")
        value = contrastive_total(*(vio.read_embeddings_csv(_read(p)) for p in paths), cfg=cfg)
    elif args.kind == "mse":
        paths = _need(args, "xv", "xp", "xs")
        value = mse_multitask(*(_trace_batch(p, args.window, args.stride) for p in paths))
    else:
        logits_path, labels_path = _need(args, "logits", "labels")
        logits = vio.read_matrix_csv(_read(logits_path), "c")
        labels = vio.read_labels_csv(_read(labels_path))
        if len(labels) != len(logits):
            raise ValidationError(f"{len(logits)} logit rows but {len(labels)} labels")
        length = args.window or len(logits)
        n = len(logits) // length
        if n == 0:
            raise ValidationError(f"window length {length} exceeds {len(logits)} timesteps")
        z = logits[: n * length].reshape(n, length, -1)
        value = cross_entropy(z, labels[: n * length].reshape(n, length))
    print(format_scalar(value))
    return EXIT_OK


def cmd_check(args) -> int:
    results = run_checks()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}  (error {r.error:.3e}, tolerance {r.tolerance:.0e})")
    return EXIT_OK if all(r.passed for r in results) else 1


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="virtimu", description="Virtual IMU synthesis and loss kernels.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="synthesize an IMU trace from a motion document")
    s.add_argument("motion", help="motion document (JSON)")
    s.add_argument("out", help="output IMU CSV")
    s.add_argument("--joint", required=True, help="joint the sensor is attached to")
    s.add_argument("--mount-rot", type=_vec3, default=np.zeros(3), metavar="X,Y,Z",
                   help="sensor rotation relative to the joint, axis-angle radians")  # fmt: skip
    s.add_argument("--mount-off", type=_vec3, default=np.zeros(3), metavar="X,Y,Z",
                   help="sensor offset in the joint frame, meters")  # fmt: skip
    s.add_argument("--rate", type=_positive, help="output rate in Hz (default: motion fps)")
    s.add_argument("--height", type=_positive, default=DEFAULT_HEIGHT, help="target skeleton height, m")
    s.add_argument("--normalize-height", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--rebase", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--feet", help="two joint names whose midpoint is moved to the origin")
    s.add_argument("--plot", metavar="PATH", help="also write gnuplot-ready data here")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("resample", help="resample an IMU CSV to a new rate")
    s.add_argument("input")
    s.add_argument("out")
    s.add_argument("--rate", type=_positive, required=True)
    s.set_defaults(func=cmd_resample)

    s = sub.add_parser("calibrate", help="match per-channel mean/std to reference stats")
    s.add_argument("input")
    s.add_argument("out")
    s.add_argument("--ref-stats", required=True)
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("stats", help="per-channel mean/std of an IMU CSV")
    s.add_argument("input")
    s.add_argument("out")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("loss", help="evaluate a loss kernel on CSV inputs and print the scalar")
    s.add_argument("--kind", choices=("infonce", "total", "mse", "xent"), required=True)
    s.add_argument("--tau", type=_positive, default=LossConfig().temperature)
    s.add_argument("--symmetrize", action="store_true", help="average both InfoNCE directions")
    for flag in ("--q", "--k", "--text", "--pose", "--imu-left", "--imu-right", "--xv", "--xp", "--xs",
                 "--logits", "--labels"):  # fmt: skip
        s.add_argument(flag, metavar="CSV")
    s.add_argument("--window", type=_count, help="window length in samples (default: whole input)")
    s.add_argument("--stride", type=_count, help="window stride for mse (default: window length)")
    s.set_defaults(func=cmd_loss)

    s = sub.add_parser("check", help="run the built-in analytic oracle checks")
    s.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"virtimu: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"virtimu: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"virtimu: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"virtimu: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
