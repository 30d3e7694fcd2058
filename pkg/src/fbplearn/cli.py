"""Command-line front end.

One pipeline step per subcommand; intermediate artifacts are always files,
so full experiments are short shell scripts (see scripts/). Exit codes:
0 success, 1 usage error, 2 validation/invariant failure, 3 numerical
divergence.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import io as fio
from ._backend import set_num_threads
from .core import GridSpec, ScanGeometry, default_geometry
from .learner import (
    FILTER_KINDS,
    DivergenceError,
    TrainConfig,
    grad_check,
    prepare_samples,
    train,
)
from .metrics import abs_diff_stats, line_profile
from .phantom import make_disc, make_held_out, make_training_set
from .projector import forward_project
from .spectral import reconstruct

USAGE_ERROR = 1
VALIDATION_ERROR = 2
DIVERGENCE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for validation.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _usage_fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"window must be 'lo,hi', got {text!r}")
    return float(parts[0]), float(parts[1])


def _geometry_for(
    grid: GridSpec, angles: int, bins: int | None, spacing: float | None
) -> ScanGeometry:
    geom = default_geometry(grid, num_angles=angles)
    if bins is not None or spacing is not None:
        geom = ScanGeometry(
            num_angles=angles,
            num_bins=bins if bins is not None else geom.num_bins,
            bin_spacing=spacing if spacing is not None else geom.bin_spacing,
        )
    return geom


def _cmd_phantom(args: argparse.Namespace) -> int:
    if args.dataset is not None and args.out_dir is None:
        return _usage_fail("--dataset requires --out-dir")
    if args.dataset is None and args.out is None:
        return _usage_fail("--radius/--held-out require --out")
    grid = GridSpec(args.size, args.spacing)
    if args.dataset is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, img in enumerate(make_training_set(grid, args.dataset), start=1):
            fio.save_image(img, out_dir / f"disc_{i:02d}.raw")
        print(f"wrote {args.dataset} disc phantoms to {out_dir}")
    elif args.held_out:
        fio.save_image(make_held_out(grid), args.out)
        print(f"wrote held-out phantom to {args.out}")
    else:
        fio.save_image(make_disc(grid, args.radius, args.value), args.out)
        print(f"wrote disc phantom to {args.out}")
    return 0


def _cmd_project(args: argparse.Namespace) -> int:
    img = fio.load_image(args.image)
    geom = _geometry_for(img.grid, args.angles, args.bins, args.spacing)
    fio.save_sinogram(forward_project(img, geom), args.out)
    print(
        f"projected {args.image}: {geom.num_angles} angles x "
        f"{geom.num_bins} bins -> {args.out}"
    )
    return 0


def _cmd_make_filter(args: argparse.Namespace) -> int:
    geom = _geometry_for(GridSpec(args.size), 1, args.bins, args.spacing)
    fio.save_filter(FILTER_KINDS[args.kind](geom), args.out)
    print(f"wrote {args.kind} filter ({geom.pad_length} bins) to {args.out}")
    return 0


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    if args.viewable is not None and args.window is None:
        return _usage_fail("--viewable requires --window lo,hi")
    window = _parse_window(args.window) if args.window is not None else None
    sino = fio.load_sinogram(args.sinogram)
    filt = fio.load_filter(args.filter)
    size = args.size
    if size is None:
        # Largest grid the detector diagonal covers; inverts default_geometry.
        size = int(sino.geom.num_bins / math.sqrt(2.0))
    spacing = args.pixel_spacing
    if spacing is None:
        spacing = sino.geom.bin_spacing
    grid = GridSpec(size, spacing)
    img = reconstruct(sino, filt, grid)
    fio.save_image(img, args.out)
    print(f"reconstructed {size}x{size} image -> {args.out}")
    if args.viewable is not None:
        fio.export_viewable(img, args.viewable, window)
        print(f"wrote viewable graymap -> {args.viewable}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    paths = sorted(Path(args.dataset_dir).glob("*.raw"))
    if not paths:
        return _usage_fail(f"no .raw images found in {args.dataset_dir}")
    images = [fio.load_image(p) for p in paths]
    grid = images[0].grid
    for p, img in zip(paths, images):
        if img.grid != grid:
            raise ValueError(f"{p}: grid differs from the rest of the dataset")
    geom = _geometry_for(grid, args.angles, args.bins, args.spacing)
    config = TrainConfig(
        grid=grid,
        geom=geom,
        epochs=args.epochs,
        learning_rate="auto" if args.lr == "auto" else float(args.lr),
        shuffle_seed=args.seed,
        init=args.init,
    )
    history = train(config, prepare_samples(images, geom))
    fio.save_filter(history.final, args.out_filter)
    fio.save_history(history, args.history)
    if args.snapshots_dir is not None:
        snap_dir = Path(args.snapshots_dir)
        snap_dir.mkdir(parents=True, exist_ok=True)
        for epoch, snap in enumerate(history.snapshots, start=1):
            fio.save_filter(snap, snap_dir / f"filter_epoch_{epoch:03d}.csv")
    print(
        f"trained {args.epochs} epochs on {len(images)} images: objective "
        f"{history.objectives[0]:.6g} -> {history.objectives[-1]:.6g}"
    )
    print(f"wrote filter -> {args.out_filter}, history -> {args.history}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    recon = fio.load_image(args.recon)
    gt = fio.load_image(args.gt)
    stats = abs_diff_stats(recon, gt)
    with open(args.out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mean", "std. dev.", "min", "max"])
        writer.writerow(
            ["%.6g" % v for v in (stats.mean, stats.std_dev, stats.min, stats.max)]
        )
    print(
        f"abs diff: mean {stats.mean:.6g}, std {stats.std_dev:.6g}, "
        f"min {stats.min:.6g}, max {stats.max:.6g} -> {args.out_csv}"
    )
    return 0


def _cmd_profile(args: argparse.Namespace) -> int:
    img = fio.load_image(args.image)
    row = None if args.row == "center" else int(args.row)
    prof = line_profile(img, row)
    with open(args.out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for x, v in prof:
            writer.writerow(["%.17g" % x, "%.17g" % v])
    print(f"wrote {prof.shape[0]}-sample line profile -> {args.out_csv}")
    return 0


def _cmd_filter_spectrum(args: argparse.Namespace) -> int:
    filt = fio.load_filter(args.filter)
    other = fio.load_filter(args.compare) if args.compare is not None else None
    if other is not None and (
        other.pad_length != filt.pad_length
        or other.bin_spacing != filt.bin_spacing
    ):
        raise ValueError("--compare filter has mismatched pad_length or spacing")
    n = filt.pad_length
    freqs = np.minimum(np.arange(n), n - np.arange(n)) / (n * filt.bin_spacing)
    with open(args.out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        if other is None:
            writer.writerow(["k", "frequency", "coefficient"])
            for k in range(n):
                writer.writerow([k, "%.17g" % freqs[k], "%.17g" % filt.coeffs[k]])
        else:
            writer.writerow(
                ["k", "frequency", "coefficient", "compare", "abs_diff"]
            )
            for k in range(n):
                writer.writerow(
                    [
                        k,
                        "%.17g" % freqs[k],
                        "%.17g" % filt.coeffs[k],
                        "%.17g" % other.coeffs[k],
                        "%.17g" % abs(filt.coeffs[k] - other.coeffs[k]),
                    ]
                )
    print(f"wrote filter spectrum -> {args.out_csv}")
    return 0


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    grid = GridSpec(args.size)
    geom = default_geometry(grid, num_angles=args.angles)
    report = grad_check(
        grid, geom, tolerance=args.tol, num_bins=args.bins, seed=args.seed
    )
    status = "PASS" if report.passed else "FAIL"
    print(
        f"gradcheck {status}: max relative error {report.max_rel_error:.3e} "
        f"over {len(report.bins)} bins (tolerance {report.tolerance:g})"
    )
    return 0 if report.passed else VALIDATION_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fbplearn",
        description="Parallel-beam FBP with a trainable reconstruction filter.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="thread cap for the compiled projector kernels (default 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate disc or held-out phantoms")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--spacing", type=float, default=1.0)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--radius", type=float, help="single disc of this radius")
    mode.add_argument("--dataset", type=int, help="write COUNT training discs")
    mode.add_argument(
        "--held-out", action="store_true", help="write the multi-ellipse phantom"
    )
    p.add_argument("--value", type=float, default=1.0, help="disc intensity")
    p.add_argument("--out", help="output image path (single phantom)")
    p.add_argument("--out-dir", help="output directory (--dataset)")
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("project", help="ray-driven forward projection")
    p.add_argument("--image", required=True)
    p.add_argument("--angles", type=int, default=360)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--spacing", type=float, default=None, help="detector bin spacing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("make-filter", help="write an analytic filter CSV")
    p.add_argument("--kind", choices=sorted(FILTER_KINDS), required=True)
    p.add_argument("--size", type=int, required=True, help="target grid size")
    p.add_argument("--bins", type=int, default=None, help="detector bin count")
    p.add_argument("--spacing", type=float, default=None, help="detector bin spacing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_make_filter)

    p = sub.add_parser("reconstruct", help="filtered back-projection")
    p.add_argument("--sinogram", required=True)
    p.add_argument("--filter", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, default=None, help="grid size override")
    p.add_argument(
        "--pixel-spacing",
        type=float,
        default=None,
        help="grid pixel spacing (defaults to the detector bin spacing)",
    )
    p.add_argument("--viewable", help="also write an 8-bit graymap here")
    p.add_argument("--window", help="lo,hi intensity window for --viewable")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("train", help="learn the filter from a phantom directory")
    p.add_argument("--dataset-dir", required=True)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", default="auto", help="learning rate or 'auto'")
    p.add_argument("--init", choices=sorted(FILTER_KINDS), default="modified-ramp")
    p.add_argument("--angles", type=int, default=360)
    p.add_argument("--bins", type=int, default=None, help="detector bin count")
    p.add_argument("--spacing", type=float, default=None, help="detector bin spacing")
    p.add_argument("--seed", type=int, default=0, help="shuffle seed")
    p.add_argument("--out-filter", required=True)
    p.add_argument("--history", required=True, help="per-epoch objective CSV")
    p.add_argument("--snapshots-dir", help="write per-epoch filter CSVs here")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="absolute-difference statistics CSV")
    p.add_argument("--recon", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("profile", help="line profile CSV through an image row")
    p.add_argument("--image", required=True)
    p.add_argument("--row", default="center", help="row index or 'center'")
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("filter-spectrum", help="export filter spectrum CSV")
    p.add_argument("--filter", required=True)
    p.add_argument("--compare", help="second filter for a difference column")
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=_cmd_filter_spectrum)

    p = sub.add_parser("gradcheck", help="matched-mode gradient verification")
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--angles", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--bins", type=int, default=24, help="random bins to probe")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        set_num_threads(args.threads)
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DIVERGENCE_ERROR
    except (ValueError, IndexError, FileNotFoundError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR


if __name__ == "__main__":
    sys.exit(main())
