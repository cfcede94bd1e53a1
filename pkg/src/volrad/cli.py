"""Command-line entry point: ``volrad <command> [options]``.

Every command writes plain CSV files into ``--out`` (default: the current
directory). Exit status is 0 on success, 2 for bad input or usage, 1 for
anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._io import atomic_write_text, config_comment
from .classify import comparison_csv, comparison_table, compare_methods, leave_one_out
from .config import METHODS, RunConfig
from .features import image_curve, image_dimension
from .imgio import DatasetError, PgmError, ingest_dataset, load_pgm
from .signature import make_signature, write_signatures
from .synth import benchmark_classes, export_dataset, make_synth_dataset
from .vrfd import log_log, write_curve

log = logging.getLogger("volrad")


class InputError(Exception):
    """Bad user input; reported without a traceback and exit status 2."""


def _tile(text: str):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tile must look like WxH, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline")
    g.add_argument("--config", metavar="FILE", help="JSON file with RunConfig fields")
    g.add_argument("--r-max", type=int, dest="r_max", help="largest sphere radius (default 20)")
    g.add_argument("--fraction", type=float, dest="center_fraction", help="share of pixels used as centers (default 0.10)")
    g.add_argument("--n-centers", type=int, dest="n_centers", help="absolute number of centers; overrides --fraction")
    g.add_argument("--m", type=int, help="points per signature segment (default 10)")
    g.add_argument("--seed", type=int, help="center sampling seed (default 0)")
    g.add_argument("--method", choices=METHODS + ("all",), help="feature method (default vrfd)")
    g.add_argument("--tile", type=_tile, help="cut dataset images into WxH tiles")
    g.add_argument("--out", metavar="DIR", help="output directory (default .)")
    g.add_argument("--z-scale", type=int, dest="z_scale", help="integer gray-level multiplier (default 1)")
    g.add_argument("--workers", type=int, help="threads for counting and LOO folds (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="volrad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signature", help="slope signatures of PGM images")
    p.add_argument("images", nargs="+")
    p.add_argument("--curves", action="store_true", help="also write each volume curve CSV")
    _common(p)

    p = sub.add_parser("dimension", help="fractal dimension over repeated seeds")
    p.add_argument("image")
    p.add_argument("--repeats", type=int, default=1)
    _common(p)

    p = sub.add_parser("stability", help="dimension mean/std against center fraction")
    p.add_argument("image")
    p.add_argument("--fractions", type=_float_list, default=[0.01, 0.05, 0.10, 0.20])
    p.add_argument("--repeats", type=int, default=30)
    _common(p)

    p = sub.add_parser("classify", help="leave-one-out LDA accuracy on a dataset directory")
    p.add_argument("root")
    _common(p)

    p = sub.add_parser("sweep-m", help="leave-one-out accuracy against segment length")
    p.add_argument("root")
    p.add_argument("--m-list", type=_int_list, dest="m_list", default=[5, 10, 15, 20])
    _common(p)

    p = sub.add_parser("synth", help="write the synthetic benchmark dataset as PGM files")
    p.add_argument("root")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--base-seed", type=int, default=0, dest="base_seed")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the JSON config file, which overrides built-in defaults."""
    base = RunConfig.from_json(args.config) if getattr(args, "config", None) else RunConfig()
    names = ("r_max", "center_fraction", "n_centers", "m", "seed", "method", "tile", "out", "z_scale", "workers")
    changes = {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}
    if "center_fraction" in changes and "n_centers" not in changes:
        changes["n_centers"] = None
    return replace(base, **changes)


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(path: str):
    try:
        return load_pgm(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except (OSError, PgmError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_signature(args, config: RunConfig) -> int:
    out = _out_dir(config)
    rows = []
    for path in args.images:
        img = _load(path)
        curve = image_curve(img, config)
        rows.append((path, None, make_signature(log_log(curve), config.m)))
        if args.curves:
            write_curve(curve, out / "curves" / f"{Path(path).stem}.csv", config.provenance())
    write_signatures(out / "signatures.csv", rows, config.provenance())
    for path, _, sig in rows:
        print(f"{path}: k={sig.k}")
    return 0


def _dimensions(img, config: RunConfig, repeats: int) -> list[float]:
    if repeats < 1:
        raise InputError(f"--repeats must be >= 1, got {repeats}")
    return [image_dimension(img, config, seed=config.seed + i) for i in range(repeats)]


def cmd_dimension(args, config: RunConfig) -> int:
    img = _load(args.image)
    ds = _dimensions(img, config, args.repeats)
    lines = [config_comment(config.provenance()), "repeat,seed,D"]
    lines += [f"{i},{config.seed + i},{d!r}" for i, d in enumerate(ds)]
    atomic_write_text(_out_dir(config) / "dimension.csv", "\n".join(lines) + "\n")
    print(f"D mean={np.mean(ds):.6f} std={np.std(ds):.6f} repeats={len(ds)}")
    return 0


def cmd_stability(args, config: RunConfig) -> int:
    img = _load(args.image)
    if not args.fractions or any(not 0 < f <= 1 for f in args.fractions):
        raise InputError("--fractions must lie in (0, 1]")
    lines = [config_comment({**config.provenance(), "repeats": args.repeats}), "fraction,n_centers,mean_D,std_D"]
    for f in args.fractions:
        cfg = replace(config, center_fraction=f, n_centers=None)
        ds = _dimensions(img, cfg, args.repeats)
        n = cfg.plan().resolve(img.size)
        lines.append(f"{f!r},{n},{float(np.mean(ds))!r},{float(np.std(ds))!r}")
        print(f"fraction={f:g} N={n} mean={np.mean(ds):.6f} std={np.std(ds):.6f}")
    atomic_write_text(_out_dir(config) / "stability.csv", "\n".join(lines) + "\n")
    return 0


def _dataset(root: str, config: RunConfig):
    try:
        ds = ingest_dataset(root, config.tile)
        ds.check_loo()
    except DatasetError as exc:
        raise InputError(str(exc)) from None
    return ds


def cmd_classify(args, config: RunConfig) -> int:
    ds = _dataset(args.root, config)
    methods = ("glcm", "fourier", "gabor", "vrfd") if config.method == "all" else (config.method,)
    out = _out_dir(config)
    results, confusions = compare_methods(ds, config, methods)
    for method, cm in confusions.items():
        cm.write(out / f"confusion_{method}.csv", ds.class_names, config.provenance())
    atomic_write_text(out / "comparison.csv", comparison_csv(results, config.provenance()))
    print(comparison_table(results), end="")
    return 0


def cmd_sweep_m(args, config: RunConfig) -> int:
    if not args.m_list or any(m < 2 for m in args.m_list):
        raise InputError("--m-list values must all be >= 2")
    ds = _dataset(args.root, config)
    # one curve per image, re-segmented for every m
    curves = [log_log(image_curve(s.image, config)) for s in ds.samples]
    y = ds.labels
    lines = [config_comment(config.provenance()), "m,k,correct,total,accuracy"]
    for m in args.m_list:
        if m > len(curves[0]):
            raise InputError(f"m={m} exceeds the curve length {len(curves[0])}")
        x = np.vstack([make_signature(c, m).alphas for c in curves])
        cm = leave_one_out(x, y, workers=config.workers)
        acc = 100.0 * cm.accuracy
        lines.append(f"{m},{x.shape[1]},{cm.correct},{cm.total},{acc:.2f}")
        print(f"m={m} k={x.shape[1]} accuracy={acc:.2f}%")
    atomic_write_text(_out_dir(config) / "sweep_m.csv", "\n".join(lines) + "\n")
    return 0


def cmd_synth(args) -> int:
    ds = make_synth_dataset(benchmark_classes(args.size), args.samples, args.base_seed)
    export_dataset(ds, args.root)
    print(f"wrote {len(ds)} images in {len(ds.class_names)} classes to {args.root}")
    return 0


_COMMANDS = {
    "signature": cmd_signature,
    "dimension": cmd_dimension,
    "stability": cmd_stability,
    "classify": cmd_classify,
    "sweep-m": cmd_sweep_m,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        try:
            config = resolve_config(args)
        except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
            raise InputError(f"bad configuration: {exc}") from None
        if args.command == "signature" and config.method != "vrfd":
            raise InputError("the signature command only supports --method vrfd")
        return _COMMANDS[args.command](args, config)
    except (InputError, ValueError) as exc:
        print(f"volrad: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"volrad: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
