"""Batch front door: estimate / evaluate / extract-roi / synth subcommands.

All outputs are deterministic: tables are sorted by image_id regardless of
input order or worker count, and every run writes a manifest recording the
effective configuration.
"""

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import PipelineConfig, load_config
from .errors import (
    JoinError,
    NoInstanceError,
    NoLeafLinesError,
    PipelineError,
)
from .estimation import AngleEstimate, estimate_angle
from .evaluation import compare, read_measurements, write_measurements
from .records import DetectionRecord, load_batch, record_to_json
from .roi import crop_roi, select_primary_instance
from .synth import FixtureSpec, generate_fixture

EXIT_OK = 0
EXIT_IO = 1
EXIT_EMPTY = 2

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


@dataclass
class RunManifest:
    """What a run saw and did; written alongside every command's outputs."""

    command: str
    version: str
    config: dict
    inputs: list[str]
    processed: int = 0
    rejected: int = 0
    duration_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        payload = {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "inputs": self.inputs,
            "counts": {"processed": self.processed, "rejected": self.rejected},
            "duration_s": self.duration_s,
            **self.extra,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _format_angle_row(est: AngleEstimate) -> str:
    flags = ";".join(sorted(est.flags))
    return (
        f"{est.image_id},{est.angle_deg:.2f},{est.segments_total},"
        f"{est.segments_retained},{est.segments_in_mode},{est.selection},{flags}"
    )


def write_angles_table(path: Path, estimates: list[AngleEstimate]) -> None:
    header = (
        "image_id,angle_deg,segments_total,segments_retained,"
        "segments_in_mode,selection,flags"
    )
    rows = [_format_angle_row(e) for e in sorted(estimates, key=lambda e: e.image_id)]
    path.write_text("\n".join([header, *rows]) + "\n")


def write_rejects_table(path: Path, rejects: list[tuple[str, str]]) -> None:
    rows = [f"{image_id},{kind}" for image_id, kind in sorted(rejects)]
    path.write_text("\n".join(["image_id,error", *rows]) + "\n")


def run_estimate(
    batch_path: str | Path,
    config: PipelineConfig,
    out_dir: str | Path,
    workers: int = 1,
) -> int:
    """Estimate angles for every record in a batch.

    Writes angles.csv (one row per success, sorted by image_id), rejects.csv
    (image_id plus error kind for NoLeafLines / NoInstance), and
    manifest.json. Returns the process exit code.
    """
    started = time.monotonic()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = load_batch(batch_path)

    def process(record: DetectionRecord) -> tuple[AngleEstimate | None, tuple[str, str] | None]:
        try:
            return estimate_angle(record, None, config), None
        except NoLeafLinesError:
            return None, (record.image_id, "NoLeafLines")
        except NoInstanceError:
            return None, (record.image_id, "NoInstance")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, records))
    else:
        results = [process(r) for r in records]

    estimates = [est for est, _ in results if est is not None]
    rejects = [rej for _, rej in results if rej is not None]

    write_angles_table(out_dir / "angles.csv", estimates)
    write_rejects_table(out_dir / "rejects.csv", rejects)
    manifest = RunManifest(
        command="estimate",
        version=__version__,
        config=config.to_dict(),
        inputs=[str(batch_path)],
        processed=len(estimates),
        rejected=len(rejects),
        duration_s=time.monotonic() - started,
        extra={"workers": workers},
    )
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK if estimates else EXIT_EMPTY


def run_evaluate(
    angles_path: str | Path,
    manual_paths: list[str | Path],
    config: PipelineConfig,
    out_dir: str | Path,
) -> int:
    """Compare the algorithm's angles table against 1..2 manual tables.

    Emits report.json with one report per manual set plus, when two manual
    sets are given, the inter-rater report, and prints a summary.
    """
    started = time.monotonic()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algorithm = read_measurements(angles_path, label="algorithm")
    manuals = [read_measurements(p) for p in manual_paths]

    reports = [compare(algorithm, manual, config) for manual in manuals]
    if len(manuals) == 2:
        reports.append(compare(manuals[0], manuals[1], config))

    warnings = {
        ms.label: ms.over_90_ids()
        for ms in [algorithm, *manuals]
        if ms.over_90_ids()
    }
    payload = {
        "config": config.to_dict(),
        "reports": [r.to_dict() for r in reports],
        "angles_over_90": warnings,
    }
    (out_dir / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    for report in reports:
        print(
            f"{report.pair_label}: n={report.n_common} "
            f"similarity={report.cosine_similarity:.4f} "
            f"implied_angle={report.implied_angle_deg:.2f} deg "
            f"outliers={len(report.outliers)} "
            f"mean_signed={report.mean_signed_diff_deg:.2f} "
            f"mean_abs={report.mean_abs_diff_deg:.2f}"
        )
    for label, ids in warnings.items():
        print(f"warning: {label} has {len(ids)} angles above 90 degrees", file=sys.stderr)

    manifest = RunManifest(
        command="evaluate",
        version=__version__,
        config=config.to_dict(),
        inputs=[str(angles_path), *map(str, manual_paths)],
        processed=len(reports),
        duration_s=time.monotonic() - started,
    )
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


def _find_image(images_dir: Path, image_id: str) -> Path | None:
    for suffix in _IMAGE_SUFFIXES:
        candidate = images_dir / f"{image_id}{suffix}"
        if candidate.exists():
            return candidate
    return None


def run_extract_roi(
    batch_path: str | Path,
    images_dir: str | Path,
    config: PipelineConfig,
    out_dir: str | Path,
) -> int:
    """Extract the masked ROI crop for every record with a matching image.

    For each image writes <image_id>.roi.png plus <image_id>.roi.json with
    the crop offset and sharpness score.
    """
    import numpy as np
    from PIL import Image

    started = time.monotonic()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images_dir = Path(images_dir)
    records = load_batch(batch_path)

    processed = 0
    rejects: list[tuple[str, str]] = []
    for record in records:
        image_path = _find_image(images_dir, record.image_id)
        if image_path is None:
            rejects.append((record.image_id, "MissingImage"))
            continue
        try:
            pixels = np.asarray(Image.open(image_path).convert("RGB"))
            if pixels.shape[:2] != (record.height, record.width):
                rejects.append((record.image_id, "DimensionMismatch"))
                continue
            mask = select_primary_instance(
                record.instances, record.width, record.height, config, record.image_id
            )
            roi = crop_roi(pixels, mask, config)
        except NoInstanceError:
            rejects.append((record.image_id, "NoInstance"))
            continue
        Image.fromarray(roi.pixels.astype(np.uint8)).save(out_dir / f"{record.image_id}.roi.png")
        sidecar = {
            "image_id": record.image_id,
            "offset": list(roi.offset),
            "sharpness": roi.sharpness,
            "low_sharpness": roi.sharpness < config.sharpness_warn_threshold,
        }
        (out_dir / f"{record.image_id}.roi.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
        )
        processed += 1

    write_rejects_table(out_dir / "rejects.csv", rejects)
    manifest = RunManifest(
        command="extract-roi",
        version=__version__,
        config=config.to_dict(),
        inputs=[str(batch_path), str(images_dir)],
        processed=processed,
        rejected=len(rejects),
        duration_s=time.monotonic() - started,
    )
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK if processed else EXIT_EMPTY


def run_synth(
    out_dir: str | Path,
    count: int,
    seed: int,
    config: PipelineConfig,
    n_leaf: int = 3,
    n_stem: int = 3,
    n_distractors: int = 2,
    jitter_deg: float = 0.3,
    image_size: tuple[int, int] = (1000, 1000),
    true_angle_deg: float | None = None,
) -> int:
    """Write `count` synthetic records plus a ground_truth.csv table.

    True angles default to uniform draws in [10, 80); pass true_angle_deg
    to pin every fixture to one angle.
    """
    started = time.monotonic()
    out_dir = Path(out_dir)
    records_dir = out_dir / "records"
    records_dir.mkdir(parents=True, exist_ok=True)
    angle_rng = random.Random(seed)

    truths: list[tuple[str, float]] = []
    for i in range(count):
        angle = (
            true_angle_deg if true_angle_deg is not None
            else angle_rng.uniform(10.0, 80.0)
        )
        spec = FixtureSpec(
            true_angle_deg=angle,
            n_leaf_segments=n_leaf,
            n_stem_segments=n_stem,
            n_distractors=n_distractors,
            jitter_deg=jitter_deg,
            image_size=image_size,
            seed=seed * 1_000_000 + i,
        )
        record, truth = generate_fixture(spec, config)
        (records_dir / f"{record.image_id}.json").write_text(record_to_json(record) + "\n")
        truths.append((record.image_id, truth))

    write_measurements(out_dir / "ground_truth.csv", sorted(truths))
    manifest = RunManifest(
        command="synth",
        version=__version__,
        config=config.to_dict(),
        inputs=[],
        processed=count,
        duration_s=time.monotonic() - started,
        extra={"seed": seed, "count": count},
    )
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


_CONFIG_FLAGS = {
    "slope_band_low_deg": float,
    "slope_band_high_deg": float,
    "boundary_min_px": int,
    "orientation_bin_deg": float,
    "outlier_threshold_deg": float,
    "min_instance_score": float,
    "sharpness_warn_threshold": float,
    "roi_padding_px": int,
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="TOML file of threshold keys")
    for key, kind in _CONFIG_FLAGS.items():
        parser.add_argument(
            f"--{key.replace('_', '-')}",
            type=kind,
            default=None,
            dest=key,
            help=f"override the {key} threshold",
        )


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        key: getattr(args, key)
        for key in _CONFIG_FLAGS
        if getattr(args, key, None) is not None
    }
    return load_config(args.config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafangle",
        description="Estimate leaf-stem angles from detection records",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate angles for a record batch")
    p_est.add_argument("batch", help="record directory, or one JSON document")
    p_est.add_argument("-o", "--out", required=True, help="output directory")
    p_est.add_argument("--workers", type=int, default=1, help="parallel workers")
    _add_config_flags(p_est)

    p_eval = sub.add_parser("evaluate", help="compare angles against manual tables")
    p_eval.add_argument("angles", help="angles table from the estimate command")
    p_eval.add_argument("manual", nargs="+", help="1..2 manual measurement tables")
    p_eval.add_argument("-o", "--out", required=True, help="output directory")
    _add_config_flags(p_eval)

    p_roi = sub.add_parser("extract-roi", help="write masked ROI crops as PNG")
    p_roi.add_argument("batch", help="record directory, or one JSON document")
    p_roi.add_argument("images", help="directory of source images named by image_id")
    p_roi.add_argument("-o", "--out", required=True, help="output directory")
    _add_config_flags(p_roi)

    p_synth = sub.add_parser("synth", help="generate synthetic record fixtures")
    p_synth.add_argument("-o", "--out", required=True, help="output directory")
    p_synth.add_argument("--count", type=int, default=10)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--leaf-segments", type=int, default=3)
    p_synth.add_argument("--stem-segments", type=int, default=3)
    p_synth.add_argument("--distractors", type=int, default=2)
    p_synth.add_argument("--jitter-deg", type=float, default=0.3)
    p_synth.add_argument("--width", type=int, default=1000)
    p_synth.add_argument("--height", type=int, default=1000)
    p_synth.add_argument("--true-angle-deg", type=float, default=None)
    _add_config_flags(p_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "estimate":
            return run_estimate(args.batch, config, args.out, workers=args.workers)
        if args.command == "evaluate":
            if len(args.manual) > 2:
                print("evaluate takes at most two manual tables", file=sys.stderr)
                return EXIT_IO
            return run_evaluate(args.angles, args.manual, config, args.out)
        if args.command == "extract-roi":
            return run_extract_roi(args.batch, args.images, config, args.out)
        if args.command == "synth":
            return run_synth(
                args.out,
                count=args.count,
                seed=args.seed,
                config=config,
                n_leaf=args.leaf_segments,
                n_stem=args.stem_segments,
                n_distractors=args.distractors,
                jitter_deg=args.jitter_deg,
                image_size=(args.width, args.height),
                true_angle_deg=args.true_angle_deg,
            )
        raise AssertionError(f"unhandled command {args.command}")
    except JoinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (OSError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
