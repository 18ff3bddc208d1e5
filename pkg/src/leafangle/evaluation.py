"""Comparison of algorithm angles against manual measurements.

Implements the dataset-level protocol: cosine similarity between aligned
angle vectors, the implied angle between the vectors, the strict
eight-degree outlier rule, and signed/absolute difference statistics.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .config import PipelineConfig
from .errors import JoinError, MetricError, SchemaError, ShapeError


@dataclass(frozen=True)
class MeasurementSet:
    """Angles per image from one source (the algorithm or one human rater)."""

    label: str
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen = set()
        for image_id, angle in self.entries:
            if image_id in seen:
                raise SchemaError(
                    f"duplicate image_id {image_id!r} in measurement set {self.label!r}",
                    field="image_id",
                )
            seen.add(image_id)
            if not 0.0 <= angle <= 180.0:
                raise SchemaError(
                    f"angle {angle} for image {image_id!r} in {self.label!r} "
                    "is outside [0, 180]",
                    field="angle_deg",
                )

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    def over_90_ids(self) -> list[str]:
        """Ids with angles above 90 degrees; accepted but worth flagging."""
        return [image_id for image_id, angle in self.entries if angle > 90.0]


@dataclass(frozen=True)
class Outlier:
    image_id: str
    alg_deg: float
    manual_deg: float
    abs_diff_deg: float


@dataclass(frozen=True)
class EvaluationReport:
    """Dataset-level comparison between two measurement sets."""

    pair_label: str
    n_common: int
    cosine_similarity: float
    implied_angle_deg: float
    outliers: tuple[Outlier, ...]
    mean_signed_diff_deg: float
    mean_abs_diff_deg: float
    non_outlier_mean_abs_diff_deg: float | None

    def to_dict(self) -> dict:
        return {
            "pair_label": self.pair_label,
            "n_common": self.n_common,
            "cosine_similarity": self.cosine_similarity,
            "implied_angle_deg": self.implied_angle_deg,
            "outliers": [
                {
                    "image_id": o.image_id,
                    "alg_deg": o.alg_deg,
                    "manual_deg": o.manual_deg,
                    "abs_diff_deg": o.abs_diff_deg,
                }
                for o in self.outliers
            ],
            "mean_signed_diff_deg": self.mean_signed_diff_deg,
            "mean_abs_diff_deg": self.mean_abs_diff_deg,
            "non_outlier_mean_abs_diff_deg": self.non_outlier_mean_abs_diff_deg,
        }


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """dot(a, b) / (|a| |b|); in [0, 1] for the nonnegative angle vectors.

    The metric is scale-invariant by construction, so a uniform
    multiplicative bias between two raters is invisible to it; the
    difference statistics in the report exist to catch exactly that.
    """
    if len(a) != len(b):
        raise ShapeError(f"vector lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ShapeError("cosine similarity needs at least one entry")
    peak_a = max(abs(x) for x in a)
    peak_b = max(abs(y) for y in b)
    if peak_a == 0.0 or peak_b == 0.0:
        raise MetricError("cosine similarity is undefined for a zero vector")
    # Scale by the peaks first; the result is unchanged (scale invariance)
    # and the squared norms cannot underflow or overflow.
    sa = [x / peak_a for x in a]
    sb = [y / peak_b for y in b]
    norm_a = math.sqrt(sum(x * x for x in sa))
    norm_b = math.sqrt(sum(y * y for y in sb))
    return sum(x * y for x, y in zip(sa, sb)) / (norm_a * norm_b)


def implied_angle_deg(similarity: float) -> float:
    """Angle between the two measurement vectors: arccos of the similarity.

    The input is clamped into [-1, 1] so rounding overshoot cannot make
    arccos blow up.
    """
    return math.degrees(math.acos(min(max(similarity, -1.0), 1.0)))


def compare(
    alg: MeasurementSet, manual: MeasurementSet, config: PipelineConfig
) -> EvaluationReport:
    """Compare two measurement sets over their common image ids.

    The join is by image_id, never by position; batches legitimately drop
    images, and a positional join would silently misalign. Differences are
    alg minus manual, so the signed mean flips sign if the arguments swap.
    """
    alg_by_id = alg.as_dict()
    manual_by_id = manual.as_dict()
    common = sorted(set(alg_by_id) & set(manual_by_id))
    if not common:
        raise JoinError(
            f"no common image ids between {alg.label!r} ({len(alg_by_id)} entries) "
            f"and {manual.label!r} ({len(manual_by_id)} entries)",
            n_left=len(alg_by_id),
            n_right=len(manual_by_id),
        )

    alg_vec = [alg_by_id[i] for i in common]
    manual_vec = [manual_by_id[i] for i in common]
    similarity = cosine_similarity(alg_vec, manual_vec)

    diffs = [a - m for a, m in zip(alg_vec, manual_vec)]
    outliers = tuple(
        Outlier(image_id=i, alg_deg=a, manual_deg=m, abs_diff_deg=abs(a - m))
        for i, a, m in zip(common, alg_vec, manual_vec)
        if abs(a - m) > config.outlier_threshold_deg
    )
    non_outlier_abs = [
        abs(d) for d in diffs if abs(d) <= config.outlier_threshold_deg
    ]
    return EvaluationReport(
        pair_label=f"{alg.label}_vs_{manual.label}",
        n_common=len(common),
        cosine_similarity=similarity,
        implied_angle_deg=implied_angle_deg(similarity),
        outliers=outliers,
        mean_signed_diff_deg=sum(diffs) / len(diffs),
        mean_abs_diff_deg=sum(abs(d) for d in diffs) / len(diffs),
        non_outlier_mean_abs_diff_deg=(
            sum(non_outlier_abs) / len(non_outlier_abs) if non_outlier_abs else None
        ),
    )


def read_measurements(path: str | Path, label: str | None = None) -> MeasurementSet:
    """Read a measurement table: CSV with a mandatory image_id,angle_deg header.

    Extra columns (as written by the estimate command) are ignored.
    """
    path = Path(path)
    entries: list[tuple[str, float]] = []
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in ("image_id", "angle_deg"):
            if column not in header:
                raise SchemaError(
                    f"measurement table {path} is missing column {column!r}",
                    field=column,
                )
        for row_number, row in enumerate(reader, start=2):
            image_id = (row["image_id"] or "").strip()
            if not image_id:
                raise SchemaError(f"{path}:{row_number}: empty image_id", field="image_id")
            try:
                angle = float(row["angle_deg"])
            except (TypeError, ValueError):
                raise SchemaError(
                    f"{path}:{row_number}: angle_deg {row['angle_deg']!r} is not a number",
                    field="angle_deg",
                ) from None
            entries.append((image_id, angle))
    return MeasurementSet(label=label or path.stem, entries=tuple(entries))


def write_measurements(
    path: str | Path, entries: Iterable[tuple[str, float]]
) -> None:
    """Write a minimal image_id,angle_deg table (used for ground truth)."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["image_id", "angle_deg"])
        for image_id, angle in entries:
            writer.writerow([image_id, f"{angle:.2f}"])
