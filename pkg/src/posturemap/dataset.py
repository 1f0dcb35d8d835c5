"""Joint specifications and time-ordered posture datasets.

A dataset is a T x D matrix of joint angles in degrees sampled at a fixed
rate, together with one :class:`JointSpec` per column.  Datasets round-trip
through CSV (header = joint names) with a small JSON sidecar holding the
per-joint angular ranges.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, OutOfRangeError


@dataclass(frozen=True)
class JointSpec:
    """A named degree of freedom with an angular range in degrees."""

    name: str
    min_deg: float
    max_deg: float

    def __post_init__(self):
        if not self.min_deg < self.max_deg:
            raise ValueError(
                f"joint {self.name!r}: min_deg ({self.min_deg}) must be "
                f"less than max_deg ({self.max_deg})"
            )

    @property
    def range_deg(self) -> float:
        return self.max_deg - self.min_deg

    def contains(self, value_deg: float) -> bool:
        return self.min_deg <= value_deg <= self.max_deg

    def clamp(self, value_deg: float) -> float:
        return min(max(value_deg, self.min_deg), self.max_deg)


@dataclass(frozen=True)
class Dataset:
    """Time-ordered posture samples: rows are time steps, columns are joints."""

    joints: tuple[JointSpec, ...]
    samples: np.ndarray
    rate_hz: float = 50.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 2:
            raise DatasetFormatError(
                f"samples must be a 2-D matrix, got shape {samples.shape}"
            )
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise DatasetFormatError(
                f"samples must be at least 1x1, got shape {samples.shape}"
            )
        if samples.shape[1] != len(self.joints):
            raise DatasetFormatError(
                f"{samples.shape[1]} sample columns vs {len(self.joints)} joint specs"
            )
        if self.rate_hz <= 0:
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")
        validate_samples(samples, self.joints)
        samples.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_joints(self) -> int:
        return self.samples.shape[1]

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.rate_hz


def validate_samples(samples: np.ndarray, joints: tuple[JointSpec, ...]) -> None:
    """Reject NaN entries and out-of-range values with row/column diagnostics."""
    bad = np.argwhere(np.isnan(samples))
    if bad.size:
        r, c = bad[0]
        raise DatasetFormatError(
            f"NaN value at row {r}, column {c} ({joints[c].name})"
        )
    for c, joint in enumerate(joints):
        col = samples[:, c]
        out = np.nonzero((col < joint.min_deg) | (col > joint.max_deg))[0]
        if out.size:
            r = int(out[0])
            raise OutOfRangeError(
                f"value {col[r]:g} at row {r}, column {c} outside range "
                f"[{joint.min_deg:g}, {joint.max_deg:g}] of joint {joint.name!r}"
            )


def save_joint_specs(joints, path) -> None:
    """Write joint specs as the JSON sidecar used next to dataset CSVs."""
    doc = {
        "joints": [
            {"name": j.name, "min_deg": j.min_deg, "max_deg": j.max_deg}
            for j in joints
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_joint_specs(path) -> tuple[JointSpec, ...]:
    try:
        doc = json.loads(Path(path).read_text())
        entries = doc["joints"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DatasetFormatError(f"bad joint-spec file {path}: {exc}") from exc
    return tuple(
        JointSpec(str(e["name"]), float(e["min_deg"]), float(e["max_deg"]))
        for e in entries
    )


def save_dataset(ds: Dataset, path, joint_spec_path=None) -> None:
    """Write the sample matrix as CSV; optionally write the sidecar as well.

    The header row carries the joint names; every following row is one
    sample period.  Floats are written with ``repr`` so that a save/load
    round trip is value-identical.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.joint_names)
        for row in ds.samples:
            writer.writerow([repr(float(v)) for v in row])
    if joint_spec_path is not None:
        save_joint_specs(ds.joints, joint_spec_path)


def load_dataset(path, joint_spec_path, rate_hz: float = 50.0) -> Dataset:
    """Load a CSV dataset against its joint-spec sidecar.

    Raises :class:`DatasetFormatError` when the header does not match the
    sidecar and :class:`OutOfRangeError` (with row/column diagnostics) when
    any cell violates its joint range.
    """
    joints = load_joint_specs(joint_spec_path)
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}: empty file") from None
        names = tuple(h.strip() for h in header)
        if names != tuple(j.name for j in joints):
            raise DatasetFormatError(
                f"{path}: header {list(names)} does not match joint specs "
                f"{[j.name for j in joints]}"
            )
        rows = []
        for r, row in enumerate(reader):
            if len(row) != len(joints):
                raise DatasetFormatError(
                    f"{path}: row {r} has {len(row)} cells, expected {len(joints)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise DatasetFormatError(f"{path}: row {r}: {exc}") from exc
    if not rows:
        raise DatasetFormatError(f"{path}: no data rows")
    return Dataset(joints=joints, samples=np.array(rows, dtype=float), rate_hz=rate_hz)
