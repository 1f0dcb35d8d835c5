"""Population encoding of joint angles with tuning-curve families.

Each degree of freedom is encoded by a bank of tuning curves mapping an
angle in degrees to activations in [0, 1]:

* ``normalized`` -- one channel per DoF, the plain affine map
  ``(x - min) / (max - min)``.
* ``linear`` -- clamped ramps ``clip(a*x + b, 0, 1)``, half rising toward
  the range maximum and half falling from the range minimum.
* ``sigmoid`` -- logistic curves ``1 / (1 + exp(sgn * (offset - x)))`` in
  both orientations.
* ``gaussian`` -- bumps ``exp(-(x - mu)^2 / (2 sigma^2))``.

Curve banks are laid out under one of two population setups: a fixed
number of curves per DoF (every DoF contributes the same channel count,
whatever its range), or a fixed angular offset between adjacent curves
(the channel count then varies with the range).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, JointSpec
from .errors import OutOfRangeError

FAMILIES = ("normalized", "linear", "sigmoid", "gaussian")
SETUPS = ("fixed_count", "fixed_offset")


@dataclass(frozen=True)
class CodecSpec:
    """Choice of tuning-curve family and population setup.

    ``n_or_offset`` is the per-DoF curve count under ``fixed_count`` (per
    orientation, for the two-sided families) or the angular spacing in
    degrees under ``fixed_offset``.  ``strict`` controls out-of-range
    handling at encode time: raise (strict) or clamp with a warning.
    ``sigmoid_gain`` scales the logistic exponent; 1 is the plain form.
    """

    family: str
    setup: str = "fixed_count"
    n_or_offset: float = 10
    strict: bool = True
    sigmoid_gain: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.setup not in SETUPS:
            raise ValueError(f"unknown setup {self.setup!r}, expected one of {SETUPS}")
        if self.family != "normalized":
            if self.setup == "fixed_count":
                n = self.n_or_offset
                if n != int(n) or int(n) < 2:
                    raise ValueError(f"fixed_count requires an integer count >= 2, got {n}")
            elif self.n_or_offset <= 0:
                raise ValueError(f"fixed_offset requires a positive spacing, got {self.n_or_offset}")
        if self.sigmoid_gain <= 0:
            raise ValueError("sigmoid_gain must be positive")


@dataclass(frozen=True)
class NormalizedParams:
    """Single-channel affine normalization for one DoF."""

    min_deg: float
    max_deg: float

    @property
    def width(self) -> int:
        return 1

    def activations(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return ((x - self.min_deg) / (self.max_deg - self.min_deg))[..., None]


@dataclass(frozen=True)
class LinearParams:
    """Clamped-ramp bank for one DoF: ``y = clip(a*x + b, 0, 1)``.

    A zero slope marks a degenerate anchor (at or beyond the range end
    under the fixed-offset setup); such a curve is constant 0.
    """

    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]

    @property
    def width(self) -> int:
        return len(self.slopes)

    def activations(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = np.array(self.slopes)
        b = np.array(self.intercepts)
        return np.clip(x[..., None] * a + b, 0.0, 1.0)


@dataclass(frozen=True)
class SigmoidParams:
    """Logistic bank for one DoF: ``y = 1 / (1 + exp(gain*sgn*(offset - x)))``."""

    offsets: tuple[float, ...]
    sgns: tuple[int, ...]
    gain: float = 1.0

    @property
    def width(self) -> int:
        return len(self.offsets)

    def activations(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        o = np.array(self.offsets)
        s = np.array(self.sgns, dtype=float)
        z = np.clip(self.gain * s * (o - x[..., None]), -500.0, 500.0)
        return 1.0 / (1.0 + np.exp(z))


@dataclass(frozen=True)
class GaussianParams:
    """Gaussian bump bank for one DoF: ``y = exp(-(x - mu)^2 / (2 sigma^2))``."""

    centers: tuple[float, ...]
    sigma: float

    @property
    def width(self) -> int:
        return len(self.centers)

    def activations(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        mu = np.array(self.centers)
        d = x[..., None] - mu
        return np.exp(-(d * d) / (2.0 * self.sigma**2))


DofParams = NormalizedParams | LinearParams | SigmoidParams | GaussianParams


def _anchor_grid(joint: JointSpec, spec: CodecSpec) -> tuple[np.ndarray, float]:
    """Anchor positions and spacing for one DoF under the chosen setup.

    fixed_count places anchors at the centers of ``n`` equal bins (spacing
    ``range/n``); fixed_offset places them every ``delta`` degrees starting
    at the range minimum, overshooting the maximum by less than one step.
    """
    lo, hi = joint.min_deg, joint.max_deg
    if spec.setup == "fixed_count":
        n = int(spec.n_or_offset)
        step = (hi - lo) / n
        return lo + (np.arange(n) + 0.5) * step, step
    delta = float(spec.n_or_offset)
    count = int(np.ceil((hi - lo) / delta)) + 1
    return lo + np.arange(count) * delta, delta


def _linear_params(joint: JointSpec, spec: CodecSpec) -> LinearParams:
    lo, hi = joint.min_deg, joint.max_deg
    if spec.setup == "fixed_count":
        n = int(spec.n_or_offset)
        step = (hi - lo) / n
        rise_anchors = lo + np.arange(n) * step
        fall_zeros = lo + (np.arange(n) + 1) * step
    else:
        delta = float(spec.n_or_offset)
        count = int(np.ceil((hi - lo) / delta)) + 1
        rise_anchors = lo + np.arange(count) * delta
        fall_zeros = lo + (np.arange(count) + 1) * delta
    slopes, intercepts = [], []
    for anchor in rise_anchors:
        # Rising ramp: 0 at the anchor, 1 at the range maximum.
        if anchor >= hi - 1e-12:
            slopes.append(0.0)
            intercepts.append(0.0)
        else:
            a = 1.0 / (hi - anchor)
            slopes.append(a)
            intercepts.append(-anchor * a)
    for zero in fall_zeros:
        # Falling ramp: 1 at the range minimum, 0 at its zero point.
        a = -1.0 / (zero - lo)
        slopes.append(a)
        intercepts.append(zero / (zero - lo))
    return LinearParams(tuple(slopes), tuple(intercepts))


def _sigmoid_params(joint: JointSpec, spec: CodecSpec) -> SigmoidParams:
    anchors, _ = _anchor_grid(joint, spec)
    offsets = tuple(anchors) + tuple(anchors)
    sgns = (1,) * len(anchors) + (-1,) * len(anchors)
    return SigmoidParams(offsets, sgns, spec.sigmoid_gain)


def _gaussian_params(joint: JointSpec, spec: CodecSpec) -> GaussianParams:
    lo, hi = joint.min_deg, joint.max_deg
    if spec.setup == "fixed_count":
        n = int(spec.n_or_offset)
        sigma = (hi - lo) / (n - 1)
        centers = lo + np.arange(n) * sigma
    else:
        sigma = float(spec.n_or_offset)
        count = int(np.ceil((hi - lo) / sigma)) + 1
        centers = lo + np.arange(count) * sigma
    return GaussianParams(tuple(centers), sigma)


@dataclass(frozen=True)
class PopulationCodec:
    """Curve parameters for every DoF, derived from a :class:`CodecSpec`."""

    spec: CodecSpec
    joints: tuple[JointSpec, ...]
    per_dof: tuple[DofParams, ...]
    layout: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        bounds = []
        start = 0
        for params in self.per_dof:
            bounds.append((start, start + params.width))
            start += params.width
        object.__setattr__(self, "layout", tuple(bounds))

    @property
    def family(self) -> str:
        return self.spec.family

    @property
    def width(self) -> int:
        return self.layout[-1][1] if self.layout else 0

    def segment(self, vector: np.ndarray, dof: int) -> np.ndarray:
        start, stop = self.layout[dof]
        return np.asarray(vector)[..., start:stop]


@dataclass(frozen=True)
class EncodedVector:
    """One posture in activation space, with its per-DoF segment layout."""

    values: np.ndarray
    layout: tuple[tuple[int, int], ...]

    def segment(self, dof: int) -> np.ndarray:
        start, stop = self.layout[dof]
        return self.values[start:stop]


def build_codec(spec: CodecSpec, joints) -> PopulationCodec:
    """Derive per-DoF curve parameters for a family/setup choice."""
    joints = tuple(joints)
    if not joints:
        raise ValueError("at least one joint spec is required")
    builders = {
        "normalized": lambda j: NormalizedParams(j.min_deg, j.max_deg),
        "linear": lambda j: _linear_params(j, spec),
        "sigmoid": lambda j: _sigmoid_params(j, spec),
        "gaussian": lambda j: _gaussian_params(j, spec),
    }
    build = builders[spec.family]
    return PopulationCodec(spec=spec, joints=joints, per_dof=tuple(build(j) for j in joints))


def _check_posture(codec: PopulationCodec, posture: np.ndarray) -> np.ndarray:
    if posture.shape[-1] != len(codec.joints):
        raise ValueError(
            f"posture has {posture.shape[-1]} values, codec expects {len(codec.joints)}"
        )
    lo = np.array([j.min_deg for j in codec.joints])
    hi = np.array([j.max_deg for j in codec.joints])
    out = (posture < lo) | (posture > hi)
    if not out.any():
        return posture
    if codec.spec.strict:
        idx = np.argwhere(out)[0]
        d = int(idx[-1])
        where = f"row {int(idx[0])}, " if posture.ndim == 2 else ""
        raise OutOfRangeError(
            f"value {posture[tuple(idx)]:g} ({where}joint {codec.joints[d].name!r}) "
            f"outside range [{lo[d]:g}, {hi[d]:g}]"
        )
    warnings.warn(
        f"{int(out.sum())} out-of-range value(s) clamped during encoding",
        stacklevel=3,
    )
    return np.clip(posture, lo, hi)


def encode_sample(codec: PopulationCodec, posture) -> EncodedVector:
    """Encode one D-vector of joint angles (degrees) into activation space."""
    posture = np.asarray(posture, dtype=float)
    if posture.ndim != 1:
        raise ValueError(f"expected a 1-D posture, got shape {posture.shape}")
    posture = _check_posture(codec, posture)
    parts = [codec.per_dof[d].activations(posture[d]) for d in range(len(codec.joints))]
    return EncodedVector(np.concatenate(parts, axis=-1), codec.layout)


def encode_dataset(codec: PopulationCodec, ds: Dataset) -> np.ndarray:
    """Encode every dataset row; returns a ``T x width`` activation matrix."""
    if tuple(j.name for j in ds.joints) != tuple(j.name for j in codec.joints):
        raise ValueError("dataset joints do not match codec joints")
    samples = _check_posture(codec, ds.samples)
    parts = [codec.per_dof[d].activations(samples[:, d]) for d in range(len(codec.joints))]
    return np.concatenate(parts, axis=-1)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def codec_to_json(codec: PopulationCodec) -> dict:
    doc = {
        "family": codec.spec.family,
        "setup": codec.spec.setup,
        "n_or_offset": codec.spec.n_or_offset,
        "strict": codec.spec.strict,
        "sigmoid_gain": codec.spec.sigmoid_gain,
        "joints": [
            {"name": j.name, "min_deg": j.min_deg, "max_deg": j.max_deg}
            for j in codec.joints
        ],
        "per_dof": [],
    }
    for params in codec.per_dof:
        if isinstance(params, NormalizedParams):
            doc["per_dof"].append({"min_deg": params.min_deg, "max_deg": params.max_deg})
        elif isinstance(params, LinearParams):
            doc["per_dof"].append(
                {"slopes": list(params.slopes), "intercepts": list(params.intercepts)}
            )
        elif isinstance(params, SigmoidParams):
            doc["per_dof"].append(
                {"offsets": list(params.offsets), "sgns": list(params.sgns), "gain": params.gain}
            )
        else:
            doc["per_dof"].append({"centers": list(params.centers), "sigma": params.sigma})
    return doc


def codec_from_json(doc: dict) -> PopulationCodec:
    spec = CodecSpec(
        family=doc["family"],
        setup=doc["setup"],
        n_or_offset=doc["n_or_offset"],
        strict=doc["strict"],
        sigmoid_gain=doc["sigmoid_gain"],
    )
    joints = tuple(
        JointSpec(j["name"], j["min_deg"], j["max_deg"]) for j in doc["joints"]
    )
    per_dof = []
    for entry in doc["per_dof"]:
        if spec.family == "normalized":
            per_dof.append(NormalizedParams(entry["min_deg"], entry["max_deg"]))
        elif spec.family == "linear":
            per_dof.append(
                LinearParams(tuple(entry["slopes"]), tuple(entry["intercepts"]))
            )
        elif spec.family == "sigmoid":
            per_dof.append(
                SigmoidParams(tuple(entry["offsets"]), tuple(int(s) for s in entry["sgns"]), entry["gain"])
            )
        else:
            per_dof.append(GaussianParams(tuple(entry["centers"]), entry["sigma"]))
    return PopulationCodec(spec=spec, joints=joints, per_dof=tuple(per_dof))


def save_codec(codec: PopulationCodec, path) -> None:
    Path(path).write_text(json.dumps(codec_to_json(codec), indent=2) + "\n")


def load_codec(path) -> PopulationCodec:
    return codec_from_json(json.loads(Path(path).read_text()))
