"""Self-organizing map over encoded posture data.

Sequential Kohonen training: for every input the best matching unit (BMU)
and its lattice neighborhood move toward the input,
``w <- w + alpha(t) * exp(-d^2 / (2 r(t)^2)) * (x - w)``,
with the learning rate and neighborhood radius decayed linearly over all
presentation steps.

Initialization comes in two flavors.  Naive init draws every weight
component uniformly within its observed data range, which for population
codes yields weight vectors that do not correspond to any joint angle.
Consistent init instead draws a random posture and encodes it, so every
unit starts exactly on the valid-code manifold.  The distance of a weight
vector from that manifold is measured by :func:`manifold_distance`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import PopulationCodec, codec_from_json, codec_to_json, encode_sample


@dataclass(frozen=True)
class SomMap:
    """A rows x cols lattice of units, each holding one weight vector."""

    rows: int
    cols: int
    weights: np.ndarray
    codec: PopulationCodec | None = None
    trained_cycles: int = 0
    qe_trace: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"lattice must be at least 1x1, got {self.rows}x{self.cols}")
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", weights)
        if weights.shape[0] != self.rows * self.cols:
            raise ValueError(
                f"{weights.shape[0]} weight vectors for a {self.rows}x{self.cols} lattice"
            )
        if self.codec is not None and weights.shape[1] != self.codec.width:
            raise ValueError(
                f"weight width {weights.shape[1]} does not match codec width {self.codec.width}"
            )
        weights.setflags(write=False)

    @property
    def n_units(self) -> int:
        return self.rows * self.cols

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    def unit_coords(self) -> np.ndarray:
        """Lattice (row, col) coordinates of every unit, row-major."""
        r, c = np.divmod(np.arange(self.n_units), self.cols)
        return np.stack([r, c], axis=1).astype(float)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one sequential training run."""

    cycles: int = 6
    shuffle: bool = True
    seed: int = 0
    alpha0: float = 0.5
    alpha_end: float = 0.01
    radius0: float | None = None
    radius_end: float = 0.5

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if not 0.0 <= self.alpha_end <= self.alpha0 <= 1.0:
            raise ValueError(
                f"need 0 <= alpha_end <= alpha0 <= 1, got {self.alpha_end}, {self.alpha0}"
            )
        if self.radius0 is not None and self.radius0 <= 0:
            raise ValueError("radius0 must be positive")
        if self.radius_end < 0:
            raise ValueError("radius_end must be >= 0")

    def start_radius(self, rows: int, cols: int) -> float:
        return self.radius0 if self.radius0 is not None else max(rows, cols) / 2.0


def init_consistent(
    rows: int,
    cols: int,
    codec: PopulationCodec,
    joints=None,
    seed: int = 0,
) -> SomMap:
    """Seed every unit with the encoding of a random in-range posture.

    Every weight vector starts as a valid population code, so decoding a
    fresh map reproduces the seeded postures.
    """
    joints = tuple(joints) if joints is not None else codec.joints
    if tuple(j.name for j in joints) != tuple(j.name for j in codec.joints):
        raise ValueError("joints do not match the codec's joints")
    rng = np.random.default_rng(seed)
    lo = np.array([j.min_deg for j in joints])
    hi = np.array([j.max_deg for j in joints])
    weights = np.empty((rows * cols, codec.width))
    for u in range(rows * cols):
        posture = rng.uniform(lo, hi)
        weights[u] = encode_sample(codec, posture).values
    return SomMap(rows=rows, cols=cols, weights=weights, codec=codec)


def data_ranges(data: np.ndarray) -> np.ndarray:
    """Per-dimension [min, max] of an encoded dataset, as a width x 2 array."""
    data = np.asarray(data, dtype=float)
    return np.stack([data.min(axis=0), data.max(axis=0)], axis=1)


def init_naive(
    rows: int,
    cols: int,
    input_ranges,
    seed: int = 0,
    codec: PopulationCodec | None = None,
) -> SomMap:
    """Seed every weight component uniformly within its own data range.

    This is the standard random initialization; on population-coded input
    the resulting vectors generally lie off the valid-code manifold.
    """
    ranges = np.asarray(input_ranges, dtype=float)
    if ranges.ndim != 2 or ranges.shape[1] != 2:
        raise ValueError(f"input_ranges must be width x 2, got shape {ranges.shape}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(ranges[:, 0], ranges[:, 1], size=(rows * cols, ranges.shape[0]))
    return SomMap(rows=rows, cols=cols, weights=weights, codec=codec)


def find_bmu(som: SomMap, x) -> tuple[int, float]:
    """Index and distance of the unit nearest to ``x`` in Euclidean norm.

    Ties resolve to the lowest row-major index.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (som.width,):
        raise ValueError(f"input has shape {x.shape}, expected ({som.width},)")
    d = np.linalg.norm(som.weights - x, axis=1)
    best = int(np.argmin(d))
    return best, float(d[best])


def bmu_indices(som: SomMap, data: np.ndarray) -> np.ndarray:
    """Vectorized BMU lookup for a whole T x width dataset."""
    data = np.asarray(data, dtype=float)
    w2 = np.einsum("uw,uw->u", som.weights, som.weights)
    d2 = w2[None, :] - 2.0 * data @ som.weights.T
    return np.argmin(d2, axis=1)


def _mean_bmu_distance(weights: np.ndarray, data: np.ndarray) -> float:
    # Expanded form picks the BMU cheaply; the reported distance is then
    # computed exactly, so identical vectors yield exactly zero.
    w2 = np.einsum("uw,uw->u", weights, weights)
    d2 = w2[None, :] - 2.0 * data @ weights.T
    bmus = np.argmin(d2, axis=1)
    return float(np.linalg.norm(data - weights[bmus], axis=1).mean())


def train(som: SomMap, data, cfg: TrainConfig) -> tuple[SomMap, tuple[float, ...]]:
    """Run sequential Kohonen training; returns the trained map and QE trace.

    The trace holds the mean input-to-BMU distance before training and
    after every full cycle (``cycles + 1`` entries).  Fully deterministic
    for a fixed config: the same seed reproduces the same shuffles and the
    same final weights.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 1:
        raise ValueError("data must be a non-empty T x width matrix")
    if data.shape[1] != som.width:
        raise ValueError(f"data width {data.shape[1]} does not match map width {som.width}")

    weights = som.weights.copy()
    coords = som.unit_coords()
    # Pairwise squared lattice distances, units x units.
    diff = coords[:, None, :] - coords[None, :, :]
    lat_d2 = np.einsum("uvk,uvk->uv", diff, diff)

    n_samples = data.shape[0]
    total = cfg.cycles * n_samples
    r0 = cfg.start_radius(som.rows, som.cols)
    rng = np.random.default_rng(cfg.seed)
    trace = [_mean_bmu_distance(weights, data)]

    w2 = np.einsum("uw,uw->u", weights, weights)
    step = 0
    for _ in range(cfg.cycles):
        order = rng.permutation(n_samples) if cfg.shuffle else np.arange(n_samples)
        for t in order:
            frac = step / (total - 1) if total > 1 else 0.0
            alpha = cfg.alpha0 + (cfg.alpha_end - cfg.alpha0) * frac
            radius = r0 + (cfg.radius_end - r0) * frac
            x = data[t]
            d2 = w2 - 2.0 * (weights @ x)
            bmu = int(np.argmin(d2))
            if radius > 0.0:
                h = np.exp(lat_d2[bmu] / (-2.0 * radius * radius))
            else:
                h = (lat_d2[bmu] == 0.0).astype(float)
            # Convex form of w += c*(x - w): exact at c = 1 and keeps
            # weights inside the hull of past values and inputs.
            c = (alpha * h)[:, None]
            weights *= 1.0 - c
            weights += c * x
            w2 = np.einsum("uw,uw->u", weights, weights)
            step += 1
        trace.append(_mean_bmu_distance(weights, data))

    trained = SomMap(
        rows=som.rows,
        cols=som.cols,
        weights=weights,
        codec=som.codec,
        trained_cycles=som.trained_cycles + cfg.cycles,
        qe_trace=tuple(trace),
    )
    return trained, tuple(trace)


# ---------------------------------------------------------------------------
# Distance from the valid-code manifold
# ---------------------------------------------------------------------------

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _refine_minimum(f, lo: float, hi: float, iters: int = 80) -> float:
    """Golden-section minimization of a smooth 1-D function on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a < 1e-13 * max(1.0, abs(a)):
            break
    return min(fc, fd)


def manifold_distance(
    som: SomMap,
    codec: PopulationCodec | None = None,
    grid_deg: float = 0.05,
    refine: bool = True,
) -> np.ndarray:
    """Per-unit distance from the set of valid population codes.

    For every unit and DoF segment, finds the angle whose encoding is
    nearest the segment (dense grid search plus local golden-section
    refinement) and sums the residual norms over DoF.  Zero means the
    weight vector is the exact encoding of some posture.
    """
    codec = codec if codec is not None else som.codec
    if codec is None:
        raise ValueError("a codec is required to measure manifold distance")
    if grid_deg <= 0:
        raise ValueError("grid_deg must be positive")
    out = np.zeros(som.n_units)
    for d, joint in enumerate(codec.joints):
        params = codec.per_dof[d]
        n_steps = max(1, round(joint.range_deg / grid_deg))
        grid = np.linspace(joint.min_deg, joint.max_deg, n_steps + 1)
        curves = params.activations(grid)
        segs = np.stack([codec.segment(som.weights[u], d) for u in range(som.n_units)])
        d2 = ((curves[None, :, :] - segs[:, None, :]) ** 2).sum(axis=2)
        best = np.argmin(d2, axis=1)
        for u in range(som.n_units):
            i = int(best[u])
            if refine:
                lo = grid[max(i - 1, 0)]
                hi = grid[min(i + 1, len(grid) - 1)]
                seg = segs[u]
                f = lambda a: float(((params.activations(a) - seg) ** 2).sum())
                out[u] += np.sqrt(max(_refine_minimum(f, lo, hi), 0.0))
            else:
                out[u] += np.sqrt(max(float(d2[u, i]), 0.0))
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def map_to_json(som: SomMap, train_config: TrainConfig | None = None) -> dict:
    doc = {
        "rows": som.rows,
        "cols": som.cols,
        "weights": [[float(v) for v in row] for row in som.weights],
        "codec": codec_to_json(som.codec) if som.codec is not None else None,
        "trained_cycles": som.trained_cycles,
        "qe_trace": [float(v) for v in som.qe_trace],
    }
    if train_config is not None:
        doc["train_config"] = {
            "cycles": train_config.cycles,
            "shuffle": train_config.shuffle,
            "seed": train_config.seed,
            "alpha0": train_config.alpha0,
            "alpha_end": train_config.alpha_end,
            "radius0": train_config.radius0,
            "radius_end": train_config.radius_end,
        }
    return doc


def map_from_json(doc: dict) -> SomMap:
    codec = codec_from_json(doc["codec"]) if doc.get("codec") else None
    return SomMap(
        rows=doc["rows"],
        cols=doc["cols"],
        weights=np.array(doc["weights"], dtype=float),
        codec=codec,
        trained_cycles=doc.get("trained_cycles", 0),
        qe_trace=tuple(doc.get("qe_trace", ())),
    )


def save_map(som: SomMap, path, train_config: TrainConfig | None = None) -> None:
    Path(path).write_text(json.dumps(map_to_json(som, train_config)) + "\n")


def load_map(path) -> SomMap:
    return map_from_json(json.loads(Path(path).read_text()))
