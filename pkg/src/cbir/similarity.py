"""Histogram, point-set and composite feature-vector distances."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError

BLOCKS = ("color", "texture", "wavelet", "orientation")


def hist_euclidean(h, g):
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if h.shape != g.shape:
        raise ValueError(f"histogram lengths differ: {h.size} vs {g.size}")
    diff = h - g
    return math.sqrt(float(np.dot(diff.ravel(), diff.ravel())))


def hist_intersection(h, g):
    """Normalized histogram intersection in [0, 1]; a similarity, not a metric.

    If exactly one histogram is empty the overlap is empty and 0.0 is returned.
    """
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if h.shape != g.shape:
        raise ValueError(f"histogram lengths differ: {h.size} vs {g.size}")
    th, tg = float(h.sum()), float(g.sum())
    if th <= 0 and tg <= 0:
        raise DegenerateInputError("both histograms are empty")
    denom = min(th, tg)
    if denom <= 0:
        return 0.0
    return min(1.0, float(np.minimum(h, g).sum()) / denom)


def _as_points(A, name):
    pts = np.asarray(A, dtype=np.float64)
    if pts.ndim == 1 and pts.size == 2:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"point set {name} must be a non-empty (n, d) array")
    return pts


def hausdorff_directed(A, B, chunk=2048):
    """``max_{a in A} min_{b in B} |a - b|`` (Euclidean)."""
    a = _as_points(A, "A")
    b = _as_points(B, "B")
    if a.shape[1] != b.shape[1]:
        raise ValueError("point sets have different dimensions")
    worst = 0.0
    for start in range(0, len(a), chunk):
        part = a[start:start + chunk]
        d2 = ((part[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        worst = max(worst, float(d2.min(axis=1).max()))
    return math.sqrt(worst)


def hausdorff(A, B):
    return max(hausdorff_directed(A, B), hausdorff_directed(B, A))


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """All features of one image, in fixed block order.

    ``color`` and ``orientation`` are frequency-normalized histograms;
    ``texture`` is (energy, entropy, contrast, homogeneity); ``wavelet`` the
    10 subband signatures.
    """

    id: object
    color: np.ndarray
    texture: np.ndarray
    wavelet: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        for name in BLOCKS:
            arr = np.asarray(getattr(self, name), dtype=np.float64).ravel()
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} block has non-finite values")
            object.__setattr__(self, name, arr)
        if self.texture.size != 4 or self.wavelet.size != 10:
            raise ValueError("texture block must have 4 values and wavelet block 10")

    def blocks(self):
        return tuple(getattr(self, name) for name in BLOCKS)

    @property
    def dimension(self):
        return sum(b.size for b in self.blocks())

    @property
    def layout(self):
        return tuple(b.size for b in self.blocks())

    def flatten(self):
        return np.concatenate(self.blocks())


@dataclass(frozen=True)
class FeatureWeights:
    """Per-block weights, normalized to sum 1 on construction."""

    color: float = 0.25
    texture: float = 0.25
    wavelet: float = 0.25
    orientation: float = 0.25

    def __post_init__(self):
        raw = [float(getattr(self, name)) for name in BLOCKS]
        if any(not math.isfinite(v) or v < 0 for v in raw):
            raise ValueError(f"weights must be finite and non-negative, got {raw}")
        total = sum(raw)
        if total <= 0:
            raise ValueError("at least one feature weight must be positive")
        for name, v in zip(BLOCKS, raw):
            object.__setattr__(self, name, v / total)

    @classmethod
    def parse(cls, text):
        """Parse ``"c,t,w,o"``."""
        parts = [p for p in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated weights, got {text!r}")
        return cls(*(float(p) for p in parts))

    def as_tuple(self):
        return tuple(getattr(self, name) for name in BLOCKS)


@dataclass(frozen=True, eq=False)
class ScaleFactors:
    """Per-feature divisors for the texture and wavelet blocks, frozen at catalog build time."""

    texture: np.ndarray = field(default_factory=lambda: np.ones(4))
    wavelet: np.ndarray = field(default_factory=lambda: np.ones(10))

    def __post_init__(self):
        for name in ("texture", "wavelet"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).ravel()
            if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} scale factors must be finite and positive")
            object.__setattr__(self, name, arr)

    @classmethod
    def fit(cls, vectors, floor=1e-12):
        """Standard deviation of each texture / wavelet feature; near-constant features get 1."""
        vectors = list(vectors)
        if not vectors:
            return cls()
        tex = np.std([v.texture for v in vectors], axis=0)
        wav = np.std([v.wavelet for v in vectors], axis=0)
        return cls(np.where(tex > floor, tex, 1.0), np.where(wav > floor, wav, 1.0))

    def to_dict(self):
        return {"texture": [float(v) for v in self.texture], "wavelet": [float(v) for v in self.wavelet]}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["texture"], dtype=np.float64), np.array(d["wavelet"], dtype=np.float64))


def standardize(fv, scales):
    return FeatureVector(fv.id, fv.color, fv.texture / scales.texture, fv.wavelet / scales.wavelet,
                         fv.orientation)


def composite_distance(u, v, w=None):
    """``sqrt(sum_b w_b * |u_b - v_b|^2)`` over the four feature blocks (inputs already standardized)."""
    w = FeatureWeights() if w is None else w
    if u.layout != v.layout:
        raise ValueError(f"feature layouts differ: {u.layout} vs {v.layout}")
    total = 0.0
    for wb, bu, bv in zip(w.as_tuple(), u.blocks(), v.blocks()):
        if wb > 0:
            total += wb * hist_euclidean(bu, bv) ** 2
    return math.sqrt(total)


def embed(fv, w=None):
    """Flatten with each block scaled by ``sqrt(weight)``; plain Euclidean distance on
    embeddings equals :func:`composite_distance`."""
    w = FeatureWeights() if w is None else w
    return np.concatenate([math.sqrt(wb) * b for wb, b in zip(w.as_tuple(), fv.blocks())])
