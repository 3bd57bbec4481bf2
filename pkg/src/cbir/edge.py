"""Edge features: Gaussian smoothing, Sobel gradients, orientation and distance-transform histograms."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInputError
from .raster import Raster, convolve3

GAUSSIAN_KERNEL = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]], dtype=np.float64) / 16.0
SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = np.array([[1, 2, 1], [0, 0, 0], [-1, -2, -1]], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class GradientField:
    gx: np.ndarray
    gy: np.ndarray

    def __post_init__(self):
        if np.shape(self.gx) != np.shape(self.gy):
            raise ValueError("gx and gy must have the same shape")

    @property
    def height(self):
        return self.gx.shape[0]

    @property
    def width(self):
        return self.gx.shape[1]


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Edge pixels as an ``(n, 2)`` integer array of ``(x, y)`` plus their magnitudes."""

    points: np.ndarray
    magnitudes: np.ndarray

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class OrientationHistogram:
    """Magnitude-weighted gradient directions; bin ``b`` covers ``[2*pi*b/n, 2*pi*(b+1)/n)``."""

    weights: np.ndarray

    @property
    def bin_count(self):
        return len(self.weights)

    def normalized(self):
        total = float(self.weights.sum())
        return self.weights / total if total > 0 else np.zeros_like(self.weights)


@dataclass(frozen=True, eq=False)
class DistanceHistogram:
    counts: np.ndarray
    max_d: float

    @property
    def bin_count(self):
        return len(self.counts)


def _require_gray(img, what):
    if img.channels != 1:
        raise ValueError(f"{what} requires a single-channel raster")


def gaussian_blur3(img):
    """Binomial 3x3 smoothing, replicated borders, rounded half away from zero."""
    _require_gray(img, "gaussian_blur3")
    out = convolve3(img, GAUSSIAN_KERNEL)
    return Raster(np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8))


def sobel(img):
    _require_gray(img, "sobel")
    return GradientField(convolve3(img, SOBEL_X), convolve3(img, SOBEL_Y))


def gradient_magnitude(g):
    return np.hypot(g.gx, g.gy)


def edge_map(mag, threshold_fraction=0.5):
    """Pixels whose magnitude reaches ``threshold_fraction`` of the field maximum."""
    if not 0.0 < threshold_fraction <= 1.0:
        raise ValueError(f"threshold_fraction must be in (0, 1], got {threshold_fraction}")
    mag = np.asarray(mag, dtype=np.float64)
    peak = float(mag.max()) if mag.size else 0.0
    if peak <= 0.0:
        return EdgeMap(np.zeros((0, 2), dtype=np.intp), np.zeros(0))
    ys, xs = np.nonzero(mag >= threshold_fraction * peak)
    return EdgeMap(np.column_stack([xs, ys]).astype(np.intp), mag[ys, xs])


def orientation_histogram(g, bins=36):
    if bins < 4:
        raise ValueError(f"bins must be >= 4, got {bins}")
    gx = np.asarray(g.gx, dtype=np.float64).ravel()
    gy = np.asarray(g.gy, dtype=np.float64).ravel()
    mag = np.hypot(gx, gy)
    keep = mag > 0
    angle = np.mod(np.arctan2(gy[keep], gx[keep]), 2 * math.pi)
    idx = np.minimum((angle * bins / (2 * math.pi)).astype(np.intp), bins - 1)
    return OrientationHistogram(np.bincount(idx, weights=mag[keep], minlength=bins).astype(np.float64))


def match_orientation(h1, h2):
    """Best circular alignment: ``min_s ||h1 - roll(h2, s)||`` and the smallest minimizing ``s``."""
    a = np.asarray(getattr(h1, "weights", h1), dtype=np.float64)
    b = np.asarray(getattr(h2, "weights", h2), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"bin counts differ: {a.size} vs {b.size}")
    best, best_shift = math.inf, 0
    for s in range(a.size):
        d = float(np.sqrt(np.sum((a - np.roll(b, s)) ** 2)))
        if d < best:
            best, best_shift = d, s
    return best, best_shift


def distance_transform(edges, w, h, saliency=0.0):
    """Chamfer 3-4 distance to the nearest edge pixel, in pixel units (raw / 3).

    With ``saliency > 0`` each edge seed starts at ``saliency * (1 - m / max_m)``
    so weak edges attract less than strong ones; ``saliency=0`` is the plain DT.
    """
    if len(edges) == 0:
        raise DegenerateInputError("distance transform needs at least one edge pixel")
    pts = np.asarray(edges.points, dtype=np.intp)
    if pts[:, 0].min() < 0 or pts[:, 1].min() < 0 or pts[:, 0].max() >= w or pts[:, 1].max() >= h:
        raise ValueError(f"edge points fall outside a {w}x{h} grid")
    init = np.full((h, w), np.inf)
    if saliency > 0:
        mags = np.asarray(edges.magnitudes, dtype=np.float64)
        peak = mags.max()
        seed = saliency * (1.0 - mags / peak) if peak > 0 else np.zeros_like(mags)
        init[pts[:, 1], pts[:, 0]] = 3.0 * seed
    else:
        init[pts[:, 1], pts[:, 0]] = 0.0
    return kernels.chamfer34(init) / 3.0


def distance_histogram(dt, bins=16, max_d=16.0):
    """Histogram of distance values over ``[0, max_d)``; larger values land in the last bin."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if not max_d > 0:
        raise ValueError(f"max_d must be positive, got {max_d}")
    d = np.asarray(dt, dtype=np.float64).ravel()
    idx = np.clip(np.floor(d * bins / max_d), 0, bins - 1).astype(np.intp)
    return DistanceHistogram(np.bincount(idx, minlength=bins).astype(np.int64), float(max_d))
