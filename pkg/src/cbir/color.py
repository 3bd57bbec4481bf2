"""Color features: intensity / joint RGB histograms and the color correlogram."""

from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_CORRELOGRAM_DISTANCES = (1, 3, 5, 7)


@dataclass(frozen=True, eq=False)
class ColorHistogram:
    """Raw bin counts. For RGB histograms bins are flattened with R outermost."""

    counts: np.ndarray
    total: int

    @property
    def bin_count(self):
        return len(self.counts)

    def frequencies(self):
        if self.total == 0:
            return np.zeros(self.bin_count, dtype=np.float64)
        return self.counts.astype(np.float64) / self.total


@dataclass(frozen=True, eq=False)
class Correlogram:
    """``entries[i, j, k]``: ordered pixel pairs colored (i, j) at chessboard distance ``distances[k]``."""

    levels: int
    distances: tuple
    entries: np.ndarray

    def probabilities(self):
        """Normalize each (i, ., d) row to a distribution; empty rows stay zero."""
        sums = self.entries.sum(axis=1, keepdims=True).astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            p = np.where(sums > 0, self.entries / np.where(sums > 0, sums, 1), 0.0)
        return p


def _require_gray(img, what):
    if img.channels != 1:
        raise ValueError(f"{what} requires a single-channel raster; convert to grayscale first")


def quantize(values, levels):
    """Map 8-bit values to ``floor(v * levels / 256)``."""
    return (np.asarray(values, dtype=np.intp) * levels) // 256


def intensity_histogram(img):
    """256-bin histogram of a gray raster."""
    _require_gray(img, "intensity_histogram")
    counts = np.bincount(img.data.ravel(), minlength=256).astype(np.int64)
    return ColorHistogram(counts, int(img.data.size))


def rgb_histogram(img, bins_per_channel=4):
    """Joint (R, G, B) histogram with ``bins_per_channel**3`` bins."""
    if img.channels != 3:
        raise ValueError("rgb_histogram requires a 3-channel raster")
    if not 2 <= bins_per_channel <= 16:
        raise ValueError(f"bins_per_channel must be in [2, 16], got {bins_per_channel}")
    q = quantize(img.data, bins_per_channel).reshape(-1, 3)
    flat = (q[:, 0] * bins_per_channel + q[:, 1]) * bins_per_channel + q[:, 2]
    counts = np.bincount(flat, minlength=bins_per_channel ** 3).astype(np.int64)
    return ColorHistogram(counts, int(q.shape[0]))


def correlogram(img, levels=8, distances=DEFAULT_CORRELOGRAM_DISTANCES):
    _require_gray(img, "correlogram")
    if not 2 <= levels <= 64:
        raise ValueError(f"levels must be in [2, 64], got {levels}")
    distances = tuple(int(d) for d in distances)
    if not distances:
        raise ValueError("correlogram needs at least one distance")
    if any(d < 0 for d in distances):
        raise ValueError("correlogram distances must be non-negative")
    q = quantize(img.data, levels)
    return Correlogram(levels, distances, kernels.correlogram_counts(q, levels, distances))
