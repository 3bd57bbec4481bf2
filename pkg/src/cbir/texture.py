"""Texture features: gray-level co-occurrence statistics and Haar subband signatures."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .color import quantize
from .errors import DegenerateInputError

_SQRT2 = math.sqrt(2.0)

SIGNATURE_NAMES = ("I2", "I3", "I4", "I12", "I13", "I14", "I111", "I112", "I113", "I114")


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    levels: int
    offset: tuple
    probs: np.ndarray


@dataclass(frozen=True)
class TextureStats:
    energy: float
    entropy: float
    contrast: float
    homogeneity: float

    def as_array(self):
        return np.array([self.energy, self.entropy, self.contrast, self.homogeneity], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class WaveletSignature:
    """Ten subband RMS values in the order of ``SIGNATURE_NAMES``."""

    values: np.ndarray

    def as_dict(self):
        return dict(zip(SIGNATURE_NAMES, (float(v) for v in self.values)))


def cooccurrence(img, levels=8, offset=(1, 0)):
    """Normalized co-occurrence matrix of quantized levels for pixel pairs ``(p, p + offset)``.

    ``offset`` is ``(dx, dy)`` with x along columns and y along rows.
    """
    if img.channels != 1:
        raise ValueError("cooccurrence requires a single-channel raster")
    if not 2 <= levels <= 256:
        raise ValueError(f"levels must be in [2, 256], got {levels}")
    dx, dy = (int(v) for v in offset)
    if abs(dx) >= img.width or abs(dy) >= img.height:
        raise ValueError(f"offset {offset} does not fit a {img.width}x{img.height} image")
    q = quantize(img.data, levels)
    counts = kernels.cooccurrence_counts(q, levels, dx, dy)
    total = counts.sum()
    if total == 0:
        raise DegenerateInputError(f"no pixel pairs for offset {offset}")
    return CooccurrenceMatrix(levels, (dx, dy), counts / float(total))


def texture_stats(P):
    """Energy, entropy (log base 2), contrast and homogeneity of a co-occurrence matrix."""
    p = np.asarray(P.probs if isinstance(P, CooccurrenceMatrix) else P, dtype=np.float64)
    i, j = np.indices(p.shape)
    nz = p > 0
    energy = float(np.sum(p * p))
    entropy = float(-np.sum(p[nz] * np.log2(p[nz])))
    contrast = float(np.sum((i - j) ** 2 * p))
    homogeneity = float(np.sum(p / (1.0 + np.abs(i - j))))
    # -0.0 from an all-diagonal matrix
    return TextureStats(energy, entropy + 0.0, contrast, homogeneity)


def texture_features(img, levels=8, offsets=((1, 0),)):
    """Texture statistics averaged over several offsets."""
    stats = [texture_stats(cooccurrence(img, levels, off)).as_array() for off in offsets]
    if not stats:
        raise ValueError("at least one offset is required")
    return TextureStats(*(float(v) for v in np.mean(stats, axis=0)))


def haar2_level(field):
    """One level of the orthonormal 2D Haar transform.

    Rows are transformed first, then columns. Returns ``(LL, LH, HL, HH)``
    where the first letter is the vertical (row-pair) filter and the second
    the horizontal (column-pair) one, so LH carries horizontal detail.
    """
    f = np.asarray(field, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError("haar2_level expects a 2D array")
    h, w = f.shape
    if h % 2 or w % 2 or h == 0 or w == 0:
        raise ValueError(f"haar2_level needs even, non-zero dimensions, got {w}x{h}")
    lo = (f[:, 0::2] + f[:, 1::2]) / _SQRT2
    hi = (f[:, 0::2] - f[:, 1::2]) / _SQRT2
    ll = (lo[0::2] + lo[1::2]) / _SQRT2
    hl = (lo[0::2] - lo[1::2]) / _SQRT2
    lh = (hi[0::2] + hi[1::2]) / _SQRT2
    hh = (hi[0::2] - hi[1::2]) / _SQRT2
    return ll, lh, hl, hh


def inverse_haar2_level(ll, lh, hl, hh):
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in (ll, lh, hl, hh))
    h2, w2 = ll.shape
    lo = np.empty((2 * h2, w2))
    hi = np.empty((2 * h2, w2))
    lo[0::2] = (ll + hl) / _SQRT2
    lo[1::2] = (ll - hl) / _SQRT2
    hi[0::2] = (lh + hh) / _SQRT2
    hi[1::2] = (lh - hh) / _SQRT2
    out = np.empty((2 * h2, 2 * w2))
    out[:, 0::2] = (lo + hi) / _SQRT2
    out[:, 1::2] = (lo - hi) / _SQRT2
    return out


def _rms(band):
    return math.sqrt(float(np.sum(band * band)) / band.size)


def wavelet_signatures(img):
    """Three-level Haar decomposition of the LL band, summarized as 10 subband RMS values."""
    if hasattr(img, "channels"):
        if img.channels != 1:
            raise ValueError("wavelet_signatures requires a single-channel raster")
        field = img.data.astype(np.float64)
    else:
        field = np.asarray(img, dtype=np.float64)
    h, w = field.shape
    if h % 8 or w % 8:
        raise ValueError(f"image dimensions must be divisible by 8, got {w}x{h}")
    values = []
    ll = field
    for _ in range(3):
        ll, lh, hl, hh = haar2_level(ll)
        values.append([_rms(lh), _rms(hl), _rms(hh)])
    values[2].insert(0, _rms(ll))
    return WaveletSignature(np.array([v for level in values for v in level], dtype=np.float64))
