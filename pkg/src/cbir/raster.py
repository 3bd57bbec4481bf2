"""Raster images: representation, grayscale, resizing and 3x3 convolution."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels


class DecodeError(Exception):
    """An image file could not be decoded into a raster."""

    def __init__(self, path, reason):
        super().__init__(f"cannot decode image {path}: {reason}")
        self.path = str(path)
        self.reason = reason


@dataclass(frozen=True, eq=False)
class Raster:
    """An 8-bit image with 1 (gray) or 3 (RGB) channels.

    ``data`` has shape ``(height, width)`` for gray images and
    ``(height, width, 3)`` for RGB, row-major with interleaved channels.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise ValueError(f"raster data must be (h, w) or (h, w, 3), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.floating) and not np.all(np.isfinite(arr)):
                raise ValueError("raster values must be finite")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("raster values must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and np.any(arr != np.floor(arr)):
                raise ValueError("raster values must be integers")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return 1 if self.data.ndim == 2 else 3

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"Raster({self.width}x{self.height}, channels={self.channels})"

    @classmethod
    def from_values(cls, width, height, channels, values):
        """Build a raster from a flat row-major sequence of values."""
        if channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        arr = np.asarray(values)
        if arr.size != width * height * channels:
            raise ValueError(
                f"expected {width * height * channels} values for {width}x{height}x{channels}, got {arr.size}")
        shape = (height, width) if channels == 1 else (height, width, channels)
        return cls(arr.reshape(shape))


def load_image(path):
    """Decode an image file into an 8-bit gray or RGB raster."""
    from PIL import Image, UnidentifiedImageError

    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "1", "I", "I;16", "F"):
                if im.mode in ("I", "I;16", "F"):
                    arr = np.clip(np.asarray(im, dtype=np.float64), 0, 255).astype(np.uint8)
                    return Raster(arr)
                return Raster(np.asarray(im.convert("L"), dtype=np.uint8))
            return Raster(np.asarray(im.convert("RGB"), dtype=np.uint8))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise DecodeError(path, exc) from exc


def _round_half_up(values):
    # inputs are non-negative, so this is half-away-from-zero
    return np.floor(values + 0.5)


def to_grayscale(img):
    """Luma conversion ``round(0.299 R + 0.587 G + 0.114 B)``; gray input is returned as-is."""
    if img.channels == 1:
        return img
    rgb = img.data.astype(np.float64)
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return Raster(np.clip(_round_half_up(gray), 0, 255).astype(np.uint8))


def resize(img, new_w, new_h):
    """Nearest-neighbour resampling: output (x, y) copies input (floor(x*W/new_w), floor(y*H/new_h))."""
    if int(new_w) != new_w or int(new_h) != new_h or new_w < 1 or new_h < 1:
        raise ValueError(f"target size must be positive integers, got {new_w}x{new_h}")
    new_w, new_h = int(new_w), int(new_h)
    if (new_w, new_h) == (img.width, img.height):
        return img
    xs = (np.arange(new_w) * img.width) // new_w
    ys = (np.arange(new_h) * img.height) // new_h
    return Raster(img.data[ys[:, None], xs[None, :]])


def convolve3(img, kernel):
    """Correlate a gray raster with a 3x3 kernel, replicating border pixels.

    ``kernel[i][j]`` weights the pixel at row offset ``i - 1`` and column
    offset ``j - 1``. The result is a signed float field of shape
    ``(height, width)`` with no rounding or clamping.
    """
    if img.channels != 1:
        raise ValueError("convolve3 requires a single-channel raster")
    k = np.asarray(kernel, dtype=np.float64)
    if k.shape != (3, 3):
        raise ValueError(f"kernel must be 3x3, got shape {k.shape}")
    return kernels.convolve3(img.data, k)
