import numpy as np
import pytest
from PIL import Image, ImageDraw

from cbir import kernels

PAPER_GAUSSIAN_INPUT = np.array([
    [54, 46, 55, 54, 46],
    [22, 22, 22, 22, 22],
    [100, 100, 100, 100, 100],
    [120, 125, 125, 125, 125],
    [125, 125, 125, 125, 125],
])
PAPER_GAUSSIAN_OUTPUT = np.array([
    [54, 46, 55, 54, 46],
    [49, 49, 49, 49, 49],
    [86, 86, 86, 86, 86],
    [118, 118, 119, 119, 119],
    [125, 125, 125, 125, 125],
])
PAPER_SOBEL_INPUT = np.array([[0, 30, 60], [5, 32, 62], [10, 38, 64]])
PAPER_GX = np.array([[117, 237, 120], [112, 228, 146], [111, 219, 108]])
PAPER_GY = np.array([[17, 11, 8], [38, 30, 20], [21, 19, 8]])
PAPER_MAGNITUDE = np.array([[118, 237, 120], [118, 230, 147], [113, 220, 108]])


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return kernels.get_backend(request.param)


def synthetic_image(rng, size=64):
    """A random RGB scene: gradient background, a few shapes, light noise."""
    bg = rng.integers(0, 256, 3)
    ramp = np.linspace(0, rng.uniform(-80, 80), size)
    base = np.clip(bg[None, None, :] + ramp[None, :, None] * rng.uniform(0, 1, 3), 0, 255)
    img = Image.fromarray(np.repeat(base, size, axis=0).astype(np.uint8).reshape(size, size, 3))
    draw = ImageDraw.Draw(img)
    for _ in range(rng.integers(1, 5)):
        x0, y0 = rng.integers(0, size - 8, 2)
        x1, y1 = x0 + rng.integers(4, size // 2), y0 + rng.integers(4, size // 2)
        fill = tuple(int(v) for v in rng.integers(0, 256, 3))
        if rng.random() < 0.5:
            draw.rectangle([int(x0), int(y0), int(x1), int(y1)], fill=fill)
        else:
            draw.ellipse([int(x0), int(y0), int(x1), int(y1)], fill=fill)
    arr = np.asarray(img).astype(np.int16) + rng.integers(-6, 7, (size, size, 3))
    return np.clip(arr, 0, 255).astype(np.uint8)


def write_synthetic_images(directory, n, seed=0, size=64):
    rng = np.random.default_rng(seed)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(n):
        p = directory / f"img_{i:04d}.png"
        Image.fromarray(synthetic_image(rng, size)).save(p)
        paths.append(p)
    return paths


@pytest.fixture(scope="session")
def image_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("images")
    write_synthetic_images(d, 24, seed=7)
    return d
