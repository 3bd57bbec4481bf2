"""Reference implementations of the pixel kernels (numpy + plain Python).

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-identical output. ``cbir.kernels`` picks one at import time.
"""

import numpy as np


def convolve3(img, kernel):
    """3x3 correlation with replicated borders; float64 result, no rounding."""
    src = np.asarray(img, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    h, w = src.shape
    padded = np.pad(src, 1, mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(3):
        for j in range(3):
            if k[i, j] != 0.0:
                out += k[i, j] * padded[i:i + h, j:j + w]
    return out


def chamfer34(init):
    """Two-pass 3-4 chamfer propagation.

    ``init`` holds seed costs at feature pixels and ``inf`` elsewhere. Returns
    raw chamfer units (axial step 3, diagonal step 4).
    """
    grid = np.array(init, dtype=np.float64)
    h, w = grid.shape
    d = grid.tolist()
    for y in range(h):
        row = d[y]
        prev = d[y - 1] if y > 0 else None
        for x in range(w):
            v = row[x]
            if x > 0 and row[x - 1] + 3.0 < v:
                v = row[x - 1] + 3.0
            if prev is not None:
                if prev[x] + 3.0 < v:
                    v = prev[x] + 3.0
                if x > 0 and prev[x - 1] + 4.0 < v:
                    v = prev[x - 1] + 4.0
                if x + 1 < w and prev[x + 1] + 4.0 < v:
                    v = prev[x + 1] + 4.0
            row[x] = v
    for y in range(h - 1, -1, -1):
        row = d[y]
        nxt = d[y + 1] if y + 1 < h else None
        for x in range(w - 1, -1, -1):
            v = row[x]
            if x + 1 < w and row[x + 1] + 3.0 < v:
                v = row[x + 1] + 3.0
            if nxt is not None:
                if nxt[x] + 3.0 < v:
                    v = nxt[x] + 3.0
                if x + 1 < w and nxt[x + 1] + 4.0 < v:
                    v = nxt[x + 1] + 4.0
                if x > 0 and nxt[x - 1] + 4.0 < v:
                    v = nxt[x - 1] + 4.0
            row[x] = v
    return np.array(d, dtype=np.float64).reshape(h, w)


def _pair_views(q, dx, dy):
    h, w = q.shape
    ys, ye = max(0, -dy), min(h, h - dy)
    xs, xe = max(0, -dx), min(w, w - dx)
    if ys >= ye or xs >= xe:
        return None, None
    return q[ys:ye, xs:xe], q[ys + dy:ye + dy, xs + dx:xe + dx]


def cooccurrence_counts(q, levels, dx, dy):
    """Counts of (q[p], q[p + (dx, dy)]) over in-bounds pixel pairs."""
    q = np.asarray(q, dtype=np.intp)
    a, b = _pair_views(q, dx, dy)
    if a is None:
        return np.zeros((levels, levels), dtype=np.int64)
    flat = (a * levels + b).ravel()
    return np.bincount(flat, minlength=levels * levels).astype(np.int64).reshape(levels, levels)


def ring_offsets(d):
    """All (dx, dy) with chessboard norm exactly ``d``."""
    if d == 0:
        return [(0, 0)]
    return [(dx, dy) for dy in range(-d, d + 1) for dx in range(-d, d + 1)
            if max(abs(dx), abs(dy)) == d]


def correlogram_counts(q, levels, distances):
    q = np.asarray(q, dtype=np.intp)
    out = np.zeros((levels, levels, len(distances)), dtype=np.int64)
    for k, d in enumerate(distances):
        for dx, dy in ring_offsets(int(d)):
            out[:, :, k] += cooccurrence_counts(q, levels, dx, dy)
    return out
