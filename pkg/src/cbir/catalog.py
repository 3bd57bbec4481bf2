"""Feature extraction pipeline, catalog persistence and query-by-example."""

import hashlib
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import antipole
from .color import intensity_histogram, rgb_histogram
from .edge import edge_map, gaussian_blur3, gradient_magnitude, orientation_histogram, sobel
from .errors import EmptyCatalogError
from .raster import DecodeError, Raster, load_image, resize, to_grayscale
from .similarity import (FeatureVector, FeatureWeights, ScaleFactors, embed, hausdorff,
                         hist_intersection, standardize)
from .texture import texture_features, wavelet_signatures

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
RECORDS = "records.jsonl"
TREE = "tree.jsonl"


@dataclass(frozen=True)
class ExtractionConfig:
    color_mode: str = "gray"          # "gray": 256-bin intensity; "rgb": joint RGB histogram
    rgb_bins: int = 4
    histogram_size: int = 512
    edge_size: int = 100
    cooccurrence_levels: int = 8
    cooccurrence_offsets: tuple = ((1, 0),)
    orientation_bins: int = 36
    edge_threshold: float = 0.5
    correlogram_levels: int = 8
    correlogram_distances: tuple = (1, 3, 5, 7)

    def __post_init__(self):
        if self.color_mode not in ("gray", "rgb"):
            raise ValueError(f"color_mode must be 'gray' or 'rgb', got {self.color_mode!r}")
        if self.color_mode == "rgb" and not 2 <= self.rgb_bins <= 16:
            raise ValueError(f"rgb_bins must be in [2, 16], got {self.rgb_bins}")
        if self.histogram_size % 8:
            raise ValueError("histogram_size must be divisible by 8")
        object.__setattr__(self, "cooccurrence_offsets",
                           tuple(tuple(int(v) for v in off) for off in self.cooccurrence_offsets))
        object.__setattr__(self, "correlogram_distances", tuple(int(d) for d in self.correlogram_distances))

    def to_dict(self):
        d = asdict(self)
        d["cooccurrence_offsets"] = [list(o) for o in self.cooccurrence_offsets]
        d["correlogram_distances"] = list(self.correlogram_distances)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def extract_features(img, config=None, image_id=None):
    """Compute the full feature vector of one raster."""
    config = config or ExtractionConfig()
    gray = to_grayscale(img)
    n = config.histogram_size
    big = resize(gray, n, n)
    if config.color_mode == "gray":
        color = intensity_histogram(big).frequencies()
    else:
        rgb = img if img.channels == 3 else Raster(np.repeat(img.data[:, :, None], 3, axis=2))
        color = rgb_histogram(resize(rgb, n, n), config.rgb_bins).frequencies()
    texture = texture_features(big, config.cooccurrence_levels, config.cooccurrence_offsets).as_array()
    wavelet = wavelet_signatures(big).values
    orient = orientation_histogram(edge_gradients(gray, config), config.orientation_bins).normalized()
    return FeatureVector(image_id, color, texture, wavelet, orient)


def edge_gradients(gray, config):
    small = gaussian_blur3(resize(gray, config.edge_size, config.edge_size))
    return sobel(small)


def edge_points(img, config=None):
    """Edge-pixel coordinates of an image as used for Hausdorff re-ranking."""
    config = config or ExtractionConfig()
    mag = gradient_magnitude(edge_gradients(to_grayscale(img), config))
    return edge_map(mag, config.edge_threshold).points


@dataclass(frozen=True, eq=False)
class FeatureRecord:
    id: int
    source_path: str
    feature: FeatureVector
    extraction_config_hash: str

    def to_json(self):
        f = self.feature
        return json.dumps({
            "id": self.id,
            "source_path": self.source_path,
            "config_hash": self.extraction_config_hash,
            "color": [float(v) for v in f.color],
            "texture": [float(v) for v in f.texture],
            "wavelet": [float(v) for v in f.wavelet],
            "orientation": [float(v) for v in f.orientation],
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, line):
        d = json.loads(line)
        fv = FeatureVector(d["id"], np.array(d["color"]), np.array(d["texture"]),
                           np.array(d["wavelet"]), np.array(d["orientation"]))
        return cls(d["id"], d["source_path"], fv, d["config_hash"])


@dataclass
class QueryEntry:
    id: int
    source_path: str
    distance: float
    rerank_score: float = None


@dataclass
class QueryResult:
    mode: str
    params: dict
    entries: list
    distance_calls: int

    def to_dict(self):
        return {
            "mode": self.mode,
            "params": self.params,
            "distance_calls": self.distance_calls,
            "entries": [{k: v for k, v in asdict(e).items() if v is not None or k != "rerank_score"}
                        for e in self.entries],
        }


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _scan_images(image_dir):
    root = Path(image_dir)
    if not root.is_dir():
        raise NotADirectoryError(f"not a directory: {image_dir}")
    files = [p for p in root.rglob("*") if p.is_file() and not p.name.startswith(".")]
    return root, sorted(files, key=lambda p: p.relative_to(root).as_posix())


def _extract_path(args):
    path, config = args
    try:
        return extract_features(load_image(path), config), None
    except DecodeError as exc:
        return None, str(exc)


@dataclass
class Catalog:
    directory: Path
    config: ExtractionConfig
    weights: FeatureWeights
    scales: ScaleFactors
    records: list
    tree: antipole.AntipoleTree
    manifest: dict = field(default_factory=dict)

    @property
    def config_hash(self):
        return self.config.digest()

    def record(self, rid):
        return self.records[rid]

    def index_vector(self, fv):
        return tuple(float(v) for v in embed(standardize(fv, self.scales), self.weights))

    def resolve_source(self, rec):
        return Path(self.manifest.get("source_root", ".")) / rec.source_path

    def query(self, image, mode="knn", t=None, k=None, rerank=None):
        """Query by example. ``image`` is a path or a :class:`Raster`."""
        img = load_image(image) if not isinstance(image, Raster) else image
        fv = extract_features(img, self.config)
        return self.query_vector(fv, mode=mode, t=t, k=k, rerank=rerank, query_image=img)

    def query_vector(self, fv, mode="knn", t=None, k=None, rerank=None, query_image=None):
        q = self.index_vector(fv)
        stats = antipole.SearchStats()
        if mode == "range":
            if t is None:
                raise ValueError("range mode needs a threshold t")
            hits = antipole.range_search(self.tree, q, float(t), stats=stats)
            params = {"t": float(t)}
        elif mode == "knn":
            if k is None:
                raise ValueError("knn mode needs k")
            if not 1 <= k <= len(self.records):
                raise ValueError(f"k must be in [1, {len(self.records)}], got {k}")
            hits = antipole.knn_search(self.tree, q, int(k), stats=stats)
            params = {"k": int(k)}
        else:
            raise ValueError(f"unknown query mode {mode!r}")
        entries = [QueryEntry(rid, self.records[rid].source_path, d) for rid, d in hits]
        if rerank:
            entries = self._rerank(entries, fv, rerank, query_image)
            params["rerank"] = rerank
        return QueryResult(mode, params, entries, stats.calls)

    def _rerank(self, entries, fv, how, query_image):
        if how == "intersection":
            for e in entries:
                e.rerank_score = hist_intersection(fv.color, self.records[e.id].feature.color)
            return sorted(entries, key=lambda e: (-e.rerank_score, e.distance, e.id))
        if how == "hausdorff":
            if query_image is None:
                raise ValueError("hausdorff re-ranking needs the query image")
            qpts = edge_points(query_image, self.config)
            for e in entries:
                pts = edge_points(load_image(self.resolve_source(self.records[e.id])), self.config)
                e.rerank_score = hausdorff(qpts, pts) if len(qpts) and len(pts) else math.inf
            return sorted(entries, key=lambda e: (e.rerank_score, e.distance, e.id))
        raise ValueError(f"unknown re-ranking {how!r}")


def _index_points(records, scales, weights):
    return [antipole.MetricPoint(r.id, tuple(float(v) for v in embed(standardize(r.feature, scales), weights)))
            for r in records]


def build_catalog(image_dir, out_dir, config=None, weights=None, sigma=None, tau=3, seed=0, jobs=1):
    """Extract features for every decodable image under ``image_dir``, index them and persist."""
    config = config or ExtractionConfig()
    weights = weights or FeatureWeights()
    root, files = _scan_images(image_dir)
    work = [(p, config) for p in files]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_extract_path, work, chunksize=4))
    else:
        results = [_extract_path(w) for w in work]

    digest = config.digest()
    records, skipped = [], []
    for path, (fv, err) in zip(files, results):
        rel = path.relative_to(root).as_posix()
        if fv is None:
            skipped.append(rel)
            continue
        rid = len(records)
        records.append(FeatureRecord(rid, rel, FeatureVector(rid, *fv.blocks()), digest))
    if skipped:
        log.warning("skipped %d undecodable file(s): %s", len(skipped), ", ".join(skipped))
    if not records:
        raise EmptyCatalogError(f"no decodable images under {image_dir}")

    scales = ScaleFactors.fit(r.feature for r in records)
    tree = antipole.build_tree(_index_points(records, scales, weights), math.dist,
                               sigma=sigma, tau=tau, seed=seed)
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": {
            "extraction": config.to_dict(),
            "index": {
                "weights": list(weights.as_tuple()),
                "sigma": tree.sigma,
                "sigma_requested": sigma,
                "tau": tau,
                "seed": seed,
            },
        },
        "config_hash": digest,
        "scale_factors": scales.to_dict(),
        "record_count": len(records),
        "source_root": str(root.resolve()),
        "skipped": skipped,
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / RECORDS, "".join(r.to_json() + "\n" for r in records))
    _atomic_write(out / TREE, "".join(json.dumps(n, separators=(",", ":")) + "\n"
                                      for n in antipole.to_preorder(tree)))
    _atomic_write(out / MANIFEST, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return Catalog(out, config, weights, scales, records, tree, manifest)


def load_catalog(catalog_dir):
    d = Path(catalog_dir)
    if not (d / MANIFEST).is_file():
        raise FileNotFoundError(f"no catalog manifest in {catalog_dir}")
    manifest = json.loads((d / MANIFEST).read_text(encoding="utf-8"))
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported catalog format {manifest.get('format_version')!r}")
    config = ExtractionConfig.from_dict(manifest["config"]["extraction"])
    if config.digest() != manifest["config_hash"]:
        raise ValueError("catalog manifest config hash does not match its config")
    idx = manifest["config"]["index"]
    weights = FeatureWeights(*idx["weights"])
    scales = ScaleFactors.from_dict(manifest["scale_factors"])
    with open(d / RECORDS, encoding="utf-8") as fh:
        records = [FeatureRecord.from_json(line) for line in fh if line.strip()]
    if len(records) != manifest["record_count"]:
        raise ValueError(f"manifest lists {manifest['record_count']} records, found {len(records)}")
    for i, r in enumerate(records):
        if r.id != i:
            raise ValueError(f"record ids must be 0..n-1 in order; line {i} has id {r.id}")
        if r.extraction_config_hash != manifest["config_hash"]:
            raise ValueError(f"record {r.id} was extracted with a different config")
    points = {p.id: p for p in _index_points(records, scales, weights)}
    with open(d / TREE, encoding="utf-8") as fh:
        nodes = [json.loads(line) for line in fh if line.strip()]
    tree = antipole.from_preorder(nodes, points, math.dist, idx["sigma"], idx["tau"])
    return Catalog(d, config, weights, scales, records, tree, manifest)
