"""Content-based image retrieval: color, texture and edge features over an Antipole-tree index."""

from .antipole import AntipoleTree, MetricPoint, build_tree, knn_search, range_search
from .catalog import Catalog, ExtractionConfig, build_catalog, extract_features, load_catalog
from .errors import DegenerateInputError, EmptyCatalogError
from .kernels import BACKEND
from .raster import DecodeError, Raster, load_image

__all__ = [
    "AntipoleTree", "MetricPoint", "build_tree", "knn_search", "range_search",
    "Catalog", "ExtractionConfig", "build_catalog", "extract_features", "load_catalog",
    "DegenerateInputError", "EmptyCatalogError", "BACKEND",
    "DecodeError", "Raster", "load_image",
]

__version__ = "0.1.0"
