"""Command-line interface: ``cbir index``, ``cbir query`` and ``cbir features``.

Exit codes: 0 success, 1 usage error, 2 I/O or decode error, 3 empty range
result when ``--fail-on-empty`` is given.
"""

import argparse
import json
import logging
import sys

from .catalog import ExtractionConfig, build_catalog, extract_features, load_catalog
from .errors import EmptyCatalogError
from .raster import DecodeError, load_image
from .similarity import FeatureWeights
from .texture import SIGNATURE_NAMES

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_EMPTY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_from_args(args):
    if args.bins is None:
        return ExtractionConfig()
    return ExtractionConfig(color_mode="rgb", rgb_bins=args.bins)


def _weights(text):
    try:
        return FeatureWeights.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser():
    p = _Parser(prog="cbir", description="Content-based image retrieval over an Antipole-tree index.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ix = sub.add_parser("index", help="extract features for a directory of images and build a catalog")
    ix.add_argument("dir")
    ix.add_argument("--out", required=True, help="catalog directory to write")
    ix.add_argument("--seed", type=int, default=0)
    ix.add_argument("--sigma", type=float, default=None,
                    help="cluster diameter threshold (default: median sample distance)")
    ix.add_argument("--bins", type=int, default=None,
                    help="use a joint RGB histogram with N bins per channel instead of 256 gray bins")
    ix.add_argument("--weights", type=_weights, default=FeatureWeights(),
                    help="block weights color,texture,wavelet,orientation (default 1,1,1,1)")
    ix.add_argument("--tau", type=int, default=3, help="tournament size")
    ix.add_argument("--jobs", type=int, default=1, help="parallel extraction processes")

    q = sub.add_parser("query", help="query a catalog by example image")
    q.add_argument("image")
    q.add_argument("--catalog", required=True)
    mode = q.add_mutually_exclusive_group(required=True)
    mode.add_argument("--range", type=float, dest="range_t", metavar="T")
    mode.add_argument("--knn", type=int, metavar="K")
    q.add_argument("--rerank", choices=["intersection", "hausdorff"])
    q.add_argument("--json", action="store_true")
    q.add_argument("--fail-on-empty", action="store_true")

    f = sub.add_parser("features", help="print the feature vector of an image")
    f.add_argument("image")
    f.add_argument("--bins", type=int, default=None)
    f.add_argument("--json", action="store_true")
    return p


def _cmd_index(args):
    if args.bins is not None and not 2 <= args.bins <= 16:
        raise UsageError("--bins must be in [2, 16]")
    if args.sigma is not None and not args.sigma > 0:
        raise UsageError("--sigma must be positive")
    cat = build_catalog(args.dir, args.out, config=_config_from_args(args), weights=args.weights,
                        sigma=args.sigma, tau=args.tau, seed=args.seed, jobs=args.jobs)
    print(f"indexed {len(cat.records)} image(s) into {args.out} "
          f"(sigma={cat.tree.sigma:.6g}, {sum(1 for _ in cat.tree.leaves())} leaves)")
    if cat.manifest["skipped"]:
        print(f"skipped {len(cat.manifest['skipped'])} undecodable file(s)", file=sys.stderr)
    return EXIT_OK


def _cmd_query(args):
    if args.range_t is not None and args.range_t < 0:
        raise UsageError("--range must be >= 0")
    cat = load_catalog(args.catalog)
    if args.knn is not None and not 1 <= args.knn <= len(cat.records):
        raise UsageError(f"--knn must be in [1, {len(cat.records)}]")
    if args.range_t is not None:
        res = cat.query(args.image, mode="range", t=args.range_t, rerank=args.rerank)
    else:
        res = cat.query(args.image, mode="knn", k=args.knn, rerank=args.rerank)
    if args.json:
        print(json.dumps(res.to_dict(), indent=2))
    else:
        header = f"{'rank':>4}  {'id':>6}  {'distance':>12}"
        if args.rerank:
            header += f"  {args.rerank:>12}"
        print(header + "  path")
        for rank, e in enumerate(res.entries, 1):
            line = f"{rank:>4}  {e.id:>6}  {e.distance:>12.6f}"
            if args.rerank:
                line += f"  {e.rerank_score:>12.6f}"
            print(f"{line}  {e.source_path}")
        print(f"# {len(res.entries)} result(s), {res.distance_calls} distance call(s)")
    if res.mode == "range" and args.fail_on_empty and not res.entries:
        return EXIT_EMPTY
    return EXIT_OK


def _cmd_features(args):
    if args.bins is not None and not 2 <= args.bins <= 16:
        raise UsageError("--bins must be in [2, 16]")
    fv = extract_features(load_image(args.image), _config_from_args(args))
    doc = {
        "color": [float(v) for v in fv.color],
        "texture": dict(zip(("energy", "entropy", "contrast", "homogeneity"), (float(v) for v in fv.texture))),
        "wavelet": dict(zip(SIGNATURE_NAMES, (float(v) for v in fv.wavelet))),
        "orientation": [float(v) for v in fv.orientation],
        "dimension": fv.dimension,
    }
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"dimension   {fv.dimension}")
        print(f"color       {len(fv.color)} bins, {int((fv.color > 0).sum())} non-empty")
        for name, v in doc["texture"].items():
            print(f"{name:<12}{v:.6g}")
        for name, v in doc["wavelet"].items():
            print(f"{name:<12}{v:.6g}")
        print("orientation " + " ".join(f"{v:.3f}" for v in fv.orientation))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handler = {"index": _cmd_index, "query": _cmd_query, "features": _cmd_features}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"cbir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DecodeError, EmptyCatalogError, OSError) as exc:
        print(f"cbir: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"cbir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
