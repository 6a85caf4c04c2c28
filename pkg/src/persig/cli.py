"""Command line entry point: ``persig <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .complex import boundary_complex, write_off
from .evaluation import ManifestError, run_manifest
from .filtration import PLANE_IDS, build_filtration, dump_filtration
from .fixtures import write_fixture_dataset
from .ingest import ORDERS, IngestConfig, IngestError, dump_voxels, load_sequence
from .metrics import bottleneck, compare
from .persistence import read_bars, reduce, write_bars
from .signature import (SignatureConfig, SignatureFormatError, read_signature,
                        signature_from_barcodes, write_signature)

log = logging.getLogger("persig")


def _add_ingest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--crop-fraction", type=float, default=0.25,
                   help="fraction of the frame height kept, from the bottom (default 0.25)")
    p.add_argument("--threshold", type=int, default=128, help="foreground is pixel > threshold")
    p.add_argument("--order", choices=ORDERS, default="numeric-suffix", help="frame ordering")


def _ingest_cfg(args) -> IngestConfig:
    return IngestConfig(args.crop_fraction, args.threshold, args.order)


def cmd_sign(args) -> int:
    img = load_sequence(args.directory, _ingest_cfg(args))
    if args.dump_voxels:
        dump_voxels(img, args.dump_voxels)
    K = boundary_complex(img)
    if args.dump_off:
        write_off(K, args.dump_off)
    log.info("complex: %d vertices, %d edges, %d triangles", *K.counts())
    cfg = SignatureConfig(args.n)
    bcs = [reduce(build_filtration(K, p), validate=False) for p in PLANE_IDS]
    sig = signature_from_barcodes(bcs, cfg, {"source": str(args.directory), "frames": img.dims[2],
                                             "crop_fraction": args.crop_fraction})
    write_signature(sig, args.output)
    if args.bars_dir:
        d = Path(args.bars_dir)
        d.mkdir(parents=True, exist_ok=True)
        for B in bcs:
            write_bars(B, d / f"{B.plane}.bars")
    if args.figures:
        from .plotting import plot_barcode, plot_signature
        d = Path(args.figures)
        plot_signature(sig, d / "signature.png")
        for B in bcs:
            plot_barcode(B, d / f"barcode_{B.plane}.png")
    return 0


def cmd_bars(args) -> int:
    img = load_sequence(args.directory, _ingest_cfg(args))
    F = build_filtration(boundary_complex(img), args.plane)
    if args.dump_filtration:
        dump_filtration(F, args.dump_filtration)
    B = reduce(F, validate=False)
    write_bars(B, args.output, args.dim)
    if args.plot:
        from .plotting import plot_barcode
        plot_barcode(B if args.dim is None else B.select(args.dim), args.plot)
    return 0


def cmd_compare(args) -> int:
    a, b = read_signature(args.a), read_signature(args.b)
    res = compare(a, b)
    values = res.per_vector if args.metric == "angle" else res.per_vector_cosine
    total = res.total_angle if args.metric == "angle" else res.total_cosine
    for v, x in zip(a.vectors, values):
        print(f"{v.plane}\t{v.dim}\t{x:.10g}")
    print(f"total\t{args.metric}\t{total:.10g}")
    return 0


def cmd_bottleneck(args) -> int:
    A, B = read_bars(args.a), read_bars(args.b)
    d = bottleneck(A.diagram(args.dim), B.diagram(args.dim))
    print(f"{d:.17g}")
    return 0


def cmd_eval(args) -> int:
    rep = run_manifest(args.manifest, jobs=args.jobs)
    Path(args.out).write_text(rep.to_json() + "\n")
    if args.curves:
        rep.write_curves(args.curves)
    if args.figures:
        from .plotting import report_figures
        report_figures(rep, args.figures)
    print(rep.summary())
    return 0


def cmd_fixture(args) -> int:
    m = write_fixture_dataset(args.directory, args.samples, args.seed, args.train)
    print(m)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="persig", description=__doc__)
    ap.add_argument("--version", action="version", version=f"persig {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sign", help="compute the signature of a frame directory")
    p.add_argument("directory")
    p.add_argument("-o", "--output", required=True, help="signature file to write")
    p.add_argument("-n", type=int, default=24, help="number of windows (default 24)")
    _add_ingest_args(p)
    p.add_argument("--bars-dir", help="also write one .bars file per plane here")
    p.add_argument("--dump-voxels", help="write the voxel set as run-length text")
    p.add_argument("--dump-off", help="write the boundary complex as OFF")
    p.add_argument("--figures", help="directory for signature and barcode figures")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("bars", help="barcode of a frame directory for one plane")
    p.add_argument("directory")
    p.add_argument("--plane", choices=PLANE_IDS, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dim", type=int, choices=(0, 1))
    p.add_argument("--plot", help="barcode figure path")
    p.add_argument("--dump-filtration", help="write the filtration as CSV")
    _add_ingest_args(p)
    p.set_defaults(func=cmd_bars)

    p = sub.add_parser("compare", help="compare two signature files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=("angle", "cosine"), default="angle")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two .bars files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--dim", type=int, choices=(0, 1), default=0)
    p.set_defaults(func=cmd_bottleneck)

    p = sub.add_parser("eval", help="run the train/test protocol of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--curves", help="CSV of TP/TN cumulative curves")
    p.add_argument("--figures", help="directory for report figures")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fixture", help="write the synthetic three-class dataset")
    p.add_argument("directory")
    p.add_argument("--samples", type=int, default=6, help="samples per class")
    p.add_argument("--train", type=int, default=4, help="training samples per class and fold")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"persig: manifest error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, SignatureFormatError, OSError, ValueError) as exc:
        print(f"persig: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
