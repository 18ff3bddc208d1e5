"""Command-line entry point: infer over images or convert COCO annotations."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .coco import convert_annotations
from .config import AdapterConfig
from .errors import AdapterError
from .infer import infer_batch


def _write_documents(pairs, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for image_id, document in pairs:
        path = out_dir / f"{image_id}.json"
        path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
        written += 1
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafangle-adapter",
        description="Emit detection records for the leafangle pipeline",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_infer = sub.add_parser("infer", help="run the models over an image directory")
    p_infer.add_argument("images", help="directory of plant images")
    p_infer.add_argument("-o", "--out", required=True, help="output record directory")
    p_infer.add_argument("--mask-checkpoint", default=None, help="TorchScript mask model")
    p_infer.add_argument("--line-checkpoint", default=None, help="TorchScript line model")
    p_infer.add_argument("--device", default="cpu")
    p_infer.add_argument("--score-floor", type=float, default=0.5)
    p_infer.add_argument(
        "--full-frame-lines",
        action="store_true",
        help="run the line model on the full image instead of the ROI crop",
    )
    p_infer.add_argument("--roi-padding-px", type=int, default=10)
    p_infer.add_argument("--min-component-px", type=int, default=200)

    p_conv = sub.add_parser(
        "convert-annotations", help="convert a COCO annotation file to records"
    )
    p_conv.add_argument("annotations", help="COCO-format JSON file")
    p_conv.add_argument("-o", "--out", required=True, help="output record directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "infer":
            config = AdapterConfig(
                mask_checkpoint=args.mask_checkpoint,
                line_checkpoint=args.line_checkpoint,
                device=args.device,
                score_floor=args.score_floor,
                run_lines_on_roi=not args.full_frame_lines,
                roi_padding_px=args.roi_padding_px,
                min_component_px=args.min_component_px,
            )
            written = _write_documents(infer_batch(args.images, config), Path(args.out))
            print(f"wrote {written} detection records to {args.out}")
            return 0 if written else 2
        if args.command == "convert-annotations":
            written = _write_documents(convert_annotations(args.annotations), Path(args.out))
            print(f"converted {written} records to {args.out}")
            return 0 if written else 2
        raise AssertionError(f"unhandled command {args.command}")
    except (OSError, AdapterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
