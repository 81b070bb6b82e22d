"""``extract`` command: image set in, AGF1 matrix out.

Exit codes: 0 success, 1 usage error, 2 input/data error, 3 backend
unavailable (missing runtime or pretrained weights).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from agf_extractor.extractor import (
    BackendUnavailableError,
    ExtractorConfig,
    ExtractorError,
    extract,
    read_header,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BACKEND = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is taken by input errors here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="extract",
                     description="Export one AGF1 row per image from a "
                                 "manifest or image directory.")
    parser.add_argument("--backend", required=True,
                        choices=["stub", "classifier", "pretrained-classifier"],
                        help="stub: seeded histogram projection, no model; "
                             "classifier: pretrained Inception v3")
    parser.add_argument("--kind", required=True,
                        choices=["features", "probabilities"],
                        help="features feed FID/MMD/EMD/1-NN, probabilities "
                             "feed IS/Mode")
    parser.add_argument("--input", required=True, type=Path,
                        help="manifest JSON or directory of PNGs")
    parser.add_argument("--out", required=True, type=Path,
                        help="AGF1 file to write")
    parser.add_argument("--seed", type=int, default=0,
                        help="stub backend seed (default 0)")
    parser.add_argument("--dims", type=int, default=None,
                        help="stub row width (default 8 features / "
                             "10 probabilities)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = ExtractorConfig(backend=args.backend, input=args.input,
                                 output=args.out, kind=args.kind,
                                 stub_seed=args.seed, dims=args.dims)
        written = extract(config)
        kind, rows, dims = read_header(written)
        print(json.dumps({"out": str(written), "kind": kind,
                          "rows": rows, "dims": dims}))
        return EXIT_OK
    except BackendUnavailableError as exc:
        print(f"extract: backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ExtractorError as exc:
        print(f"extract: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"extract: I/O error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
