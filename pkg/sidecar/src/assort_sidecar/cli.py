"""Launch the sidecar: ``assort-sidecar [--stub] [--port 8008] ...``"""

import argparse

import uvicorn

from assort_sidecar.app import create_app
from assort_sidecar.config import (
    DEFAULT_EMBEDDER,
    DEFAULT_NLI,
    DEFAULT_SUMMARIZER,
    SidecarConfig,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="assort-sidecar", description=__doc__)
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--stub", action="store_true",
                        help="serve deterministic stub models (no downloads)")
    parser.add_argument("--stub-dim", type=int, default=768)
    parser.add_argument("--stub-seed", type=int, default=0)
    parser.add_argument("--embedder", default=DEFAULT_EMBEDDER)
    parser.add_argument("--summarizer", default=DEFAULT_SUMMARIZER)
    parser.add_argument("--nli", default=DEFAULT_NLI)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = SidecarConfig(
        embedder_model=args.embedder,
        summarizer_model=args.summarizer,
        nli_model=args.nli,
        port=args.port,
        stub=args.stub,
        stub_dimension=args.stub_dim,
        stub_seed=args.stub_seed,
        device=args.device,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
