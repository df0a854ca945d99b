"""Command line entry point: load models, then serve until interrupted."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import uvicorn

from .app import create_app
from .config import ServerConfig
from .inference import load_bundle


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitextserve",
        description=(
            "Serve fill-mask, sentence-embedding, and optional "
            "quality-estimation models over HTTP/JSON. Defaults come from "
            "BITEXTSERVE_* environment variables; flags override them."
        ),
    )
    parser.add_argument("--mlm-model", help="fill-mask model id or local directory")
    parser.add_argument("--embed-model", help="sentence encoder id or local directory")
    parser.add_argument("--qe-model", help="quality-estimation model id or directory")
    parser.add_argument("--host", help="bind address")
    parser.add_argument("--port", type=int, help="bind port")
    parser.add_argument("--max-batch", type=int, help="embedding batch size cap")
    parser.add_argument("--device", help="torch device, e.g. cpu or cuda:0")
    return parser


def config_from_args(argv: Optional[list[str]] = None) -> ServerConfig:
    args = build_parser().parse_args(argv)
    base = ServerConfig.from_env()
    overrides = {
        field: value
        for field, value in (
            ("mlm_model", args.mlm_model),
            ("embed_model", args.embed_model),
            ("qe_model", args.qe_model),
            ("host", args.host),
            ("port", args.port),
            ("max_batch", args.max_batch),
            ("device", args.device),
        )
        if value is not None
    }
    if not overrides:
        return base
    from dataclasses import replace

    return replace(base, **overrides)


def main(argv: Optional[list[str]] = None) -> None:
    try:
        config = config_from_args(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1)
    bundle = load_bundle(config)
    descriptor = bundle.descriptor()
    print(
        f"serving {descriptor['name']} on {config.host}:{config.port} "
        f"(mask sentinel {descriptor['mask_sentinel']!r}, "
        f"dim {descriptor['embedding_dim']}, "
        f"qe {'on' if bundle.quality else 'off'})"
    )
    uvicorn.run(create_app(bundle), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
