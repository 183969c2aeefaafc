"""Command-line interface: one module per subcommand, wired into a single parser."""

from typing import Optional, Sequence

from cli import annihilate, common, golden, reconstruct, schema, slices, verify
from core.error_handlers import handle_exception
from core.logger import set_stream_level


def build_parser() -> common.ArgumentParser:
    parser = common.ArgumentParser(prog="annihilator", description="Exact graph annihilators and rational reconstruction")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (annihilate, reconstruct, slices, verify, schema, golden):
        module.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    output = "text"
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "log_level", None):
            set_stream_level(args.log_level.upper())
        cfg = common.load_run_config(args)
        output = cfg.output
        payload, code = args.handler(cfg)
    except Exception as exc:
        return handle_exception(exc, output)
    common.emit(payload, output)
    return code
