"""Command-line tools - subcommand definitions and dispatch."""

from app.tools.commands import build_parser, dispatch

__all__ = ["build_parser", "dispatch"]
