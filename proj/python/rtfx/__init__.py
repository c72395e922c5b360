"""Reachability-typed effects: checker, interpreter, and soundness harness."""

from ._rtfx import check, pretty, run, soundness

__all__ = ["check", "pretty", "run", "soundness"]
