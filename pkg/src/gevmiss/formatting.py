"""Shared numeric formatting for CSV and CLI output."""

from __future__ import annotations

__all__ = ["fmt6"]


def fmt6(x) -> str:
    """Render a number with 6 significant digits (stable golden files)."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".6g")
