"""Compressed word problems for linear groups: circuits, straight-line
programs, and the reductions between them."""

from __future__ import annotations

__version__ = "0.1.0"
