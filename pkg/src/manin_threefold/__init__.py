"""Counting rational points of bounded height on a biprojective threefold."""

from __future__ import annotations

__version__ = "0.1.0"
