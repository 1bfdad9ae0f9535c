"""File I/O for label images."""

from shiplabel_qi.io.reader import load
from shiplabel_qi.io.writer import save

__all__ = ["load", "save"]
