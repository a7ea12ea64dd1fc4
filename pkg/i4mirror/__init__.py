"""Exact-arithmetic engine for the mirror of a rational elliptic surface with an I4 fibre."""

from .config import _DEVELOP_MODE as DEVELOP_MODE

__all__ = ["DEVELOP_MODE"]

__version__ = "26.10.0"
