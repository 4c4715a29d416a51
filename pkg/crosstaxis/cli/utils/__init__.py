"""CLI utilities for crosstaxis."""

from .color import print_blue, print_red, print_result
from .timing import TimingMetrics

__all__ = [
    "print_blue",
    "print_red",
    "print_result",
    "TimingMetrics",
]
