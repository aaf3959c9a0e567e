"""Truncated-precision arithmetic for the Lubin-Tate tower in equal characteristic."""

from .frac_series import INF, FracSeries, PrecisionError, SeriesRing
from .gf_tower import FieldDesc, make_tower

__all__ = ["INF", "FieldDesc", "FracSeries", "PrecisionError", "SeriesRing", "make_tower"]
__version__ = "0.1.0"
