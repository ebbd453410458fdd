"""Exact q-series, vector-valued forms and a singular theta lift in signature (2, 1)."""

from .qexact import PrecisionError, QExpansion
from .weil import PlusForm, VVForm, plus_to_vv, vv_to_plus

__version__ = "0.1.0"

__all__ = ["QExpansion", "PrecisionError", "VVForm", "PlusForm", "plus_to_vv", "vv_to_plus"]
