"""Finite loops as Cayley tables: varieties, permutation groups, words,
Steiner loops and a small model finder."""
from .errors import LoopError
from .loop import CayleyLoop, from_table, load_loop, parse_loop, serialize_loop

__version__ = "0.1.0"

__all__ = ["CayleyLoop", "LoopError", "from_table", "load_loop", "parse_loop", "serialize_loop"]
