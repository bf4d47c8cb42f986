"""xclab: exact-arithmetic experiments on extension complexity.

Everything computes over the rationals; no floating point is involved in
any certified result.
"""

__version__ = "0.1.0"
