"""Pinned run parameters.

``SL_EVEN_BFS_DEPTH`` records, per even rank, a search depth at which every
elementary matrix E_ij(1) was located; the acceptance suite runs at these
depths.
"""

DEFAULT_CAP = 10**6
DEFAULT_BFS_DEPTH = 14
DEFAULT_SEED = 42
DEFAULT_ITERS = 1000
DEFAULT_RANKS = (3, 6)

# W_n has 2^n n! elements; closures of that size are skipped above this rank
MAX_HEAVY_RANK = 6

SL_EVEN_BFS_DEPTH = {4: 14, 6: 20}
