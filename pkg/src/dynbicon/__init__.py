"""dynbicon: fully dynamic biconnectivity.

Maintains an undirected graph under edge insertions and deletions while
answering "are u and v biconnected?" and "which cut vertex nearest u
separates u from v?" queries.  See README.md for the layer map.
"""

from dynbicon.kernels import BACKEND as KERNEL_BACKEND

__all__ = ["KERNEL_BACKEND"]
__version__ = "0.1.0"
