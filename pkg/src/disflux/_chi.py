"""Three-valued indicator of {v < u}, shared by the germ and kinetic modules."""

from __future__ import annotations

import numpy as np


def chi(v, u):
    """1 where v < u, 0 where v > u, exactly 1/2 at v == u (broadcasting)."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.where(v < u, 1.0, np.where(v > u, 0.0, 0.5))
    if out.ndim == 0:
        return float(out)
    return out
