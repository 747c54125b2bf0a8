"""Smooth flux kernels A_hat(k, u) and state-box bookkeeping.

The composite flux of a problem is A(x, u) = A_hat(k(x), u) with a
piecewise-constant coefficient k.  A kernel bundles the closed-form map
(k, u) -> flux together with its u-derivative; both accept numpy arrays
in the u slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class StateBox:
    """Bounds for solution values, extended by a margin for sweeps in v."""

    u_min: float
    u_max: float
    margin: float = 1.0

    def __post_init__(self):
        if not self.u_min < self.u_max:
            raise ValueError(f"u_min={self.u_min} must be < u_max={self.u_max}")

    @property
    def lo(self) -> float:
        return self.u_min - self.margin

    @property
    def hi(self) -> float:
        return self.u_max + self.margin

    def contains(self, u, extended: bool = True) -> bool:
        lo, hi = (self.lo, self.hi) if extended else (self.u_min, self.u_max)
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= lo) and np.all(u <= hi))


@dataclass(frozen=True)
class SmoothFluxKernel:
    """Closed-form flux kernel with its u-derivative.

    eval(k, u) returns the flux, deval(k, u) its derivative in u; both are
    vectorized over u.  descriptor names the family (used by config files).
    """

    descriptor: str
    eval: Callable
    deval: Callable


def burgers_kernel() -> SmoothFluxKernel:
    """Quadratic kernel k*u^2/2 (convex in u, minimum at u=0)."""
    return SmoothFluxKernel(
        descriptor="burgers",
        eval=lambda k, u: 0.5 * k * np.asarray(u, dtype=float) ** 2,
        deval=lambda k, u: k * np.asarray(u, dtype=float),
    )


def lwr_kernel() -> SmoothFluxKernel:
    """Traffic kernel k*u*(1-u) (concave in u, maximum at u=1/2)."""
    return SmoothFluxKernel(
        descriptor="lwr",
        eval=lambda k, u: k * np.asarray(u, dtype=float) * (1.0 - np.asarray(u, dtype=float)),
        deval=lambda k, u: k * (1.0 - 2.0 * np.asarray(u, dtype=float)),
    )


def table_kernel(descriptor: str, eval_fn: Callable, deval_fn: Callable) -> SmoothFluxKernel:
    """User-supplied closed-form kernel."""
    return SmoothFluxKernel(descriptor=descriptor, eval=eval_fn, deval=deval_fn)


BUILTIN_KERNELS = {
    "burgers": burgers_kernel,
    "lwr": lwr_kernel,
}


class KernelShape(Enum):
    CONCAVE = "concave"      # single interior maximum
    CONVEX = "convex"        # single interior minimum
    INCREASING = "increasing"
    DECREASING = "decreasing"
    OTHER = "other"


def _deriv_root(kernel: SmoothFluxKernel, k: float, lo: float, hi: float) -> float:
    """Bisect deval(k, .) to its sign change in [lo, hi]."""
    a, b = float(lo), float(hi)
    fa = float(kernel.deval(k, a))
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = float(kernel.deval(k, m))
        if fa * fm <= 0.0:
            b = m
        else:
            a, fa = m, fm
        if b - a < 1e-15 * max(1.0, abs(a) + abs(b)):
            break
    return 0.5 * (a + b)


def classify_shape(kernel: SmoothFluxKernel, k: float, lo: float, hi: float,
                   n: int = 2049, tol: float = 1e-12):
    """Classify the kernel's u-shape on [lo, hi].

    Returns (shape, theta) where theta is the interior critical point for
    concave/convex shapes and None for monotone ones.
    """
    u = np.linspace(lo, hi, n)
    d = np.asarray(kernel.deval(k, u), dtype=float)
    if np.all(d >= -tol):
        return KernelShape.INCREASING, None
    if np.all(d <= tol):
        return KernelShape.DECREASING, None
    signs = np.sign(np.where(np.abs(d) <= tol, 0.0, d))
    nz = signs[signs != 0.0]
    flips = int(np.count_nonzero(np.diff(nz) != 0.0))
    if flips != 1:
        return KernelShape.OTHER, None
    theta = _deriv_root(kernel, k, lo, hi)
    if nz[0] > 0:
        return KernelShape.CONCAVE, theta
    return KernelShape.CONVEX, theta


def level_crossings(fn: Callable, level: float, lo: float, hi: float, n: int = 2049) -> np.ndarray:
    """All u in [lo, hi] with fn(u) = level, by scan plus bisection."""
    u = np.linspace(lo, hi, n)
    g = np.asarray(fn(u), dtype=float) - level
    roots = []
    for j in range(n - 1):
        a, b, ga, gb = u[j], u[j + 1], g[j], g[j + 1]
        if ga == 0.0:
            roots.append(a)
            continue
        if ga * gb < 0.0:
            for _ in range(100):
                m = 0.5 * (a + b)
                gm = float(fn(m)) - level
                if ga * gm <= 0.0:
                    b, gb = m, gm
                else:
                    a, ga = m, gm
            roots.append(0.5 * (a + b))
    if g[-1] == 0.0:
        roots.append(u[-1])
    if not roots:
        return np.empty(0)
    out = np.array(sorted(roots))
    keep = np.concatenate([[True], np.diff(out) > 1e-10 * max(1.0, hi - lo)])
    return out[keep]
