"""Discontinuous composite flux A(x, u) = A_hat(k(x), u) and its structural bounds.

The coefficient k is piecewise constant with finitely many interface points,
so one-sided values at an interface are exact kernel evaluations.  The model
stores a Lipschitz bound M on the u-derivative and the total coefficient-jump
mass sigma (sum over interfaces of the sampled sup_u of the flux jump).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AmbiguousSide, InvalidInterface, OutOfBox, StructuralViolation
from .kernels import SmoothFluxKernel, StateBox, classify_shape

SIGMA_GRID_STEP = 1e-3


@dataclass(frozen=True)
class FluxModel:
    kernel: SmoothFluxKernel
    x_lo: float
    x_hi: float
    interfaces: tuple
    k_values: tuple
    box: StateBox
    M: float
    sigma_mass: float
    interface_sigmas: tuple = field(default=())

    @property
    def n_interfaces(self) -> int:
        return len(self.interfaces)

    def subinterval_index(self, x: float) -> int:
        """Index of the subinterval containing x (x not on an interface)."""
        pos = np.asarray(self.interfaces)
        if pos.size and np.any(pos == x):
            raise AmbiguousSide(f"x={x} lies exactly on an interface")
        return int(np.searchsorted(pos, x))

    def k_at(self, x: float) -> float:
        return self.k_values[self.subinterval_index(x)]

    def k_side(self, interface_index: int, side: str) -> float:
        if not 0 <= interface_index < self.n_interfaces:
            raise InvalidInterface(f"interface index {interface_index} out of range")
        if side == "left":
            return self.k_values[interface_index]
        if side == "right":
            return self.k_values[interface_index + 1]
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def one_sided_flux(self, interface_index: int, side: str) -> Callable:
        """The map u -> A_side(u) at an interface, as a plain callable."""
        k = self.k_side(interface_index, side)
        kernel = self.kernel
        return lambda u: kernel.eval(k, u)

    def flux(self, x: float, u):
        return self.kernel.eval(self.k_at(x), u)


def build_flux_model(kernel: SmoothFluxKernel,
                     domain: Sequence[float],
                     interfaces: Sequence[float],
                     k_values: Sequence[float],
                     box: StateBox,
                     m_override: float | None = None) -> FluxModel:
    """Assemble a FluxModel, computing M and sigma on sampled grids."""
    x_lo, x_hi = float(domain[0]), float(domain[1])
    pos = tuple(float(p) for p in interfaces)
    ks = tuple(float(k) for k in k_values)
    if len(ks) != len(pos) + 1:
        raise ValueError("need one coefficient per subinterval (len(k) == len(interfaces)+1)")
    if any(b <= a for a, b in zip(pos, pos[1:])):
        raise ValueError("interfaces must be strictly increasing")
    if pos and (pos[0] <= x_lo or pos[-1] >= x_hi):
        raise ValueError("interfaces must be interior to the domain")

    u = np.linspace(box.lo, box.hi, 4097)
    m_obs = max(float(np.max(np.abs(kernel.deval(k, u)))) for k in ks)
    M = m_obs if m_override is None else float(m_override)

    ugrid = _sigma_grid(box)
    sigmas = tuple(
        float(np.max(np.abs(kernel.eval(ks[i + 1], ugrid) - kernel.eval(ks[i], ugrid))))
        for i in range(len(pos))
    )
    return FluxModel(kernel=kernel, x_lo=x_lo, x_hi=x_hi, interfaces=pos,
                     k_values=ks, box=box, M=M, sigma_mass=float(sum(sigmas)),
                     interface_sigmas=sigmas)


def _sigma_grid(box: StateBox) -> np.ndarray:
    n = int(np.ceil((box.hi - box.lo) / SIGMA_GRID_STEP)) + 1
    return np.linspace(box.lo, box.hi, n)


def trace_flux(model: FluxModel, interface_index: int, side: str, u):
    """One-sided flux A_side(u) at an interface point."""
    arr = np.asarray(u, dtype=float)
    if not model.box.contains(arr):
        raise OutOfBox(f"u={u} outside extended box [{model.box.lo}, {model.box.hi}]")
    k = model.k_side(interface_index, side)
    out = model.kernel.eval(k, arr)
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out


def dv_flux(model: FluxModel, x: float, u):
    """u-derivative of the flux at position x (off interfaces)."""
    arr = np.asarray(u, dtype=float)
    if not model.box.contains(arr):
        raise OutOfBox(f"u={u} outside extended box")
    k = model.k_at(x)  # raises AmbiguousSide on interfaces
    out = model.kernel.deval(k, arr)
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out


def dv_trace(model: FluxModel, interface_index: int, side: str, u):
    """One-sided u-derivative of the flux at an interface."""
    arr = np.asarray(u, dtype=float)
    if not model.box.contains(arr):
        raise OutOfBox(f"u={u} outside extended box")
    k = model.k_side(interface_index, side)
    out = model.kernel.deval(k, arr)
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out


@dataclass
class StructuralReport:
    M_observed: float
    modulus_table: np.ndarray  # rows (delta, omega(delta)) for the u-derivative
    sigma_mass: float


def check_structural(model: FluxModel, box: StateBox, n_samples: int) -> StructuralReport:
    """Empirically verify the Lipschitz bound and jump-mass bookkeeping.

    Samples the u-derivative on an n_samples grid per coefficient, builds a
    nondecreasing empirical continuity modulus, and recomputes sigma on the
    stored sampling grid.  Raises StructuralViolation on any breach.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    u = np.linspace(box.lo, box.hi, n_samples)
    m_obs = 0.0
    worst = None
    derivs = []
    for k in model.k_values:
        d = np.asarray(model.kernel.deval(k, u), dtype=float)
        derivs.append(d)
        j = int(np.argmax(np.abs(d)))
        if abs(d[j]) > m_obs:
            m_obs = abs(d[j])
            worst = (k, float(u[j]), float(d[j]))
    if m_obs > model.M + 1e-12:
        raise StructuralViolation(
            f"|dv flux|={m_obs} exceeds stored M={model.M} at k={worst[0]}, u={worst[1]}")

    du = (box.hi - box.lo) / (n_samples - 1)
    n_lags = min(n_samples - 1, 64)
    table = np.zeros((n_lags, 2))
    running = 0.0
    for lag in range(1, n_lags + 1):
        w = max(float(np.max(np.abs(d[lag:] - d[:-lag]))) for d in derivs)
        running = max(running, w)
        table[lag - 1] = (lag * du, running)

    ugrid = _sigma_grid(model.box)
    sig = 0.0
    for i in range(model.n_interfaces):
        jump = model.kernel.eval(model.k_values[i + 1], ugrid) - model.kernel.eval(model.k_values[i], ugrid)
        sig += float(np.max(np.abs(jump)))
    if abs(sig - model.sigma_mass) > 1e-12:
        raise StructuralViolation(
            f"recomputed sigma={sig} differs from stored {model.sigma_mass}")
    return StructuralReport(M_observed=m_obs, modulus_table=table, sigma_mass=sig)


@dataclass
class TvChainReport:
    tv_composite: float
    bound: float
    passed: bool


def tv_chain_bound(model: FluxModel, u_field) -> TvChainReport:
    """Total variation of x -> A(x, u(x)) against sigma + M * TV(u).

    u_field is a CellField on a grid aligned with the model's interfaces;
    the composite picks up both the jumps of u and the coefficient jumps.
    """
    grid = u_field.grid
    vals = np.asarray(u_field.values, dtype=float)
    k_cells = grid.cell_coefficients(model)
    w = np.array([model.kernel.eval(k_cells[j], vals[j]) for j in range(len(vals))])
    tv_comp = float(np.sum(np.abs(np.diff(w))))
    tv_u = float(np.sum(np.abs(np.diff(vals))))
    bound = model.sigma_mass + model.M * tv_u
    return TvChainReport(tv_composite=tv_comp, bound=bound,
                         passed=tv_comp <= bound + 1e-9)


def kernel_shapes(model: FluxModel):
    """Shape classification (shape, theta) per subinterval on the extended box."""
    return [classify_shape(model.kernel, k, model.box.lo, model.box.hi)
            for k in model.k_values]
