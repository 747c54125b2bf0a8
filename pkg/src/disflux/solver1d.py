"""First-order finite-volume evolution with an interface coupling flux.

Inside each constant-coefficient subinterval the scheme uses the exact
Godunov flux (closed envelope formulas for unimodal or monotone kernels).
At a coefficient jump it uses the supply/demand coupling flux that realises
the vanishing-viscosity solution for such kernels:

    concave pair:  min( A_left(min(u_l, theta_l)),  A_right(max(u_r, theta_r)) )
    convex pair:   max( A_left(max(u_l, theta_l)),  A_right(min(u_r, theta_r)) )
    monotone pair: upwind by the common sign

where theta_side is the interior critical point of the one-sided flux.
The connection value recorded with each interface trace is chosen from a
small deterministic candidate set (flux-level branch inversions and the two
traces) by minimizing the interface admissibility margin.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import CflViolation, GridMismatch, UnsupportedKernelShape
from .fluxmodel import FluxModel
from .kernels import KernelShape, classify_shape, level_crossings

CFL_DEFAULT = 0.45


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n_cells: int
    interface_edges: tuple = ()

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_lo + np.arange(self.n_cells + 1) * self.dx

    def cell_coefficients(self, model: FluxModel) -> np.ndarray:
        """Coefficient per cell, constant between interface edges."""
        k = np.empty(self.n_cells)
        bounds = [0, *self.interface_edges, self.n_cells]
        for i in range(len(bounds) - 1):
            k[bounds[i]:bounds[i + 1]] = model.k_values[i]
        return k


def build_grid(model: FluxModel, n_cells: int,
               x_lo: float | None = None, x_hi: float | None = None) -> Grid1D:
    """Uniform grid with every model interface snapped onto a cell edge."""
    x_lo = model.x_lo if x_lo is None else float(x_lo)
    x_hi = model.x_hi if x_hi is None else float(x_hi)
    dx = (x_hi - x_lo) / n_cells
    edges = []
    for p in model.interfaces:
        e = int(round((p - x_lo) / dx))
        if not 1 <= e <= n_cells - 1:
            raise ValueError(f"interface at {p} falls outside the grid interior")
        edges.append(e)
    if len(set(edges)) != len(edges):
        raise ValueError("two interfaces snapped to the same cell edge; refine the grid")
    return Grid1D(x_lo=x_lo, x_hi=x_hi, n_cells=n_cells, interface_edges=tuple(edges))


@dataclass
class CellField:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def copy(self) -> "CellField":
        return CellField(self.grid, self.values.copy(), self.time)


@dataclass
class Trajectory:
    model: FluxModel
    grid: Grid1D
    times: np.ndarray
    snapshots: list
    interface_traces: np.ndarray  # (n_times, n_interfaces, 4): u-, u+, u_hat, flux
    core_domain: tuple | None = None

    @property
    def n_snapshots(self) -> int:
        return len(self.times)

    def values_matrix(self) -> np.ndarray:
        return np.stack([s.values for s in self.snapshots], axis=0)


# ---------------------------------------------------------------------------
# flux evaluation


def shape_godunov(kernel, k: float, shape: KernelShape, theta, a, b):
    """Exact Godunov flux for a classified kernel shape (vectorized)."""
    if shape is KernelShape.CONCAVE:
        return np.minimum(kernel.eval(k, np.minimum(a, theta)),
                          kernel.eval(k, np.maximum(b, theta)))
    if shape is KernelShape.CONVEX:
        return np.maximum(kernel.eval(k, np.maximum(a, theta)),
                          kernel.eval(k, np.minimum(b, theta)))
    if shape is KernelShape.INCREASING:
        return kernel.eval(k, np.asarray(a, dtype=float))
    if shape is KernelShape.DECREASING:
        return kernel.eval(k, np.asarray(b, dtype=float))
    raise UnsupportedKernelShape("kernel is not unimodal or monotone on the box")


def coupling_flux(kernel, k_l, shape_l, theta_l, k_r, shape_r, theta_r, a, b):
    """Interface coupling flux between two one-sided kernels (vectorized)."""
    if shape_l is KernelShape.CONCAVE and shape_r is KernelShape.CONCAVE:
        return np.minimum(kernel.eval(k_l, np.minimum(a, theta_l)),
                          kernel.eval(k_r, np.maximum(b, theta_r)))
    if shape_l is KernelShape.CONVEX and shape_r is KernelShape.CONVEX:
        return np.maximum(kernel.eval(k_l, np.maximum(a, theta_l)),
                          kernel.eval(k_r, np.minimum(b, theta_r)))
    if shape_l is KernelShape.INCREASING and shape_r is KernelShape.INCREASING:
        return kernel.eval(k_l, np.asarray(a, dtype=float))
    if shape_l is KernelShape.DECREASING and shape_r is KernelShape.DECREASING:
        return kernel.eval(k_r, np.asarray(b, dtype=float))
    raise UnsupportedKernelShape(
        f"unsupported side shapes ({shape_l.value}, {shape_r.value}) at an interface")


def godunov_flux(flux_fn: Callable, u_l: float, u_r: float,
                 dflux_fn: Callable | None = None) -> float:
    """Godunov flux of a scalar flux function between two states.

    min of the flux over [u_l, u_r] when u_l <= u_r, max over [u_r, u_l]
    otherwise.  Interior extrema are located by a derivative-root scan when
    the derivative is supplied, by a dense value scan otherwise.
    """
    lo, hi = (u_l, u_r) if u_l <= u_r else (u_r, u_l)
    cands = [lo, hi]
    if hi > lo:
        if dflux_fn is not None:
            cands.extend(level_crossings(dflux_fn, 0.0, lo, hi, n=257).tolist())
        else:
            cands.extend(np.linspace(lo, hi, 2049).tolist())
    vals = [float(flux_fn(c)) for c in cands]
    return min(vals) if u_l <= u_r else max(vals)


@dataclass(frozen=True)
class _InterfaceInfo:
    edge: int
    k_l: float
    k_r: float
    shape_l: KernelShape
    theta_l: float | None
    shape_r: KernelShape
    theta_r: float | None


@dataclass(frozen=True)
class _Context:
    model: FluxModel
    grid: Grid1D
    region_bounds: tuple      # cell index boundaries, len = n_regions + 1
    shapes: tuple             # (shape, theta) per region
    interfaces: tuple         # _InterfaceInfo per interface


@functools.lru_cache(maxsize=128)
def _context(model: FluxModel, grid: Grid1D) -> _Context:
    shapes = tuple(classify_shape(model.kernel, k, model.box.lo, model.box.hi)
                   for k in model.k_values)
    for shape, _ in shapes:
        if shape is KernelShape.OTHER:
            raise UnsupportedKernelShape("kernel is not unimodal or monotone on the box")
    bounds = (0, *grid.interface_edges, grid.n_cells)
    infos = []
    for i, e in enumerate(grid.interface_edges):
        sl, tl = shapes[i]
        sr, tr = shapes[i + 1]
        infos.append(_InterfaceInfo(edge=e, k_l=model.k_values[i], k_r=model.k_values[i + 1],
                                    shape_l=sl, theta_l=tl, shape_r=sr, theta_r=tr))
    return _Context(model=model, grid=grid, region_bounds=bounds,
                    shapes=shapes, interfaces=tuple(infos))


def edge_fluxes(model: FluxModel, grid: Grid1D, u: np.ndarray) -> np.ndarray:
    """All cell-edge fluxes for one field, copy (outflow) ghost cells."""
    ctx = _context(model, grid)
    kernel = model.kernel
    n = grid.n_cells
    F = np.empty(n + 1)
    bounds = ctx.region_bounds
    for r in range(len(bounds) - 1):
        j0, j1 = bounds[r], bounds[r + 1]
        shape, theta = ctx.shapes[r]
        k = model.k_values[r]
        if j1 - j0 >= 2:
            F[j0 + 1:j1] = shape_godunov(kernel, k, shape, theta, u[j0:j1 - 1], u[j0 + 1:j1])
    F[0] = float(kernel.eval(model.k_values[0], u[0]))
    F[n] = float(kernel.eval(model.k_values[-1], u[-1]))
    for info in ctx.interfaces:
        e = info.edge
        F[e] = float(coupling_flux(kernel, info.k_l, info.shape_l, info.theta_l,
                                   info.k_r, info.shape_r, info.theta_r,
                                   u[e - 1], u[e]))
    return F


def interface_flux(model: FluxModel, interface_index: int, u_l: float, u_r: float):
    """Coupling flux and a connection value for one interface state pair.

    The connection value is picked from the branch inversions of both
    one-sided fluxes at the flux level plus the two traces themselves, by
    smallest admissibility margin, ties broken toward u_r.
    """
    shapes = [classify_shape(model.kernel, k, model.box.lo, model.box.hi)
              for k in (model.k_side(interface_index, "left"),
                        model.k_side(interface_index, "right"))]
    k_l = model.k_side(interface_index, "left")
    k_r = model.k_side(interface_index, "right")
    (sl, tl), (sr, tr) = shapes
    phi = float(coupling_flux(model.kernel, k_l, sl, tl, k_r, sr, tr, u_l, u_r))
    u_hat = _select_connection(model, interface_index, u_l, u_r, phi)
    return phi, u_hat


def _select_connection(model: FluxModel, interface_index: int,
                       u_l: float, u_r: float, phi: float) -> float:
    """Deterministic connection value for a trace pair.

    Candidates are the flux-level branch inversions of both one-sided fluxes
    plus the traces themselves.  They are ranked by the worst negativity of
    the pointwise interface defect

        g(v) = A_plus(min(v, u_r)) - A_minus(min(v, u_l))
               - (A_plus(v) - A_minus(v)) * chi(v, u_hat),

    which vanishes exactly on admissible configurations; ties go to the
    candidate whose atom loads the least positive flux-jump mass, then to the
    one nearest u_r.
    """
    from ._chi import chi

    a_minus = model.one_sided_flux(interface_index, "left")
    a_plus = model.one_sided_flux(interface_index, "right")
    lo, hi = model.box.lo, model.box.hi
    cands = {float(u_l), float(u_r)}
    for fn in (a_minus, a_plus):
        cands.update(float(c) for c in level_crossings(fn, phi, lo, hi, n=257))
    v = np.linspace(lo, hi, 1025)
    face = np.asarray(a_plus(np.minimum(v, u_r))) - np.asarray(a_minus(np.minimum(v, u_l)))
    d = np.asarray(a_plus(v)) - np.asarray(a_minus(v))
    dv = v[1] - v[0]

    def score(c):
        g = face - d * chi(v, c)
        neg = float(np.maximum(-g, 0.0).max())
        atom_mass = float(np.sum(np.maximum(d, 0.0) * (v < c)) * dv)
        return (round(neg, 12), round(atom_mass, 12), abs(c - u_r), c)

    return min(cands, key=score)


# ---------------------------------------------------------------------------
# time stepping


def max_wave_speed(model: FluxModel) -> float:
    return max(model.M, 1e-300)


def cfl_limit(model: FluxModel, grid: Grid1D, cfl: float = CFL_DEFAULT) -> float:
    return cfl * grid.dx / max_wave_speed(model)


def step(model: FluxModel, u_field: CellField, dt: float, cfl: float = CFL_DEFAULT) -> CellField:
    """One conservative explicit update; raises CflViolation past the bound."""
    grid = u_field.grid
    if dt > cfl_limit(model, grid, cfl) * (1.0 + 1e-12):
        raise CflViolation(f"dt={dt} exceeds {cfl}*dx/M={cfl_limit(model, grid, cfl)}")
    F = edge_fluxes(model, grid, u_field.values)
    new = u_field.values - (dt / grid.dx) * (F[1:] - F[:-1])
    return CellField(grid, new, u_field.time + dt)


def _record_traces(model, grid, u, memo):
    rows = []
    for idx, e in enumerate(grid.interface_edges):
        key = (idx, round(float(u[e - 1]), 13), round(float(u[e]), 13))
        if key not in memo:
            memo[key] = interface_flux(model, idx, float(u[e - 1]), float(u[e]))
        phi, u_hat = memo[key]
        rows.append((float(u[e - 1]), float(u[e]), u_hat, phi))
    return rows


def _march(model, grid, u0, t_final, n_snapshots, cfl):
    """Shared time-marching loop returning (times, snapshots, traces)."""
    dt_max = cfl_limit(model, grid, cfl)
    if n_snapshots <= 1:
        n_steps = max(1, int(math.ceil(t_final / dt_max)))
        steps_per_snap, n_snap = 1, n_steps + 1
    else:
        seg = t_final / (n_snapshots - 1)
        steps_per_snap = max(1, int(math.ceil(seg / dt_max)))
        n_snap = n_snapshots
        n_steps = steps_per_snap * (n_snapshots - 1)
    dt = t_final / n_steps if n_steps else 0.0

    memo: dict = {}
    u = CellField(grid, np.asarray(u0, dtype=float).copy(), 0.0)
    times = [0.0]
    snaps = [u.copy()]
    traces = [_record_traces(model, grid, u.values, memo)]
    for s in range(n_snap - 1):
        for _ in range(steps_per_snap):
            u = step(model, u, dt, cfl)
        u.time = (s + 1) * steps_per_snap * dt
        times.append(u.time)
        snaps.append(u.copy())
        traces.append(_record_traces(model, grid, u.values, memo))
    tr = (np.asarray(traces, dtype=float) if traces[0]
          else np.zeros((n_snap, 0, 4)))
    return np.asarray(times), snaps, tr


def run(config) -> Trajectory:
    """Evolve the configured problem on a padded domain and collect traces."""
    model = config.build_model()
    base_dx = (model.x_hi - model.x_lo) / config.n_cells
    speed = padding_speed(model)
    pad_cells = int(math.ceil(speed * config.t_final / base_dx)) + 2
    grid = build_grid(model, config.n_cells + 2 * pad_cells,
                      x_lo=model.x_lo - pad_cells * base_dx,
                      x_hi=model.x_hi + pad_cells * base_dx)
    u0 = config.initial_values(grid.centers)
    times, snaps, traces = _march(model, grid, u0, config.t_final,
                                  config.n_snapshots, config.cfl)
    return Trajectory(model=model, grid=grid, times=times, snapshots=snaps,
                      interface_traces=traces, core_domain=(model.x_lo, model.x_hi))


def padding_speed(model: FluxModel) -> float:
    """Domain padding speed: max of the derivative bound and sup |A|."""
    u = np.linspace(model.box.lo, model.box.hi, 2049)
    sup_a = max(float(np.max(np.abs(model.kernel.eval(k, u)))) for k in model.k_values)
    return max(model.M, sup_a)


def sampled_trajectory(model: FluxModel, grid: Grid1D, times: Sequence[float],
                       fn: Callable) -> Trajectory:
    """Trajectory built by sampling a closed-form u(t, x) at cell centers."""
    xc = grid.centers
    snaps = [CellField(grid, np.asarray(fn(t, xc), dtype=float), float(t)) for t in times]
    memo: dict = {}
    traces = [_record_traces(model, grid, s.values, memo) for s in snaps]
    tr = np.asarray(traces, dtype=float) if traces and traces[0] else np.zeros((len(snaps), 0, 4))
    return Trajectory(model=model, grid=grid, times=np.asarray(times, dtype=float),
                      snapshots=snaps, interface_traces=tr)


# ---------------------------------------------------------------------------
# viscous reference solver


def viscous_reference(config, eps_visc: float) -> Trajectory:
    """Independent reference: regularized coefficient plus explicit convection
    and implicit diffusion.

    The coefficient ramps linearly across 4 cells around each interface, the
    convection flux is a global Lax-Friedrichs split with speed M, and the
    diffusion solve is a tridiagonal system per step.
    """
    model = config.build_model()
    base_dx = (model.x_hi - model.x_lo) / config.n_cells
    if eps_visc < 2.0 * model.M * base_dx * (1.0 - 1e-12):
        raise CflViolation(f"eps_visc={eps_visc} below stability bound 2*M*dx")
    speed = padding_speed(model)
    pad_cells = int(math.ceil(speed * config.t_final / base_dx)) + 2
    grid = build_grid(model, config.n_cells + 2 * pad_cells,
                      x_lo=model.x_lo - pad_cells * base_dx,
                      x_hi=model.x_hi + pad_cells * base_dx)
    xc = grid.centers
    k_cells = grid.cell_coefficients(model).copy()
    for i, e in enumerate(grid.interface_edges):
        x_e = grid.x_lo + e * grid.dx
        w = np.clip((xc - (x_e - 2 * grid.dx)) / (4 * grid.dx), 0.0, 1.0)
        ramp_zone = np.abs(xc - x_e) <= 2 * grid.dx
        k_cells[ramp_zone] = (model.k_values[i]
                              + (model.k_values[i + 1] - model.k_values[i]) * w[ramp_zone])

    kernel, M, dx = model.kernel, model.M, grid.dx
    dt_max = min(config.cfl * dx / max_wave_speed(model), config.t_final)
    n_snap = config.n_snapshots if config.n_snapshots > 1 else 2
    seg = config.t_final / (n_snap - 1)
    steps_per_snap = max(1, int(math.ceil(seg / dt_max)))
    n_steps = steps_per_snap * (n_snap - 1)
    dt = config.t_final / n_steps

    r = eps_visc * dt / dx ** 2
    n = grid.n_cells
    ab = np.zeros((3, n))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[1, 0] = ab[1, -1] = 1.0 + r
    ab[2, :-1] = -r

    def conv_step(u):
        A = kernel.eval(k_cells, u)
        F = np.empty(n + 1)
        F[1:-1] = 0.5 * (A[:-1] + A[1:]) - 0.5 * M * (u[1:] - u[:-1])
        F[0], F[-1] = A[0], A[-1]
        return u - (dt / dx) * (F[1:] - F[:-1])

    u = np.asarray(config.initial_values(xc), dtype=float)
    times = [0.0]
    snaps = [CellField(grid, u.copy(), 0.0)]
    offset = 3
    traces0 = _viscous_traces(model, grid, u, offset)
    traces = [traces0]
    t = 0.0
    for s in range(n_snap - 1):
        for _ in range(steps_per_snap):
            u = solve_banded((1, 1), ab, conv_step(u))
            t += dt
        times.append(t)
        snaps.append(CellField(grid, u.copy(), t))
        traces.append(_viscous_traces(model, grid, u, offset))
    tr = np.asarray(traces, dtype=float) if traces[0] else np.zeros((n_snap, 0, 4))
    return Trajectory(model=model, grid=grid, times=np.asarray(times), snapshots=snaps,
                      interface_traces=tr, core_domain=(model.x_lo, model.x_hi))


def _viscous_traces(model, grid, u, offset):
    rows = []
    for idx, e in enumerate(grid.interface_edges):
        u_l, u_r = float(u[e - offset]), float(u[e + offset - 1])
        phi, u_hat = interface_flux(model, idx, u_l, u_r)
        rows.append((u_l, u_r, u_hat, phi))
    return rows


def l1_norm(field: CellField) -> float:
    return float(np.sum(np.abs(field.values)) * field.grid.dx)


def check_same_grid(a: CellField, b: CellField):
    if (a.grid.n_cells != b.grid.n_cells or a.grid.x_lo != b.grid.x_lo
            or a.grid.x_hi != b.grid.x_hi):
        raise GridMismatch("fields live on different grids")
