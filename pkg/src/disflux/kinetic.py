"""Kinetic representation: chi fields, entropy pairs, defect measure, commutator.

The lift of a state u is f(x, v) = chi(v, u(x)) on a uniform v-grid.  Two
trajectory-level detectors live here:

* a weak entropy residual for the Kruzkov family S = |u - c|, tested against
  tensor hat functions on 2x2 space-time cell patches.  Cell-edge entropy
  fluxes use truncated-state numerical fluxes F(a max c, b max c) -
  F(a min c, b min c), which keeps the production of monotone-scheme output
  nonpositive up to rounding; at a coefficient jump the allowed production is
  -sign(u_hat - c) * (A_plus(c) - A_minus(c)) per unit time.

* a discrete defect measure.  Writing u^v = min(u, v), the measure density is
  the conservative closure of

      d/dt (u^v)  +  d/dx A(x, u^v)  -  (A_plus(v) - A_minus(v)) chi(v, u_hat) delta_interface,

  assembled with the solver's own flux formulas applied to truncated states,
  so solver output has nonnegative interior values to machine precision.
  The two cells around an interface are merged into one block so the
  interface atom stays co-located with the flux-jump production.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.ndimage import convolve1d

from . import germ as germ_mod
from ._chi import chi
from .errors import (GridTooCoarse, MissingConnection, NotConvex, OutOfBox)
from .fluxmodel import FluxModel
from .kernels import classify_shape
from .solver1d import CellField, Grid1D, Trajectory, coupling_flux, shape_godunov

__all__ = [
    "VGrid", "KineticField", "EntropyPair", "DefectMeasure", "Mollifier",
    "chi", "lift", "vgrid_for_box", "entropy_pair", "kruzkov_eta",
    "entropy_residual", "kruzkov_residual", "kinetic_defect",
    "sign_consistency", "commutator_decay", "mollifier_limit_check",
    "kinetic_l1_distance", "default_slack", "default_tol_neg",
]


# ---------------------------------------------------------------------------
# v-grid and lifts


@dataclass(frozen=True)
class VGrid:
    v_lo: float
    v_hi: float
    n_v: int

    def __post_init__(self):
        if self.n_v < 16:
            raise GridTooCoarse(f"n_v={self.n_v} < 16")

    @property
    def dv(self) -> float:
        return (self.v_hi - self.v_lo) / self.n_v

    @property
    def centers(self) -> np.ndarray:
        return self.v_lo + (np.arange(self.n_v) + 0.5) * self.dv


def vgrid_for_box(box, n_v: int = 128) -> VGrid:
    """v-grid with margin-1 headroom beyond the state box."""
    return VGrid(v_lo=box.u_min - 1.0, v_hi=box.u_max + 1.0, n_v=n_v)


@dataclass
class KineticField:
    grid: Grid1D
    vgrid: VGrid
    values: np.ndarray  # (n_cells, n_v), nonincreasing along v


def lift(u: CellField, vgrid: VGrid) -> KineticField:
    """Lift cell values to f(x, v) = chi(v, u(x)) on the v-grid."""
    vals = np.asarray(u.values, dtype=float)
    if vals.min() < vgrid.v_lo or vals.max() > vgrid.v_hi:
        raise OutOfBox("field values outside the v-grid range")
    f = chi(vgrid.centers[None, :], vals[:, None])
    return KineticField(grid=u.grid, vgrid=vgrid, values=f)


def kinetic_l1_distance(u1: CellField, u2: CellField, vgrid: VGrid) -> float:
    """Cell-summed v-integral of |lift(u1) - lift(u2)|."""
    f1 = lift(u1, vgrid).values
    f2 = lift(u2, vgrid).values
    return float(np.sum(np.abs(f1 - f2)) * u1.grid.dx * vgrid.dv)


# ---------------------------------------------------------------------------
# entropy pairs


def _simpson(fn: Callable, a: float, b: float, step: float) -> float:
    """Composite Simpson of fn over [a, b] with panel width <= step."""
    if b == a:
        return 0.0
    n = max(2, 2 * int(math.ceil(abs(b - a) / (2.0 * step))))
    x = np.linspace(a, b, n + 1)
    y = np.asarray(fn(x), dtype=float)
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


@dataclass
class EntropyPair:
    model: FluxModel
    s: Callable
    ds: Callable
    d2s: Callable
    w_step: float = 1e-3

    def eta(self, x: float, v) -> float | np.ndarray:
        """Entropy flux at position x by quadrature from 0 to v."""
        k = self.model.k_at(x)
        return self._eta_for_k(k, v)

    def eta_trace(self, interface_index: int, side: str, v):
        k = self.model.k_side(interface_index, side)
        return self._eta_for_k(k, v)

    def _eta_for_k(self, k: float, v):
        kernel = self.model.kernel
        fn = lambda w: np.asarray(kernel.deval(k, w)) * np.asarray(self.ds(w))
        if np.ndim(v) == 0:
            return _simpson(fn, 0.0, float(v), self.w_step)
        return np.array([_simpson(fn, 0.0, float(vv), self.w_step) for vv in np.asarray(v)])


def entropy_pair(model: FluxModel, s: Callable, ds: Callable | None = None,
                 d2s: Callable | None = None, w_step: float = 1e-3) -> EntropyPair:
    """Bundle a convex entropy with its quadrature flux; rejects non-convex s."""
    if ds is None:
        h = 1e-6
        ds = lambda w: (np.asarray(s(np.asarray(w) + h)) - np.asarray(s(np.asarray(w) - h))) / (2 * h)
    if d2s is None:
        h = 1e-5
        d2s = lambda w: (np.asarray(s(np.asarray(w) + h)) - 2.0 * np.asarray(s(np.asarray(w)))
                         + np.asarray(s(np.asarray(w) - h))) / h ** 2
    w = np.linspace(model.box.lo, model.box.hi, 1025)
    curv = np.asarray(d2s(w), dtype=float)
    if np.min(curv) < -1e-12:
        j = int(np.argmin(curv))
        raise NotConvex(f"S''({w[j]}) = {curv[j]} < 0")
    return EntropyPair(model=model, s=s, ds=ds, d2s=d2s, w_step=w_step)


def kruzkov_eta(flux_fn: Callable, v, c: float):
    """Closed-form entropy flux for S = |. - c|, normalized to vanish at 0."""
    v = np.asarray(v, dtype=float)
    out = (np.sign(v - c) * (np.asarray(flux_fn(v)) - float(flux_fn(c)))
           + np.sign(c) * (float(flux_fn(0.0)) - float(flux_fn(c))))
    return float(out) if out.ndim == 0 else out


def kruzkov_eta_quadrature(model: FluxModel, x: float, v: float, c: float,
                           w_step: float = 1e-3) -> float:
    """Quadrature route for the Kruzkov entropy flux, split at the kink."""
    k = model.k_at(x)
    kernel = model.kernel
    fn = lambda w: np.asarray(kernel.deval(k, w)) * np.sign(np.asarray(w) - c)
    lo, hi = (0.0, float(v)) if v >= 0 else (float(v), 0.0)
    sgn = 1.0 if v >= 0 else -1.0
    if lo < c < hi:
        return sgn * (_simpson(fn, lo, c, w_step) + _simpson(fn, c, hi, w_step))
    return sgn * _simpson(fn, lo, hi, w_step)


# ---------------------------------------------------------------------------
# trajectory plumbing shared by the detectors


def _slab_spacing(traj: Trajectory) -> float:
    dts = np.diff(traj.times)
    if dts.size == 0:
        raise ValueError("trajectory needs at least two snapshots")
    if np.max(np.abs(dts - dts[0])) > 1e-9 * max(dts[0], 1e-300):
        raise ValueError("trajectory snapshots are not equispaced")
    return float(dts[0])


def _hats_for_slab(traj: Trajectory, n: int, rule) -> np.ndarray:
    n_if = len(traj.grid.interface_edges)
    if n_if == 0:
        return np.zeros(0)
    if callable(rule):
        u = traj.snapshots[n].values
        return np.array([
            float(rule(traj.times[n], i, u[e - 1], u[e]))
            for i, e in enumerate(traj.grid.interface_edges)])
    if rule == "traces":
        if traj.interface_traces.shape[1] != n_if:
            raise MissingConnection("trajectory carries no interface traces")
        return traj.interface_traces[n, :, 2]
    if rule == "search":
        u = traj.snapshots[n].values
        out = np.empty(n_if)
        for i, e in enumerate(traj.grid.interface_edges):
            a_m = traj.model.one_sided_flux(i, "left")
            a_p = traj.model.one_sided_flux(i, "right")
            found = germ_mod.find_connections(u[e - 1], u[e], a_m, a_p,
                                              traj.model.box.lo, traj.model.box.hi,
                                              tol_rh=1e-6)
            if found.size == 0:
                raise MissingConnection(
                    f"no connection value at interface {i}, t={traj.times[n]}")
            out[i] = found[np.argmin(np.abs(found - u[e]))]
        return out
    raise ValueError(f"unknown u_hat rule {rule!r}")


def default_slack(model: FluxModel, grid: Grid1D, dt_slab: float) -> float:
    return 4.0 * (1.0 + model.M) * (grid.dx + dt_slab)


def default_tol_neg(model: FluxModel, grid: Grid1D, vgrid: VGrid) -> float:
    return 4.0 * (grid.dx + vgrid.dv) * (1.0 + model.M)


def _region_shapes(model: FluxModel):
    return [classify_shape(model.kernel, k, model.box.lo, model.box.hi)
            for k in model.k_values]


def _truncated_edge_fluxes(model, grid, u, cvals, shapes, side):
    """Edge fluxes of the truncated states (u op c) with op = max or min.

    u is (n_x,), cvals (C,); returns (C, n_edges).  side is np.maximum or
    np.minimum.  Boundary edges use the copy ghost.
    """
    kernel = model.kernel
    n = grid.n_cells
    U = side(u[None, :], cvals[:, None])
    F = np.empty((len(cvals), n + 1))
    bounds = (0, *grid.interface_edges, n)
    for r in range(len(bounds) - 1):
        j0, j1 = bounds[r], bounds[r + 1]
        shape, theta = shapes[r]
        k = model.k_values[r]
        if j1 - j0 >= 2:
            F[:, j0 + 1:j1] = shape_godunov(kernel, k, shape, theta,
                                            U[:, j0:j1 - 1], U[:, j0 + 1:j1])
    F[:, 0] = kernel.eval(model.k_values[0], U[:, 0])
    F[:, n] = kernel.eval(model.k_values[-1], U[:, -1])
    for i, e in enumerate(grid.interface_edges):
        sl, tl = shapes[i]
        sr, tr = shapes[i + 1]
        F[:, e] = coupling_flux(kernel, model.k_values[i], sl, tl,
                                model.k_values[i + 1], sr, tr,
                                U[:, e - 1], U[:, e])
    return F


# ---------------------------------------------------------------------------
# entropy residual


@dataclass
class ResidualReport:
    values: np.ndarray        # (n_time_nodes, n_interior_edges), max over c
    c_values: np.ndarray
    max_positive: float
    slack: float
    passed: bool
    dt_slab: float
    argmax_c: np.ndarray | None = None  # c attaining the max, same shape as values


def _slab_production(traj, model, cvals, shapes, n, hats):
    """Per-cell Kruzkov production (C, n_x) and interface allowance (C, n_if)."""
    grid = traj.grid
    dt = _slab_spacing(traj)
    u0 = traj.snapshots[n].values
    u1 = traj.snapshots[n + 1].values
    ds = (np.abs(u1[None, :] - cvals[:, None]) - np.abs(u0[None, :] - cvals[:, None]))
    G = (_truncated_edge_fluxes(model, grid, u0, cvals, shapes, np.maximum)
         - _truncated_edge_fluxes(model, grid, u0, cvals, shapes, np.minimum))
    p = grid.dx * ds + dt * (G[:, 1:] - G[:, :-1])
    allow = np.zeros((len(cvals), len(grid.interface_edges)))
    for i in range(len(grid.interface_edges)):
        a_m = model.one_sided_flux(i, "left")
        a_p = model.one_sided_flux(i, "right")
        d_c = np.asarray(a_p(cvals)) - np.asarray(a_m(cvals))
        allow[:, i] = -np.sign(hats[i] - cvals) * d_c
    return p, allow


def kruzkov_residual(traj: Trajectory, model: FluxModel | None = None,
                     c_values: np.ndarray | None = None,
                     u_hat_rule="traces", slack: float | None = None) -> ResidualReport:
    """Weak Kruzkov residual against tensor hats, reduced to its max over c.

    Positive values flag entropy production; admissible trajectories stay at
    or below the stated slack, non-entropic jumps blow up like 1/dx.
    """
    model = model or traj.model
    grid = traj.grid
    dt = _slab_spacing(traj)
    if c_values is None:
        c_values = np.linspace(model.box.lo, model.box.hi, 64)
    c_values = np.asarray(c_values, dtype=float)
    if slack is None:
        slack = default_slack(model, grid, dt)
    shapes = _region_shapes(model)
    n_slabs = len(traj.times) - 1
    n_edges_int = grid.n_cells - 1
    out = np.full((max(n_slabs - 1, 0), n_edges_int), -np.inf)
    arg_c = np.zeros_like(out)

    iface = {e: i for i, e in enumerate(grid.interface_edges)}
    p_prev = allow_prev = None
    norm = 1.0 / (grid.dx * dt)
    for n in range(n_slabs):
        hats = _hats_for_slab(traj, n, u_hat_rule)
        p, allow = _slab_production(traj, model, c_values, shapes, n, hats)
        if p_prev is not None:
            r = 0.25 * (p_prev[:, :-1] + p_prev[:, 1:] + p[:, :-1] + p[:, 1:])
            for e, i in iface.items():
                r[:, e - 1] -= 0.5 * dt * (allow_prev[:, i] + allow[:, i])
            out[n - 1] = np.max(r, axis=0) * norm
            arg_c[n - 1] = c_values[np.argmax(r, axis=0)]
        p_prev, allow_prev = p, allow
    max_pos = float(np.max(out)) if out.size else 0.0
    return ResidualReport(values=out, c_values=c_values, max_positive=max_pos,
                          slack=float(slack), passed=max_pos <= slack, dt_slab=dt,
                          argmax_c=arg_c)


def entropy_residual(traj: Trajectory, pair_or_s, model: FluxModel | None = None,
                     u_hat_rule="traces", slack: float | None = None,
                     n_c: int = 64) -> ResidualReport:
    """Weak residual for a general convex entropy.

    Decomposes S through the Kruzkov family, S(u) = affine(u)
    + (1/2) integral |u - c| S''(c) dc over the extended box, and combines
    the per-c productions with weights S''(c)/2; the affine slope rides on
    the plain flux balance, which is conservative for scheme output.
    """
    model = model or traj.model
    grid = traj.grid
    dt = _slab_spacing(traj)
    if isinstance(pair_or_s, EntropyPair):
        pair = pair_or_s
    else:
        pair = entropy_pair(model, pair_or_s)
    if slack is None:
        slack = default_slack(model, grid, dt)
    cvals = np.linspace(model.box.lo, model.box.hi, n_c)
    wc = np.gradient(cvals)  # trapezoid weights
    s2 = np.asarray(pair.d2s(cvals), dtype=float)
    weights = 0.5 * s2 * wc
    beta = float(pair.ds(model.box.lo)) + float(np.sum(weights))
    shapes = _region_shapes(model)

    n_slabs = len(traj.times) - 1
    out = np.full((max(n_slabs - 1, 0), grid.n_cells - 1), -np.inf)
    iface = {e: i for i, e in enumerate(grid.interface_edges)}
    norm = 1.0 / (grid.dx * dt)
    prev = None
    for n in range(n_slabs):
        hats = _hats_for_slab(traj, n, u_hat_rule)
        p, allow = _slab_production(traj, model, cvals, shapes, n, hats)
        u0 = traj.snapshots[n].values
        u1 = traj.snapshots[n + 1].values
        F = _truncated_edge_fluxes(model, grid, u0, np.array([model.box.lo]),
                                   shapes, np.maximum)[0]
        p_mass = grid.dx * (u1 - u0) + dt * (F[1:] - F[:-1])
        p_s = weights @ p + beta * p_mass
        allow_s = weights @ allow
        if prev is not None:
            p_prev, allow_prev = prev
            r = 0.25 * (p_prev[:-1] + p_prev[1:] + p_s[:-1] + p_s[1:])
            for e, i in iface.items():
                r[e - 1] -= 0.5 * dt * (allow_prev[i] + allow_s[i])
            out[n - 1] = r * norm
        prev = (p_s, allow_s)
    max_pos = float(np.max(out)) if out.size else 0.0
    return ResidualReport(values=out, c_values=cvals, max_positive=max_pos,
                          slack=float(slack), passed=max_pos <= slack, dt_slab=dt)


# ---------------------------------------------------------------------------
# defect measure


@dataclass
class DefectMeasure:
    vgrid: VGrid
    times: np.ndarray
    total_mass: float
    min_value: float
    tol_neg: float
    slab_masses: np.ndarray
    values: np.ndarray | None = None  # (n_slabs, n_x, n_v) densities

    @property
    def passed(self) -> bool:
        return self.min_value >= -self.tol_neg


def kinetic_defect(traj: Trajectory, model: FluxModel | None = None,
                   vgrid: VGrid | None = None, u_hat_rule="traces",
                   tol_neg: float | None = None, keep_values: bool = True) -> DefectMeasure:
    """Discrete defect measure of a trajectory on the (t, x, v) grid."""
    model = model or traj.model
    grid = traj.grid
    if vgrid is None:
        vgrid = vgrid_for_box(model.box)
    if vgrid.n_v < 16:
        raise GridTooCoarse("n_v < 16")
    dt = _slab_spacing(traj)
    if tol_neg is None:
        tol_neg = default_tol_neg(model, grid, vgrid)
    shapes = _region_shapes(model)
    v = vgrid.centers
    lam = dt / grid.dx
    n_slabs = len(traj.times) - 1
    edges = grid.interface_edges
    for a, b in zip(edges, edges[1:]):
        if b - a < 2:
            raise ValueError("interfaces closer than two cells; refine the grid")

    min_val = np.inf
    slab_masses = np.zeros(n_slabs)
    values = np.empty((n_slabs, grid.n_cells, vgrid.n_v)) if keep_values else None
    cell_vol = dt * grid.dx * vgrid.dv
    for n in range(n_slabs):
        u0 = traj.snapshots[n].values
        u1 = traj.snapshots[n + 1].values
        hats = _hats_for_slab(traj, n, u_hat_rule)
        W0 = np.minimum(u0[:, None], v[None, :])
        W1 = np.minimum(u1[:, None], v[None, :])
        H = _truncated_edge_fluxes(model, grid, u0, v, shapes, np.minimum).T  # (n_edges, n_v)
        m = (W1 - W0) / dt + (H[1:, :] - H[:-1, :]) / grid.dx
        for i, e in enumerate(edges):
            a_m = model.one_sided_flux(i, "left")
            a_p = model.one_sided_flux(i, "right")
            atom = -(np.asarray(a_p(v)) - np.asarray(a_m(v))) * chi(v, hats[i])
            block = ((W1[e - 1] - W0[e - 1]) + (W1[e] - W0[e])
                     + lam * (H[e + 1, :] - H[e - 1, :]) + lam * atom)
            m[e - 1] = m[e] = block / (2.0 * dt)
        if keep_values:
            values[n] = m
        slab_masses[n] = float(np.sum(m)) * grid.dx * vgrid.dv
        min_val = min(min_val, float(np.min(m)))
    total_mass = float(np.sum(slab_masses) * dt)
    return DefectMeasure(vgrid=vgrid, times=traj.times, total_mass=total_mass,
                         min_value=float(min_val), tol_neg=float(tol_neg),
                         slab_masses=slab_masses, values=values)


@dataclass
class SignConsistencyReport:
    residual_max: float
    slack: float
    defect_min: float
    tol_neg: float
    residual_ok: bool
    defect_ok: bool

    @property
    def consistent(self) -> bool:
        return self.residual_ok == self.defect_ok


def sign_consistency(traj: Trajectory, model: FluxModel | None = None,
                     vgrid: VGrid | None = None, u_hat_rule="traces",
                     slack: float | None = None, tol_neg: float | None = None,
                     c_values: np.ndarray | None = None) -> SignConsistencyReport:
    """Entropy-residual and defect-positivity detectors must agree."""
    model = model or traj.model
    res = kruzkov_residual(traj, model, c_values=c_values,
                           u_hat_rule=u_hat_rule, slack=slack)
    dm = kinetic_defect(traj, model, vgrid=vgrid, u_hat_rule=u_hat_rule,
                        tol_neg=tol_neg, keep_values=False)
    return SignConsistencyReport(
        residual_max=res.max_positive, slack=res.slack,
        defect_min=dm.min_value, tol_neg=dm.tol_neg,
        residual_ok=res.passed, defect_ok=dm.passed,
    )


# ---------------------------------------------------------------------------
# mollifier machinery


def default_bump() -> Callable:
    """Even polynomial bump (1 - (2w)^2)^2 * 15/8 on [-1/2, 1/2], unit mass."""
    def phi(w):
        w = np.asarray(w, dtype=float)
        out = np.where(np.abs(w) <= 0.5, (15.0 / 8.0) * (1.0 - 4.0 * w ** 2) ** 2, 0.0)
        return out
    return phi


@dataclass
class Mollifier:
    epsilon: float
    shape: Callable = field(default_factory=default_bump)

    def __post_init__(self):
        w = np.linspace(-0.5, 0.5, 20001)
        vals = np.asarray(self.shape(w), dtype=float)
        if np.max(np.abs(vals - vals[::-1])) > 1e-12:
            raise ValueError("mollifier shape is not symmetric")
        mass = float(np.trapezoid(vals, w))
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"mollifier shape mass {mass} != 1")

    def __call__(self, s):
        return np.asarray(self.shape(np.asarray(s) / self.epsilon)) / self.epsilon

    def weights(self, dv: float) -> np.ndarray:
        """Discrete convolution weights on the v-grid, normalized to sum 1."""
        half = int(math.floor(0.5 * self.epsilon / dv))
        if half < 2:
            raise GridTooCoarse(f"epsilon={self.epsilon} < 4*dv={4 * dv}")
        offs = np.arange(-half, half + 1) * dv
        w = self(offs) * dv
        return w / np.sum(w)


def _conv_v(arr: np.ndarray, w: np.ndarray) -> np.ndarray:
    return convolve1d(arr, w, axis=-1, mode="nearest")


def commutator_decay(u: CellField, model: FluxModel, vgrid: VGrid,
                     eps_list: Sequence[float], shape: Callable | None = None) -> np.ndarray:
    """Mass of the mollification commutator per width in eps_list.

    The commutator is the divergence mismatch between mollifying the product
    of the kinetic coefficients with the lift and multiplying the mollified
    lift; its mass decays with the width at the coefficients' modulus of
    continuity.  Widths must decrease and stay above 4 v-cells.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    v = vgrid.centers
    dv = vgrid.dv
    if min(eps_list) < 4.0 * dv * (1.0 - 1e-12):
        raise GridTooCoarse("smallest epsilon below 4 v-cells")
    f = lift(u, vgrid).values                     # (n_x, n_v)
    k_cells = u.grid.cell_coefficients(model)
    a1 = np.asarray(model.kernel.deval(k_cells[:, None], v[None, :]), dtype=float)
    masses = []
    for eps in eps_list:
        w = Mollifier(eps, shape or default_bump()).weights(dv)
        G = a1 * _conv_v(f, w) - _conv_v(a1 * f, w)
        mass = float(np.sum(np.abs(np.diff(G, axis=0))) * dv)
        for i, e in enumerate(u.grid.interface_edges):
            a_m = model.one_sided_flux(i, "left")
            a_p = model.one_sided_flux(i, "right")
            d = np.asarray(a_p(v)) - np.asarray(a_m(v))
            fstar = 0.5 * (f[e - 1] + f[e])
            g = -d * _conv_v(fstar, w) + _conv_v(d * fstar, w)
            mass += float(np.sum(np.abs(np.diff(g))))
        masses.append(mass)
    return np.asarray(masses)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _gl_integral(fn: Callable, a: float, b: float, n_panels: int = 8) -> float:
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    y = np.asarray(fn(x.ravel()), dtype=float).reshape(x.shape)
    return float(np.sum(y * _GL_WEIGHTS[None, :] * half[:, None]))


def mollifier_limit_check(h1: Callable, h2: Callable, u: float, u_hat: float,
                          eps_list: Sequence[float],
                          shape: Callable | None = None) -> np.ndarray:
    """Values of the smoothed pairing that converges to h1(u) h2(u) chi(u, u_hat).

    Computes integral of h1(v) phi_eps(v - u) [(h2 chi(., u_hat)) * phi_eps](v)
    with panel-exact quadrature split at the cut u_hat, per width.
    """
    out = []
    for eps in eps_list:
        phi = Mollifier(float(eps), shape or default_bump())

        def inner(varr):
            flat = np.asarray(varr, dtype=float).ravel()
            res = np.empty(flat.shape)
            for i, vv in enumerate(flat):
                lo = vv - eps / 2.0
                hi = min(vv + eps / 2.0, u_hat)
                res[i] = _gl_integral(
                    lambda w: np.asarray(h2(w)) * phi(vv - w), lo, hi)
            return res.reshape(np.shape(varr))

        kinks = sorted({u - eps / 2.0, u + eps / 2.0,
                        *(p for p in (u_hat - eps / 2.0, u_hat + eps / 2.0, u_hat)
                          if u - eps / 2.0 < p < u + eps / 2.0)})
        total = 0.0
        for a, b in zip(kinks[:-1], kinks[1:]):
            total += _gl_integral(
                lambda vv: np.asarray(h1(vv)) * phi(vv - u) * inner(vv), a, b,
                n_panels=16)
        out.append(total)
    return np.asarray(out)
