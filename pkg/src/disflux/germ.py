"""Pointwise interface admissibility for the vanishing-viscosity coupling.

An interface state is a triple (u_minus, u_plus, u_hat) together with the
one-sided flux maps A_minus, A_plus.  Admissibility requires the stationary
flux-continuity condition A_plus(u_plus) = A_minus(u_minus) and a family of
Kruzkov-type inequalities, organised in two cases by the ordering of the
traces and three subcases each by the position of the connection value.

Every inequality below is kept in the form derived directly from the c-swept
interface entropy inequality, without substituting flux continuity, so the
checks degrade gracefully when the residual is at the tolerance rather than
exactly zero.  Writing L = A_minus(u_minus) + A_plus(u_plus):

Case 1 (u_plus <= u_minus)
  1a (u_minus <= u_hat):  (i)  c in (u_minus, u_hat):
                               2*(A_plus(c) - A_minus(c)) <= A_plus(u_plus) - A_minus(u_minus)
                          (ii) c in (u_plus, u_minus):  2*A_plus(c) <= L
  1b (u_plus <= u_hat <= u_minus):
                          (iii) c in (u_hat, u_minus):  2*A_minus(c) <= L
                          (iv)  c in (u_plus, u_hat):   2*A_plus(c) <= L
  1c (u_hat <= u_plus):   (v)  c in (u_plus, u_minus):  2*A_minus(c) <= L
                          (vi) c in (u_hat, u_plus):
                               2*(A_minus(c) - A_plus(c)) <= A_minus(u_minus) - A_plus(u_plus)

Case 2 (u_minus <= u_plus) is the mirrored list (2a(i))-(2c(vi)), written out
explicitly below.  A subcase applies whenever its ordering holds with closed
comparisons; an implication whose open c-interval is empty is vacuous, and at
ties every applying subcase must hold (continuity convention).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._chi import chi
from .errors import MismatchedInterface
from .fluxmodel import FluxModel
from .kernels import level_crossings

DEFAULT_TOL = 1e-12
DEFAULT_TOL_RH = 1e-9


@dataclass
class GermState:
    u_minus: float
    u_plus: float
    u_hat: float
    a_minus: Callable
    a_plus: Callable
    lo: float = -2.0
    hi: float = 2.0


@dataclass
class GermReport:
    rh_residual: float
    admissible: bool
    violated_conditions: list = field(default_factory=list)  # (condition id, margin)
    q_value: float = 0.0


def germ_state(model: FluxModel, interface_index: int,
               u_minus: float, u_plus: float, u_hat: float) -> GermState:
    """Interface state bound to a model interface's one-sided fluxes."""
    return GermState(
        u_minus=float(u_minus), u_plus=float(u_plus), u_hat=float(u_hat),
        a_minus=model.one_sided_flux(interface_index, "left"),
        a_plus=model.one_sided_flux(interface_index, "right"),
        lo=model.box.lo, hi=model.box.hi,
    )


def rh_residual(s: GermState) -> float:
    """|A_plus(u_plus) - A_minus(u_minus)| at a stationary interface."""
    return abs(float(s.a_plus(s.u_plus)) - float(s.a_minus(s.u_minus)))


def _condition_margins(um, up, uh, a_minus, a_plus, c_grid):
    """Worst margin of every applying inequality, vectorized over u_hat.

    um, up are scalars, uh an array of candidate connection values.  Returns
    (ids, margins) with margins shaped (n_conditions, len(uh)); rows for
    non-applying or vacuous conditions carry -inf.
    """
    uh = np.atleast_1d(np.asarray(uh, dtype=float))
    t = np.linspace(0.0, 1.0, c_grid)
    L = float(a_minus(um)) + float(a_plus(up))
    d_rh = float(a_plus(up)) - float(a_minus(um))

    def span(lo, hi):
        lo = np.broadcast_to(np.asarray(lo, dtype=float), uh.shape)
        hi = np.broadcast_to(np.asarray(hi, dtype=float), uh.shape)
        return lo[:, None] + (hi - lo)[:, None] * t[None, :], (hi - lo) > 0.0

    def margin(cvals, nonvacuous, applies, expr):
        vals = np.max(expr(cvals), axis=1)
        return np.where(applies & nonvacuous, vals, -np.inf)

    case1 = up <= um
    case2 = um <= up
    rows = []

    # Case 1
    c, nv = span(um, uh)
    rows.append(("case1a(i)", margin(c, nv, case1 & (uh >= um),
                 lambda c: 2.0 * (a_plus(c) - a_minus(c)) - d_rh)))
    c, nv = span(up, um)
    rows.append(("case1a(ii)", margin(c, nv, case1 & (uh >= um),
                 lambda c: 2.0 * a_plus(c) - L)))
    c, nv = span(uh, um)
    rows.append(("case1b(iii)", margin(c, nv, case1 & (uh >= up) & (uh <= um),
                 lambda c: 2.0 * a_minus(c) - L)))
    c, nv = span(up, uh)
    rows.append(("case1b(iv)", margin(c, nv, case1 & (uh >= up) & (uh <= um),
                 lambda c: 2.0 * a_plus(c) - L)))
    c, nv = span(up, um)
    rows.append(("case1c(v)", margin(c, nv, case1 & (uh <= up),
                 lambda c: 2.0 * a_minus(c) - L)))
    c, nv = span(uh, up)
    rows.append(("case1c(vi)", margin(c, nv, case1 & (uh <= up),
                 lambda c: 2.0 * (a_minus(c) - a_plus(c)) + d_rh)))

    # Case 2 (explicit, not generated by reflection)
    c, nv = span(up, uh)
    rows.append(("case2a(i)", margin(c, nv, case2 & (uh >= up),
                 lambda c: 2.0 * (a_plus(c) - a_minus(c)) - d_rh)))
    c, nv = span(um, up)
    rows.append(("case2a(ii)", margin(c, nv, case2 & (uh >= up),
                 lambda c: L - 2.0 * a_minus(c))))
    c, nv = span(uh, up)
    rows.append(("case2b(iii)", margin(c, nv, case2 & (uh >= um) & (uh <= up),
                 lambda c: L - 2.0 * a_plus(c))))
    c, nv = span(um, uh)
    rows.append(("case2b(iv)", margin(c, nv, case2 & (uh >= um) & (uh <= up),
                 lambda c: L - 2.0 * a_minus(c))))
    c, nv = span(um, up)
    rows.append(("case2c(v)", margin(c, nv, case2 & (uh <= um),
                 lambda c: L - 2.0 * a_plus(c))))
    c, nv = span(uh, um)
    rows.append(("case2c(vi)", margin(c, nv, case2 & (uh <= um),
                 lambda c: 2.0 * (a_minus(c) - a_plus(c)) + d_rh)))

    ids = [r[0] for r in rows]
    margins = np.stack([r[1] for r in rows], axis=0)
    return ids, margins


def admissible_mask(um, up, uh_values, a_minus, a_plus,
                    c_grid: int = 64, tol: float = DEFAULT_TOL,
                    tol_rh: float = DEFAULT_TOL_RH) -> np.ndarray:
    """Boolean admissibility per candidate connection value (vectorized)."""
    rh = abs(float(a_plus(up)) - float(a_minus(um)))
    uh_values = np.atleast_1d(np.asarray(uh_values, dtype=float))
    if rh > tol_rh:
        return np.zeros(uh_values.shape, dtype=bool)
    _, margins = _condition_margins(um, up, uh_values, a_minus, a_plus, c_grid)
    return np.all(margins <= tol, axis=0)


def is_admissible(s: GermState, c_grid: int = 64, tol: float = DEFAULT_TOL,
                  tol_rh: float = DEFAULT_TOL_RH) -> GermReport:
    """Full admissibility verdict with per-condition worst margins."""
    if c_grid < 64:
        c_grid = 64
    rh = rh_residual(s)
    ids, margins = _condition_margins(s.u_minus, s.u_plus, np.array([s.u_hat]),
                                      s.a_minus, s.a_plus, c_grid)
    m = margins[:, 0]
    violated = sorted(
        ((ids[i], float(m[i])) for i in range(len(ids)) if m[i] > tol),
        key=lambda r: -r[1],
    )
    if rh > tol_rh:
        violated.insert(0, ("flux-continuity", rh))
    q = q_value(s.u_minus, s.u_plus, s.u_hat, s.a_minus, s.a_plus)
    return GermReport(rh_residual=rh, admissible=not violated,
                      violated_conditions=violated, q_value=q)


def worst_margin(um, up, uh, a_minus, a_plus, c_grid: int = 64) -> float:
    """Largest inequality violation over all applying conditions (no RH gate)."""
    _, margins = _condition_margins(um, up, np.array([float(uh)]), a_minus, a_plus, c_grid)
    m = margins[:, 0]
    finite = m[np.isfinite(m)]
    return float(np.max(finite)) if finite.size else 0.0


def find_connections(u_minus, u_plus, a_minus, a_plus, lo, hi,
                     candidate_grid: int = 128, c_grid: int = 64,
                     tol: float = DEFAULT_TOL, tol_rh: float = DEFAULT_TOL_RH) -> np.ndarray:
    """All grid candidates u_hat in [lo, hi] passing the admissibility check."""
    if candidate_grid < 128:
        candidate_grid = 128
    cand = np.unique(np.concatenate([
        np.linspace(lo, hi, candidate_grid), [float(u_minus), float(u_plus)]]))
    ok = admissible_mask(u_minus, u_plus, cand, a_minus, a_plus,
                         c_grid=c_grid, tol=tol, tol_rh=tol_rh)
    return cand[ok]


def q_value(u_minus, u_plus, u_hat, a_minus, a_plus):
    """Single-state interface dissipation combination (vectorizes over arrays).

    Eight flux terms weighted by the three-valued indicator; vanishes when the
    traces coincide and whenever the two one-sided fluxes agree pointwise.
    """
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    uh = np.asarray(u_hat, dtype=float)
    out = (chi(um, up) * a_plus(um)
           + chi(up, um) * a_plus(up)
           - chi(up, um) * a_minus(up)
           - chi(um, up) * a_minus(um)
           - chi(up, uh) * a_plus(up)
           + chi(up, uh) * a_minus(up)
           - chi(um, uh) * a_plus(um)
           + chi(um, uh) * a_minus(um))
    return float(out) if np.ndim(out) == 0 else out


def _same_interface(s1: GermState, s2: GermState, tol: float = 1e-12) -> bool:
    pts = np.linspace(min(s1.lo, s2.lo), max(s1.hi, s2.hi), 9)
    dm = np.max(np.abs(np.asarray(s1.a_minus(pts)) - np.asarray(s2.a_minus(pts))))
    dp = np.max(np.abs(np.asarray(s1.a_plus(pts)) - np.asarray(s2.a_plus(pts))))
    return bool(dm <= tol and dp <= tol)


def w_value(s1: GermState, s2: GermState) -> float:
    """Two-state interface interaction term; nonpositive on admissible pairs."""
    if not _same_interface(s1, s2):
        raise MismatchedInterface("germ states carry different one-sided fluxes")
    ap = s1.a_plus
    return float(
        ap(s1.u_plus) * (-2.0 * chi(s1.u_plus, s2.u_plus) + 2.0 * chi(s1.u_minus, s2.u_minus))
        + ap(s2.u_plus) * (-2.0 * chi(s2.u_plus, s1.u_plus) + 2.0 * chi(s2.u_minus, s1.u_minus))
    )


@dataclass
class WSweepReport:
    max_w: float
    violations: int
    n_pairs: int
    n_states: int
    q_min: float
    q_max: float
    q_mean: float


def sample_admissible_states(model: FluxModel, interface_index: int,
                             n_trace_grid: int = 257, candidate_grid: int = 128,
                             c_grid: int = 64, tol_rh: float = DEFAULT_TOL_RH):
    """Bank of admissible (u_minus, u_plus, u_hat) triples at one interface.

    Sweeps u_minus over the state box, solves the flux-continuity level for
    u_plus on the opposite side, and keeps every grid connection value that
    passes the admissibility check.
    """
    a_minus = model.one_sided_flux(interface_index, "left")
    a_plus = model.one_sided_flux(interface_index, "right")
    box = model.box
    um_grid = np.linspace(box.u_min, box.u_max, n_trace_grid)
    bank_m, bank_p, bank_h = [], [], []
    for um in um_grid:
        level = float(a_minus(um))
        for up in level_crossings(a_plus, level, box.lo, box.hi):
            hats = find_connections(um, up, a_minus, a_plus, box.lo, box.hi,
                                    candidate_grid=candidate_grid, c_grid=c_grid,
                                    tol_rh=tol_rh)
            bank_m.extend([um] * len(hats))
            bank_p.extend([up] * len(hats))
            bank_h.extend(hats.tolist())
    return (np.asarray(bank_m), np.asarray(bank_p), np.asarray(bank_h),
            a_minus, a_plus)


def w_sign_sweep(model: FluxModel, interface_index: int, n_samples: int,
                 seed: int = 0, tol: float = DEFAULT_TOL) -> WSweepReport:
    """Sample admissible state pairs and count positive interaction values."""
    if n_samples < 10_000:
        raise ValueError("n_samples must be >= 10^4")
    um, up, uh, a_minus, a_plus = sample_admissible_states(model, interface_index)
    n_states = len(um)
    if n_states == 0:
        return WSweepReport(0.0, 0, 0, 0, 0.0, 0.0, 0.0)
    rng = np.random.Generator(np.random.Philox(seed))
    i1 = rng.integers(0, n_states, n_samples)
    i2 = rng.integers(0, n_states, n_samples)
    ap1 = np.asarray(a_plus(up[i1]))
    ap2 = np.asarray(a_plus(up[i2]))
    w = (ap1 * (-2.0 * chi(up[i1], up[i2]) + 2.0 * chi(um[i1], um[i2]))
         + ap2 * (-2.0 * chi(up[i2], up[i1]) + 2.0 * chi(um[i2], um[i1])))
    q = q_value(um, up, uh, a_minus, a_plus)
    return WSweepReport(
        max_w=float(np.max(w)), violations=int(np.count_nonzero(w > tol)),
        n_pairs=int(n_samples), n_states=n_states,
        q_min=float(np.min(q)), q_max=float(np.max(q)), q_mean=float(np.mean(q)),
    )
