"""Pairwise L1-contraction experiments at grid scale.

For two trajectories of the same model on the same grid, the cell-summed L1
distance between snapshots should be nonincreasing in time up to a slack
budget C_slack * dx * T; the kinetic distance (v-integral of the lifted
fields) tracks the macroscopic one within one v-cell per unit length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainTooSmall, GridMismatch
from .kinetic import VGrid, kinetic_l1_distance, vgrid_for_box
from .solver1d import CellField, Trajectory, check_same_grid, padding_speed


def l1_distance(u1: CellField, u2: CellField) -> float:
    """Cell-summed L1 distance between two fields on the same grid."""
    check_same_grid(u1, u2)
    return float(np.sum(np.abs(u1.values - u2.values)) * u1.grid.dx)


@dataclass
class ContractionReport:
    times: np.ndarray
    l1_distances: np.ndarray
    kinetic_distances: np.ndarray
    max_increase: float
    slack_budget: float

    @property
    def verdict(self) -> bool:
        return self.max_increase <= self.slack_budget


def contraction_report(traj1: Trajectory, traj2: Trajectory,
                       c_slack: float | None = None,
                       vgrid: VGrid | None = None) -> ContractionReport:
    """Distance history of a trajectory pair with its slack budget."""
    if traj1.n_snapshots != traj2.n_snapshots or np.max(
            np.abs(traj1.times - traj2.times)) > 1e-12:
        raise GridMismatch("trajectories disagree on snapshot times")
    model = traj1.model
    if vgrid is None:
        vgrid = vgrid_for_box(model.box)
    if c_slack is None:
        c_slack = 4.0 * model.M
    t_final = float(traj1.times[-1])
    dists = np.array([l1_distance(a, b) for a, b in zip(traj1.snapshots, traj2.snapshots)])
    kdists = np.array([kinetic_l1_distance(a, b, vgrid)
                       for a, b in zip(traj1.snapshots, traj2.snapshots)])
    inc = np.diff(dists)
    max_increase = float(np.max(inc)) if inc.size else 0.0
    max_increase = max(max_increase, 0.0)
    return ContractionReport(
        times=traj1.times, l1_distances=dists, kinetic_distances=kdists,
        max_increase=max_increase,
        slack_budget=float(c_slack) * traj1.grid.dx * t_final,
    )


@dataclass
class LocalizedReport:
    radius: float
    speed: float
    lhs: float
    rhs: float
    slack_budget: float

    @property
    def verdict(self) -> bool:
        return self.lhs <= self.rhs + self.slack_budget


def localized_contraction(traj1: Trajectory, traj2: Trajectory, radius: float,
                          center: float | None = None,
                          c_slack: float | None = None) -> LocalizedReport:
    """Ball-localized contraction: the final distance inside a ball is bounded
    by the initial distance inside the ball grown by the propagation cone."""
    if traj1.n_snapshots != traj2.n_snapshots:
        raise GridMismatch("trajectories disagree on snapshot times")
    model = traj1.model
    grid = traj1.grid
    if center is None:
        center = 0.5 * (model.x_lo + model.x_hi)
    if c_slack is None:
        c_slack = 4.0 * model.M
    t_final = float(traj1.times[-1])
    speed = padding_speed(model)
    r_grown = radius + speed * t_final
    if center - r_grown < grid.x_lo or center + r_grown > grid.x_hi:
        raise DomainTooSmall(
            f"ball radius {radius} + speed*T = {r_grown} exceeds the padded domain")
    xc = grid.centers
    inner = np.abs(xc - center) <= radius
    grown = np.abs(xc - center) <= r_grown
    d0 = np.abs(traj1.snapshots[0].values - traj2.snapshots[0].values)
    dT = np.abs(traj1.snapshots[-1].values - traj2.snapshots[-1].values)
    return LocalizedReport(
        radius=float(radius), speed=speed,
        lhs=float(np.sum(dT[inner]) * grid.dx),
        rhs=float(np.sum(d0[grown]) * grid.dx),
        slack_budget=float(c_slack) * grid.dx * t_final,
    )
