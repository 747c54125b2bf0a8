"""1D scalar conservation laws with space-discontinuous flux.

Finite-volume evolution with a vanishing-viscosity interface coupling, plus
the admissibility machinery: interface germ checks, kinetic defect measure,
entropy residuals, interaction/dissipation functionals and L1-contraction
experiments.
"""

__version__ = "0.1.0"

from ._chi import chi
from .contraction import (ContractionReport, LocalizedReport,
                          contraction_report, l1_distance, localized_contraction)
from .config import InitialData, ProblemConfig, parse_config
from .fluxmodel import (FluxModel, StructuralReport, TvChainReport,
                        build_flux_model, check_structural, dv_flux, dv_trace,
                        trace_flux, tv_chain_bound)
from .germ import (GermReport, GermState, WSweepReport, find_connections,
                   germ_state, is_admissible, q_value, rh_residual, w_sign_sweep,
                   w_value)
from .kernels import (SmoothFluxKernel, StateBox, burgers_kernel, lwr_kernel,
                      table_kernel)
from .kinetic import (DefectMeasure, EntropyPair, KineticField, Mollifier,
                      ResidualReport, SignConsistencyReport, VGrid,
                      commutator_decay, entropy_pair, entropy_residual,
                      kinetic_defect, kruzkov_eta, kruzkov_residual, lift,
                      mollifier_limit_check, sign_consistency, vgrid_for_box)
from .solver1d import (CellField, Grid1D, Trajectory, build_grid, godunov_flux,
                       interface_flux, run, sampled_trajectory, step,
                       viscous_reference)

__all__ = [name for name in dir() if not name.startswith("_")]
