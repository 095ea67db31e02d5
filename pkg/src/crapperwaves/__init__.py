"""Steady gravity-capillary waves near the exact Crapper family, perturbed by
small gravity and a point vortex or a small vortex patch."""

from .crapper import (A0, OVERHANG_A, WaveParams, crapper_interface, crapper_sheet_strength,
                      crapper_theta_tau, q_of_A)
from .elliptic import GreensKernel, point_corrections, patch_corrections
from .errors import CrapperError
from .geometry import (curvature, detect_overhang, detect_self_intersection, reconstruct_interface,
                       steepness)
from .io import export_solution, read_record, write_record
from .kernels import (InterfaceCurve, PatchBoundary, birkhoff_rott, patch_boundary,
                      patch_self_velocity, patch_velocity_on_curve, point_vortex_velocity)
from .plotting import emit_plot
from .residuals import (SolutionState, gamma_operator, jacobian, lyapunov_projection, residual,
                        residual_patch, residual_point, sheet_operator, solvability_functional)
from .solver import continuation_sweep, crapper_state, linear_path, newton_inner, solve_B_star
from .spectral import (SpectralField, antiderivative_from, derivative, disk_extension_eval, hilbert,
                       inner_product)

__version__ = "0.1.0"
