"""Dual computation of minimal semimartingale transport costs in one dimension.

The dual value is maximized over discrete Lipschitz terminal multipliers;
each evaluation runs an explicit monotone finite-difference scheme for the
HJB equation of the associated control problem.
"""

from .ascent import (AscentConfig, AscentReport, DivergentSteps, DualProblem, ErrorBudget,
                     OptimalSteps, error_budget, evaluate_dual, run_ascent, theoretical_gap)
from .grid import GridSpec
from .hjb import CFLViolation, Scheme, SolveResult, check_cfl, solve_backward, solve_frozen
from .lipproj import from_increments, norm_R, project, to_increments
from .measures import Atoms, Gaussian, hat_weights, integrate_linear, load_atoms_csv
from .model import (ControlSet, WeightedDiffusionCost, diffusion_cost, hamiltonian,
                    make_interval_set, make_log_martingale_set)
from .oracles import (feasible_primal_cost, reference_benchmarks, toy_benchmark, toy_exact,
                      variance_swap_benchmark, variance_swap_exact)
from .sensitivity import supergradient_adjoint, supergradient_direct

__version__ = "0.1.0"
