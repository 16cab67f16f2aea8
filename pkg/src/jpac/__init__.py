"""Joint power and admission control for interference-limited wireless links.

The package offers exact supportability certificates, Foschini-Miljanic
power control, an exhaustive admission oracle, a certified LP route for the
l1 subproblem (NLPD), an lp-norm barrier solver (PNMD), and a seeded
Monte-Carlo harness.
"""
from .bench import BenchReport, InstanceConfig, generate_instance, run_benchmark, trial_seed
from .feasibility import FeasibilityCertificate, Reason, brute_force_optimum, foschini_miljanic, is_supportable
from .lp import LpError, LpProblem, LpSolution, LpStatus, solve_l1_approx, solve_lp
from .model import (InvalidInstanceError, LinkNetwork, NormalizedChannel, SolverSolution, build_normalized,
                    excess, load_network, restrict, save_network, sinr)
from .nlpd import AdmissionResult, NlpdParams, alpha_nlpd, necessary_condition, preprocess, run_nlpd
from .numerics import SingularMatrixError, solve_linear, spectral_radius
from .pnmd import IpmParams, PnmdParams, alpha_pnmd, kkt_residual, run_pnmd, solve_lp_norm

__version__ = "0.1.0"

__all__ = [
    "AdmissionResult", "BenchReport", "FeasibilityCertificate", "InstanceConfig", "InvalidInstanceError",
    "IpmParams", "LinkNetwork", "LpError", "LpProblem", "LpSolution", "LpStatus", "NlpdParams",
    "NormalizedChannel", "PnmdParams", "Reason", "SingularMatrixError", "SolverSolution", "alpha_nlpd",
    "alpha_pnmd", "brute_force_optimum", "build_normalized", "excess", "foschini_miljanic",
    "generate_instance", "is_supportable", "kkt_residual", "load_network", "necessary_condition",
    "preprocess", "restrict", "run_benchmark", "run_nlpd", "run_pnmd", "save_network", "sinr",
    "solve_l1_approx", "solve_linear", "solve_lp", "solve_lp_norm", "spectral_radius", "trial_seed",
]
