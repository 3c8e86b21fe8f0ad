"""Exact simulation of counterdiabatic digitized annealing for discrete
mean-variance portfolio problems, with QAOA-style variational baselines."""

__version__ = "0.1.0"

from .pauli import PauliString, PauliSum, commutator, multiply, normalized_trace_product
from .portfolio import (
    GenParams,
    MarketData,
    ProblemSpec,
    cost,
    decode_allocation,
    encode_allocation,
    generate_instance,
    load_instance,
    save_instance,
)
from .ising import (
    GroundTruth,
    IsingModel,
    energy,
    energy_diagonal,
    ground_states,
    success_probability,
    to_ising,
)
from .schedule import AcdAction, CdMode, Schedule, acd_alpha1, cd_term, lambda_, lambda_dot, lcd_alpha
from .statevec import StateVector
from .evolve import (
    RunReport,
    TermPlan,
    build_term_plan,
    enhancement_metrics,
    evolve,
    exact_evolve_reference,
)
from .variational import AnsatzConfig, VariationalReport, ansatz_state, gradient, optimize
from .harness import SweepConfig, SweepReport, run_sweep, run_tsweep, report

__all__ = [
    "__version__",
    "PauliString", "PauliSum", "commutator", "multiply", "normalized_trace_product",
    "GenParams", "MarketData", "ProblemSpec", "cost", "decode_allocation",
    "encode_allocation", "generate_instance", "load_instance", "save_instance",
    "GroundTruth", "IsingModel", "energy", "energy_diagonal", "ground_states",
    "success_probability", "to_ising",
    "AcdAction", "CdMode", "Schedule", "acd_alpha1", "cd_term",
    "lambda_", "lambda_dot", "lcd_alpha",
    "StateVector",
    "RunReport", "TermPlan", "build_term_plan", "enhancement_metrics",
    "evolve", "exact_evolve_reference",
    "AnsatzConfig", "VariationalReport", "ansatz_state", "gradient", "optimize",
    "SweepConfig", "SweepReport", "run_sweep", "run_tsweep", "report",
]
