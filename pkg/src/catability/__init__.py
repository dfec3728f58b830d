"""Catability: certifying cat-like states with a nonlinear-squeezing witness."""

__version__ = "0.1.0"

from .approximations import ApproxOptimum, approximation_expectation, optimize_approximation
from .benchmark import BenchmarkTable, GaussianBenchmark, build_table, default_benchmark, load_table, save_table
from .errors import *  # noqa: F401,F403
from .fock import (
    HilbertConfig,
    cat_state,
    coherent_state,
    displacement,
    multi_headed_cat,
    photonic_approximation,
    squeeze,
    wigner_grid,
    wigner_point,
)
from .gaussian import Budget, GaussianParams, gaussian_expectation, minimize_gaussian_expectation
from .loss import LossSpec, apply_loss, kraus_operators
from .measurement import full_protocol, run_ensemble
from .metrics import (
    GammaSearchSpec,
    MetricResult,
    MultiHeadBenchmark,
    catability,
    global_catability,
    global_normalized_infidelity,
    multihead_catability,
    multihead_infidelity,
    normalized_infidelity,
)
from .witness import WitnessParams, decomposed_witness, operator_spectrum, witness_operator
