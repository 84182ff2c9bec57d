"""Stabilizer entropies, magic monotones and tensor-network estimators."""
from magic_lab.entropy import SEValue, renyi_se, se_curve, stabilizer_entropy, von_neumann_se
from magic_lab.monotones import check_inequality_suite, log_robustness, monotone_report
from magic_lab.pauli import PauliString, XiDistribution, enumerate_paulis, expectation, xi_distribution
from magic_lab.protocols import (
    FeedbackProtocol,
    build_counterexample_protocol,
    delta_m_curve,
    gradient_search,
    strong_mono_functional,
)
from magic_lab.stabilizer import enumerate_stabilizer_states, stabilizer_fidelity
from magic_lab.states import DenseState, MeasurementOutcome

__version__ = "0.1.0"

__all__ = [
    "DenseState",
    "FeedbackProtocol",
    "MeasurementOutcome",
    "PauliString",
    "SEValue",
    "XiDistribution",
    "build_counterexample_protocol",
    "check_inequality_suite",
    "delta_m_curve",
    "enumerate_paulis",
    "enumerate_stabilizer_states",
    "expectation",
    "gradient_search",
    "log_robustness",
    "monotone_report",
    "renyi_se",
    "se_curve",
    "stabilizer_entropy",
    "stabilizer_fidelity",
    "strong_mono_functional",
    "von_neumann_se",
    "xi_distribution",
]
