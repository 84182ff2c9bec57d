"""Stabilizer protocols: the deterministic measurement-plus-feedback
counterexample, its SE bookkeeping, the strong-monotonicity functional and a
gradient search for states that violate it.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from magic_lab import symmetric
from magic_lab._util import momentum_descent, params_to_state, parallel_map, root_seed, stream
from magic_lab.entropy import se_values, stabilizer_entropy
from magic_lab.errors import SizeLimitError
from magic_lab.states import (
    BETA,
    CLIFFORD_GATES,
    DenseState,
    apply_circuit,
    enumerate_branches,
    magic_state,
    make_chi_star,
    make_phi_star,
    make_psi_eps,
    psi_eps_norm,
)

Circuit = tuple[tuple[str, tuple[int, ...]], ...]
P_ZERO = 1e-12


def _circuit(gates) -> Circuit:
    out = []
    for name, sites in gates:
        if isinstance(sites, int):
            sites = (sites,)
        out.append((str(name).upper(), tuple(int(s) for s in sites)))
    return tuple(out)


@dataclass(frozen=True)
class FeedbackProtocol:
    """Measure one qubit, then run the Clifford circuit keyed by the outcome.

    Circuits are gate lists ``[(name, sites), ...]`` applied left to right.
    """

    measured_site: int
    feedback_map: Mapping[int, Circuit]

    def __post_init__(self):
        fb = {int(k): _circuit(v) for k, v in self.feedback_map.items()}
        for circ in fb.values():
            for name, _ in circ:
                if name not in CLIFFORD_GATES:
                    raise ValueError(f"feedback gate {name!r} is not in the Clifford gate set")
        object.__setattr__(self, "feedback_map", fb)

    def circuit(self, outcome: int) -> Circuit:
        return self.feedback_map.get(outcome, ())


def counterexample_unitary_circuit() -> Circuit:
    """``U = V2 V1`` as a gate list.

    ``V1 = X_0 (X_1 - Y_1)/sqrt(2)`` with ``(X - Y)/sqrt(2) = H S H S H X``,
    ``V2 = X_2 CZ_23 X_2``.
    """
    return _circuit(
        [("X", 0), ("X", 1), ("H", 1), ("S", 1), ("H", 1), ("S", 1), ("H", 1),
         ("X", 2), ("CZ", (2, 3)), ("X", 2)]
    )


def build_counterexample_protocol() -> FeedbackProtocol:
    return FeedbackProtocol(0, {0: counterexample_unitary_circuit(), 1: ()})


def run_all_branches(protocol: FeedbackProtocol, state: DenseState) -> list[tuple[float, DenseState]]:
    out = []
    for branch in enumerate_branches(state, [protocol.measured_site]):
        post = apply_circuit(branch.post_state, protocol.circuit(branch.outcome_bits[0]))
        out.append((branch.probability, post))
    return out


def run_protocol(protocol: FeedbackProtocol, state: DenseState, rng: np.random.Generator) -> DenseState:
    branches = run_all_branches(protocol, state)
    probs = np.array([p for p, _ in branches])
    k = rng.choice(len(branches), p=probs / probs.sum())
    return branches[k][1]


def delta_m_curve(n_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Monotonicity slack ``M_n(|phi*>) - M_n(|chi*>)`` of the counterexample.

    The protocol maps ``|phi*>`` to ``|1> (x) |chi*>``, whose SE equals
    ``M_n(|chi*>)``. Negative values mean the stabilizer protocol increased
    the stabilizer entropy, i.e. monotonicity fails at that ``n``.
    """
    grid = [float(n) for n in n_grid]
    if any(not 0 <= n <= 15 for n in grid):
        raise ValueError("grid must lie in [0, 15]")
    m_in = se_values(make_phi_star().amplitudes, grid)[:, 0]
    m_out = se_values(make_chi_star().amplitudes, grid)[:, 0]
    return [(n, float(a - b)) for n, a, b in zip(grid, m_in, m_out)]


def _branch_split(psi: np.ndarray, site: int):
    """Unnormalized branch amplitudes (N-1 qubits) of measuring ``site``."""
    nb, d = psi.shape
    n = d.bit_length() - 1
    t = np.moveaxis(psi.reshape((nb,) + (2,) * n), site + 1, 1)
    return t[:, 0].reshape(nb, -1), t[:, 1].reshape(nb, -1)


def delta_batch(psi: np.ndarray, n: float, site: int = 0) -> np.ndarray:
    """``Delta_n`` for a batch of normalized amplitude vectors ``(B, 2**N)``."""
    psi = np.atleast_2d(np.asarray(psi, dtype=complex))
    out = se_values(psi, [n])[0]
    if psi.shape[1] == 2:
        return out  # post-measurement states are single basis states
    for branch in _branch_split(psi, site):
        p = np.einsum("ij,ij->i", branch.conj(), branch).real
        live = p > P_ZERO
        if np.any(live):
            normed = branch[live] / np.sqrt(p[live])[:, None]
            out[live] -= p[live] * se_values(normed, [n])[0]
    return out


def strong_mono_functional(state, n: float, site: int = 0) -> float:
    """``Delta_n = M_n(psi) - sum_a p_a M_n(psi_a)``; negative values violate
    strong monotonicity. Zero-probability branches contribute nothing."""
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    return float(delta_batch(psi[None, :], n, site)[0])


@dataclass(frozen=True)
class ViolationSearchResult:
    state: DenseState
    delta_n: float
    n: float
    restarts_used: int
    converged: bool
    hyperparameters: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "delta_n": self.delta_n,
                "restarts_used": self.restarts_used,
                "converged": self.converged,
                "hyperparameters": self.hyperparameters,
                "n_qubits": self.state.n_qubits,
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.state.amplitudes],
            }
        )


def gradient_search(n_qubits: int, n: float, restarts: int, max_iters: int = 2000,
                    step_size: float = 0.05, rng: int | np.random.Generator | None = 0, *,
                    site: int = 0, target: float | None = None) -> ViolationSearchResult:
    """Minimize ``Delta_n`` over pure states with momentum descent.

    Restart ``k`` starts from a Gaussian vector drawn from stream
    ``(seed, k)``. With ``target`` set, restarts stop once a value below it
    has been found; restarts already dispatched still count.
    """
    if not 1 <= n_qubits <= 5:
        raise SizeLimitError("violation search supports 1..5 qubits")
    seed = root_seed(rng)
    dim = 2 * 2**n_qubits

    def objective(params):
        return delta_batch(params_to_state(params), n, site)

    def run(k: int):
        theta0 = stream(seed, k).normal(size=dim)
        return momentum_descent(objective, theta0, max_iters=max_iters, step_size=step_size)

    results = []
    batch = 1 if target is not None else restarts
    k = 0
    while k < restarts:
        ks = range(k, min(restarts, k + batch))
        results.extend(parallel_map(run, ks))
        k = ks[-1] + 1
        if target is not None and min(r.value for r in results) < target:
            break
    best = min(range(len(results)), key=lambda i: (results[i].value, i))
    r = results[best]
    state = DenseState(params_to_state(r.params))
    hyper = {"max_iters": max_iters, "step_size": step_size, "momentum": 0.9,
             "fd_step": 1e-5, "seed": seed, "site": site, "best_restart": best}
    return ViolationSearchResult(state, strong_mono_functional(state, n, site), float(n),
                                 len(results), r.converged, hyper)


@dataclass(frozen=True)
class GapReport:
    n_qubits: int
    eps: float
    n: float
    lhs: float
    rhs: float
    p1: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def p1_psi_eps(n_qubits: int, eps: float) -> float:
    """Probability of outcome 1 when measuring qubit 0 of ``|psi^eps>``."""
    return eps**2 * math.sin(BETA) ** 2 / psi_eps_norm(n_qubits, eps)


def p1_limit(eps: float) -> float:
    return eps**2 / (1 + eps**2) * math.sin(BETA) ** 2


def psi_eps_strong_mono_gap(n_qubits: int, eps: float, n: float, method: str = "auto") -> GapReport:
    """Compare ``M_n(psi^eps)`` with the lower bound ``p_1 (N-1) M_n(chi)`` on
    the post-measurement average; ``gap < 0`` certifies a violation."""
    if method == "auto":
        method = "dense" if n_qubits <= 10 else "closed"
    if method == "dense":
        lhs = stabilizer_entropy(make_psi_eps(n_qubits, eps), n) if eps else 0.0
    elif method == "closed":
        if n == 1:
            raise ValueError("closed form is not available at n = 1")
        lhs = symmetric.m_n_psi_eps(n_qubits, eps, n) if eps else 0.0
    else:
        raise ValueError(f"unknown method {method!r}")
    p1 = p1_psi_eps(n_qubits, eps)
    rhs = p1 * (n_qubits - 1) * stabilizer_entropy(magic_state(), n)
    return GapReport(n_qubits, eps, float(n), float(lhs), float(rhs), p1)


def clifford_eigenstate_residual(state, circuit) -> float:
    """``min_phi || U|psi> - e^{i phi}|psi> ||`` for the Clifford circuit ``U``."""
    if not isinstance(state, DenseState):
        state = DenseState(np.asarray(state, dtype=complex))
    out = apply_circuit(state, _circuit(circuit))
    ov = abs(state.overlap(out))
    return math.sqrt(max(0.0, 2.0 - 2.0 * ov))


_GRID_UNIT = 1 / (2 * math.sqrt(6))
_GRID_PARTS = (0.0, 1.0, -1.0, math.sqrt(2), -math.sqrt(2), 2.0, -2.0)


def rounding_hints(amplitudes) -> list[tuple[complex, complex, float]]:
    """Nearest point of the ``(a + ib) / (2 sqrt 6)`` grid with
    ``a, b in {0, +-1, +-sqrt2, +-2}`` for each amplitude.

    A reading aid for search output; no identification is implied.
    """
    grid = np.array([complex(a, b) * _GRID_UNIT for a, b in itertools.product(_GRID_PARTS, repeat=2)])
    out = []
    for amp in np.asarray(amplitudes, dtype=complex):
        k = int(np.argmin(np.abs(grid - amp)))
        out.append((complex(amp), complex(grid[k]), float(abs(grid[k] - amp))))
    return out
