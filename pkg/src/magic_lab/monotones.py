"""Log-robustness via linear programming, the inequality chain between the
stabilizer entropies and the min-relative entropy / log-robustness, and
numerical searches over the ratio ``M_n / D_min``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from magic_lab._util import momentum_descent, params_to_state, parallel_map, root_seed, stream
from magic_lab.entropy import se_values, stabilizer_entropy
from magic_lab.errors import SizeLimitError
from magic_lab.pauli import lexicographic_order, pauli_spectrum
from magic_lab.simplex import revised_simplex
from magic_lab.stabilizer import enumerate_stabilizer_states, stabilizer_fidelity
from magic_lab.states import haar_random_state, make_omega

LR_DEFAULT_MAX_QUBITS = 3


@dataclass(frozen=True)
class RobustnessResult:
    log_robustness: float
    robustness: float
    coefficients: np.ndarray
    duality_gap: float
    iterations: int


@dataclass(frozen=True)
class MonotoneReport:
    d_min: float
    log_robustness: float
    stab_fidelity: float
    argmax_index: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


@lru_cache(maxsize=None)
def _lp_matrix(n_qubits: int) -> np.ndarray:
    table = enumerate_stabilizer_states(n_qubits).pauli_table().T.astype(float)
    return np.hstack([table, -table])


def pauli_vector(state) -> np.ndarray:
    """All ``<psi|P|psi>`` in lexicographic order of P."""
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    n = psi.size.bit_length() - 1
    out = np.empty(4**n)
    out[lexicographic_order(n).ravel()] = pauli_spectrum(psi).ravel()
    return out


def log_robustness(state, *, allow_n4: bool = False) -> RobustnessResult:
    """``log min ||x||_1`` over decompositions ``rho = sum_i x_i |S_i><S_i|``.

    Solved as ``min sum(x+ + x-)`` subject to matching every Pauli
    expectation, with the internal revised simplex.
    """
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    n = psi.size.bit_length() - 1
    cap = 4 if allow_n4 else LR_DEFAULT_MAX_QUBITS
    if n > cap:
        raise SizeLimitError(f"log-robustness limited to {cap} qubits (allow_n4 opts in to 4)")
    A = _lp_matrix(n)
    b = pauli_vector(psi)
    res = revised_simplex(np.ones(A.shape[1]), A, b)
    k = A.shape[1] // 2
    x = res.x[:k] - res.x[k:]
    return RobustnessResult(math.log(res.objective), res.objective, x, res.duality_gap,
                            res.iterations)


def monotone_report(state, *, allow_n4: bool = False) -> MonotoneReport:
    fid = stabilizer_fidelity(state)
    lr = log_robustness(state, allow_n4=allow_n4)
    return MonotoneReport(fid.d_min, lr.log_robustness, fid.stab_fidelity, fid.argmax_index)


@dataclass(frozen=True)
class InequalityReport:
    """Slacks (right side minus left side) of the inequality chain.

    ``dmin_le_lr`` is ``LR - D_min``; ``mn_le_2lr[n]`` is ``2 LR - M_n`` for
    ``n >= 1/2``; ``mn_le_dmin[n]`` is ``2n/(n-1) D_min - M_n`` for ``n > 1``.
    """

    d_min: float
    log_robustness: float
    m_n: dict[float, float]
    dmin_le_lr: float
    mn_le_2lr: dict[float, float] = field(default_factory=dict)
    mn_le_dmin: dict[float, float] = field(default_factory=dict)

    def slacks(self) -> list[float]:
        return [self.dmin_le_lr, *self.mn_le_2lr.values(), *self.mn_le_dmin.values()]

    def holds(self, tol: float = 1e-8) -> bool:
        return min(self.slacks()) >= -tol


def check_inequality_suite(state, n_list: Sequence[float]) -> InequalityReport:
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    if psi.size > 2**LR_DEFAULT_MAX_QUBITS:
        raise SizeLimitError("inequality suite needs LR, limited to 3 qubits")
    n_list = [float(n) for n in n_list]
    fid = stabilizer_fidelity(psi)
    lr = log_robustness(psi).log_robustness
    m = dict(zip(n_list, se_values(psi, n_list)[:, 0].tolist()))
    return InequalityReport(
        d_min=fid.d_min,
        log_robustness=lr,
        m_n=m,
        dmin_le_lr=lr - fid.d_min,
        mn_le_2lr={n: 2 * lr - v for n, v in m.items() if n >= 0.5},
        mn_le_dmin={n: 2 * n / (n - 1) * fid.d_min - v for n, v in m.items() if n > 1},
    )


@dataclass(frozen=True)
class FuzzRow:
    seed: int
    n_qubits: int
    n: float
    slack_dmin_le_lr: float
    slack_mn_le_2lr: float | None
    slack_mn_le_dmin: float | None

    @property
    def slacks(self) -> list[float]:
        return [v for v in (self.slack_dmin_le_lr, self.slack_mn_le_2lr, self.slack_mn_le_dmin)
                if v is not None]

    def as_tuple(self):
        blank = lambda v: "" if v is None else v  # noqa: E731
        return (self.seed, self.n_qubits, self.n, self.slack_dmin_le_lr,
                blank(self.slack_mn_le_2lr), blank(self.slack_mn_le_dmin))


def inequality_fuzz(n_qubits_list: Sequence[int], n_list: Sequence[float],
                    num_states: int, seed: int = 0) -> list[FuzzRow]:
    """Haar-random states, ``num_states`` per qubit count, state i seeded by ``(seed, N, i)``."""
    rows = []
    for nq in n_qubits_list:
        def one(i, nq=nq):
            state = haar_random_state(nq, stream(seed, nq, i))
            rep = check_inequality_suite(state, n_list)
            return [
                FuzzRow(i, nq, n, rep.dmin_le_lr, rep.mn_le_2lr.get(n), rep.mn_le_dmin.get(n))
                for n in n_list
            ]
        for chunk in parallel_map(one, range(num_states)):
            rows.extend(chunk)
    return rows


@dataclass(frozen=True)
class GrowthTable:
    n: float
    s0: float
    n_qubits: tuple[int, ...]
    ratios: tuple[float, ...]
    exponent: float


def lr_over_mn_growth(n: float, s0: float, n_list: Sequence[int]) -> GrowthTable:
    """Lower-bound proxy ``M_{1/2} / (2 M_n)`` for ``LR / M_n`` on ``|Lambda_N(s0)>``.

    Uses additivity, so each entry costs one single-qubit evaluation.
    """
    if n <= 0.5:
        if n != 0.5:
            raise ValueError("n must be >= 1/2")
    ratios = []
    for nq in n_list:
        omega = make_omega(s0 / math.sqrt(nq))
        m_half = nq * stabilizer_entropy(omega, 0.5)
        m_n = nq * stabilizer_entropy(omega, n)
        ratios.append(m_half / (2 * m_n))
    slope = np.polyfit(np.log(list(n_list)), np.log(ratios), 1)[0]
    return GrowthTable(n, s0, tuple(n_list), tuple(ratios), float(slope))


def _ratio_objective(n: float, n_qubits: int, exclude: float):
    stabs = enumerate_stabilizer_states(n_qubits).amplitudes.conj()

    def f(params: np.ndarray) -> np.ndarray:
        psi = params_to_state(params)
        fid = (np.abs(psi @ stabs.T) ** 2).max(axis=1)
        d_min = -np.log(np.minimum(fid, 1.0))
        m = se_values(psi, [n])[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = m / d_min
        return np.where(d_min < exclude, np.inf, r)

    return f


@dataclass(frozen=True)
class RatioSearchResult:
    state: np.ndarray
    ratio: float
    restarts: int


def min_ratio_search(n: float, n_qubits: int, restarts: int,
                     rng: int | np.random.Generator | None = 0, *,
                     max_iters: int = 2000, step_size: float = 0.05,
                     exclude: float = 1e-6) -> RatioSearchResult:
    """Minimize ``M_n / D_min`` with random restarts; ``D_min < exclude`` is excluded."""
    if n_qubits > 4:
        raise SizeLimitError("ratio search needs exact D_min, limited to 4 qubits")
    seed = root_seed(rng)
    f = _ratio_objective(n, n_qubits, exclude)
    dim = 2 * 2**n_qubits

    def run(k: int):
        g = stream(seed, k)
        theta = g.normal(size=dim)
        while not np.isfinite(f(theta[None, :])[0]):
            theta = g.normal(size=dim)
        return momentum_descent(f, theta, max_iters=max_iters, step_size=step_size)

    results = parallel_map(run, range(restarts))
    best = min(range(restarts), key=lambda k: (results[k].value, k))
    return RatioSearchResult(params_to_state(results[best].params), results[best].value, restarts)


def ratio_limit_scan(n: float, s_values: Sequence[float]) -> list[tuple[float, float]]:
    """``M_n / D_min`` on ``|Omega(s)>`` approaching the stabilizer state ``|0>``."""
    out = []
    for s in s_values:
        omega = make_omega(s)
        out.append((float(s), stabilizer_entropy(omega, n) / stabilizer_fidelity(omega).d_min))
    return out
