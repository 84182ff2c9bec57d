"""Dense statevectors, gates, computational-basis measurements and the
named states used throughout the package.

Qubit 0 is the leftmost factor and the most significant bit of the
amplitude index, so ``|0011>`` is amplitude index 3.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from magic_lab.errors import ConsistencyError, DimensionMismatchError, NotUnitaryError
from magic_lab.pauli import check_size

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

SQ2 = math.sqrt(2.0)
#: Angle of the single-qubit magic state, ``cos(2 beta) = 1/sqrt(3)``.
BETA = 0.5 * math.acos(1.0 / math.sqrt(3.0))

GATES = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / SQ2,
    "S": np.diag([1, 1j]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
CLIFFORD_GATES = frozenset({"I", "H", "S", "X", "Y", "Z", "CZ", "CX"})


@dataclass(frozen=True, eq=False)
class DenseState:
    """Normalized pure state on ``n_qubits`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise DimensionMismatchError("amplitude vector length must be a power of two >= 2")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL * max(1.0, amps.size**0.5):
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, amplitudes) -> DenseState:
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amps / norm)

    @classmethod
    def basis(cls, bits: str) -> DenseState:
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def __len__(self) -> int:
        return self.amplitudes.size

    def __getitem__(self, bits: str | int) -> complex:
        idx = int(bits, 2) if isinstance(bits, str) else bits
        return complex(self.amplitudes[idx])

    def overlap(self, other: DenseState) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: DenseState) -> float:
        return abs(self.overlap(other)) ** 2

    def tensor(self, other: DenseState) -> DenseState:
        return DenseState(np.kron(self.amplitudes, other.amplitudes))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> DenseState:
        data = json.loads(text)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        if amps.size != 2 ** int(data["n_qubits"]):
            raise DimensionMismatchError("n_qubits does not match the amplitude count")
        return cls(amps)


@dataclass(frozen=True)
class MeasurementOutcome:
    outcome_bits: tuple[int, ...]
    probability: float
    post_state: DenseState


def product_state(factors: Sequence[np.ndarray]) -> DenseState:
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return DenseState.from_unnormalized(out)


def zero_state(n_qubits: int) -> DenseState:
    return DenseState.basis("0" * n_qubits)


def magic_state() -> DenseState:
    """Single-qubit state with Bloch vector ``(1, 1, 1)/sqrt(3)``."""
    return DenseState(
        np.array([np.exp(-0.25j * np.pi) * math.cos(BETA), math.sin(BETA)], dtype=complex)
    )


def make_phi_star() -> DenseState:
    r = SQ2
    amps = np.array(
        [0, 0, 0, 2j, 1 - 1j, -1 - 1j, -1 + 1j, -1 + 1j,
         r, r * 1j, -r, -r, 0, 0, 0, r * (1 + 1j)],
        dtype=complex,
    ) / (2 * math.sqrt(6))
    return DenseState(amps)


def make_chi_star() -> DenseState:
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = 1
    amps[0b001] = 1j
    amps[0b010] = -1
    amps[0b011] = -1
    amps[0b111] = 1 + 1j
    return DenseState(amps / math.sqrt(6))


def make_psi_star() -> DenseState:
    return DenseState.basis("1").tensor(make_chi_star())


def psi_eps_norm(n_qubits: int, eps: float) -> float:
    return 1 + eps**2 + 2 * eps * math.cos(BETA) ** n_qubits * math.cos(n_qubits * math.pi / 4)


def make_psi_eps(n_qubits: int, eps: float) -> DenseState:
    """``(|0>^N + eps |chi>^N) / sqrt(N_eps)`` as a dense vector."""
    check_size(n_qubits)
    zero = np.zeros(2**n_qubits, dtype=complex)
    zero[0] = 1
    chi = magic_state().amplitudes
    prod = np.ones(1, dtype=complex)
    for _ in range(n_qubits):
        prod = np.kron(prod, chi)
    amps = (zero + eps * prod) / math.sqrt(psi_eps_norm(n_qubits, eps))
    return DenseState(amps)


def make_omega(s: float) -> DenseState:
    return DenseState(np.array([math.cos(s), math.sin(s)], dtype=complex))


def make_lambda_n(s0: float, n_qubits: int) -> DenseState:
    check_size(n_qubits)
    return product_state([make_omega(s0 / math.sqrt(n_qubits)).amplitudes] * n_qubits)


def haar_random_state(n_qubits: int, rng: np.random.Generator) -> DenseState:
    d = 2**n_qubits
    return DenseState.from_unnormalized(rng.normal(size=d) + 1j * rng.normal(size=d))


def _check_unitary(u: np.ndarray) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitaryError("gate must be a square matrix")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=UNITARY_TOL, rtol=0):
        raise NotUnitaryError("gate matrix is not unitary within 1e-10")


def apply_matrix(amplitudes: np.ndarray, u: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """Apply a k-site matrix to the given sites of a raw amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex)
    n = psi.size.bit_length() - 1
    sites = list(sites)
    k = len(sites)
    if len(set(sites)) != k or any(not 0 <= s < n for s in sites):
        raise ValueError(f"invalid sites {sites} for {n} qubits")
    if u.shape != (2**k, 2**k):
        raise DimensionMismatchError(f"gate of shape {u.shape} does not act on {k} sites")
    t = psi.reshape([2] * n)
    t = np.moveaxis(t, sites, range(k))
    t = (u @ t.reshape(2**k, -1)).reshape([2] * n)
    t = np.moveaxis(t, range(k), sites)
    return t.reshape(-1)


def gate_matrix(gate) -> np.ndarray:
    if isinstance(gate, str):
        try:
            return GATES[gate.upper()]
        except KeyError:
            raise ValueError(f"unknown gate {gate!r}") from None
    u = np.asarray(gate, dtype=complex)
    _check_unitary(u)
    return u


def apply_gate(state: DenseState, gate, sites: int | Sequence[int]) -> DenseState:
    """Apply a named gate (``H, S, X, Y, Z, CZ, CX``) or a custom 1-/2-site unitary."""
    if isinstance(sites, (int, np.integer)):
        sites = [int(sites)]
    u = gate_matrix(gate)
    if u.shape[0] > 4:
        raise ValueError("only 1- and 2-site gates are supported")
    return DenseState(apply_matrix(state.amplitudes, u, sites))


def apply_circuit(state: DenseState, circuit) -> DenseState:
    """Apply a gate list ``[(gate, sites), ...]`` in order."""
    for gate, sites in circuit:
        state = apply_gate(state, gate, sites)
    return state


def circuit_unitary(circuit, n_qubits: int) -> np.ndarray:
    d = 2**n_qubits
    cols = np.eye(d, dtype=complex)
    for gate, sites in circuit:
        if isinstance(sites, (int, np.integer)):
            sites = [int(sites)]
        u = gate_matrix(gate)
        cols = np.stack([apply_matrix(c, u, sites) for c in cols.T], axis=1)
    return cols


def _branch_amplitudes(psi: np.ndarray, sites: Sequence[int], bits: Sequence[int]) -> np.ndarray:
    n = psi.size.bit_length() - 1
    idx = np.arange(psi.size)
    keep = np.ones(psi.size, dtype=bool)
    for s, b in zip(sites, bits):
        keep &= ((idx >> (n - 1 - s)) & 1) == b
    return np.where(keep, psi, 0)


def enumerate_branches(state: DenseState, sites: Sequence[int]) -> list[MeasurementOutcome]:
    """All outcomes of measuring ``sites`` in the computational basis.

    Zero-probability branches are omitted.
    """
    sites = list(sites)
    n = state.n_qubits
    if len(set(sites)) != len(sites) or any(not 0 <= s < n for s in sites):
        raise ValueError(f"invalid sites {sites} for {n} qubits")
    out = []
    total = 0.0
    for lam in range(2 ** len(sites)):
        bits = tuple((lam >> (len(sites) - 1 - i)) & 1 for i in range(len(sites)))
        proj = _branch_amplitudes(state.amplitudes, sites, bits)
        p = float(np.vdot(proj, proj).real)
        total += p
        if p > 0:
            out.append(MeasurementOutcome(bits, p, DenseState(proj / math.sqrt(p))))
    if not out or abs(total - 1) > 1e-10:
        raise ConsistencyError(f"branch probabilities sum to {total}")
    return out


def measure_computational(
    state: DenseState, sites: Sequence[int], rng: np.random.Generator
) -> MeasurementOutcome:
    branches = enumerate_branches(state, sites)
    probs = np.array([b.probability for b in branches])
    k = rng.choice(len(branches), p=probs / probs.sum())
    return branches[k]
