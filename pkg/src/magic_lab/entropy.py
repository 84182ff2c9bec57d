"""Exact stabilizer entropies of dense states.

``M_n = log(sum_P |<P>|^{2n} / 2^N) / (1 - n)`` (natural log), with the
von Neumann member ``M_1 = H(Xi) - N log 2`` and the support-counting
member ``M_0 = log #{P : |<P>| > 1e-8} - N log 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from magic_lab.pauli import check_size, iter_expectation_blocks
from magic_lab.states import make_omega

SUPPORT_THRESHOLD = 1e-8
_TINY = 1e-300


@dataclass(frozen=True)
class SEValue:
    renyi_index: float
    value: float
    n_qubits: int

    def __float__(self) -> float:
        return self.value


def _block_terms(a: np.ndarray, n: float, n_qubits: int) -> np.ndarray:
    """Per-state partial sums over the last two axes of ``|<P>|`` values."""
    if n == 0:
        return np.count_nonzero(a > SUPPORT_THRESHOLD, axis=(-2, -1)).astype(float)
    if n == 1:
        xi = a * a / 2.0**n_qubits
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(xi > 0, -xi * np.log(np.where(xi > 0, xi, 1.0)), 0.0)
        return t.sum(axis=(-2, -1))
    if float(2 * n).is_integer():
        return (a ** int(2 * n)).sum(axis=(-2, -1))
    with np.errstate(divide="ignore"):
        t = np.where(a > _TINY, np.exp(2 * n * np.log(np.where(a > _TINY, a, 1.0))), 0.0)
    return t.sum(axis=(-2, -1))


def power_sums(states, orders: Sequence[float]) -> np.ndarray:
    """Reduce all Pauli expectations of ``states`` for each Renyi order.

    Returns an array ``(len(orders), B)``: for ``n != 1`` the sum
    ``sum_P |<P>|^{2n}``; for ``n == 1`` the Shannon entropy of ``Xi``.
    A single pass over the Pauli set serves every order.
    """
    psi = np.atleast_2d(np.asarray(states, dtype=complex))
    nq = psi.shape[1].bit_length() - 1
    parts: list[list[list[float]]] = [[[] for _ in range(psi.shape[0])] for _ in orders]
    for _, _, block in iter_expectation_blocks(psi):
        a = np.abs(block)
        for i, n in enumerate(orders):
            for b, v in enumerate(_block_terms(a, n, nq)):
                parts[i][b].append(v)
    return np.array([[math.fsum(p) for p in row] for row in parts])


def _finish(order: float, s: float, n_qubits: int) -> float:
    if order == 1:
        return s - n_qubits * math.log(2)
    return (math.log(s) - n_qubits * math.log(2)) / (1 - order)


def se_values(states, orders: Sequence[float]) -> np.ndarray:
    """``M_n`` for a batch of raw amplitude vectors, shape ``(len(orders), B)``."""
    psi = np.atleast_2d(np.asarray(states, dtype=complex))
    nq = psi.shape[1].bit_length() - 1
    sums = power_sums(psi, orders)
    return np.array([[_finish(n, s, nq) for s in row] for n, row in zip(orders, sums)])


def _amps(state) -> np.ndarray:
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    check_size(psi.size.bit_length() - 1)
    return psi


def renyi_se(state, n: float) -> SEValue:
    if n == 1:
        raise ValueError("n = 1 is the von Neumann limit; use von_neumann_se")
    if n < 0:
        raise ValueError("Renyi index must be non-negative")
    psi = _amps(state)
    nq = psi.size.bit_length() - 1
    return SEValue(n, float(se_values(psi, [n])[0, 0]), nq)


def von_neumann_se(state) -> SEValue:
    psi = _amps(state)
    nq = psi.size.bit_length() - 1
    return SEValue(1.0, float(se_values(psi, [1])[0, 0]), nq)


def stabilizer_entropy(state, n: float) -> float:
    """``M_n`` as a float for any ``n >= 0`` including ``n = 1``."""
    return float(se_values(_amps(state), [n])[0, 0])


def se_curve(state, n_grid: Sequence[float]) -> list[SEValue]:
    grid = [float(n) for n in n_grid]
    if any(n < 0 for n in grid):
        raise ValueError("Renyi indices must be non-negative")
    psi = _amps(state)
    nq = psi.size.bit_length() - 1
    vals = se_values(psi, grid)[:, 0]
    return [SEValue(n, float(v), nq) for n, v in zip(grid, vals)]


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    s_used: tuple[float, ...]


def omega_scaling_fit(n: float, s_grid: Sequence[float]) -> ScalingFit:
    """Fit ``M_n(|Omega(s)>) ~ c s^k`` by least squares in log-log space.

    Points where ``M_n < 1e-14`` are dropped; at least two must remain.
    """
    s_grid = [float(s) for s in s_grid]
    if len(s_grid) < 5 or any(not 0 < s <= 0.2 for s in s_grid):
        raise ValueError("need at least 5 grid points in (0, 0.2]")
    pts = [(s, stabilizer_entropy(make_omega(s), n)) for s in s_grid]
    usable = [(s, m) for s, m in pts if m >= 1e-14]
    if len(usable) < 2:
        raise FloatingPointError(f"M_n underflows on the grid; usable points: {usable}")
    ls = np.log([s for s, _ in usable])
    lm = np.log([m for _, m in usable])
    slope, icpt = np.polyfit(ls, lm, 1)
    return ScalingFit(float(slope), float(np.exp(icpt)), tuple(s for s, _ in usable))
