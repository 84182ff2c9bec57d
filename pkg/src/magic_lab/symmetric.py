"""Closed-form stabilizer entropies of the permutation-symmetric family
``|psi^eps> ~ |0>^N + eps |chi>^N``.

By permutation symmetry only the counts ``(N_z, N_x, N_y)`` of a Pauli string
matter, so ``G_n = sum_P <P>^{2n} / 2^N`` collapses to an O(N^3) sum with
multinomial weights.
"""
from __future__ import annotations

import csv
import math

import numpy as np
from scipy.special import gammaln

from magic_lab.states import BETA, psi_eps_norm

MAX_SYMMETRIC_QUBITS = 200


def _check(n_qubits: int, eps: float, n: float) -> None:
    if not 1 <= n_qubits <= MAX_SYMMETRIC_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_SYMMETRIC_QUBITS}")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if n < 0 or n == 1:
        raise ValueError("closed form needs n >= 0, n != 1")


def form_factor(n_qubits: int, eps: float, nz, nx, ny) -> np.ndarray:
    """``<psi^eps| Z^{N_z} X^{N_x} Y^{N_y} |psi^eps>`` (identity elsewhere)."""
    nz, nx, ny = (np.asarray(a, dtype=float) for a in (nz, nx, ny))
    norm = psi_eps_norm(n_qubits, eps)
    diag = np.where((nx == 0) & (ny == 0), 1.0, 0.0)
    magic = eps**2 * 3.0 ** (-(nx + ny + nz) / 2)
    cross = (
        2 * eps
        * math.sin(BETA) ** (nx + ny)
        * math.cos(BETA) ** (n_qubits - nx - ny)
        * np.cos(np.pi * (n_qubits - nx + ny) / 4)
    )
    return (diag + magic + cross) / norm


def g_n_closed_form(n_qubits: int, eps: float, n: float) -> float:
    _check(n_qubits, eps, n)
    N = n_qubits
    lgN = gammaln(N + 1)
    parts = []
    for nz in range(N + 1):
        nx, ny = np.meshgrid(np.arange(N - nz + 1), np.arange(N - nz + 1), indexing="ij")
        ok = nx + ny <= N - nz
        nx, ny = nx[ok], ny[ok]
        rest = N - nz - nx - ny
        logw = lgN - gammaln(nz + 1) - gammaln(nx + 1) - gammaln(ny + 1) - gammaln(rest + 1)
        a = np.abs(form_factor(N, eps, nz, nx, ny))
        with np.errstate(divide="ignore"):
            la = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), -np.inf)
        terms = np.exp(logw - N * math.log(2) + 2 * n * la)
        parts.extend(terms.tolist())
    return math.fsum(parts)


def m_n_psi_eps(n_qubits: int, eps: float, n: float) -> float:
    return math.log(g_n_closed_form(n_qubits, eps, n)) / (1 - n)


def bound_c(n: float, eps: float) -> float:
    """Large-N bound ``2n/(n-1) log(1 + eps^2)`` on ``M_n(psi^eps)``, ``n > 1``."""
    if n <= 1:
        raise ValueError("the bound holds for n > 1")
    return 2 * n / (n - 1) * math.log(1 + eps**2)


def fig3_rows(eps: float = 0.5, n: float = 2.0, n_max: int = 60, n_min: int = 1):
    c = bound_c(n, eps)
    return [(N, m_n_psi_eps(N, eps, n), c) for N in range(n_min, n_max + 1)]


def write_fig3_csv(path, rows, schema: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {schema}\n")
        w = csv.writer(fh)
        w.writerow(["N", "m_n", "bound_c"])
        for N, m, c in rows:
            w.writerow([N, f"{m:.17g}", f"{c:.17g}"])
