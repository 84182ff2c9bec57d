"""Exact integer-order stabilizer entropies of an MPS by replica contraction.

For a Pauli string ``P`` the expectation ``<P>`` is a product of per-site
transfer matrices ``T_a[(l, l'), (r, r')] = sum_{s s'} conj(A^s)_{l r}
sigma^a_{s s'} A^{s'}_{l' r'}``. The sum ``sum_P <P>^{2n} / 2^N`` is therefore
a contraction of ``2n`` copies of that transfer structure, with the Pauli
index shared between copies. The left environment lives on ``2n`` doubled
bonds (``chi^{4n}`` entries) and each site costs ``O(n chi^{4n+2})``.
"""
from __future__ import annotations

import math

import numpy as np

from magic_lab.errors import ResourceError
from magic_lab.mps.core import MPS

DEFAULT_BUDGET = 1 << 30  # bytes

_SIGMA = np.array(
    [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]]
)
# Y / i, real; used when the tensors are real so every transfer stays real.
_SIGMA_REAL = np.array(
    [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1], [1, 0]], [[1, 0], [0, -1]]], dtype=float
)


def replica_memory(mps: MPS, n: int) -> int:
    """Peak bytes held by the environment buffers (three live copies)."""
    item = 8 if mps.is_real else 16
    return 3 * item * max(c ** (4 * n) for c in mps.bond_dims)


def _transfers(t: np.ndarray, real: bool) -> np.ndarray:
    """``(4, chi_l^2, chi_r^2)`` transfer matrices of one tensor."""
    sig = _SIGMA_REAL if real else _SIGMA
    cl, _, cr = t.shape
    out = np.einsum("asu,ksm,lun->aklmn", sig, t.conj(), t, optimize=True)
    return out.reshape(4, cl * cl, cr * cr)


def _apply_site(env: np.ndarray, tr: np.ndarray, copies: int, sign_y: float) -> np.ndarray:
    """Contract a ``copies``-mode environment with the per-site transfers.

    ``env`` has shape ``(d_l,) * copies``; each mode is multiplied by the same
    transfer and the modes are cycled so only one GEMM layout is needed.
    """
    dl = tr.shape[1]
    acc = None
    for a in range(4):
        e = env
        for _ in range(copies):
            # contract the leading mode, then rotate it to the back
            e = (tr[a].T @ e.reshape(dl, -1)).T.copy()
        e = e.reshape(-1)
        if a == 2 and sign_y != 1.0:
            e *= sign_y
        acc = e if acc is None else acc + e
    return acc


def replica_sum(mps: MPS, n: int, *, max_bytes: int = DEFAULT_BUDGET) -> tuple[float, float]:
    """``log`` of ``sum_P <P>^{2n} / 2^N`` together with the (positive) value
    of the normalized environment at the end, as ``(log_value, residual)``."""
    if int(n) != n or n < 2:
        raise ValueError("replica contraction needs an integer order n >= 2")
    n = int(n)
    copies = 2 * n
    need = replica_memory(mps, n)
    if need > max_bytes:
        raise ResourceError(
            f"replica contraction of order {n} at bond dimension {mps.max_bond} exceeds the memory budget",
            need,
        )
    src = mps.right_canonical()
    real = src.is_real
    sign_y = (-1.0) ** n if real else 1.0
    env = np.ones(1, dtype=float if real else complex)
    log_total = 0.0
    for t in src.tensors:
        tr = _transfers(t, real)
        env = _apply_site(env, tr, copies, sign_y) * 0.5
        scale = np.abs(env).max()
        if scale == 0:
            return -math.inf, 0.0
        env = env / scale
        log_total += math.log(scale)
    val = float(np.real(env[0]))
    return log_total + math.log(val), val


def replica_m_n(mps: MPS, n: int, *, max_bytes: int = DEFAULT_BUDGET) -> float:
    """Stabilizer Rényi entropy of integer order ``2 <= n <= 4``."""
    if n not in (2, 3, 4):
        raise ValueError("replica_m_n supports n in {2, 3, 4}")
    log_sum, _ = replica_sum(mps, n, max_bytes=max_bytes)
    return log_sum / (1 - n)
