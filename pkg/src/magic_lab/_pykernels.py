"""Pure numpy implementation of the hot kernels.

Used whenever the compiled ``_ckernels`` module is unavailable, and as the
reference the compiled kernels are tested against.
"""
from __future__ import annotations

import numpy as np

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        out += _POPCOUNT8[a & 0xFF]
        a = a >> 8
    return out


def fwht(v: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (unnormalized)."""
    shape = v.shape
    d = shape[-1]
    out = np.array(v, copy=True).reshape(-1, d)
    h = 1
    while h < d:
        out = out.reshape(out.shape[0], d // (2 * h), 2, h)
        a = out[:, :, 0, :]
        b = out[:, :, 1, :]
        out = np.stack((a + b, a - b), axis=2)
        h *= 2
    return out.reshape(shape)


def pauli_block(states: np.ndarray, x0: int, x1: int) -> np.ndarray:
    """Pauli expectations for X-masks ``x0 <= x < x1`` and every Z-mask.

    ``states`` has shape ``(B, 2**N)``. Returns a real array of shape
    ``(B, x1 - x0, 2**N)`` whose entry ``[b, x - x0, z]`` is
    ``<psi_b| i^{|x&z|} X^x Z^z |psi_b>``.
    """
    states = np.ascontiguousarray(states, dtype=np.complex128)
    d = states.shape[1]
    j = np.arange(d)
    xs = np.arange(x0, x1)
    v = np.conj(states[:, j[None, :] ^ xs[:, None]]) * states[:, None, :]
    v = fwht(v)
    k = popcount(xs[:, None] & j[None, :]) & 3
    re = v.real
    im = v.imag
    # multiply by i^k, keep the real part
    out = np.where(k == 0, re, 0.0)
    out = np.where(k == 1, -im, out)
    out = np.where(k == 2, -re, out)
    out = np.where(k == 3, im, out)
    return out
