"""Two-site DMRG for the open XXZ chain ``H = -sum (XX + YY + Delta ZZ)``.

The zero-magnetization sector is selected with a penalty ``lambda C^2``
(``C = sum Z``) folded into a real MPO of bond dimension 6. The local
eigenproblem is solved with a restarted Lanczos iteration.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from magic_lab.errors import SizeLimitError
from magic_lab.mps.core import MPS, _truncate, random_mps
from magic_lab.states import DenseState

_I2 = np.eye(2)
_Z = np.diag([1.0, -1.0])
_SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|
_SM = _SP.T


@dataclass(frozen=True)
class MPO:
    """Tensors ``W[k]`` of shape ``(w_l, w_r, 2, 2)`` indexed ``(.., out, in)``."""

    tensors: tuple

    def __post_init__(self):
        ts = tuple(np.asarray(w) for w in self.tensors)
        if ts[0].shape[0] != 1 or ts[-1].shape[1] != 1:
            raise ValueError("boundary MPO bonds must be 1")
        object.__setattr__(self, "tensors", ts)

    @property
    def n_qubits(self) -> int:
        return len(self.tensors)

    def apply_dense(self, vec) -> np.ndarray:
        """``H|v>`` for a dense vector (N <= 14) without building ``H``."""
        n = self.n_qubits
        if n > 14:
            raise SizeLimitError("dense MPO application is capped at 14 qubits")
        x = np.asarray(vec).reshape((1,) + (2,) * n)
        for k, w in enumerate(self.tensors):
            x = np.moveaxis(x, k + 1, 1)
            shp = x.shape
            x = np.tensordot(w, x.reshape(shp[0], 2, -1), axes=([0, 3], [0, 1]))
            x = np.moveaxis(x.reshape((w.shape[1], 2) + shp[2:]), 1, k + 1)
        return x.reshape(-1)

    def to_matrix(self) -> np.ndarray:
        n = self.n_qubits
        if n > 10:
            raise SizeLimitError("dense MPO matrices are capped at 10 qubits")
        return np.stack([self.apply_dense(e) for e in np.eye(2**n)], axis=1)


def xxz_mpo(n_qubits: int, delta: float, penalty_lambda: float = 0.0, hopping: float = 1.0) -> MPO:
    """``-hopping (XX + YY) - Delta ZZ`` on bonds plus ``lambda C^2``."""
    if n_qubits < 2:
        raise ValueError("the chain needs at least two sites")
    w = np.zeros((6, 6, 2, 2))
    w[0, 0] = _I2
    w[0, 1] = _SP
    w[0, 2] = _SM
    w[0, 3] = _Z
    w[0, 4] = _Z
    w[0, 5] = penalty_lambda * _I2
    w[1, 5] = -2 * hopping * _SM
    w[2, 5] = -2 * hopping * _SP
    w[3, 5] = -delta * _Z
    w[4, 4] = _I2
    w[4, 5] = 2 * penalty_lambda * _Z
    w[5, 5] = _I2
    ts = [w.copy() for _ in range(n_qubits)]
    ts[0] = w[:1]
    ts[-1] = w[:, 5:]
    return MPO(tuple(ts))


def magnetization_mpo(n_qubits: int) -> MPO:
    w = np.zeros((2, 2, 2, 2))
    w[0, 0] = _I2
    w[0, 1] = _Z
    w[1, 1] = _I2
    ts = [w.copy() for _ in range(n_qubits)]
    ts[0] = w[:1]
    ts[-1] = w[:, 1:]
    return MPO(tuple(ts))


def c_squared_mpo(n_qubits: int) -> MPO:
    return xxz_mpo(n_qubits, 0.0, penalty_lambda=1.0, hopping=0.0)


def mpo_expectation(mps: MPS, mpo: MPO) -> float:
    env = np.ones((1, 1, 1))
    for a, w in zip(mps.tensors, mpo.tensors):
        env = _left_env(env, a, w)
    return float(np.real(env[0, 0, 0]) / mps.overlap(mps).real)


def _left_env(env, a, w):
    t = np.tensordot(env, a, axes=(2, 0))  # (b, w, s, k')
    t = np.tensordot(t, w, axes=([1, 2], [0, 3]))  # (b, k', v, u)
    t = np.tensordot(a.conj(), t, axes=([0, 1], [0, 3]))  # (bb, k', v)
    return t.transpose(0, 2, 1)


def _right_env(env, b, w):
    # env (bra, w, ket) on the right bond
    t = np.tensordot(b, env, axes=(2, 2))  # (k, s, bb, v)
    t = np.tensordot(w, t, axes=([1, 3], [3, 1]))  # (w, u, k, bb)
    t = np.tensordot(b.conj(), t, axes=([1, 2], [1, 3]))  # (a, w, k)
    return t


@dataclass(frozen=True)
class LanczosResult:
    value: float
    vector: np.ndarray
    gap: float
    residual: float
    restarts: int


def lanczos_ground(matvec: Callable[[np.ndarray], np.ndarray], v0: np.ndarray, *,
                   krylov_dim: int = 30, tol: float = 1e-12, max_restarts: int = 200) -> LanczosResult:
    """Lowest eigenpair of a real symmetric operator by restarted Lanczos
    with full reorthogonalization; restarts from the current Ritz vector."""
    v = np.asarray(v0, dtype=float).reshape(-1)
    nrm = np.linalg.norm(v)
    v = v / nrm if nrm > 0 else np.ones_like(v) / math.sqrt(v.size)
    dim = v.size
    k_max = min(krylov_dim, dim)
    theta, gap, res = math.nan, math.inf, math.inf
    for restart in range(max_restarts):
        basis = np.zeros((k_max, dim))
        alpha = np.zeros(k_max)
        beta = np.zeros(k_max)
        basis[0] = v
        k = 0
        while True:
            w = matvec(basis[k])
            alpha[k] = basis[k] @ w
            w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
            w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
            b = np.linalg.norm(w)
            beta[k] = b
            if k + 1 == k_max or b < 1e-13 * max(1.0, abs(alpha[k])):
                break
            basis[k + 1] = w / b
            k += 1
        m = k + 1
        tri = np.diag(alpha[:m]) + np.diag(beta[: m - 1], 1) + np.diag(beta[: m - 1], -1)
        evals, evecs = np.linalg.eigh(tri)
        theta = float(evals[0])
        gap = float(evals[1] - evals[0]) if m > 1 else math.inf
        v = evecs[:, 0] @ basis[:m]
        v /= np.linalg.norm(v)
        res = float(np.linalg.norm(matvec(v) - theta * v))
        if res < tol * max(1.0, abs(theta)) or m < k_max:
            break
    return LanczosResult(theta, v, gap, res, restart)


@dataclass(frozen=True)
class DMRGResult:
    mps: MPS
    energy: float
    sweep_energies: tuple
    converged: bool
    magnetization: float
    c_squared: float
    max_truncation: float
    degeneracy_gap: float
    settings: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "converged" if self.converged else "not_converged"

    def magnetization_report(self) -> dict:
        return {"C": self.magnetization, "C2": self.c_squared}


def _two_site_matvec(L, w1, w2, R, shape):
    def mv(x):
        t = np.tensordot(L, x.reshape(shape), axes=(2, 0))  # (a, w, s, t, d)
        t = np.tensordot(t, w1, axes=([1, 2], [0, 3]))  # (a, t, d, v, u)
        t = np.tensordot(t, w2, axes=([3, 1], [0, 3]))  # (a, d, u, x, y)
        t = np.tensordot(t, R, axes=([1, 3], [2, 1]))  # (a, u, y, b)
        return t.reshape(-1)
    return mv


def dmrg_ground_state(n_qubits: int, delta: float, chi_max: int = 32, num_sweeps: int = 10,
                      penalty_lambda: float = 0.5, rng: int | np.random.Generator | None = 0, *,
                      svd_cutoff: float = 1e-12, energy_tol: float = 1e-10,
                      init_chi: int = 8) -> DMRGResult:
    """Variational ground state of the penalized XXZ chain.

    Returns the energy of the bare XXZ Hamiltonian and the sector
    diagnostics ``<C>``, ``<C^2>``. The energy is tracked after every sweep;
    a sweep-to-sweep change above ``energy_tol`` at the end issues a warning.
    """
    if n_qubits % 2 or n_qubits < 2:
        raise ValueError("n_qubits must be even")
    if chi_max < 2:
        raise ValueError("chi_max must be at least 2")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    h = xxz_mpo(n_qubits, delta, penalty_lambda)
    W = h.tensors
    psi = random_mps(n_qubits, min(init_chi, chi_max), gen, real=True)
    ts = [np.array(t) for t in psi.tensors]
    n = n_qubits
    Ls = [None] * (n + 1)
    Rs = [None] * (n + 1)
    Ls[0] = np.ones((1, 1, 1))
    Rs[n] = np.ones((1, 1, 1))
    for k in range(n - 1, 0, -1):
        Rs[k] = _right_env(Rs[k + 1], ts[k], W[k])
    energies = []
    max_trunc = 0.0
    gap = math.inf
    e = math.inf

    def optimize(i, sweep_right):
        nonlocal max_trunc, gap
        cl, cr = ts[i].shape[0], ts[i + 1].shape[2]
        theta = np.tensordot(ts[i], ts[i + 1], axes=(2, 0))
        shape = theta.shape
        res = lanczos_ground(_two_site_matvec(Ls[i], W[i], W[i + 1], Rs[i + 2], shape), theta.reshape(-1))
        gap = res.gap
        u, s, vh = np.linalg.svd(res.vector.reshape(cl * 2, 2 * cr), full_matrices=False)
        keep = _truncate(s, chi_max, svd_cutoff)
        max_trunc = max(max_trunc, float(np.sum(s[keep:] ** 2)))
        s = s[:keep] / np.linalg.norm(s[:keep])
        if sweep_right:
            ts[i] = u[:, :keep].reshape(cl, 2, keep)
            ts[i + 1] = (s[:, None] * vh[:keep]).reshape(keep, 2, cr)
        else:
            ts[i] = (u[:, :keep] * s[None, :]).reshape(cl, 2, keep)
            ts[i + 1] = vh[:keep].reshape(keep, 2, cr)
        return res.value

    converged = False
    for sweep in range(num_sweeps):
        for i in range(n - 1):
            e = optimize(i, True)
            if i < n - 2:
                Ls[i + 1] = _left_env(Ls[i], ts[i], W[i])
        for i in range(n - 2, -1, -1):
            e = optimize(i, False)
            Rs[i + 1] = _right_env(Rs[i + 2], ts[i + 1], W[i + 1])
        energies.append(e)
        if sweep and abs(energies[-1] - energies[-2]) < energy_tol:
            converged = True
            break
    final = MPS(ts, "right")
    c = mpo_expectation(final, magnetization_mpo(n))
    c2 = mpo_expectation(final, c_squared_mpo(n))
    e_xxz = mpo_expectation(final, xxz_mpo(n, delta, 0.0))
    if not converged:
        warnings.warn(
            f"DMRG not converged after {num_sweeps} sweeps "
            f"(last change {abs(energies[-1] - energies[-2]) if len(energies) > 1 else math.nan:.3g})",
            RuntimeWarning,
            stacklevel=2,
        )
    return DMRGResult(
        final, e_xxz, tuple(energies), converged, c, c2, max_trunc, gap,
        {"n_qubits": n, "delta": delta, "chi_max": chi_max, "num_sweeps": num_sweeps,
         "penalty_lambda": penalty_lambda, "svd_cutoff": svd_cutoff},
    )


def xxz_sector_ground_state(n_qubits: int, delta: float) -> tuple[float, DenseState, float]:
    """Exact lowest level of the XXZ chain in the zero-magnetization sector.

    Returns ``(energy, state, gap)`` with the state embedded in the full
    ``2^N`` space. Uses ``scipy.sparse.linalg.eigsh`` (dense ``eigh`` for
    small sectors) as an independent route to the ground state.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.linalg import eigsh

    n = n_qubits
    if n % 2 or n > 20:
        raise SizeLimitError("sector diagonalization needs an even N <= 20")
    states = [sum(1 << (n - 1 - q) for q in ones) for ones in combinations(range(n), n // 2)]
    index = {s: i for i, s in enumerate(states)}
    rows, cols, vals = [], [], []
    for i, s in enumerate(states):
        diag = 0.0
        for q in range(n - 1):
            b1 = (s >> (n - 1 - q)) & 1
            b2 = (s >> (n - 2 - q)) & 1
            diag += -delta * (1 - 2 * b1) * (1 - 2 * b2)
            if b1 != b2:
                t = s ^ (1 << (n - 1 - q)) ^ (1 << (n - 2 - q))
                rows.append(index[t])
                cols.append(i)
                vals.append(-2.0)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
    dim = len(states)
    h = coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    if dim <= 600:
        ev, vec = np.linalg.eigh(h.toarray())
    else:
        ev, vec = eigsh(h, k=2, which="SA", tol=1e-14)
        order = np.argsort(ev)
        ev, vec = ev[order], vec[:, order]
    full = np.zeros(2**n)
    full[states] = vec[:, 0]
    return float(ev[0]), DenseState.from_unnormalized(full), float(ev[1] - ev[0])
