"""Perfect sampling of Pauli strings from the distribution ``Xi_P`` of an MPS.

With a right-canonical MPS the marginal of the first ``j`` letters is
``2^{-j} ||M_j||_F^2``, where ``M_j`` is the bond-``j`` matrix obtained by
threading the chosen Pauli letters between ``A^dagger`` and ``A``. The
conditional of letter ``j`` is the ratio of consecutive marginals, so the four
weights at every site sum to one by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from magic_lab._util import parallel_map, root_seed, stream
from magic_lab.errors import NumericalIntegrityError
from magic_lab.mps.core import MPS
from magic_lab.pauli import PauliString

NEG_TOL = 1e-12
CHUNK = 1024  # samples per RNG stream


@dataclass(frozen=True)
class PauliSample:
    pauli: PauliString
    xi_value: float
    conditional_trace: tuple[float, ...]


def _step(m: np.ndarray, t: np.ndarray, real: bool) -> np.ndarray:
    """Candidate matrices for every letter: ``(B, 4, chi_r, chi_r)``.

    ``m`` has shape ``(B, chi_l, chi_l)`` indexed ``(bra, ket)``. The Y
    letter is built from ``T01 - T10`` (the factor ``i`` only changes a
    global phase, which the Frobenius norm ignores).
    """
    a0, a1 = t[:, 0, :], t[:, 1, :]
    c0, c1 = a0.conj(), a1.conj()
    # T_ss'[b] = A^{s dagger} m A^{s'}
    ma0 = m @ a0
    ma1 = m @ a1
    t00 = np.swapaxes(c0, 0, 1) @ ma0
    t11 = np.swapaxes(c1, 0, 1) @ ma1
    t01 = np.swapaxes(c0, 0, 1) @ ma1
    t10 = np.swapaxes(c1, 0, 1) @ ma0
    return np.stack([t00 + t11, t01 + t10, t01 - t10, t00 - t11], axis=1)


def _frob2(x: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ij->...", x.conj(), x).real if np.iscomplexobj(x) else np.einsum("...ij,...ij->...", x, x)


def conditionals(mps: MPS, letters: np.ndarray) -> np.ndarray:
    """Per-site conditional probabilities of given letter strings.

    ``letters`` has shape ``(B, N)``; returns ``(B, N)`` conditionals whose
    row products equal ``Xi_P``.
    """
    src = mps if mps.canonical_flag == "right" else mps.right_canonical()
    letters = np.atleast_2d(letters)
    b = letters.shape[0]
    real = src.is_real
    m = np.ones((b, 1, 1), dtype=float if real else complex)
    out = np.empty(letters.shape)
    idx = np.arange(b)
    for j, t in enumerate(src.tensors):
        cand = _step(m, t, real)
        w = _frob2(cand) / 2.0
        out[:, j] = _checked(w)[idx, letters[:, j]]
        m = _renorm(cand[idx, letters[:, j]])
    return out


def _checked(w: np.ndarray) -> np.ndarray:
    """Normalize ``(B, 4)`` marginal ratios; tiny negatives are clipped."""
    if np.any(w < -NEG_TOL):
        raise NumericalIntegrityError("negative conditional probability")
    w = np.clip(w, 0.0, None)
    return w / w.sum(axis=1, keepdims=True)


def _renorm(m: np.ndarray) -> np.ndarray:
    nrm = np.sqrt(_frob2(m))
    nrm[nrm == 0] = 1.0
    return m / nrm[:, None, None]


def _sample_chunk(src: MPS, count: int, rng: np.random.Generator):
    real = src.is_real
    m = np.ones((count, 1, 1), dtype=float if real else complex)
    letters = np.empty((count, src.n_qubits), dtype=np.int8)
    probs = np.empty((count, src.n_qubits))
    idx = np.arange(count)
    for j, t in enumerate(src.tensors):
        cand = _step(m, t, real)
        p = _checked(_frob2(cand) / 2.0)
        u = rng.random(count)
        k = np.minimum((np.cumsum(p, axis=1) < u[:, None]).sum(axis=1), 3)
        while np.any(p[idx, k] == 0):  # guard against landing on a zero weight by rounding
            bad = p[idx, k] == 0
            k[bad] = np.argmax(p[bad], axis=1)
        letters[:, j] = k
        probs[:, j] = p[idx, k]
        m = _renorm(cand[idx, k])
    return letters, probs


def sample_letters(mps: MPS, num_samples: int, rng: int | np.random.Generator | None = 0):
    """Draw ``num_samples`` strings; returns ``(letters (S, N), conditionals (S, N))``.

    Sample ``i`` uses stream ``(seed, i // CHUNK)``, so results do not depend
    on the worker count.
    """
    src = mps if mps.canonical_flag == "right" else mps.right_canonical()
    seed = root_seed(rng)
    chunks = [(c, min(CHUNK, num_samples - c * CHUNK)) for c in range(-(-num_samples // CHUNK))]
    parts = parallel_map(lambda ck: _sample_chunk(src, ck[1], stream(seed, ck[0])), chunks)
    if not parts:
        return np.empty((0, mps.n_qubits), dtype=np.int8), np.empty((0, mps.n_qubits))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def perfect_pauli_sample(mps: MPS, rng: int | np.random.Generator | None = 0) -> PauliSample:
    letters, probs = sample_letters(mps, 1, rng)
    return PauliSample(
        PauliString.from_codes(int(c) for c in letters[0]),
        float(np.prod(probs[0])),
        tuple(float(p) for p in probs[0]),
    )


def exhaustive_xi(mps: MPS) -> np.ndarray:
    """All ``4^N`` chain-rule products in lexicographic Pauli order (N <= 8)."""
    n = mps.n_qubits
    if n > 8:
        raise ValueError("exhaustive chain rule is limited to 8 qubits")
    src = mps if mps.canonical_flag == "right" else mps.right_canonical()
    real = src.is_real
    m = np.ones((1, 1, 1), dtype=float if real else complex)
    logp = np.zeros(1)
    for t in src.tensors:
        cand = _step(m, t, real)
        b = cand.shape[0]
        p = _frob2(cand) / 2.0
        tot = p.sum(axis=1, keepdims=True)
        cond = np.where(tot > 0, p / np.where(tot > 0, tot, 1), 0)
        with np.errstate(divide="ignore"):
            logp = (logp[:, None] + np.log(cond)).reshape(-1)
        m = _renorm(cand.reshape(b * 4, *cand.shape[2:]))
    return np.exp(logp)


def estimate_m1(mps: MPS, num_samples: int, rng: int | np.random.Generator | None = 0) -> tuple[float, float]:
    """Monte Carlo ``M_1 = -E[log Xi] - N log 2`` and its standard error."""
    if num_samples < 100:
        raise ValueError("at least 100 samples are required")
    _, probs = sample_letters(mps, num_samples, rng)
    log_xi = np.log(probs).sum(axis=1)
    vals = -log_xi - mps.n_qubits * math.log(2)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(num_samples))


def estimate_m_n_sampled(mps: MPS, n: float, num_samples: int,
                         rng: int | np.random.Generator | None = 0) -> tuple[float, float]:
    """Experimental ``M_n`` from ``E[Xi^{n-1}]`` under ``Xi`` sampling.

    The relative variance of ``Xi^{n-1}`` can grow exponentially with the
    number of qubits, so the required sample count may be prohibitive.
    The error is propagated to first order through the logarithm.
    """
    if n == 1:
        return estimate_m1(mps, num_samples, rng)
    if num_samples < 100:
        raise ValueError("at least 100 samples are required")
    _, probs = sample_letters(mps, num_samples, rng)
    nq = mps.n_qubits
    # E[(2^N Xi)^{n-1}] = sum_P <P>^{2n} / 2^N
    w = np.exp((n - 1) * (np.log(probs).sum(axis=1) + nq * math.log(2)))
    mean = w.mean()
    err = w.std(ddof=1) / math.sqrt(num_samples)
    est = math.log(mean) / (1 - n)
    return float(est), float(abs(err / (mean * (1 - n))))
