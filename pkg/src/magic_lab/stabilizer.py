"""Enumeration of all pure stabilizer states and the stabilizer fidelity.

Every stabilizer state has the affine form

    |S> = 2^{-k/2} sum_{x in A} i^{c.y(x)} (-1)^{d.y(x) + sum_{i<j} Q_ij y_i y_j} |x>

where ``A = shift + span(rows)`` is a k-dimensional affine subspace of
F_2^N written in reduced row-echelon form and ``y(x)`` are the bits of x at
the pivot positions. Each (subspace, coset, c, d, Q) gives a distinct state,
and the total matches ``2^N prod_{k=1}^N (2^k + 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from magic_lab.errors import SizeLimitError
from magic_lab.pauli import lexicographic_order, pauli_spectrum

MAX_STAB_QUBITS = 4


def stabilizer_count(n_qubits: int) -> int:
    return 2**n_qubits * math.prod(2**k + 1 for k in range(1, n_qubits + 1))


@dataclass(frozen=True)
class StabilizerDescriptor:
    """Canonical affine-form data of one stabilizer state.

    ``rows`` span the support's linear part (RREF, qubit 0 = most significant
    bit), ``shift`` has zeros on the pivot columns. ``imag``, ``sign`` and
    ``quadratic`` are bit masks over the k pivots (``quadratic`` over the
    k(k-1)/2 pivot pairs in lexicographic order).
    """

    rows: tuple[int, ...]
    shift: int
    imag: int
    sign: int
    quadratic: int


@dataclass(frozen=True, eq=False)
class StabilizerBasisSet:
    n_qubits: int
    descriptors: tuple[StabilizerDescriptor, ...]
    amplitudes: np.ndarray

    def __len__(self) -> int:
        return len(self.descriptors)

    def pauli_table(self) -> np.ndarray:
        """``<S_i|P|S_i>`` in {0, +-1}, shape ``(len, 4**N)``, lexicographic P."""
        return _pauli_table(self.n_qubits)


def _subspaces(n: int, k: int):
    """Yield (pivots, rows) for all k-dim subspaces of F_2^n in RREF."""
    bit = lambda q: 1 << (n - 1 - q)  # noqa: E731
    for pivots in combinations(range(n), k):
        free = [[q for q in range(p + 1, n) if q not in pivots] for p in pivots]
        for assignment in product(*[product((0, 1), repeat=len(f)) for f in free]):
            rows = []
            for p, f, vals in zip(pivots, free, assignment):
                r = bit(p)
                for q, v in zip(f, vals):
                    if v:
                        r |= bit(q)
                rows.append(r)
            yield pivots, tuple(rows)


def _phase_tables(k: int):
    """Amplitude phases for every (c, d, Q) choice, shape ``(4^k 2^{k(k-1)/2}, 2^k)``."""
    ys = np.array(list(product((0, 1), repeat=k)), dtype=np.int64).reshape(2**k, k)
    pairs = list(combinations(range(k), 2))
    masks = np.array(list(product((0, 1), repeat=k)), dtype=np.int64).reshape(2**k, k)
    qmasks = np.array(list(product((0, 1), repeat=len(pairs))), dtype=np.int64).reshape(
        2 ** len(pairs), len(pairs)
    )
    lin = masks @ ys.T  # (2^k, 2^k): c.y
    if pairs:
        ypairs = np.stack([ys[:, i] * ys[:, j] for i, j in pairs], axis=1)
        quad = qmasks @ ypairs.T
    else:
        quad = np.zeros((1, 2**k), dtype=np.int64)
    e = lin[:, None, None, :] + 2 * lin[None, :, None, :] + 2 * quad[None, None, :, :]
    e = e.reshape(-1, 2**k) % 4
    phases = np.array([1, 1j, -1, -1j])[e]
    bits = lambda m: sum(int(b) << (len(m) - 1 - i) for i, b in enumerate(m))  # noqa: E731
    labels = [
        (bits(c), bits(d), bits(q)) for c in masks for d in masks for q in qmasks
    ]
    return ys, phases, labels


@lru_cache(maxsize=None)
def enumerate_stabilizer_states(n_qubits: int) -> StabilizerBasisSet:
    if not 1 <= n_qubits <= MAX_STAB_QUBITS:
        raise SizeLimitError(f"stabilizer enumeration supports 1..{MAX_STAB_QUBITS} qubits")
    n = n_qubits
    d = 2**n
    descriptors: list[StabilizerDescriptor] = []
    blocks: list[np.ndarray] = []
    for k in range(n + 1):
        ys, phases, labels = _phase_tables(k)
        for pivots, rows in _subspaces(n, k):
            pivot_mask = sum(1 << (n - 1 - p) for p in pivots)
            span = np.zeros(2**k, dtype=np.int64)
            for i, y in enumerate(ys):
                v = 0
                for r, yi in zip(rows, y):
                    if yi:
                        v ^= r
                span[i] = v
            for shift in range(d):
                if shift & pivot_mask:
                    continue
                block = np.zeros((len(labels), d), dtype=complex)
                block[:, span ^ shift] = phases / math.sqrt(2**k)
                blocks.append(block)
                descriptors.extend(
                    StabilizerDescriptor(rows, shift, c, s, q) for c, s, q in labels
                )
    amps = np.concatenate(blocks, axis=0)
    amps.setflags(write=False)
    return StabilizerBasisSet(n, tuple(descriptors), amps)


@lru_cache(maxsize=None)
def _pauli_table(n_qubits: int) -> np.ndarray:
    stabs = enumerate_stabilizer_states(n_qubits)
    order = lexicographic_order(n_qubits).ravel()
    table = np.empty((len(stabs), 4**n_qubits), dtype=np.int8)
    chunk = 4096
    for i in range(0, len(stabs), chunk):
        spec = pauli_spectrum(stabs.amplitudes[i : i + chunk])
        flat = spec.reshape(spec.shape[0], -1)
        table[i : i + chunk, order] = np.rint(flat).astype(np.int8)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class FidelityReport:
    stab_fidelity: float
    d_min: float
    argmax_index: int


def _amps(state) -> np.ndarray:
    return np.asarray(getattr(state, "amplitudes", state), dtype=complex)


def stabilizer_overlaps(state) -> np.ndarray:
    """``|<S_i|psi>|^2`` for every enumerated stabilizer state."""
    psi = _amps(state)
    n = psi.size.bit_length() - 1
    stabs = enumerate_stabilizer_states(n)
    return np.abs(stabs.amplitudes.conj() @ psi) ** 2


def stabilizer_fidelity(state) -> FidelityReport:
    """Exact maximal overlap with a stabilizer state; ties go to the lowest id."""
    ov = stabilizer_overlaps(state)
    i = int(np.argmax(ov))
    f = float(min(ov[i], 1.0))
    return FidelityReport(f, -math.log(f), i)


def min_relative_entropy(state) -> float:
    return stabilizer_fidelity(state).d_min
