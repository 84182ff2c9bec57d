"""Phase-free Pauli strings and their expectation values on dense states.

Site codes are fixed repo-wide as ``I=0, X=1, Y=2, Z=3``. Qubit 0 (the
leftmost letter of a word) is the most significant bit of an amplitude
index. A string is packed two bits per site into a single integer, so the
packed value doubles as the lexicographic rank of the word.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from magic_lab import kernels
from magic_lab.errors import DimensionMismatchError, SizeLimitError

MAX_QUBITS = 14
LETTERS = "IXYZ"

_SINGLE = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(code: int) -> np.ndarray:
    return _SINGLE[code].copy()


def check_size(n_qubits: int, cap: int = MAX_QUBITS) -> None:
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    if n_qubits > cap:
        raise SizeLimitError(f"{n_qubits} qubits exceeds the cap of {cap}")


@dataclass(frozen=True)
class PauliString:
    """An element of the phase-free Pauli set on ``n_qubits`` sites."""

    n_qubits: int
    packed: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if not 0 <= self.packed < 4**self.n_qubits:
            raise ValueError("packed code out of range")

    @classmethod
    def from_codes(cls, codes) -> PauliString:
        codes = list(codes)
        packed = 0
        for c in codes:
            if c not in (0, 1, 2, 3):
                raise ValueError(f"invalid Pauli code {c!r}")
            packed = 4 * packed + int(c)
        return cls(len(codes), packed)

    @classmethod
    def from_word(cls, word: str) -> PauliString:
        try:
            return cls.from_codes(LETTERS.index(ch) for ch in word.upper())
        except ValueError:
            raise ValueError(f"invalid Pauli word {word!r}") from None

    @classmethod
    def from_masks(cls, n_qubits: int, x: int, z: int) -> PauliString:
        return cls(n_qubits, 2 * _spread(z) + _spread(x ^ z))

    @property
    def codes(self) -> tuple[int, ...]:
        out = []
        p = self.packed
        for _ in range(self.n_qubits):
            out.append(p & 3)
            p >>= 2
        return tuple(reversed(out))

    @property
    def word(self) -> str:
        return "".join(LETTERS[c] for c in self.codes)

    @property
    def masks(self) -> tuple[int, int]:
        """``(x, z)`` bit masks with ``P = i^{|x&z|} X^x Z^z``."""
        x = z = 0
        for c in self.codes:
            x = (x << 1) | (c in (1, 2))
            z = (z << 1) | (c >= 2)
        return x, z

    @property
    def weight(self) -> int:
        return sum(c != 0 for c in self.codes)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for c in self.codes:
            out = np.kron(out, _SINGLE[c])
        return out

    def apply(self, amplitudes) -> np.ndarray:
        """Return ``P|psi>`` in O(2^N) without building the matrix."""
        psi = np.asarray(amplitudes, dtype=complex)
        if psi.shape != (2**self.n_qubits,):
            raise DimensionMismatchError("state and Pauli string sizes differ")
        x, z = self.masks
        j = np.arange(psi.size)
        signs = 1 - 2 * (kernels.popcount(j & z) & 1)
        phase = 1j ** (bin(x & z).count("1") & 3)
        out = np.empty_like(psi)
        out[j ^ x] = phase * signs * psi
        return out

    def __str__(self) -> str:
        return self.word


def _spread(m: int) -> int:
    """Move bit k of ``m`` to bit 2k (base-4 digit k)."""
    out = 0
    k = 0
    while m:
        if m & 1:
            out |= 1 << (2 * k)
        m >>= 1
        k += 1
    return out


def spread_table(n_qubits: int) -> np.ndarray:
    d = 2**n_qubits
    m = np.arange(d, dtype=np.int64)
    out = np.zeros(d, dtype=np.int64)
    for k in range(n_qubits):
        out |= ((m >> k) & 1) << (2 * k)
    return out


def enumerate_paulis(n_qubits: int) -> Iterator[PauliString]:
    """Yield all ``4**n_qubits`` strings in lexicographic order (I<X<Y<Z)."""
    check_size(n_qubits)
    for packed in range(4**n_qubits):
        yield PauliString(n_qubits, packed)


def _amplitudes(state) -> np.ndarray:
    amps = getattr(state, "amplitudes", state)
    return np.asarray(amps, dtype=complex)


def expectation(state, p: PauliString) -> float:
    """Real expectation value ``<psi|P|psi>``."""
    psi = _amplitudes(state)
    if psi.size != 2**p.n_qubits:
        raise DimensionMismatchError(
            f"state has {psi.size} amplitudes, Pauli string acts on {p.n_qubits} qubits"
        )
    val = np.vdot(psi, p.apply(psi))
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"non-real Pauli expectation {val}")
    return float(val.real)


def iter_expectation_blocks(states, block_elems: int = 1 << 22):
    """Stream all Pauli expectations of a batch of states.

    Yields ``(x0, x1, block)`` with ``block[b, x - x0, z]`` the expectation of
    the string with masks ``(x, z)`` on state ``b``. Peak memory is bounded
    by ``block_elems`` doubles.
    """
    psi = np.atleast_2d(np.asarray(states, dtype=complex))
    nb, d = psi.shape
    step = max(1, block_elems // (nb * d))
    for x0 in range(0, d, step):
        x1 = min(d, x0 + step)
        yield x0, x1, kernels.pauli_block(psi, x0, x1)


def pauli_spectrum(states) -> np.ndarray:
    """All Pauli expectations, shape ``(..., 2**N, 2**N)`` indexed ``[x, z]``."""
    psi = np.asarray(states, dtype=complex)
    single = psi.ndim == 1
    psi = np.atleast_2d(psi)
    d = psi.shape[1]
    out = kernels.pauli_block(psi, 0, d)
    return out[0] if single else out


def lexicographic_order(n_qubits: int) -> np.ndarray:
    """Packed word index of every ``(x, z)`` cell, shape ``(2**N, 2**N)``."""
    s = spread_table(n_qubits)
    d = 2**n_qubits
    x = np.arange(d)[:, None]
    z = np.arange(d)[None, :]
    return 2 * s[z] + s[x ^ z]


@dataclass(frozen=True)
class XiDistribution:
    """``Xi_P = <psi|P|psi>^2 / 2^N`` over all Pauli strings.

    ``values[k]`` belongs to the string with packed code ``k``.
    """

    n_qubits: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, p: PauliString | str) -> float:
        if isinstance(p, str):
            p = PauliString.from_word(p)
        return float(self.values[p.packed])

    def __len__(self) -> int:
        return self.values.size

    def items(self):
        for k, v in enumerate(self.values):
            yield PauliString(self.n_qubits, k), float(v)

    def total(self) -> float:
        return math.fsum(self.values)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pauli_word", "xi_value"])
            for p, v in self.items():
                w.writerow([p.word, f"{v:.17g}"])

    @classmethod
    def from_csv(cls, path) -> XiDistribution:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = len(rows[0]["pauli_word"])
        values = np.zeros(4**n)
        for row in rows:
            values[PauliString.from_word(row["pauli_word"]).packed] = float(row["xi_value"])
        return cls(n, values)


def xi_distribution(state) -> XiDistribution:
    psi = _amplitudes(state)
    n = int(round(math.log2(psi.size)))
    check_size(n)
    spec = pauli_spectrum(psi)
    values = np.empty(4**n)
    values[lexicographic_order(n).ravel()] = (spec**2).ravel() / 2**n
    return XiDistribution(n, values)
