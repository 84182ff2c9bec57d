"""Open-boundary matrix product states.

Tensor ``k`` has shape ``(chi_k, 2, chi_{k+1})`` with ``chi_0 = chi_N = 1``;
site 0 is the most significant bit of the dense amplitude index, so
``to_dense`` reproduces the ordering used by :class:`DenseState`.
"""
from __future__ import annotations

import io
import json
import math
from typing import Sequence

import numpy as np

from magic_lab.errors import DimensionMismatchError, SizeLimitError, TruncationError
from magic_lab.pauli import MAX_QUBITS
from magic_lab.states import DenseState

FORMAT_VERSION = 1
CANONICAL_FLAGS = ("none", "left", "right", "mixed")


def _phase_fix(q: np.ndarray, r: np.ndarray):
    """Make ``diag(r)`` real non-negative so QR output is unique."""
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return q * ph[None, :], r * ph.conj()[:, None]


def _qr(m: np.ndarray):
    q, r = np.linalg.qr(m)
    return _phase_fix(q, r)


class MPS:
    """Immutable tensor train; operations return new instances.

    ``canonical_flag`` is one of ``none``, ``left``, ``right`` or ``mixed``
    (then ``center`` is the orthogonality site).
    """

    __slots__ = ("tensors", "canonical_flag", "center")

    def __init__(self, tensors: Sequence[np.ndarray], canonical_flag: str = "none",
                 center: int | None = None):
        ts = []
        for k, t in enumerate(tensors):
            t = np.array(t)
            if not np.iscomplexobj(t) and t.dtype != np.float64:
                t = t.astype(np.float64)
            if t.ndim != 3 or t.shape[1] != 2:
                raise ValueError(f"tensor {k} must have shape (chi, 2, chi')")
            if k and ts[-1].shape[2] != t.shape[0]:
                raise ValueError(f"bond mismatch between sites {k - 1} and {k}")
            t.setflags(write=False)
            ts.append(t)
        if not ts:
            raise ValueError("an MPS needs at least one site")
        if ts[0].shape[0] != 1 or ts[-1].shape[2] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        if canonical_flag not in CANONICAL_FLAGS:
            raise ValueError(f"unknown canonical flag {canonical_flag!r}")
        object.__setattr__(self, "tensors", tuple(ts))
        object.__setattr__(self, "canonical_flag", canonical_flag)
        object.__setattr__(self, "center", center)

    def __setattr__(self, name, value):
        raise AttributeError("MPS is immutable")

    @property
    def n_qubits(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[0] for t in self.tensors] + [1]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    @property
    def is_real(self) -> bool:
        return not any(np.iscomplexobj(t) for t in self.tensors)

    # contractions ----------------------------------------------------------
    def overlap(self, other: MPS) -> complex:
        """``<self|other>`` by transfer contraction, O(N chi^3)."""
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatchError("MPS sizes differ")
        env = np.ones((1, 1))
        for a, b in zip(self.tensors, other.tensors):
            env = np.einsum("ij,isk,jsl->kl", env, a.conj(), b, optimize=True)
        return complex(env[0, 0])

    def norm(self) -> float:
        return math.sqrt(max(self.overlap(self).real, 0.0))

    def amplitudes(self, max_qubits: int = MAX_QUBITS) -> np.ndarray:
        """Raw normalized amplitude vector; ``max_qubits`` raises the size cap."""
        if self.n_qubits > max_qubits:
            raise SizeLimitError(f"dense contraction is capped at {max_qubits} qubits")
        v = np.ones((1, 1), dtype=complex)
        for t in self.tensors:
            v = np.tensordot(v, t, axes=(1, 0)).reshape(-1, t.shape[2])
        return v[:, 0] / np.linalg.norm(v[:, 0])

    def to_dense(self) -> DenseState:
        return DenseState(self.amplitudes())

    # canonical forms -------------------------------------------------------
    def normalize(self) -> MPS:
        return self.right_canonical()

    def right_canonical(self) -> MPS:
        """Right-isometric tensors on sites 1..N-1 and a normalized site 0."""
        ts = list(self.tensors)
        for k in range(len(ts) - 1, 0, -1):
            cl, _, cr = ts[k].shape
            q, r = _qr(ts[k].reshape(cl, 2 * cr).T)
            ts[k] = q.T.reshape(-1, 2, cr)
            ts[k - 1] = np.tensordot(ts[k - 1], r.T, axes=(2, 0))
        ts[0] = ts[0] / np.linalg.norm(ts[0])
        return MPS(ts, "right")

    def left_canonical(self) -> MPS:
        ts = list(self.tensors)
        for k in range(len(ts) - 1):
            cl, _, cr = ts[k].shape
            q, r = _qr(ts[k].reshape(2 * cl, cr))
            ts[k] = q.reshape(cl, 2, -1)
            ts[k + 1] = np.tensordot(r, ts[k + 1], axes=(1, 0))
        ts[-1] = ts[-1] / np.linalg.norm(ts[-1])
        return MPS(ts, "left")

    def canonicalize(self, form: str = "right") -> MPS:
        if form == "right":
            return self.right_canonical()
        if form == "left":
            return self.left_canonical()
        raise ValueError("form must be 'left' or 'right'")

    def isometry_error(self) -> float:
        """Largest deviation from the isometry condition implied by the flag."""
        err = 0.0
        ts = self.tensors
        if self.canonical_flag == "left":
            for t in ts[:-1]:
                m = t.reshape(-1, t.shape[2])
                err = max(err, np.abs(m.conj().T @ m - np.eye(m.shape[1])).max())
        elif self.canonical_flag == "right":
            for t in ts[1:]:
                m = t.reshape(t.shape[0], -1)
                err = max(err, np.abs(m @ m.conj().T - np.eye(m.shape[0])).max())
        return float(err)

    # serialization ---------------------------------------------------------
    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    def to_bytes(self) -> bytes:
        header = {
            "version": FORMAT_VERSION,
            "n_qubits": self.n_qubits,
            "bond_dims": self.bond_dims,
            "canonical_flag": self.canonical_flag,
        }
        buf = io.BytesIO()
        buf.write(json.dumps(header).encode() + b"\n")
        for t in self.tensors:
            buf.write(np.ascontiguousarray(t, dtype="<c16").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> MPS:
        head, _, payload = data.partition(b"\n")
        header = json.loads(head)
        if header.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported MPS file version {header.get('version')!r}")
        dims = header["bond_dims"]
        if len(dims) != header["n_qubits"] + 1:
            raise ValueError("bond_dims length does not match n_qubits")
        ts, off = [], 0
        for k in range(header["n_qubits"]):
            count = dims[k] * 2 * dims[k + 1]
            chunk = payload[off: off + 16 * count]
            if len(chunk) != 16 * count:
                raise ValueError("truncated MPS payload")
            ts.append(np.frombuffer(chunk, dtype="<c16").reshape(dims[k], 2, dims[k + 1]).astype(complex))
            off += 16 * count
        if off != len(payload):
            raise ValueError("trailing bytes after MPS payload")
        flag = header.get("canonical_flag", "none")
        return cls(ts, flag if flag in CANONICAL_FLAGS else "none")

    @classmethod
    def load(cls, path) -> MPS:
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def __repr__(self) -> str:
        return f"MPS(n_qubits={self.n_qubits}, bond_dims={self.bond_dims}, {self.canonical_flag})"


def fidelity(a: MPS, b: MPS) -> float:
    """``|<a|b>|^2 / (<a|a><b|b>)``."""
    ov = a.overlap(b)
    den = a.overlap(a).real * b.overlap(b).real
    return float(min(1.0, abs(ov) ** 2 / den))


def product_mps(factors: Sequence[np.ndarray]) -> MPS:
    ts = []
    for f in factors:
        f = np.asarray(f, dtype=complex)
        ts.append((f / np.linalg.norm(f)).reshape(1, 2, 1))
    return MPS(ts, "right")


def random_mps(n_qubits: int, chi: int, rng: np.random.Generator, *, real: bool = False) -> MPS:
    """Gaussian random tensors, bonds capped by ``chi`` and the Hilbert-space
    dimension on either side, returned right-canonical."""
    dims = [min(chi, 2**k, 2 ** (n_qubits - k)) for k in range(n_qubits + 1)]
    ts = []
    for k in range(n_qubits):
        shape = (dims[k], 2, dims[k + 1])
        t = rng.normal(size=shape)
        if not real:
            t = t + 1j * rng.normal(size=shape)
        ts.append(t)
    return MPS(ts).right_canonical()


def _truncate(s: np.ndarray, chi_max: int | None, cutoff: float) -> int:
    """Number of singular values kept: discarded weight below ``cutoff``."""
    w = s**2
    total = w.sum()
    tail = np.cumsum(w[::-1])[::-1] / total  # tail[k] = weight of s[k:]
    keep = int(np.sum(tail > cutoff)) or 1
    if chi_max is not None:
        keep = min(keep, chi_max)
    return max(keep, 1)


def from_dense(state, chi_max: int | None = None, svd_cutoff: float = 1e-14,
               min_fidelity: float | None = None) -> MPS:
    """Sequential SVD of a dense state into a left-canonical MPS."""
    psi = np.asarray(getattr(state, "amplitudes", state), dtype=complex)
    n = psi.size.bit_length() - 1
    if psi.size != 2**n:
        raise ValueError("amplitude count is not a power of two")
    if n > MAX_QUBITS:
        raise SizeLimitError(f"from_dense is capped at {MAX_QUBITS} qubits")
    psi = psi / np.linalg.norm(psi)
    ts = []
    rest = psi.reshape(1, -1)
    for k in range(n - 1):
        cl = rest.shape[0]
        u, s, vh = np.linalg.svd(rest.reshape(2 * cl, -1), full_matrices=False)
        keep = _truncate(s, chi_max, svd_cutoff)
        ts.append(u[:, :keep].reshape(cl, 2, keep))
        rest = s[:keep, None] * vh[:keep]
    ts.append((rest / np.linalg.norm(rest)).reshape(-1, 2, 1))
    out = MPS(ts, "left")
    if min_fidelity is not None:
        f = abs(np.vdot(out.to_dense().amplitudes, psi)) ** 2
        if f < min_fidelity:
            raise TruncationError(f, min_fidelity)
    return out


def compress(mps: MPS, chi_max: int | None = None, svd_cutoff: float = 1e-14,
             min_fidelity: float | None = None) -> tuple[MPS, float]:
    """SVD truncation sweep from a right-canonical form.

    Returns the left-canonical truncated state and its fidelity with the input.
    """
    src = mps.right_canonical()
    ts = list(src.tensors)
    for k in range(len(ts) - 1):
        cl, _, cr = ts[k].shape
        u, s, vh = np.linalg.svd(ts[k].reshape(2 * cl, cr), full_matrices=False)
        keep = _truncate(s, chi_max, svd_cutoff)
        ts[k] = u[:, :keep].reshape(cl, 2, keep)
        ts[k + 1] = np.tensordot(s[:keep, None] * vh[:keep], ts[k + 1], axes=(1, 0))
    ts[-1] = ts[-1] / np.linalg.norm(ts[-1])
    out = MPS(ts, "left")
    f = fidelity(out, src)
    if min_fidelity is not None and f < min_fidelity:
        raise TruncationError(f, min_fidelity)
    return out, f
