"""Figure-data builders shared by the command line and the test-suite.

Every builder is deterministic given its seed. CSV files start with a
``# schema:`` comment naming the layout and its version.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from magic_lab.entropy import se_values
from magic_lab.mps.core import MPS, compress, fidelity
from magic_lab.mps.dmrg import DMRGResult, dmrg_ground_state
from magic_lab.mps.replica import replica_m_n
from magic_lab.mps.sampling import estimate_m1
from magic_lab.protocols import delta_m_curve

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Profile:
    n_qubits: int
    chi: int
    samples: int
    chi_m2: int
    instances: int
    sample_list: tuple
    ref_samples: int
    chi_list: tuple
    chi_ref: int


PROFILES = {
    "desk": Profile(16, 20, 10_000, 6, 20, (100, 1_000, 10_000), 100_000, (2, 3, 4, 5, 6, 7), 8),
    "paper": Profile(32, 40, 100_000, 8, 100, (100, 1_000, 10_000), 100_000, (4, 8, 16, 32), 64),
}

FIG2_DELTAS = (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0)


def schema_line(name: str, columns: Sequence[str]) -> str:
    return f"# schema: magic_lab.{name} v{SCHEMA_VERSION} columns={','.join(columns)}"


def write_csv(path, name: str, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(schema_line(name, columns) + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def child_seed(seed: int, *index: int) -> int:
    return int(np.random.SeedSequence([seed, *index]).generate_state(1, dtype=np.uint64)[0])


def fig1_rows(n_grid: Sequence[float]):
    return delta_m_curve(n_grid)


def m2_compressed(mps: MPS, chi_m2: int) -> tuple[float, int, float]:
    """Replica ``M_2`` on the state compressed to bond ``chi_m2``.

    Returns ``(M_2, bond used, compression fidelity)``; the fidelity is 1
    when no truncation was needed.
    """
    if mps.max_bond > chi_m2:
        small, f = compress(mps, chi_m2)
    else:
        small, f = mps, 1.0
    return replica_m_n(small, 2), small.max_bond, f


EXACT_MAX_QUBITS = 16


def exact_m_n(mps: MPS, orders: Sequence[float]) -> list[float]:
    """Exact ``M_n`` of an MPS by streaming all ``4^N`` Pauli expectations.

    Deterministic cross-check for sampled values; feasible up to 16 qubits
    with the compiled kernel (minutes per state at N = 16).
    """
    psi = mps.amplitudes(max_qubits=EXACT_MAX_QUBITS)
    return se_values(psi, list(orders))[:, 0].tolist()


@dataclass(frozen=True)
class XXZRow:
    delta: float
    m1_hat: float
    m1_stderr: float
    m2: float
    energy: float
    c_squared: float
    m2_bond: int
    m2_fidelity: float
    status: str

    def as_tuple(self):
        return (self.delta, self.m1_hat, self.m1_stderr, self.m2, self.energy,
                self.c_squared, self.m2_bond, self.m2_fidelity, self.status)


FIG2_COLUMNS = ("delta", "m1_hat", "m1_stderr", "m2", "energy", "c_squared", "m2_bond",
                "m2_fidelity", "dmrg_status")


def xxz_point(n_qubits: int, delta: float, chi: int, samples: int, chi_m2: int, seed: int,
              num_sweeps: int = 10) -> tuple[XXZRow, DMRGResult]:
    res = dmrg_ground_state(n_qubits, delta, chi, num_sweeps, rng=child_seed(seed, 0))
    m1, se = estimate_m1(res.mps, samples, child_seed(seed, 1))
    m2, bond, f = m2_compressed(res.mps, chi_m2)
    n = n_qubits
    row = XXZRow(delta, m1 / n, se / n, m2 / n, res.energy, res.c_squared, bond, f, res.status)
    return row, res


def fig2_rows(n_qubits: int, deltas: Sequence[float], chi: int, samples: int, chi_m2: int,
              seed: int) -> list[XXZRow]:
    return [xxz_point(n_qubits, d, chi, samples, chi_m2, seed)[0] for d in deltas]


@dataclass(frozen=True)
class SamplingErrorTable:
    sample_sizes: tuple
    mean_abs_error: tuple
    reference: float
    slope: float


def fig4_table(n_qubits: int, delta: float, chi: int, sample_list: Sequence[int], instances: int,
               ref_samples: int, seed: int) -> SamplingErrorTable:
    """Mean ``|m1_hat - m1_ref|`` (densities) over independent sampling runs."""
    res = dmrg_ground_state(n_qubits, delta, chi, rng=child_seed(seed, 0))
    ref, _ = estimate_m1(res.mps, ref_samples, child_seed(seed, 1))
    errs = []
    for s in sample_list:
        vals = [estimate_m1(res.mps, s, child_seed(seed, 2, s, i))[0] for i in range(instances)]
        errs.append(float(np.mean(np.abs(np.array(vals) - ref))) / n_qubits)
    slope = float(np.polyfit(np.log(sample_list), np.log(errs), 1)[0])
    return SamplingErrorTable(tuple(sample_list), tuple(errs), ref / n_qubits, slope)


@dataclass(frozen=True)
class BondRow:
    chi: int
    m1_hat: float
    m2: float
    fidelity_to_ref: float
    m2_bond: int


def fig6_rows(n_qubits: int, delta: float, chi_list: Sequence[int], chi_ref: int, samples: int,
              chi_m2: int, seed: int) -> tuple[list[BondRow], BondRow]:
    """Per bond dimension: m1 (sampled), m2 (replica) and fidelity with the
    ``chi_ref`` ground state. Returns the rows and the reference row."""
    if chi_ref < max(chi_list):
        raise ValueError("chi_ref must be at least max(chi_list)")
    dseed = child_seed(seed, 0)

    def point(chi):
        res = dmrg_ground_state(n_qubits, delta, chi, rng=dseed)
        m1, _ = estimate_m1(res.mps, samples, child_seed(seed, 1, chi))
        m2, bond, _ = m2_compressed(res.mps, chi_m2)
        return res, m1 / n_qubits, m2 / n_qubits, bond

    ref_res, ref_m1, ref_m2, ref_bond = point(chi_ref)
    rows = []
    for chi in chi_list:
        res, m1, m2, bond = point(chi)
        rows.append(BondRow(chi, m1, m2, fidelity(res.mps, ref_res.mps), bond))
    return rows, BondRow(chi_ref, ref_m1, ref_m2, 1.0, ref_bond)


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        a, b, h = (float(t) for t in text.split(":"))
        if h <= 0 or b < a:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((b - a) / h + 1e-9)) + 1
        return [round(a + k * h, 12) for k in range(count)]
    return [float(t) for t in text.split(",") if t.strip()]


def parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]
