import math

import numpy as np
import pytest

from magic_lab.errors import SizeLimitError
from magic_lab.stabilizer import (
    enumerate_stabilizer_states,
    stabilizer_count,
    stabilizer_fidelity,
)
from magic_lab.states import GATES, apply_matrix, magic_state


def _canonical(v):
    k = int(np.argmax(np.abs(v) > 1e-9))
    v = v * abs(v[k]) / v[k]
    return tuple(np.round(v, 9).view(float).tolist())


def bfs_orbit(n):
    """Orbit of |0..0> under H, S on every qubit and CZ on every pair."""
    moves = [(GATES["H"], [q]) for q in range(n)] + [(GATES["S"], [q]) for q in range(n)]
    moves += [(GATES["CZ"], [a, b]) for a in range(n) for b in range(a + 1, n)]
    start = np.zeros(2**n, dtype=complex)
    start[0] = 1
    seen = {_canonical(start)}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for u, sites in moves:
                w = apply_matrix(v, u, sites)
                key = _canonical(w)
                if key not in seen:
                    seen.add(key)
                    nxt.append(w)
        frontier = nxt
    return seen


@pytest.mark.parametrize("n, count", [(1, 6), (2, 60), (3, 1080), (4, 36720)])
def test_counts(n, count):
    stabs = enumerate_stabilizer_states(n)
    assert len(stabs) == count == stabilizer_count(n)


@pytest.mark.parametrize("n", [1, 2])
def test_matches_clifford_orbit(n):
    stabs = enumerate_stabilizer_states(n)
    assert {_canonical(v) for v in stabs.amplitudes} == bfs_orbit(n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_structure_and_uniqueness(n):
    amps = enumerate_stabilizer_states(n).amplitudes
    for v in amps:
        mags = np.abs(v)[np.abs(v) > 1e-12]
        np.testing.assert_allclose(mags, mags[0], atol=1e-12)
        phases = v[np.abs(v) > 1e-12] / mags[0]
        assert np.all(np.min(np.abs(phases[:, None] - np.array([1, -1, 1j, -1j])[None]), axis=1) < 1e-12)
    gram = np.abs(amps.conj() @ amps.T) ** 2
    np.fill_diagonal(gram, 0)
    assert gram.max() < 1 - 1e-9


def test_pauli_table_has_full_stabilizer_groups():
    table = enumerate_stabilizer_states(3).pauli_table()
    assert np.all(np.count_nonzero(table, axis=1) == 8)


def test_cap():
    with pytest.raises(SizeLimitError):
        enumerate_stabilizer_states(5)


def test_fidelity_examples():
    assert stabilizer_fidelity(enumerate_stabilizer_states(2).amplitudes[17]).d_min == pytest.approx(0, abs=1e-12)
    rep = stabilizer_fidelity(magic_state())
    assert rep.stab_fidelity == pytest.approx((1 + 1 / math.sqrt(3)) / 2, abs=1e-12)
    assert rep.d_min == pytest.approx(-math.log((1 + 1 / math.sqrt(3)) / 2), abs=1e-12)


def test_dmin_subadditive_on_chi_pair():
    single = stabilizer_fidelity(magic_state()).d_min
    pair = stabilizer_fidelity(magic_state().tensor(magic_state())).d_min
    assert pair <= 2 * single + 1e-12


def test_argmax_tie_breaks_low():
    # |0> is a stabilizer state; with itself enumerated once, the argmax is its index
    amps = enumerate_stabilizer_states(1).amplitudes
    rep = stabilizer_fidelity(amps[3])
    assert rep.argmax_index == 3
