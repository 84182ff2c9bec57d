import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magic_lab.entropy import (
    omega_scaling_fit,
    renyi_se,
    se_curve,
    se_values,
    stabilizer_entropy,
    von_neumann_se,
)
from magic_lab.pauli import xi_distribution
from magic_lab.stabilizer import enumerate_stabilizer_states
from magic_lab.states import apply_gate, haar_random_state, magic_state, make_phi_star, zero_state

CHI = magic_state()


def test_single_qubit_magic_values():
    assert renyi_se(CHI, 2).value == pytest.approx(math.log(1.5), abs=1e-12)
    assert von_neumann_se(CHI).value == pytest.approx(0.5 * math.log(3), abs=1e-12)


def test_additivity_examples():
    two = CHI.tensor(CHI)
    assert renyi_se(two, 2).value == pytest.approx(2 * math.log(1.5), abs=1e-12)
    three = two.tensor(CHI)
    assert von_neumann_se(three).value == pytest.approx(1.5 * math.log(3), abs=1e-12)


def test_von_neumann_from_xi():
    xi = np.array(xi_distribution(CHI).values)
    h = -sum(v * math.log(v) for v in xi if v > 0)
    assert von_neumann_se(CHI).value == pytest.approx(h - math.log(2), abs=1e-14)


def test_n_equal_one_redirects():
    with pytest.raises(ValueError, match="von_neumann"):
        renyi_se(CHI, 1)


def test_product_zero_state_is_free():
    for n in [0, 0.5, 1, 2, 3.7]:
        assert stabilizer_entropy(zero_state(4), n) == pytest.approx(0, abs=1e-12)


def test_curve_matches_pointwise():
    grid = [0, 0.5, 1, 2, 3]
    curve = se_curve(make_phi_star(), grid)
    for v in curve:
        assert v.value == pytest.approx(stabilizer_entropy(make_phi_star(), v.renyi_index), abs=1e-13)
    assert [v.value for v in se_curve(zero_state(2), [0, 0.5, 2])] == pytest.approx([0, 0, 0], abs=1e-12)


def test_hartley_counts_support():
    # |chi>: all four Pauli expectations nonzero -> M_0 = log(4) - log(2)
    assert renyi_se(CHI, 0).value == pytest.approx(math.log(2), abs=1e-12)


@pytest.mark.parametrize("n_qubits", [1, 2, 3])
def test_faithfulness_on_all_stabilizer_states(n_qubits):
    stabs = enumerate_stabilizer_states(n_qubits).amplitudes
    vals = se_values(stabs, [0, 0.5, 1, 2, 3])
    assert np.abs(vals).max() < 1e-10


def test_magic_products_are_detected():
    for k in [1, 2, 3]:
        s = CHI
        for _ in range(k - 1):
            s = s.tensor(CHI)
        assert min(stabilizer_entropy(s, n) for n in [0.5, 1, 2, 3]) > 1e-3


def _random_clifford(state, rng, n_gates=20):
    n = state.n_qubits
    for _ in range(n_gates):
        g = rng.choice(["H", "S", "CZ"])
        if g == "CZ":
            a, b = rng.choice(n, size=2, replace=False)
            state = apply_gate(state, "CZ", (int(a), int(b)))
        else:
            state = apply_gate(state, str(g), int(rng.integers(n)))
    return state


@pytest.mark.parametrize("n_qubits", [2, 3])
def test_clifford_invariance(n_qubits):
    rng = np.random.default_rng(n_qubits)
    for _ in range(10):
        psi = haar_random_state(n_qubits, rng)
        out = _random_clifford(psi, rng)
        for n in [0.5, 1, 2, 3]:
            assert stabilizer_entropy(out, n) == pytest.approx(stabilizer_entropy(psi, n), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_additivity_random_pairs(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = haar_random_state(na, rng), haar_random_state(nb, rng)
    for n in [0.5, 1, 2, 3]:
        assert stabilizer_entropy(a.tensor(b), n) == pytest.approx(
            stabilizer_entropy(a, n) + stabilizer_entropy(b, n), abs=1e-9
        )


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_monotone_in_renyi_index(seed, nq):
    psi = haar_random_state(nq, np.random.default_rng(seed))
    grid = [0.5, 0.9, 1, 1.5, 2, 3, 5]
    vals = [v.value for v in se_curve(psi, grid)]
    assert all(x >= y - 1e-10 for x, y in zip(vals, vals[1:]))
    assert min(vals) >= -1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_continuity_at_one(seed):
    psi = haar_random_state(2, np.random.default_rng(seed))
    lo, hi = renyi_se(psi, 1 - 1e-4).value, renyi_se(psi, 1 + 1e-4).value
    vn = von_neumann_se(psi).value
    assert lo + 1e-12 >= vn >= hi - 1e-12
    assert abs(lo - vn) < 1e-3 and abs(hi - vn) < 1e-3


@pytest.mark.parametrize("n, expected", [(2, 2.0), (0.5, 1.0), (3, 2.0)])
def test_omega_scaling(n, expected):
    fit = omega_scaling_fit(n, [1e-3, 2e-3, 4e-3, 6e-3, 1e-2])
    assert fit.exponent == pytest.approx(expected, abs=0.05)


def test_omega_scaling_needs_five_points():
    with pytest.raises(ValueError):
        omega_scaling_fit(2, [0.01, 0.02])
