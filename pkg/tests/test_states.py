import math

import numpy as np
import pytest

from magic_lab.errors import NotUnitaryError
from magic_lab.states import (
    BETA,
    DenseState,
    apply_gate,
    circuit_unitary,
    enumerate_branches,
    gate_matrix,
    haar_random_state,
    magic_state,
    make_chi_star,
    make_lambda_n,
    make_omega,
    make_phi_star,
    make_psi_eps,
    make_psi_star,
    measure_computational,
    psi_eps_norm,
    zero_state,
)


def test_phi_star_coordinates():
    phi = make_phi_star()
    assert phi["0011"] == pytest.approx(1j / math.sqrt(6), abs=1e-15)
    assert phi["0000"] == 0 and phi["1110"] == 0
    assert np.vdot(phi.amplitudes, phi.amplitudes).real == pytest.approx(1.0, abs=1e-14)


def test_chi_and_psi_star():
    chi = make_chi_star()
    assert chi["111"] == pytest.approx((1 + 1j) / math.sqrt(6), abs=1e-15)
    psi = make_psi_star()
    np.testing.assert_allclose(psi.amplitudes, np.kron([0, 1], chi.amplitudes), atol=1e-15)


def test_psi_star_is_projected_phi_star():
    phi = make_phi_star().amplitudes
    proj = phi.copy()
    proj[:8] = 0
    p1 = np.vdot(proj, proj).real
    np.testing.assert_allclose(proj / math.sqrt(p1), make_psi_star().amplitudes, atol=1e-12)


def test_psi_eps_family():
    s = make_psi_eps(6, 0.5)
    assert np.vdot(s.amplitudes, s.amplitudes).real == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(make_psi_eps(5, 0.0).amplitudes, zero_state(5).amplitudes)
    branches = {b.outcome_bits: b for b in enumerate_branches(make_psi_eps(4, 0.7), [0])}
    expected = np.kron([0, 1], np.kron(np.kron(magic_state().amplitudes, magic_state().amplitudes),
                                       magic_state().amplitudes))
    assert branches[(1,)].post_state.fidelity(DenseState(expected)) == pytest.approx(1.0, abs=1e-12)


def test_psi_eps_norm_formula():
    raw = np.zeros(2**5, dtype=complex)
    raw[0] = 1
    chi = magic_state().amplitudes
    v = chi
    for _ in range(4):
        v = np.kron(v, chi)
    raw = raw + 0.3 * v
    assert np.vdot(raw, raw).real == pytest.approx(psi_eps_norm(5, 0.3), abs=1e-14)


def test_permutation_symmetry_of_psi_eps():
    t = make_psi_eps(4, 0.5).amplitudes.reshape(2, 2, 2, 2)
    np.testing.assert_allclose(t, t.transpose(1, 0, 2, 3), atol=1e-15)


def test_omega_and_lambda():
    np.testing.assert_allclose(make_omega(0).amplitudes, [1, 0])
    np.testing.assert_allclose(make_omega(math.pi / 4).amplitudes, [2**-0.5, 2**-0.5])
    lam = make_lambda_n(0.8, 4)
    f = make_omega(0.4).amplitudes
    np.testing.assert_allclose(lam.amplitudes, np.kron(np.kron(f, f), np.kron(f, f)), atol=1e-15)


def test_beta():
    assert math.cos(2 * BETA) == pytest.approx(1 / math.sqrt(3))
    assert 0 < BETA < math.pi / 4


def test_gates():
    np.testing.assert_allclose(apply_gate(zero_state(1), "H", 0).amplitudes, [2**-0.5, 2**-0.5])
    out = apply_gate(DenseState.basis("11"), "CZ", (0, 1))
    assert out["11"] == pytest.approx(-1)
    hshsh_x = circuit_unitary([("X", 0), ("H", 0), ("S", 0), ("H", 0), ("S", 0), ("H", 0)], 1)
    target = (gate_matrix("X") - gate_matrix("Y")) / math.sqrt(2)
    np.testing.assert_allclose(hshsh_x, target, atol=1e-12)


def test_custom_gate_checks():
    with pytest.raises(NotUnitaryError):
        apply_gate(zero_state(1), np.array([[1, 1], [0, 1]]), 0)
    theta = 0.3
    u = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    out = apply_gate(zero_state(2), u, 1)
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1, abs=1e-12)


def test_normalization_enforced():
    with pytest.raises(ValueError):
        DenseState(np.array([1.0, 1.0]))


def test_branches_of_phi_star():
    br = enumerate_branches(make_phi_star(), [0])
    assert [b.probability for b in br] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_deterministic_measurement():
    br = enumerate_branches(zero_state(3), [1])
    assert len(br) == 1 and br[0].probability == pytest.approx(1.0)
    assert br[0].post_state.fidelity(zero_state(3)) == pytest.approx(1.0)


def test_branch_probabilities_random(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        state = haar_random_state(n, rng)
        sites = list(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        br = enumerate_branches(state, sites)
        assert abs(sum(b.probability for b in br) - 1) < 1e-12
        for b in br:
            # <psi|Pi|psi> equals p, and the post state lives in the projected subspace
            ov = abs(state.overlap(b.post_state)) ** 2
            assert ov == pytest.approx(b.probability, abs=1e-12)


def test_sampled_measurement_is_a_branch(rng):
    out = measure_computational(make_phi_star(), [0], rng)
    assert out.outcome_bits in [(0,), (1,)]


def test_json_round_trip():
    s = make_phi_star()
    back = DenseState.from_json(s.to_json())
    np.testing.assert_array_equal(back.amplitudes, s.amplitudes)
