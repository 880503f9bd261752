"""Gate identities, partial-SWAP semantics, and the double-dot protocol."""

import math

import numpy as np
import pytest

from qdemon import circuits as qc
from qdemon import qmatrix as qm
from conftest import random_density, random_pure

I2 = np.eye(2, dtype=complex)

UD_MATRIX = 0.5 * np.array([[1, -1, -1, 1],
                            [1, 1, 1, 1],
                            [-1, -1, 1, 1],
                            [-1, 1, -1, 1]], dtype=complex)

VD_MATRIX = np.array([[1, 0, 0, 0],
                      [0, 0, 1, 0],
                      [0, 0, 0, 1],
                      [0, 1, 0, 0]], dtype=complex)

SWAP_MATRIX = np.array([[1, 0, 0, 0],
                        [0, 0, 1, 0],
                        [0, 1, 0, 0],
                        [0, 0, 0, 1]], dtype=complex)


def test_u14_reduces_to_hbar():
    assert np.allclose(qc.u14(-np.pi / 2), qc.HBAR, atol=1e-12)


def test_u14_square_is_half_rabi(rng):
    for phase in rng.uniform(-np.pi, np.pi, size=10):
        pulse = qc.half_rabi(phase)
        assert np.allclose(pulse, qc.u14(phase) @ qc.u14(phase), atol=1e-12)
        up = np.array([1.0, 0.0])
        down = np.array([0.0, 1.0])
        assert np.allclose(pulse @ up, 1j * np.exp(-1j * phase) * down, atol=1e-12)
        assert np.allclose(pulse @ down, 1j * np.exp(1j * phase) * up, atol=1e-12)


def test_cnot_self_inverse():
    assert np.allclose(qc.CNOT_UP @ qc.CNOT_UP, np.eye(4), atol=1e-12)
    assert np.allclose(qc.CNOT_DOWN @ qc.CNOT_DOWN, np.eye(4), atol=1e-12)


def test_build_gates_unitary_and_commuting_factors(rng):
    gates = qc.build_gates(0.37)
    assert set(gates) == {
        "CNOT_on_demon_control_up", "CNOT_on_demon_control_down",
        "HBAR_system", "HBAR_demon", "U14_system", "U14_demon",
    }
    for g in gates.values():
        assert np.allclose(g.conj().T @ g, np.eye(4), atol=1e-12)
    assert np.allclose(gates["HBAR_system"] @ gates["U14_demon"],
                       gates["U14_demon"] @ gates["HBAR_system"], atol=1e-12)


def test_ud_matches_printed_matrix():
    assert np.allclose(qc.build_UD(), UD_MATRIX, atol=1e-12)
    ud = qc.build_UD()
    assert np.allclose(ud.conj().T @ ud, np.eye(4), atol=1e-12)


def test_ud_purifies_chaotic_system():
    ud = qc.build_UD()
    joint = ud @ qm.tensor(I2 / 2, np.diag([1.0, 0.0])) @ ud.conj().T
    system = qm.partial_trace(joint, "first")
    assert qm.von_neumann_entropy(system) < 1e-10


def test_vd_matches_printed_matrix():
    assert np.allclose(qc.build_VD(), VD_MATRIX, atol=1e-12)


def test_vd_basis_state_actions():
    vd = qc.build_VD()
    e = [np.eye(4)[:, i] for i in range(4)]
    assert np.allclose(vd @ e[0], e[0], atol=1e-12)   # up-sector fixed point
    assert np.allclose(vd @ e[2], e[1], atol=1e-12)   # swap within up sector
    assert np.allclose(vd @ e[1], e[3], atol=1e-12)   # down sector: swap + NOT
    assert np.allclose(vd @ e[3], e[2], atol=1e-12)


def test_vd_swaps_against_basis_demons(rng):
    vd = qc.build_VD()
    for _ in range(20):
        a, b = random_pure(rng)
        system = np.array([a, b])
        out_up = vd @ qm.tensor(system, np.array([1.0, 0.0]))
        assert np.allclose(out_up, qm.tensor(np.array([1.0, 0.0]), system), atol=1e-12)
        out_dn = vd @ qm.tensor(system, np.array([0.0, 1.0]))
        swapped = np.array([b, a])
        assert np.allclose(out_dn, qm.tensor(np.array([0.0, 1.0]), swapped), atol=1e-12)


def test_swap_matches_printed_matrix():
    assert np.allclose(qc.build_SWAP(), SWAP_MATRIX, atol=1e-12)
    assert np.allclose(qc.build_SWAP() @ qc.build_SWAP(), np.eye(4), atol=1e-12)


def test_swap_exchanges_product_states(rng):
    swap = qc.build_SWAP()
    for _ in range(10):
        psi = random_pure(rng)
        chi = random_pure(rng)
        assert np.allclose(swap @ qm.tensor(psi, chi), qm.tensor(chi, psi), atol=1e-12)


def test_minimal_pswap_equals_vd():
    minimal = qc.build_minimal_pswap()
    assert np.allclose(minimal, qc.build_VD(), atol=1e-12)
    # equivalent statement: the up-active controller pair conjugated by X⊗X
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    cnot_on_system_up = np.array([[0, 0, 1, 0],
                                  [0, 1, 0, 0],
                                  [1, 0, 0, 0],
                                  [0, 0, 0, 1]], dtype=complex)
    conj = qm.tensor(sx, sx)
    assert np.allclose(conj @ cnot_on_system_up @ qc.CNOT_UP @ conj,
                       qc.build_VD(), atol=1e-12)


def test_pswap_counterexample_basis_demons():
    assert qc.pswap_counterexample(np.array([1.0, 0.0])) is False
    assert qc.pswap_counterexample(np.array([0.0, 1.0])) is False


def test_pswap_counterexample_superposition():
    demon = np.array([1.0, 1.0]) / np.sqrt(2)
    assert qc.pswap_counterexample(demon) is True
    # explicit witness: system |up> against the balanced demon entangles
    out = qc.build_VD() @ qm.tensor(np.array([1.0, 0.0]), demon)
    expected_if_swapped = qm.tensor(demon, np.array([1.0, 0.0]))
    assert not np.allclose(out, expected_if_swapped, atol=1e-6)


def test_interaction_acts_as_flip_on_operational_states(rng):
    for _ in range(20):
        phi, varphi = rng.uniform(-np.pi, np.pi, size=2)
        quarter = qc.u14(varphi)
        u_block = np.diag([np.exp(1j * phi), -np.exp(1j * phi)])
        op_up = quarter[:, 0]
        op_dn = quarter[:, 1]
        assert np.allclose(u_block @ op_up,
                           -1j * np.exp(1j * (phi - varphi)) * op_dn, atol=1e-12)
        assert np.allclose(u_block @ op_dn,
                           1j * np.exp(1j * (phi + varphi)) * op_up, atol=1e-12)


def test_quarter_rotation_conjugation_identity(rng):
    # sandwiching the interaction between quarter rotations yields the
    # diagonal-with-relative-pi operation on the operational states
    for _ in range(20):
        phi, varphi = rng.uniform(-np.pi, np.pi, size=2)
        quarter = qc.u14(varphi)
        u_block = np.diag([np.exp(1j * phi), -np.exp(1j * phi)])
        conj = quarter.conj().T @ u_block @ quarter
        op_up = quarter[:, 0]
        op_dn = quarter[:, 1]
        assert np.allclose(conj @ op_up, -np.exp(1j * phi) * op_up, atol=1e-12)
        assert np.allclose(conj @ op_dn, np.exp(1j * phi) * op_dn, atol=1e-12)


def test_protocol_equals_channel_on_system(rng):
    for _ in range(100):
        config = qc.DoubleDotConfig(
            tunneling_phase=rng.uniform(-np.pi, np.pi),
            interaction_phase=rng.uniform(-np.pi, np.pi),
            theta=rng.uniform(-np.pi, np.pi),
            eta=rng.uniform(-np.pi, np.pi),
        )
        rho_in = random_density(rng)
        dot = np.diag([1.0, 0.0]).astype(complex)
        protocol = qc.double_dot_protocol(rho_in, dot, config)
        reference = qc.reference_channel_report(rho_in, dot, config)
        assert np.allclose(protocol.rho_out, reference.rho_out, atol=1e-12)
        assert abs(protocol.gamma - reference.gamma) < 1e-12


def test_protocol_completion_matches_channel_joint(rng):
    for _ in range(30):
        config = qc.DoubleDotConfig(
            tunneling_phase=rng.uniform(-np.pi, np.pi),
            interaction_phase=rng.uniform(-np.pi, np.pi),
            theta=rng.uniform(-np.pi, np.pi),
            eta=rng.uniform(-np.pi, np.pi),
        )
        rho_in = random_density(rng)
        dot = random_density(rng)
        completed = qc.double_dot_protocol(rho_in, dot, config,
                                           dot_basis="operational",
                                           complete_rotation=True)
        reference = qc.reference_channel_report(rho_in, dot, config)
        assert np.allclose(completed.joint_out, reference.joint_out, atol=1e-12)
        assert np.allclose(completed.demon_out, reference.demon_out, atol=1e-12)


def test_protocol_equivalent_phases():
    config = qc.DoubleDotConfig(tunneling_phase=0.4, interaction_phase=1.1)
    params = qc.equivalent_spin_params(config)
    assert math.isclose(params.alpha, 1.1 - 0.4 - np.pi / 2, abs_tol=1e-12)
    assert math.isclose(params.beta_phase, 1.1 + 0.4 + np.pi / 2, abs_tol=1e-12)


def test_protocol_dot_basis_flagged():
    config = qc.DoubleDotConfig()
    dot = np.diag([1.0, 0.0]).astype(complex)
    phys = qc.double_dot_protocol(I2 / 2, dot, config, dot_basis="physical")
    oper = qc.double_dot_protocol(I2 / 2, dot, config, dot_basis="operational")
    assert "dot-basis-physical" in phys.flags
    assert "dot-basis-operational" in oper.flags
    with pytest.raises(qm.ParameterError):
        qc.double_dot_protocol(I2 / 2, dot, config, dot_basis="z")


def test_canonical_phases_give_real_circuits():
    # interaction phase 0 and tunneling phase -pi/2 wipe all imaginary parts
    config = qc.DoubleDotConfig(tunneling_phase=-np.pi / 2, interaction_phase=0.0)
    params = qc.equivalent_spin_params(config)
    assert abs(params.alpha) < 1e-12
    assert abs(params.beta_phase) < 1e-12
    for matrix in (qc.build_UD(), qc.build_VD(), qc.build_SWAP(),
                   qc.u14(-np.pi / 2), qc.pswap_gate(-np.pi / 2)):
        assert np.abs(matrix.imag).max() < 1e-12


def test_pswap_gate_routes_demon_up_inputs_to_ground():
    pswap = qc.pswap_gate(-np.pi / 2)
    ground = np.array([0.0, 1.0])
    demon_up = np.array([1.0, 0.0])
    for system in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        out = (pswap @ qm.tensor(system, demon_up)).reshape(2, 2)
        _, singular, _ = np.linalg.svd(out)
        assert singular[1] < 1e-12  # output stays a product state
        system_marginal = out @ out.conj().T
        assert math.isclose(abs(system_marginal[1, 1]), 1.0, abs_tol=1e-12)
