"""Core matrix routines: tensor products, partial traces, spectral entropy."""

import math

import numpy as np
import pytest

from qdemon import qmatrix as qm
from conftest import random_density, random_pure, random_unitary

I2 = np.eye(2, dtype=complex)
HBAR = np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2)


def brute_partial_trace(joint, keep):
    """Independent contraction over explicit computational indices."""
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                if keep == "first":
                    out[i, j] += joint[2 * i + k, 2 * j + k]
                else:
                    out[i, j] += joint[2 * k + i, 2 * k + j]
    return out


def test_tensor_identity():
    assert np.array_equal(qm.tensor(I2, I2), np.eye(4))


def test_tensor_basis_ordering():
    e_first = np.array([1.0, 0.0])
    e_second = np.array([0.0, 1.0])
    assert np.array_equal(qm.tensor(e_first, e_second), [0, 1, 0, 0])


def test_tensor_hbar_pair():
    expected = 0.5 * np.array([[1, 1, 1, 1],
                               [-1, 1, -1, 1],
                               [-1, -1, 1, 1],
                               [1, -1, -1, 1]])
    assert np.allclose(qm.tensor(HBAR, HBAR), expected, atol=1e-12)


def test_tensor_mixed_product_rule(rng):
    for _ in range(20):
        a, b, c, d = (random_unitary(rng) for _ in range(4))
        lhs = qm.tensor(a, b) @ qm.tensor(c, d)
        rhs = qm.tensor(a @ c, b @ d)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_tensor_associative_bilinear(rng):
    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        c = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.allclose(qm.tensor(qm.tensor(a, b), c),
                           qm.tensor(a, qm.tensor(b, c)), atol=1e-12)
        x, y = rng.normal(size=2)
        assert np.allclose(qm.tensor(x * a + y * c, b),
                           x * qm.tensor(a, b) + y * qm.tensor(c, b), atol=1e-12)


def test_tensor_rejects_mismatched_shapes():
    with pytest.raises(qm.InvalidStateError):
        qm.tensor(np.ones((2, 3)), I2)
    with pytest.raises(qm.InvalidStateError):
        qm.tensor(np.ones(2), I2)


def test_partial_trace_product_state(rng):
    rho = random_density(rng)
    r = random_density(rng)
    joint = qm.tensor(rho, r)
    assert np.allclose(qm.partial_trace(joint, "first"), rho, atol=1e-12)
    assert np.allclose(qm.partial_trace(joint, "second"), r, atol=1e-12)


def test_partial_trace_bell_state():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    joint = np.outer(bell, bell.conj())
    assert np.allclose(qm.partial_trace(joint, "first"), I2 / 2, atol=1e-12)
    assert np.allclose(qm.partial_trace(joint, "second"), I2 / 2, atol=1e-12)


def test_partial_trace_equal_weight_mixture_of_branches(rng):
    # two orthogonal system branches carrying different demon states; the
    # demon marginal must be the equal mixture of the branch states
    up_xy = np.array([1.0, 1.0]) / np.sqrt(2)
    dn_xy = np.array([1.0, -1.0]) / np.sqrt(2)
    r_plus = random_density(rng)
    r_minus = random_density(rng)
    joint = 0.5 * qm.tensor(np.outer(up_xy, up_xy.conj()), r_plus) \
        + 0.5 * qm.tensor(np.outer(dn_xy, dn_xy.conj()), r_minus)
    expected = (r_plus + r_minus) / 2
    assert np.allclose(qm.partial_trace(joint, "second"), expected, atol=1e-12)
    assert np.allclose(brute_partial_trace(joint, "second"), expected, atol=1e-12)


def test_partial_trace_matches_brute_force(rng):
    for _ in range(50):
        joint = random_density(rng, 4)
        for keep in ("first", "second"):
            assert np.allclose(qm.partial_trace(joint, keep),
                               brute_partial_trace(joint, keep), atol=1e-12)


def test_partial_trace_preserves_trace(rng):
    for _ in range(50):
        joint = random_density(rng, 4)
        for keep in ("first", 0, "second", 1):
            reduced = qm.partial_trace(joint, keep)
            assert abs(np.trace(reduced) - 1.0) < 1e-12


def test_partial_trace_invalid_subsystem(rng):
    with pytest.raises(qm.ParameterError):
        qm.partial_trace(random_density(rng, 4), "third")


def test_entropy_pure_states(rng):
    for _ in range(10):
        rho = qm.pure_density(random_pure(rng))
        assert qm.von_neumann_entropy(rho) < 1e-12


def test_entropy_chaotic():
    assert math.isclose(qm.von_neumann_entropy(I2 / 2), math.log(2), abs_tol=1e-12)


def test_entropy_diagonal_value():
    # -0.3 ln 0.3 - 0.7 ln 0.7
    expected = 0.6108643020548935
    rho = np.diag([0.3, 0.7]).astype(complex)
    assert math.isclose(qm.von_neumann_entropy(rho), expected, abs_tol=1e-12)


def test_entropy_range(rng):
    for _ in range(30):
        s = qm.von_neumann_entropy(random_density(rng, 4))
        assert -1e-12 <= s <= math.log(4) + 1e-12


def test_entropy_unitary_invariance(rng):
    for _ in range(30):
        rho = random_density(rng, 4)
        u = random_unitary(rng, 4)
        s0 = qm.von_neumann_entropy(rho)
        s1 = qm.von_neumann_entropy(u @ rho @ u.conj().T)
        assert abs(s0 - s1) <= 1e-10


def test_entropy_rejects_negative_eigenvalue():
    bad = np.diag([1.1, -0.1]).astype(complex)
    with pytest.raises(qm.InvalidStateError):
        qm.von_neumann_entropy(bad)


def test_eigensystem_round_trip(rng):
    for _ in range(20):
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        herm = (z + z.conj().T) / 2
        w, v = qm.hermitian_eigensystem(herm)
        rebuilt = v @ np.diag(w) @ v.conj().T
        assert np.allclose(rebuilt, herm, atol=1e-10)


def test_check_unitary_rejects_nonunitary():
    with pytest.raises(qm.InvalidStateError):
        qm.check_unitary(np.array([[1, 0], [0, 2.0]]))


def test_check_density_rejects_bad_trace():
    with pytest.raises(qm.InvalidStateError):
        qm.check_density_matrix(np.diag([0.7, 0.7]))


def test_check_pure_state_norm():
    with pytest.raises(qm.InvalidStateError):
        qm.check_pure_state([1.0, 1.0])
    qm.check_pure_state(np.array([1.0, 1.0]) / np.sqrt(2))


def test_json_round_trip(rng):
    m = random_density(rng, 4)
    doc = qm.matrix_to_json(m)
    assert doc["dim"] == 4
    assert len(doc["entries"]) == 16
    assert all(len(pair) == 2 for pair in doc["entries"])
    back = qm.matrix_from_json(doc)
    assert np.allclose(back, m, atol=0.0)


def test_json_rejects_wrong_length():
    with pytest.raises(qm.ParameterError):
        qm.matrix_from_json({"dim": 2, "entries": [[1.0, 0.0]]})
