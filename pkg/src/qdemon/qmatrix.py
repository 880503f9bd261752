"""Dense complex linear algebra for one- and two-qubit states.

Everything in this package operates on plain ``numpy`` arrays of complex128:
2x2 and 4x4 matrices (states, gates) and 2- or 4-component amplitude vectors.
Joint two-qubit objects live in the product basis

    {|0>|0>, |0>|1>, |1>|0>, |1>|1>}

with the *system* qubit as the left (row-major) factor and the
demon/environment qubit on the right.

Entropies are in nats (k_B = 1, natural logarithm). All functions are pure
and never mutate their inputs, so they are safe to call from any number of
concurrent workers.
"""

from __future__ import annotations

import numpy as np

#: default elementwise (absolute) tolerance for matrix equality checks
ATOL = 1e-12

#: most negative eigenvalue a matrix may have and still count as a state
EIG_NEG_TOL = -1e-10

#: floor applied to eigenvalues before taking a matrix logarithm
LOG_EIG_FLOOR = 1e-300


class InvalidStateError(ValueError):
    """A matrix or vector failed a state/unitarity validation check."""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""


def as_matrix(m) -> np.ndarray:
    """Coerce input to a square complex128 array (no copy if already one)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {a.shape}")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def matrices_close(a, b, atol: float = ATOL) -> bool:
    """Elementwise equality within an absolute tolerance."""
    return bool(np.allclose(np.asarray(a), np.asarray(b), rtol=0.0, atol=atol))


def check_unitary(u, atol: float = ATOL) -> np.ndarray:
    """Validate U†U = 1 and return the coerced matrix.

    Raises InvalidStateError when the unitarity defect exceeds ``atol``.
    """
    u = as_matrix(u)
    defect = np.abs(dag(u) @ u - np.eye(u.shape[0])).max()
    if defect > atol:
        raise InvalidStateError(f"matrix is not unitary (defect {defect:.3e})")
    return u


def check_density_matrix(rho, atol: float = ATOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix.

    Eigenvalues are allowed to dip to ``EIG_NEG_TOL`` below zero to absorb
    round-off from upstream arithmetic.
    """
    rho = as_matrix(rho)
    if np.abs(rho - dag(rho)).max() > atol:
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > max(atol, 1e-10):
        raise InvalidStateError(f"density matrix trace is {tr}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < EIG_NEG_TOL:
        raise InvalidStateError(
            f"density matrix has negative eigenvalue {evals.min():.3e}")
    return rho


def check_pure_state(vec, atol: float = ATOL) -> np.ndarray:
    """Validate a unit-norm amplitude vector and return it as complex128."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > atol:
        raise InvalidStateError(f"state vector norm is {norm}, expected 1")
    return v


def pure_density(vec) -> np.ndarray:
    """Outer product |v><v| of a unit amplitude vector."""
    v = check_pure_state(vec)
    return np.outer(v, v.conj())


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two square matrices (or two vectors).

    Satisfies the mixed-product rule (A⊗B)(C⊗D) = AC ⊗ BD and realises
    the row-major joint basis ordering documented in the module docstring.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise InvalidStateError("tensor expects two matrices or two vectors")
    if a.ndim == 2 and (a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]):
        raise InvalidStateError("tensor expects square matrices")
    return np.kron(a, b)


def partial_trace(rho, keep) -> np.ndarray:
    """Reduced 2x2 state of one qubit of a 4x4 two-qubit density matrix.

    Parameters
    ----------
    rho : 4x4 density matrix in the product basis (system ⊗ demon).
    keep : "first"/0 keeps the system qubit, "second"/1 keeps the demon.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise InvalidStateError("partial_trace expects a 4x4 matrix")
    if keep in ("first", 0):
        axis = 0
    elif keep in ("second", 1):
        axis = 1
    else:
        raise ParameterError(f"invalid subsystem id {keep!r}")
    r = rho.reshape(2, 2, 2, 2)
    if axis == 0:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Columns of the returned matrix are the eigenvectors; the decomposition
    reassembles the input as V diag(w) V†.
    """
    m = as_matrix(m)
    w, v = np.linalg.eigh(m)
    return w, v


def von_neumann_entropy(rho, atol: float = ATOL) -> float:
    """Spectral entropy S = -Σ λ ln λ in nats, with 0·ln 0 = 0.

    Raises InvalidStateError if an eigenvalue falls below ``EIG_NEG_TOL``;
    smaller negative round-off is clipped to zero before the logarithm.
    """
    rho = check_density_matrix(rho, atol=max(atol, 1e-10))
    evals = np.linalg.eigvalsh(rho)
    evals = np.clip(evals.real, 0.0, 1.0)
    nz = evals[evals > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def matrix_log_psd(m, floor: float = LOG_EIG_FLOOR) -> tuple[np.ndarray, bool]:
    """Matrix logarithm of a positive semidefinite matrix.

    Eigenvalues are floored at ``floor`` to keep ln finite; the returned
    flag reports whether any eigenvalue actually hit the floor.
    """
    w, v = hermitian_eigensystem(m)
    clipped = bool(np.any(w.real < floor))
    w = np.clip(w.real, floor, None)
    return v @ np.diag(np.log(w)) @ dag(v), clipped


def matrix_to_json(m) -> dict:
    """Serialise a matrix as {dim, entries: [[re, im], ...]} row-major."""
    m = as_matrix(m)
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"dim": int(m.shape[0]), "entries": entries}


def matrix_from_json(doc: dict) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`."""
    dim = int(doc["dim"])
    entries = doc["entries"]
    if len(entries) != dim * dim:
        raise ParameterError(
            f"expected {dim * dim} entries for dim {dim}, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(dim, dim)
