"""Small-n qubit state algebra.

Pure states, density matrices, reduction, conditioning and fidelity for the
one- and two-qubit (and small n) systems the rest of the package works with.
Qubit 1 is the leftmost tensor factor; the computational basis is ordered
|00>, |01>, |10>, |11> (and likewise for larger registers).

All values are immutable: every operation returns new objects and the wrapped
numpy arrays are marked read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Validation tolerances shared across the package.
NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
PROB_FLOOR = 1e-12

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z):
    _m.flags.writeable = False


class ImpossibleOutcomeError(ValueError):
    """Raised when conditioning on an outcome of probability below PROB_FLOOR."""


def _as_complex_array(values, copy: bool = True) -> np.ndarray:
    arr = np.array(values, dtype=complex, copy=copy)
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError("amplitudes/matrix entries must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized complex amplitude vector over 2^num_qubits basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        amps = _as_complex_array(self.amplitudes).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = np.linalg.norm(amps)
        if norm < NORM_ATOL:
            raise ValueError("cannot normalize a zero state vector")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> "DensityMatrix":
        """Return |psi><psi| as a DensityMatrix."""
        return DensityMatrix(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace matrix over 2^num_qubits."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        dim = 2**self.num_qubits
        mat = _as_complex_array(self.matrix)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(np.trace(mat) - 1.0) > TRACE_ATOL:
            raise ValueError("matrix trace differs from 1 beyond tolerance")
        if np.min(np.linalg.eigvalsh(mat)) < EIGENVALUE_FLOOR:
            raise ValueError("matrix has a negative eigenvalue beyond tolerance")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Hermitian unit-trace matrix that may fail positivity.

    Linear-inversion tomography under shot noise lands here; it only becomes a
    DensityMatrix after a maximum-likelihood (or clamping) projection.
    """

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.num_qubits
        mat = _as_complex_array(self.matrix)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.matrix)))


@dataclass(frozen=True, eq=False)
class Operator:
    """A complex square matrix; not necessarily unitary."""

    dimension: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_complex_array(self.matrix)
        if mat.shape != (self.dimension, self.dimension):
            raise ValueError(f"expected shape {(self.dimension, self.dimension)}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------

def pure_state(amplitudes) -> PureState:
    """Build a PureState from raw amplitudes, inferring the qubit count."""
    amps = _as_complex_array(amplitudes).reshape(-1)
    n = int(round(np.log2(amps.shape[0])))
    if 2**n != amps.shape[0]:
        raise ValueError("amplitude count must be a power of two")
    return PureState(n, amps)


def kron(a: PureState, b: PureState) -> PureState:
    """Tensor product; 'a' occupies the leading (leftmost) qubits."""
    return PureState(a.num_qubits + b.num_qubits, np.kron(a.amplitudes, b.amplitudes))


def apply_to_pure(op: Operator, psi: PureState) -> PureState:
    """Apply an operator to a pure state and renormalize.

    Raises ValueError if the operator annihilates the state.
    """
    return pure_state(op.matrix @ psi.amplitudes)


def apply_unitary(rho: DensityMatrix, op: Operator) -> DensityMatrix:
    """Conjugate a density matrix by a unitary operator."""
    return DensityMatrix(rho.num_qubits, op.matrix @ rho.matrix @ op.matrix.conj().T)


def single_qubit_operator(op: np.ndarray, qubit: int, num_qubits: int) -> np.ndarray:
    """Embed a 2x2 matrix acting on the given 1-based qubit of an n-qubit register."""
    if not 1 <= qubit <= num_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {num_qubits} qubits")
    full = np.array([[1.0 + 0j]])
    for k in range(1, num_qubits + 1):
        full = np.kron(full, op if k == qubit else IDENTITY_2)
    return full


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def fidelity(rho: DensityMatrix, target: PureState) -> float:
    """Fidelity <psi|rho|psi> of a state with a pure target.

    Invariant under any global phase on the target. The result is clipped to
    [0, 1]; numerical excursions beyond the interval stay below 1e-12.
    """
    if rho.num_qubits != target.num_qubits:
        raise ValueError("dimension mismatch between state and target")
    v = target.amplitudes
    value = float(np.real(v.conj() @ rho.matrix @ v))
    return min(max(value, 0.0), 1.0)


def fidelity_mixed(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """General two-density-matrix fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Provided as a utility; the pipelines compare against pure targets.
    """
    if rho.num_qubits != sigma.num_qubits:
        raise ValueError("dimension mismatch")
    w, u = np.linalg.eigh(rho.matrix)
    sqrt_rho = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    ew = np.linalg.eigvalsh(inner)
    value = float(np.sum(np.sqrt(np.clip(ew, 0.0, None)))) ** 2
    return min(max(value, 0.0), 1.0)


def trace_distance(a: DensityMatrix | HermitianMatrix, b: DensityMatrix | HermitianMatrix) -> float:
    """Trace distance (1/2)||a - b||_1 between two Hermitian matrices."""
    ew = np.linalg.eigvalsh(a.matrix - b.matrix)
    return 0.5 * float(np.sum(np.abs(ew)))


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Trace out one qubit of a 2-qubit state, keeping the 1-based index 'keep'."""
    if rho.num_qubits != 2:
        raise ValueError("partial_trace expects a 2-qubit state")
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    t = rho.matrix.reshape(2, 2, 2, 2)
    reduced = np.einsum("ikjk->ij", t) if keep == 1 else np.einsum("kikj->ij", t)
    return DensityMatrix(1, reduced)


def conditional_state(rho: DensityMatrix, measured: int, outcome: int) -> tuple[float, DensityMatrix]:
    """Condition on a computational-basis measurement of one qubit.

    Args:
        rho: n-qubit density matrix, n >= 2.
        measured: 1-based index of the measured qubit.
        outcome: 0 or 1.

    Returns:
        (probability, normalized (n-1)-qubit state of the remaining qubits).

    Raises:
        ImpossibleOutcomeError: outcome probability is below PROB_FLOOR.
    """
    n = rho.num_qubits
    if n < 2:
        raise ValueError("conditioning needs at least 2 qubits")
    if not 1 <= measured <= n:
        raise ValueError(f"qubit index {measured} out of range for {n} qubits")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    t = rho.matrix.reshape((2,) * (2 * n))
    sub = np.take(t, outcome, axis=measured - 1)
    # Removing the row axis shifts the matching column axis down by one.
    sub = np.take(sub, outcome, axis=n + measured - 2)
    dim = 2 ** (n - 1)
    sub = sub.reshape(dim, dim)
    prob = float(np.real(np.trace(sub)))
    if prob < PROB_FLOOR:
        raise ImpossibleOutcomeError(
            f"outcome {outcome} on qubit {measured} has probability {prob:.3e}"
        )
    return prob, DensityMatrix(n - 1, sub / prob)


def stokes(rho: DensityMatrix) -> tuple[float, ...]:
    """Pauli expectation values of a 1- or 2-qubit state.

    One qubit: (<X>, <Y>, <Z>). Two qubits: 15 values for every Pauli pair
    (P, Q) != (I, I) in row-major order over (I, X, Y, Z):
    IX, IY, IZ, XI, XX, XY, XZ, YI, YX, ..., ZZ.
    """
    paulis = (IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z)
    if rho.num_qubits == 1:
        return tuple(float(np.real(np.trace(p @ rho.matrix))) for p in paulis[1:])
    if rho.num_qubits == 2:
        values = []
        for i, p in enumerate(paulis):
            for j, q in enumerate(paulis):
                if i == j == 0:
                    continue
                values.append(float(np.real(np.trace(np.kron(p, q) @ rho.matrix))))
        return tuple(values)
    raise ValueError("stokes supports 1- or 2-qubit states")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def density_matrix_to_dict(rho: DensityMatrix | HermitianMatrix) -> dict:
    """Serialize as {"num_qubits": n, "re": row-major, "im": row-major}."""
    flat = rho.matrix.reshape(-1)
    return {
        "num_qubits": rho.num_qubits,
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def density_matrix_from_dict(data: dict) -> DensityMatrix:
    n = int(data["num_qubits"])
    dim = 2**n
    mat = (np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)).reshape(dim, dim)
    return DensityMatrix(n, mat)


def save_density_matrix(rho: DensityMatrix | HermitianMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(density_matrix_to_dict(rho), fh, indent=1)
        fh.write("\n")


def load_density_matrix(path) -> DensityMatrix:
    with open(path) as fh:
        return density_matrix_from_dict(json.load(fh))
