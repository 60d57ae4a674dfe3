"""Parity-code encode, decode and bit-flip correction.

The code maps a|0> + b|1> onto a(|00>+|11>)/sqrt2 + b(|01>+|10>)/sqrt2: the
logical amplitudes ride on the parity of the register, so measuring either
qubit in the computational basis removes one qubit without destroying the
superposition. Outcome 0 leaves the remaining qubit(s) carrying (a, b);
outcome 1 leaves the bit-flipped (b, a), fixed in software by an X gate.

The encoder is a CNOT with the control photon prepared in (|0>+|1>)/sqrt2
(half-wave plate at 22.5 degrees) and the payload entering the target port.
The same construction extends the code one qubit at a time, giving uniform
amplitudes over the even- and odd-parity classes of an n-qubit register.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnotgate import NoiseModel, noisy_cnot, postselect_cnot
from .optics import HWP, WaveplateSetting, waveplate
from .qcore import (
    DensityMatrix,
    Operator,
    PAULI_X,
    PureState,
    apply_to_pure,
    conditional_state,
    kron,
    single_qubit_operator,
)

PROVENANCE_IDEAL = "ideal"
PROVENANCE_GATE = "gate-simulated"
PROVENANCE_RECONSTRUCTED = "reconstructed"

SAMPLED = "sampled"

MAX_CODE_QUBITS = 6

_CONTROL_PLUS = apply_to_pure(
    waveplate(WaveplateSetting(HWP, 22.5)), PureState(1, [1.0, 0.0])
)


@dataclass(frozen=True, eq=False)
class EncodedState:
    """A code-qubit register plus bookkeeping about where it came from."""

    state: DensityMatrix
    provenance: str
    input_description: str = ""

    def __post_init__(self):
        if self.provenance not in (PROVENANCE_IDEAL, PROVENANCE_GATE, PROVENANCE_RECONSTRUCTED):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits


@dataclass(frozen=True, eq=False)
class DecodedResult:
    """Outcome of Z-measuring one code qubit, optionally bit-flip corrected."""

    outcome: int
    probability: float
    state: DensityMatrix
    corrected: bool

    def __post_init__(self):
        if self.outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        if not 0.0 <= self.probability <= 1.0 + 1e-12:
            raise ValueError("probability out of range")


def describe_state(psi: PureState) -> str:
    """Compact text form of a 1-qubit state for logs and reports."""
    a, b = psi.amplitudes
    return f"({a.real:+.4f}{a.imag:+.4f}j)|0> + ({b.real:+.4f}{b.imag:+.4f}j)|1>"


def ideal_encoded(psi: PureState) -> PureState:
    """The exact code state a(|00>+|11>)/sqrt2 + b(|01>+|10>)/sqrt2."""
    if psi.num_qubits != 1:
        raise ValueError("the code encodes a single qubit")
    a, b = psi.amplitudes
    return PureState(2, np.array([a, b, b, a]) / np.sqrt(2.0))


def encode(psi: PureState, gate: str | NoiseModel = "ideal") -> tuple[float, EncodedState]:
    """Run the payload through the encoder CNOT.

    Args:
        psi: 1-qubit payload, becomes the target input.
        gate: "ideal" for the exact post-selected gate, or a NoiseModel.

    Returns:
        (coincidence probability, encoded 2-qubit state).
    """
    if psi.num_qubits != 1:
        raise ValueError("the code encodes a single qubit")
    joint = kron(_CONTROL_PLUS, psi)
    description = describe_state(psi)
    if isinstance(gate, str):
        if gate != "ideal":
            raise ValueError(f"gate must be 'ideal' or a NoiseModel, got {gate!r}")
        prob, out = postselect_cnot(joint)
        return prob, EncodedState(out.density(), PROVENANCE_IDEAL, description)
    prob, rho = noisy_cnot(joint.density(), gate)
    return prob, EncodedState(rho, PROVENANCE_GATE, description)


def _outcome_probability(rho: DensityMatrix, qubit: int, outcome: int) -> float:
    proj = np.diag([1.0, 0.0]) if outcome == 0 else np.diag([0.0, 1.0])
    full = single_qubit_operator(proj.astype(complex), qubit, rho.num_qubits)
    return float(np.real(np.trace(full @ rho.matrix)))


def decode(
    encoded: EncodedState,
    measured_qubit: int = 1,
    outcome: int | str = 0,
    correct: bool = True,
    rng: np.random.Generator | None = None,
) -> DecodedResult:
    """Z-measure one code qubit and return the surviving register.

    Args:
        encoded: the code state (2 or more qubits).
        measured_qubit: 1-based index of the qubit to measure.
        outcome: 0, 1, or SAMPLED to draw from the state's own statistics.
        correct: apply the X correction when the outcome is 1, so the result
            targets the original payload rather than its bit-flipped twin.
        rng: required when outcome == SAMPLED.

    Returns:
        DecodedResult with the post-measurement (n-1)-qubit state.
    """
    rho = encoded.state
    if outcome == SAMPLED:
        if rng is None:
            raise ValueError("sampled decoding requires an rng")
        p0 = _outcome_probability(rho, measured_qubit, 0)
        outcome = 0 if rng.random() < p0 else 1
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0, 1 or SAMPLED")
    prob, rest = conditional_state(rho, measured_qubit, outcome)
    applied = False
    if correct and outcome == 1:
        # flipping any single qubit of a parity-code register flips the
        # logical qubit; use the first remaining one
        x_full = single_qubit_operator(PAULI_X, 1, rest.num_qubits)
        rest = DensityMatrix(rest.num_qubits, x_full @ rest.matrix @ x_full.conj().T)
        applied = True
    return DecodedResult(outcome, prob, rest, applied)


def parity_extend(psi: PureState, n: int) -> PureState:
    """The n-qubit parity-code state of a 1-qubit payload.

    Amplitude a/sqrt(2^(n-1)) on every even-parity basis string and
    b/sqrt(2^(n-1)) on every odd-parity one; n = 2 reduces to ideal_encoded.
    """
    if psi.num_qubits != 1:
        raise ValueError("the code encodes a single qubit")
    if not 2 <= n <= MAX_CODE_QUBITS:
        raise ValueError(f"n must lie in [2, {MAX_CODE_QUBITS}]")
    a, b = psi.amplitudes
    scale = 1.0 / np.sqrt(2.0 ** (n - 1))
    amps = np.empty(2**n, dtype=complex)
    for idx in range(2**n):
        amps[idx] = (a if bin(idx).count("1") % 2 == 0 else b) * scale
    return PureState(n, amps)


def encoded_x(num_qubits: int) -> Operator:
    """Logical X on a parity-code register: X on the first physical qubit."""
    return Operator(2**num_qubits, single_qubit_operator(PAULI_X, 1, num_qubits))
