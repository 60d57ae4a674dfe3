"""Teleportation-failure bookkeeping for the parity code.

A non-deterministic teleportation step succeeds with probability n/(n+1)
(the ancilla-size law of the underlying protocol). When it fails it performs
a computational-basis measurement on the qubit it consumed. Unencoded, that
failure destroys the payload; on a parity-code register it merely shortens
the code by one qubit, because the Z outcome is a fair coin whose value only
toggles the logical bit, fixable by an X correction.

The simulation tracks an actual register state through a width-2 code:
failed attempts Z-measure code qubits one at a time; a successful attempt
teleports the payload up to the standard Bell-outcome Pauli frame, which the
recorded X/Z corrections undo. One bookkeeping convention (documented here,
asserted by tests): when the last code qubit's attempt fails there is
nothing left to protect the payload with, and the protocol abandons the
attempt with the state intact; the recorded terminal z outcome is drawn from
the qubit's own Z statistics but nothing is collapsed or corrected. In this
ideal model every branch therefore ends with the payload state unchanged;
what failure costs is the gate the teleportation was meant to apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import parity_extend
from .qcore import DensityMatrix, PureState, conditional_state, single_qubit_operator, PAULI_X, PAULI_Z

BELL_LABELS = ("00", "01", "10", "11")

# Pauli-frame corrections undoing each Bell outcome.
BELL_CORRECTIONS = {
    "00": (),
    "01": ("X",),
    "10": ("Z",),
    "11": ("X", "Z"),
}


@dataclass(frozen=True)
class AttemptRecord:
    """One teleportation attempt: either a Bell outcome or a failure Z value."""

    success: bool
    z_outcome: int | None = None
    bell_outcome: str | None = None

    def __post_init__(self):
        if self.success:
            if self.bell_outcome not in BELL_LABELS or self.z_outcome is not None:
                raise ValueError("successful attempt carries only a Bell outcome")
        else:
            if self.z_outcome not in (0, 1) or self.bell_outcome is not None:
                raise ValueError("failed attempt carries only a z outcome")


@dataclass(frozen=True, eq=False)
class TeleportOutcome:
    attempts: tuple[AttemptRecord, ...]
    corrections_applied: tuple[str, ...]
    final_state: DensityMatrix
    overall_success: bool


def attempt_success_prob(n: int) -> float:
    """Success probability n/(n+1) of a single teleportation attempt."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return n / (n + 1.0)


def encoded_teleport_success(n: int, code_width: int) -> float:
    """Probability that at least one of code_width attempts succeeds.

    Overall failure needs every attempt to fail, each with probability
    1/(n+1), so the success probability is 1 - (n+1)^(-code_width).
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if int(code_width) != code_width or code_width < 1:
        raise ValueError("code_width must be a positive integer")
    return 1.0 - (1.0 / (n + 1.0)) ** code_width


def z_outcome_probabilities(psi: PureState) -> tuple[float, float]:
    """Exact Z statistics of either qubit of the width-2 encoded state.

    (1/2, 1/2) for every payload: the code hides the logical amplitudes from
    single-qubit Z measurements.
    """
    register = parity_extend(psi, 2).density()
    p0, _ = conditional_state(register, 1, 0)
    p1, _ = conditional_state(register, 1, 1)
    return p0, p1


def _apply_correction(rho: DensityMatrix, label: str) -> DensityMatrix:
    op = {"X": PAULI_X, "Z": PAULI_Z}[label]
    full = single_qubit_operator(op, 1, rho.num_qubits)
    return DensityMatrix(rho.num_qubits, full @ rho.matrix @ full.conj().T)


def _logical_readout(register: DensityMatrix) -> DensityMatrix:
    """The 1-qubit logical content of a register (identity on 1 qubit)."""
    while register.num_qubits > 1:
        # outcome 0 reads the code without flipping the logical bit
        _, register = conditional_state(register, 1, 0)
    return register


class _Engine:
    """Shared trajectory logic; decision callables supply the randomness."""

    def __init__(self, psi: PureState, decide_success, decide_z, decide_bell):
        self.register = parity_extend(psi, 2).density()
        self.decide_success = decide_success
        self.decide_z = decide_z
        self.decide_bell = decide_bell

    def run(self) -> TeleportOutcome:
        attempts: list[AttemptRecord] = []
        corrections: list[str] = []
        success = False
        while True:
            if self.decide_success():
                bell = self.decide_bell()
                corrections.extend(BELL_CORRECTIONS[bell])
                attempts.append(AttemptRecord(True, bell_outcome=bell))
                success = True
                break
            if self.register.num_qubits >= 2:
                p0, _ = conditional_state(self.register, 1, 0)
                z = self.decide_z(p0)
                _, remaining = conditional_state(self.register, 1, z)
                if z == 1:
                    remaining = _apply_correction(remaining, "X")
                    corrections.append("X")
                attempts.append(AttemptRecord(False, z_outcome=z))
                self.register = remaining
            else:
                # terminal failure: record the readout, abandon the attempt,
                # leave the state untouched
                p0 = float(np.real(self.register.matrix[0, 0]))
                z = self.decide_z(p0)
                attempts.append(AttemptRecord(False, z_outcome=z))
                break
        return TeleportOutcome(
            attempts=tuple(attempts),
            corrections_applied=tuple(corrections),
            final_state=_logical_readout(self.register),
            overall_success=success,
        )


def simulate_teleport(alpha: complex, beta: complex, n: int, seed: int = 0) -> TeleportOutcome:
    """One random teleportation history of the width-2 encoded payload.

    Draw order per attempt: the success Bernoulli first, then the z outcome
    (on failure) or the uniform Bell outcome (on success), all from a single
    PCG64 generator seeded with seed.
    """
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("payload amplitudes must be normalized")
    p_success = attempt_success_prob(n)
    psi = PureState(1, [alpha, beta])
    rng = np.random.default_rng(seed)
    engine = _Engine(
        psi,
        decide_success=lambda: bool(rng.random() < p_success),
        decide_z=lambda p0: 0 if rng.random() < p0 else 1,
        decide_bell=lambda: BELL_LABELS[rng.integers(4)],
    )
    return engine.run()


def teleport_trajectory(psi: PureState, decisions) -> TeleportOutcome:
    """Replay a forced decision sequence (for analysis and tests).

    decisions: iterable of ("fail", z) or ("success", bell_label) tuples,
    consumed one per attempt.
    """
    queue = list(decisions)

    def next_decision():
        if not queue:
            raise ValueError("decision sequence exhausted before the protocol ended")
        return queue[0]

    def decide_success():
        return next_decision()[0] == "success"

    def decide_z(_p0):
        kind, value = queue.pop(0)
        if kind != "fail":
            raise ValueError("expected a failure decision")
        return value

    def decide_bell():
        kind, value = queue.pop(0)
        if kind != "success":
            raise ValueError("expected a success decision")
        return value

    return _Engine(psi, decide_success, decide_z, decide_bell).run()


def monte_carlo_success(n: int, code_width: int, trials: int, seed: int = 0) -> float:
    """Monte Carlo estimate of encoded_teleport_success by direct sampling."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = attempt_success_prob(n)
    rng = np.random.default_rng(seed)
    draws = rng.random(size=(trials, code_width))
    return float(np.mean(np.any(draws < p, axis=1)))
