"""Density-matrix reconstruction: linear inversion and iterative maximum likelihood.

Linear inversion solves the least-squares system between measured frequencies
and projector expectation values over an orthonormal Hermitian operator
basis. Under shot noise its output can have negative eigenvalues, so it is
returned unvalidated; the maximum-likelihood step is what produces a
physical state.

The MLE treats each count as Poisson with mean shots * Tr(rho Pi). Because a
setting list need not resolve the identity, the solver maximizes the Poisson
profile likelihood

    sum_k n_k log p_k(rho) - N log Tr(rho S),      S = sum_k (shots_k/shots_max) Pi_k

by the standard fixed-point iteration on the S^(-1/2)-transformed projector
set (which does sum to the identity), with a diluted step whenever a full
step would lower the likelihood; the iteration is therefore monotone. When
the setting set is the overcomplete Pauli scheme S is proportional to the
identity and the objective reduces to the plain sum_k n_k log p_k.

The iteration starts from the positivity-projected linear-inversion estimate
whenever the setting set supports one (falling back to the maximally mixed
state otherwise). Fixed-point iterations of this family converge only
sublinearly onto rank-deficient optima, so a cold start cannot reach the
required exact-limit accuracy in a practical iteration budget; the warm
start removes that bottleneck without touching the update rule or its
monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .measure import (
    MINIMAL,
    OVERCOMPLETE,
    CountRecord,
    setting_projector,
)
from .qcore import DensityMatrix, HermitianMatrix

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
PROB_LOG_FLOOR = 1e-12

_PAULI_1Q = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class TomographyResult:
    rho: DensityMatrix
    log_likelihood: float
    iterations: int
    converged: bool
    scheme: str
    # accepted log-likelihood value after every iteration, for monotonicity audits
    trajectory: tuple[float, ...] = ()

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


def _hermitian_basis(num_qubits: int) -> np.ndarray:
    """Orthonormal Hermitian basis (normalized Pauli products), shape (d^2, d, d)."""
    dim = 2**num_qubits
    ops = []
    for combo in product(range(4), repeat=num_qubits):
        op = np.array([[1.0 + 0.0j]])
        for idx in combo:
            op = np.kron(op, _PAULI_1Q[idx])
        ops.append(op / np.sqrt(dim))
    return np.stack(ops)


def _infer_num_qubits(counts: list[CountRecord]) -> int:
    sizes = {rec.setting.num_qubits for rec in counts}
    if len(sizes) != 1:
        raise ValueError("count records mix different qubit numbers")
    return sizes.pop()


def _infer_scheme(counts: list[CountRecord], num_qubits: int) -> str:
    n = len(counts)
    if (num_qubits, n) in ((1, 4), (2, 16)):
        return MINIMAL
    if (num_qubits, n) in ((1, 6), (2, 36)):
        return OVERCOMPLETE
    return "custom"


def linear_inversion(counts: list[CountRecord]) -> HermitianMatrix:
    """Least-squares state estimate from count frequencies.

    Raises ValueError when the setting set is not informationally complete
    (design-matrix rank below d^2). The result is Hermitian with unit trace
    but may fail positivity under shot noise.
    """
    if not counts:
        raise ValueError("no count records")
    num_qubits = _infer_num_qubits(counts)
    dim = 2**num_qubits
    basis = _hermitian_basis(num_qubits)
    projectors = np.stack([setting_projector(rec.setting) for rec in counts])
    design = np.real(np.einsum("kij,bji->kb", projectors, basis))
    if np.linalg.matrix_rank(design, tol=1e-10) < dim * dim:
        raise ValueError("setting set is not informationally complete")
    freqs = np.array([rec.count / rec.shots_nominal for rec in counts])
    coeffs, *_ = np.linalg.lstsq(design, freqs, rcond=None)
    mat = np.einsum("b,bij->ij", coeffs, basis)
    mat = 0.5 * (mat + mat.conj().T)
    trace = float(np.real(np.trace(mat)))
    if abs(trace) < 1e-12:
        raise ValueError("degenerate reconstruction with near-zero trace")
    return HermitianMatrix(num_qubits, mat / trace)


def _log_likelihood(probs: np.ndarray, counts: np.ndarray) -> float:
    return float(np.sum(counts * np.log(np.maximum(probs, PROB_LOG_FLOOR))))


def _warm_start(counts: list[CountRecord], dim: int) -> np.ndarray:
    """Positivity-projected linear inversion, or I/d when unavailable."""
    try:
        estimate = linear_inversion(counts)
    except ValueError:
        return np.eye(dim, dtype=complex) / dim
    ew, ev = np.linalg.eigh(estimate.matrix)
    # blend a sliver of the identity back in, scaled by how non-physical the
    # inversion was, so the multiplicative updates keep full support
    blend = float(min(0.1, max(1e-12, -ew.min())))
    ew = np.clip(ew, 0.0, None)
    if ew.sum() <= 0:
        return np.eye(dim, dtype=complex) / dim
    rho0 = (ev * ew) @ ev.conj().T / ew.sum()
    return (1.0 - blend) * rho0 + blend * np.eye(dim) / dim


def mle(
    counts: list[CountRecord],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TomographyResult:
    """Maximum-likelihood reconstruction by the monotone fixed-point iteration.

    Convergence is declared when the likelihood gain of an iteration drops
    below tol, or when no diluted step can improve the likelihood any
    further. The reported log_likelihood is the Poisson profile objective
    (equal, up to a constant, to sum n_k log p_k for identity-resolving
    schemes).
    """
    if not counts:
        raise ValueError("no count records")
    num_qubits = _infer_num_qubits(counts)
    dim = 2**num_qubits
    n = np.array([float(rec.count) for rec in counts])
    total = float(n.sum())
    if total <= 0:
        raise ValueError("all counts are zero")
    shots = np.array([float(rec.shots_nominal) for rec in counts])
    weights = shots / shots.max()
    projectors = np.stack(
        [w * setting_projector(rec.setting) for w, rec in zip(weights, counts)]
    )

    s = projectors.sum(axis=0)
    ew, ev = np.linalg.eigh(s)
    if ew.min() <= 1e-12:
        raise ValueError("setting set leaves part of the space unmeasured")
    s_inv_half = (ev / np.sqrt(ew)) @ ev.conj().T
    s_half = (ev * np.sqrt(ew)) @ ev.conj().T
    transformed = np.einsum("ab,kbc,cd->kad", s_inv_half, projectors, s_inv_half)

    rho0 = _warm_start(counts, dim)
    sigma = s_half @ rho0 @ s_half
    sigma = 0.5 * (sigma + sigma.conj().T)
    sigma /= np.real(np.trace(sigma))
    probs = np.real(np.einsum("kij,ji->k", transformed, sigma))
    ll = _log_likelihood(probs, n)
    iterations = 0
    converged = False
    trajectory = [ll]

    for iterations in range(1, max_iter + 1):
        ratios = n / np.maximum(probs, PROB_LOG_FLOOR)
        r_op = np.einsum("k,kij->ij", ratios, transformed) / total
        r_op = 0.5 * (r_op + r_op.conj().T)

        candidate = r_op @ sigma @ r_op
        candidate = 0.5 * (candidate + candidate.conj().T)
        candidate /= np.real(np.trace(candidate))
        cand_probs = np.real(np.einsum("kij,ji->k", transformed, candidate))
        cand_ll = _log_likelihood(cand_probs, n)

        if cand_ll < ll:
            # diluted step: shrink toward the identity direction until the
            # likelihood stops decreasing
            eps = 1.0
            improved = False
            eye = np.eye(dim)
            while eps > 1e-8:
                m_op = (eye + eps * r_op) / (1.0 + eps)
                candidate = m_op @ sigma @ m_op.conj().T
                candidate = 0.5 * (candidate + candidate.conj().T)
                candidate /= np.real(np.trace(candidate))
                cand_probs = np.real(np.einsum("kij,ji->k", transformed, candidate))
                cand_ll = _log_likelihood(cand_probs, n)
                if cand_ll >= ll:
                    improved = True
                    break
                eps *= 0.5
            if not improved:
                converged = True
                break

        gain = cand_ll - ll
        sigma, probs, ll = candidate, cand_probs, cand_ll
        trajectory.append(ll)
        if gain < tol:
            converged = True
            break

    rho = s_inv_half @ sigma @ s_inv_half
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.real(np.trace(rho))
    # clamp roundoff-scale negative eigenvalues so validation always passes
    ew, ev = np.linalg.eigh(rho)
    ew = np.clip(ew, 0.0, None)
    rho = (ev * ew) @ ev.conj().T
    rho /= np.real(np.trace(rho))

    return TomographyResult(
        rho=DensityMatrix(num_qubits, rho),
        log_likelihood=ll,
        iterations=iterations,
        converged=converged,
        scheme=_infer_scheme(counts, num_qubits),
        trajectory=tuple(trajectory),
    )
