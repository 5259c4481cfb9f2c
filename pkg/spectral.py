"""
Spectral utilities for slemwatch
Dense nonsymmetric eigen-decomposition, SLEM extraction, stationary
distributions and the matrix two-norm used to compare chains
"""

import logging

import numpy as np
import scipy.linalg

from markov import build_transition_matrix
from models import SpectralSummary, StationaryDistribution, TransitionMatrix
from validation import NumericalError, SlemError, ValidationError, require_square

logger = logging.getLogger(__name__)

# moduli closer than this are treated as tied when ordering eigenvalues
MODULUS_TIE_DECIMALS = 12


def _as_matrix(matrix):
    if isinstance(matrix, TransitionMatrix):
        return np.array(matrix.probs)
    return require_square(matrix, "matrix")


def sort_eigenvalues(values):
    """Descending modulus, ties broken by descending real then imaginary part"""
    values = np.asarray(values, dtype=complex)
    moduli = np.round(np.abs(values), MODULUS_TIE_DECIMALS)
    order = np.lexsort((-values.imag, -values.real, -moduli))
    return values[order]


def eigen_decompose(matrix):
    """All eigenvalues of a real square matrix, sorted for SLEM extraction

    LAPACK's geev balances, reduces to Hessenberg form and runs shifted QR
    with deflation; complex conjugate pairs come back exactly paired.
    """
    a = _as_matrix(matrix)
    if a.shape[0] < 2:
        raise ValidationError("eigen-decomposition needs at least a 2x2 matrix")
    try:
        values = scipy.linalg.eigvals(a, check_finite=True)
    except scipy.linalg.LinAlgError as e:
        raise NumericalError(
            f"QR iteration did not converge within LAPACK's iteration cap "
            f"({30 * a.shape[0]} sweeps per eigenvalue): {e}"
        )
    summary = SpectralSummary(eigenvalues=sort_eigenvalues(values))
    logger.debug(
        f"Eigen-decomposed {a.shape[0]}x{a.shape[0]} matrix, SLEM={summary.slem_modulus:.6f}"
    )
    return summary


def slem_of_series(ts, num_states, quantizer=None):
    """SLEM modulus of the empirical chain built from a series"""
    tm = build_transition_matrix(ts, num_states, quantizer=quantizer)
    return eigen_decompose(tm).slem_modulus


def stationary_distribution(tm, tol=1e-6):
    """Normalized left eigenvector of the eigenvalue nearest 1

    Chains with unvisited states, or with eigenvalue 1 repeated (reducible),
    are reported as errors rather than resolved by a guess.
    """
    if isinstance(tm, TransitionMatrix):
        if not tm.is_stochastic:
            raise ValidationError(
                f"stationary distribution needs a fully stochastic chain; "
                f"unvisited states {(tm.zero_rows + 1).tolist()}"
            )
    p = _as_matrix(tm)
    values, left = scipy.linalg.eig(p, left=True, right=False)
    near_one = np.flatnonzero(np.abs(values - 1.0) <= tol)
    if near_one.size == 0:
        raise NumericalError(
            f"no eigenvalue within {tol} of 1 (leading modulus {np.max(np.abs(values)):.9f})"
        )
    if near_one.size > 1:
        raise NumericalError(
            f"eigenvalue 1 has multiplicity {near_one.size}: the chain is reducible "
            "and has no unique stationary distribution"
        )
    vector = np.real(left[:, near_one[0]])
    pi = vector / vector.sum()
    residual = float(np.max(np.abs(pi @ p - pi)))
    return StationaryDistribution(probs=pi, residual=residual)


def stationary_peak(tm):
    """Largest stationary probability; NaN when no unique distribution exists"""
    try:
        return float(np.max(stationary_distribution(tm).probs))
    except SlemError as e:
        logger.debug(f"No stationary peak: {e}")
        return float("nan")


def limit_distribution_distance(p, q):
    """L1 distance between the stationary distributions of two chains"""
    pi_p = stationary_distribution(p).probs
    pi_q = stationary_distribution(q).probs
    if pi_p.shape != pi_q.shape:
        raise ValidationError("chains must have the same number of states")
    return float(np.abs(pi_p - pi_q).sum())


def matrix_two_norm(a):
    """sqrt of the largest eigenvalue of A^T A (largest singular value)"""
    a = require_square(a, "matrix") if not isinstance(a, TransitionMatrix) else a.probs
    return float(np.linalg.norm(a, 2))
