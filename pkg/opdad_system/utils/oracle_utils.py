"""
Oracle Utilities
Batch principal direction, angle/gap metrics and the energy and subspace-dimension baselines.
"""

import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

import constants
from ..models.oracle_model import PrincipalDirectionTruth
from ..models.scenario_model import Observation
from ..models.tracker_model import RealEmbeddedCovariance
from .embedding_utils import align, embed, unembed
from .validation_utils import ConfigurationError, NumericalError, ValidationUtils

logger = logging.getLogger('opdad.oracle')

Stream = Union[Sequence[Observation], np.ndarray]


def _as_matrix(stream: Stream) -> np.ndarray:
    """(blocks, M) complex matrix from observations or an array"""
    if isinstance(stream, np.ndarray):
        return stream.reshape(1, -1) if stream.ndim == 1 else stream
    if len(stream) == 0:
        return np.zeros((0, 0), dtype=complex)
    return np.vstack([obs.complex_vector for obs in stream])


def _is_degenerate(eigenvalues: np.ndarray, gap: float) -> bool:
    return gap <= constants.DEGENERACY_TOLERANCE * max(abs(float(eigenvalues[0])), np.finfo(float).tiny)


def dmf_principal(samples: Optional[np.ndarray] = None, *,
                  xi: Optional[Union[RealEmbeddedCovariance, np.ndarray]] = None,
                  circular: bool = False) -> PrincipalDirectionTruth:
    """
    Principal direction by full symmetric eigendecomposition.

    `samples` are real embedded vectors (rows) whose second-moment matrix is
    decomposed; alternatively pass `xi` directly. With circular=True the
    samples are read as embedded complex vectors: the complex sample covariance
    Q is decomposed, the real spectrum is that of Xi(Q) / 2 and the reported
    eigengap is lambda_1 - lambda_3.
    """
    if xi is not None:
        matrix = xi.xi if isinstance(xi, RealEmbeddedCovariance) else np.asarray(xi, dtype=float)
        if not np.any(matrix):
            raise NumericalError("Covariance is identically zero")
        eigenvalues, eigenvectors = np.linalg.eigh(matrix)
        eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
        basis = eigenvectors[:, :2] if circular else None
    else:
        data = np.atleast_2d(np.asarray(samples, dtype=float))
        if data.shape[0] < 2:
            raise ConfigurationError(f"At least 2 samples are needed, got {data.shape[0]}")
        if not np.any(data):
            raise NumericalError("All samples are zero")
        ValidationUtils.require(ValidationUtils.validate_finite(data, 'samples'))

        if circular:
            y = unembed(data.T).T
            Q = (y.T @ y.conj()) / y.shape[0]
            mu, U = np.linalg.eigh(0.5 * (Q + Q.conj().T))
            mu, U = mu[::-1], U[:, ::-1]
            eigenvalues = np.repeat(0.5 * mu, 2)
            top = U[:, 0]
            basis = np.column_stack([embed(top), embed(1j * top)])
            eigenvectors = basis
        else:
            C = (data.T @ data) / data.shape[0]
            eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (C + C.T))
            eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
            basis = None

    floor = -constants.EIGENVALUE_CLAMP * max(float(np.sum(np.abs(eigenvalues))), 1.0)
    if eigenvalues[-1] < floor:
        logger.warning(f"Clamping negative eigenvalue {eigenvalues[-1]:.3e}")
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    step = 2 if circular else 1
    gap = float(eigenvalues[0] - eigenvalues[step]) if eigenvalues.shape[0] > step else float(eigenvalues[0])
    degenerate = _is_degenerate(eigenvalues, gap)
    if degenerate:
        logger.debug("Principal eigenvalue is degenerate; v* is not unique")

    vector = eigenvectors[:, 0]
    return PrincipalDirectionTruth(vector=vector / np.linalg.norm(vector), eigenvalues=eigenvalues,
                                   eigengap=gap, degenerate=degenerate, basis=basis)


def _unit_pair(v_hat: np.ndarray, v_star: np.ndarray, basis: Optional[np.ndarray]):
    for v, name in ((v_hat, 'v_hat'), (v_star, 'v_star')):
        ValidationUtils.require(ValidationUtils.validate_nonzero_vector(v, name))
    target = align(basis if basis is not None else v_star / np.linalg.norm(v_star), v_hat)
    return v_hat, target


def angle(v_hat: np.ndarray, v_star: np.ndarray, basis: Optional[np.ndarray] = None) -> float:
    """Angle in [0, pi/2] between v_hat and the aligned v*"""
    v_hat, target = _unit_pair(v_hat, v_star, basis)
    cosine = float(v_hat @ target) / float(np.linalg.norm(v_hat))
    return math.acos(min(max(cosine, -1.0), 1.0))


def gap(v_hat: np.ndarray, v_star: np.ndarray, basis: Optional[np.ndarray] = None) -> float:
    """|v_hat - v*| / |v_hat| with v* aligned to v_hat"""
    v_hat, target = _unit_pair(v_hat, v_star, basis)
    return float(np.linalg.norm(v_hat - target) / np.linalg.norm(v_hat))


def _windows(matrix: np.ndarray, window: int, history: Optional[np.ndarray]):
    """Yield (block offset, window rows) for every block of matrix, prefixed by history rows"""
    if history is not None and history.size:
        full = np.vstack([history[-(window - 1):] if window > 1 else history[:0], matrix])
        offset = full.shape[0] - matrix.shape[0]
    else:
        full, offset = matrix, 0
    if window > full.shape[0]:
        raise ConfigurationError(f"Window of {window} blocks is larger than the stream ({full.shape[0]} blocks)")
    for i in range(matrix.shape[0]):
        end = offset + i + 1
        yield i, full[max(0, end - window):end]


def ed_feature(stream: Stream, antenna: int) -> float:
    """Zero-mean variance estimate E|y[m]|^2 at one antenna"""
    matrix = _as_matrix(stream)
    if matrix.shape[0] < 2:
        raise ConfigurationError("Energy feature needs at least 2 blocks")
    return float(np.mean(np.abs(matrix[:, antenna]) ** 2))


def ed_statistics(stream: Stream, window: int = constants.BASELINE_WINDOW,
                  history: Optional[Stream] = None) -> np.ndarray:
    """Antenna-averaged windowed energy per block; NaN where fewer than 2 blocks are available"""
    matrix = _as_matrix(stream)
    past = _as_matrix(history) if history is not None else None
    values = np.full(matrix.shape[0], np.nan)
    for i, rows in _windows(matrix, window, past):
        if rows.shape[0] >= 2:
            values[i] = float(np.mean(np.abs(rows) ** 2))
    return values


def ed_detect(stream: Stream, threshold: float, window: int = constants.BASELINE_WINDOW,
              history: Optional[Stream] = None) -> np.ndarray:
    """Boolean jamming decisions: windowed energy above threshold"""
    statistics = ed_statistics(stream, window, history)
    return np.nan_to_num(statistics, nan=-np.inf) > threshold


def sd_feature(block_window: Stream, tau: float = constants.RANK_THRESHOLD) -> int:
    """Numerical rank of the windowed sample covariance, eigenvalues above tau * lambda_max"""
    matrix = _as_matrix(block_window)
    if matrix.shape[0] < 2:
        raise ConfigurationError(f"Subspace-dimension window needs at least 2 blocks, got {matrix.shape[0]}")
    R = (matrix.T @ matrix.conj()) / matrix.shape[0]
    eigenvalues = np.linalg.eigvalsh(0.5 * (R + R.conj().T))
    top = eigenvalues[-1]
    if top <= 0:
        return 0
    return int(np.count_nonzero(eigenvalues > tau * top))


def sd_statistics(stream: Stream, window: int = constants.BASELINE_WINDOW,
                  history: Optional[Stream] = None) -> np.ndarray:
    """Windowed rank per block; -1 where fewer than 2 blocks are available"""
    matrix = _as_matrix(stream)
    past = _as_matrix(history) if history is not None else None
    ranks = np.full(matrix.shape[0], -1, dtype=int)
    for i, rows in _windows(matrix, window, past):
        if rows.shape[0] >= 2:
            ranks[i] = sd_feature(rows)
    return ranks


def sd_detect(stream: Stream, baseline_rank: int, window: int = constants.BASELINE_WINDOW,
              history: Optional[Stream] = None) -> np.ndarray:
    """Boolean jamming decisions: windowed rank above the training baseline"""
    return sd_statistics(stream, window, history) > baseline_rank


def calibrate_threshold(values: Sequence[float], target_pfa: float) -> float:
    """(1 - target_pfa) quantile of clean-data statistics"""
    ValidationUtils.require(ValidationUtils.validate_fraction(target_pfa, 'target_pfa', inclusive=True))
    data = np.asarray(values, dtype=float)
    data = data[np.isfinite(data)]
    if data.size == 0:
        raise ConfigurationError("No finite calibration statistics")
    return float(np.quantile(data, 1.0 - target_pfa, method='higher'))
