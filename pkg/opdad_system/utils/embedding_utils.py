"""
Embedding Utilities
Complex-to-real embedding, Rayleigh quotient, gradient, potential and density feature.
"""

import math
from typing import Optional, Union

import numpy as np

import constants
from ..models.channel_model import CovarianceMatrix
from ..models.scenario_model import Observation
from ..models.tracker_model import DensityFeature, RealEmbeddedCovariance
from .validation_utils import ConfigurationError, ValidationUtils

DENSITY_MODES = ['ratio', 'phase']


def embed(obs: Union[Observation, np.ndarray]) -> np.ndarray:
    """(Re y, Im y) as one real vector of length 2M"""
    y = obs.complex_vector if isinstance(obs, Observation) else np.asarray(obs)
    return np.concatenate([y.real, y.imag]).astype(float)


def unembed(v: np.ndarray) -> np.ndarray:
    """Inverse of embed"""
    half = v.shape[0] // 2
    return v[:half] + 1j * v[half:]


def build_xi(Q: Union[CovarianceMatrix, np.ndarray]) -> RealEmbeddedCovariance:
    """
    Real symmetric form of a Hermitian matrix.

    For t = (Re u, Im u): u^H Q u = t^T Xi t, and every eigenvalue of Q shows
    up twice in Xi.
    """
    entries = Q.entries if isinstance(Q, CovarianceMatrix) else np.asarray(Q, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(entries))) if entries.size else 1.0)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ConfigurationError(f"Expected a square matrix, got shape {entries.shape}")
    if np.max(np.abs(entries - entries.conj().T)) > constants.HERMITIAN_TOLERANCE * scale:
        raise ConfigurationError("Matrix is not Hermitian")

    A, B = entries.real, entries.imag
    xi = np.block([[A, -B], [B, A]])
    return RealEmbeddedCovariance(xi=0.5 * (xi + xi.T))


def real_covariance(Q: Union[CovarianceMatrix, np.ndarray]) -> np.ndarray:
    """E[y_R y_R^T] of a circular complex vector with covariance Q, i.e. Xi / 2"""
    return 0.5 * build_xi(Q).xi


def _check_vector(v: np.ndarray, name: str) -> float:
    ValidationUtils.require(ValidationUtils.validate_nonzero_vector(v, name))
    return float(v @ v)


def rayleigh_quotient(v: np.ndarray, sample: np.ndarray) -> float:
    """(v^T s s^T v) / (v^T v)"""
    norm_sq = _check_vector(v, 'v')
    projection = float(v @ sample)
    return projection * projection / norm_sq


def gradient(v: np.ndarray, sample: np.ndarray) -> np.ndarray:
    """(2 / |v|^2) (s s^T - G(v) I) v, the gradient of the one-sample Rayleigh quotient"""
    norm_sq = _check_vector(v, 'v')
    projection = float(v @ sample)
    return (2.0 / norm_sq) * (projection * sample - (projection * projection / norm_sq) * v)


def align(reference: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Unit vector of the reference set closest to v.

    A 1-D reference is sign-flipped so that its inner product with v is
    non-negative. A 2-D array is read as an orthonormal basis (columns) and v
    is projected onto its span, which fixes the free complex phase of a
    circular principal direction.
    """
    if reference.ndim == 1:
        return -reference if float(reference @ v) < 0 else reference
    coords = reference.T @ v
    norm = np.linalg.norm(coords)
    if norm == 0:
        return reference[:, 0]
    return reference @ (coords / norm)


def quarter_turn(v: np.ndarray) -> np.ndarray:
    """embed(1j * unembed(v)), the same complex direction a quarter period later"""
    half = v.shape[0] // 2
    return np.concatenate([-v[half:], v[:half]])


def phase_align(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Unit vector on the complex phase orbit of v closest to the reference"""
    norm_sq = _check_vector(v, 'v')
    unit = v / math.sqrt(norm_sq)
    return align(np.column_stack([unit, quarter_turn(unit)]), reference)


def canonical_phase(v: np.ndarray, mode: str = 'ratio') -> np.ndarray:
    """
    Global phase rotation of v that keeps every antenna as far as possible
    from the singular angles of the density feature.

    'ratio' is singular where the imaginary part vanishes (angles 0 and pi),
    'phase' at the arctan2 branch cut (angle pi). The widest empty arc between
    the antenna angles is centred on the singular angle.
    """
    ValidationUtils.require(ValidationUtils.validate_choice(mode, DENSITY_MODES, 'density mode'))
    _check_vector(v, 'v')
    t = unembed(v)
    magnitude = np.abs(t)
    angles = np.angle(t[magnitude > constants.DENSITY_GUARD * magnitude.max()])
    period = math.pi if mode == 'ratio' else 2.0 * math.pi
    points = np.sort(np.mod(angles, period))
    gaps = np.diff(np.append(points, points[0] + period))
    widest = int(np.argmax(gaps))
    middle = points[widest] + 0.5 * gaps[widest]
    singular = 0.0 if mode == 'ratio' else math.pi
    rotated = embed(t * np.exp(1j * (singular - middle)))
    return rotated / np.linalg.norm(rotated)


def potential(v_hat: np.ndarray, v_star: np.ndarray, basis: Optional[np.ndarray] = None) -> float:
    """Psi = 1 - (v_hat^T v*) / |v_hat|^2 with v* aligned to v_hat first"""
    norm_sq = _check_vector(v_hat, 'v_hat')
    _check_vector(v_star, 'v_star')
    target = align(basis if basis is not None else v_star, v_hat)
    value = 1.0 - float(v_hat @ target) / norm_sq
    return min(max(value, 0.0), 1.0)


def expected_potential(l: float, kappa: float, lam1: float, lam2: float, dim: int) -> float:
    """
    Misaligned mass (d - 1) l^(2 kappa lam2) / (l^(2 kappa lam1) + (d - 1) l^(2 kappa lam2)).

    Computed in log space; d is the real dimension 2M.
    """
    ratio = (dim - 1) * math.exp(2.0 * kappa * (lam2 - lam1) * math.log(l))
    return ratio / (1.0 + ratio)


def density_feature(v_hat: np.ndarray, block_index: int = 0, mode: str = 'ratio',
                    reference: Optional[np.ndarray] = None) -> DensityFeature:
    """
    M-vector built from the real and imaginary halves of the tracked direction.

    'ratio' takes v[i] / v[M + i] with the denominator clamped away from zero;
    'phase' takes arctan2(v[M + i], v[i]), with each antenna's branch cut put
    opposite the reference's angle when a reference is given. Either way the
    result is normalised.
    """
    ValidationUtils.require(ValidationUtils.validate_choice(mode, DENSITY_MODES, 'density mode'))
    half = v_hat.shape[0] // 2
    real, imag = v_hat[:half], v_hat[half:]

    if mode == 'ratio':
        guard = constants.DENSITY_GUARD
        denominator = np.where(np.abs(imag) < guard, np.where(imag < 0, -guard, guard), imag)
        values = real / denominator
    else:
        values = np.arctan2(imag, real)
        if reference is not None:
            anchor = np.arctan2(reference[half:], reference[:half])
            values = anchor + np.angle(np.exp(1j * (values - anchor)))

    # |ratio| <= 1 / guard for a unit v_hat, so the norm is finite
    norm = np.linalg.norm(values)
    if norm == 0:
        values = np.full(half, 1.0 / math.sqrt(half))
    else:
        values = values / norm
    return DensityFeature(values=values, block_index=block_index, mode=mode)
