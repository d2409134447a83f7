"""
Channel Utilities
One-ring covariance synthesis, block-fading sampling, path loss and placement.
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import toeplitz

import constants
from ..models.channel_model import ChannelGeometry, ChannelRealization, CovarianceMatrix, TransmitterKind
from .validation_utils import ConfigurationError, NumericalError, ValidationUtils

logger = logging.getLogger('opdad.channel')


@lru_cache(maxsize=8)
def _legendre_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


def _one_ring_lags(mean_aoa: float, spread: float, antennas: int, panels: int) -> np.ndarray:
    """Composite Gauss-Legendre estimate of (1/2D) * integral of exp(-j d pi sin t) for lags d = 0..M-1"""
    x, w = _legendre_rule(constants.QUADRATURE_NODES)
    edges = np.linspace(mean_aoa - spread, mean_aoa + spread, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    theta = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() / (2.0 * spread)
    lags = np.arange(antennas)[:, None]
    kernel = np.exp(-1j * np.pi * lags * np.sin(theta)[None, :])
    values = kernel @ weights
    values[0] = 1.0
    return values


def one_ring_covariance(geom: ChannelGeometry, antennas: int,
                        tolerance: float = constants.QUADRATURE_TOLERANCE) -> CovarianceMatrix:
    """
    Spatial covariance of a half-wavelength ULA under the one-ring model.

    [R]_{p,q} = (1 / 2D) * integral over [mean - D, mean + D] of exp(-j (p - q) pi sin t) dt.
    The matrix is Hermitian Toeplitz, so only the M lags are integrated. Panels of the
    composite rule are doubled until no lag moves by more than `tolerance`.
    """
    ValidationUtils.require(ValidationUtils.validate_count(antennas, 'antennas'))
    ValidationUtils.require(ValidationUtils.validate_positive(geom.angular_spread, 'angular_spread'))
    if geom.angular_spread > math.pi:
        raise ConfigurationError(f"angular_spread must not exceed pi, got {geom.angular_spread}")

    panels = 1
    lags = _one_ring_lags(geom.mean_aoa, geom.angular_spread, antennas, panels)
    while True:
        refined = _one_ring_lags(geom.mean_aoa, geom.angular_spread, antennas, 2 * panels)
        change = float(np.max(np.abs(refined - lags)))
        lags, panels = refined, 2 * panels
        if change <= tolerance:
            break
        if panels >= constants.QUADRATURE_MAX_PANELS:
            logger.warning(f"One-ring quadrature stopped at {panels} panels with change {change:.2e}")
            break
    logger.debug(f"One-ring covariance M={antennas} converged with {panels} panels")

    # first column holds lags p - q >= 0, the first row their conjugates
    return CovarianceMatrix(toeplitz(lags, np.conj(lags)))


def steering_vector(angle: float, antennas: int) -> np.ndarray:
    """Half-wavelength ULA response exp(-j p pi sin angle), p = 0..M-1"""
    return np.exp(-1j * np.pi * np.arange(antennas) * np.sin(angle))


def covariance_factor(cov: CovarianceMatrix) -> np.ndarray:
    """
    Factor F with F F^H = R from the eigendecomposition.

    Eigenvalues down to -tol * trace are round-off and are clamped to zero;
    anything more negative means the matrix is not PSD.
    """
    eigenvalues, eigenvectors = np.linalg.eigh(cov.entries)
    floor = -constants.PSD_TOLERANCE * max(cov.trace, 1.0)
    if eigenvalues[0] < floor:
        raise NumericalError(f"Covariance is indefinite: smallest eigenvalue {eigenvalues[0]:.3e}")
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))[None, :]


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard circular complex Gaussian samples, E|z|^2 = 1"""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


def sample_channel(cov: CovarianceMatrix, rng_stream: np.random.Generator, block_index: int = 1,
                   factor: Optional[np.ndarray] = None) -> ChannelRealization:
    """Draw h = F z with z ~ CN(0, I); pass a precomputed factor to skip the eigendecomposition"""
    if factor is None:
        factor = covariance_factor(cov)
    z = complex_normal(rng_stream, factor.shape[1])
    return ChannelRealization(vector=factor @ z, block_index=block_index)


def path_loss_gain(distance: float, exponent: float) -> float:
    """Linear power gain (distance / d_ref)^(-exponent) with d_ref = 1 m"""
    ValidationUtils.require(ValidationUtils.validate_positive(distance, 'distance'))
    ValidationUtils.require(ValidationUtils.validate_positive(exponent, 'exponent'))
    return float((distance / constants.REFERENCE_DISTANCE) ** (-exponent))


def dbm_to_watts(power_dbm: float) -> float:
    """P_watts = 10^((P_dBm - 30) / 10)"""
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


def sample_annulus_distance(rng: np.random.Generator, annulus: Sequence[float]) -> float:
    """Distance of a point uniform over the area of the annulus [r_in, r_out]"""
    inner, outer = annulus
    return float(math.sqrt(rng.uniform(inner ** 2, outer ** 2)))


def place_transmitters(rng: np.random.Generator, count: int, kind: TransmitterKind,
                       annulus: Sequence[float], angular_spread: float = constants.DEFAULT_ANGULAR_SPREAD,
                       avoid: Sequence[ChannelGeometry] = (), min_separation: Optional[float] = None,
                       max_attempts: int = 1000) -> List[ChannelGeometry]:
    """
    Drop `count` transmitters uniformly in an annulus around the array.

    Mean AoA is uniform in [-pi/2, pi/2]. With min_separation set, a jammer's sector
    is redrawn until it keeps that angular distance from every sector in `avoid`.
    """
    placed = []
    for _ in range(count):
        for attempt in range(max_attempts):
            geom = ChannelGeometry(
                mean_aoa=float(rng.uniform(-math.pi / 2, math.pi / 2)),
                angular_spread=angular_spread,
                distance=sample_annulus_distance(rng, annulus),
                kind=kind,
            )
            if min_separation is None or not any(geom.overlaps(other, min_separation) for other in avoid):
                break
        else:
            raise ConfigurationError(
                f"Could not place a {kind.value} sector {min_separation} rad away from existing sectors"
            )
        placed.append(geom)
    return placed
