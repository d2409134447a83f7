"""
Bound Utilities
Evaluators for the rescaled iteration indices, the convergence bounds and the finite-sample multiplier.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

import constants
from ..models.analysis_model import BoundEvaluation, BoundInputs, MultiplierEvaluation, SpectrumParams
from .embedding_utils import align
from .validation_utils import ConfigurationError, HypothesisViolation, NumericalError

logger = logging.getLogger('opdad.analysis')


def _contraction(spectrum: SpectrumParams, beta: float) -> float:
    """rho = 1 - beta (lambda_1 - lambda_2), required to lie in (0, 1)"""
    product = beta * spectrum.eigengap
    if not 0 < product < 1:
        raise ConfigurationError(f"beta * eigengap must lie in (0, 1), got {product:.6g}")
    return 1.0 - product


def _tail_terms(spectrum: SpectrumParams):
    """(lambda_1 - lambda_m) for m = 2..2M, rejecting a repeated top eigenvalue"""
    lam1 = spectrum.lam1
    tail = spectrum.eigenvalues[1:]
    if any(lam1 == lam for lam in tail):
        raise NumericalError("lambda_1 repeats in the spectrum; the bound sums divide by zero")
    return lam1, tail


def rescaled_stepsize(spectrum: SpectrumParams, beta: float) -> float:
    """lambda_1^2 (lambda_1 - lambda_2)^-1 beta"""
    return spectrum.lam1 ** 2 * beta / spectrum.eigengap


def rescaled_indices(spectrum: SpectrumParams, inputs: BoundInputs) -> Tuple[int, int]:
    """
    (L_star, L_zero) for stepsize beta.

    L_star = ceil(xi log(gap / (lambda_1^2 beta)) / -log(rho))
    L_zero = ceil(log(c M) / -log(rho))
    """
    rho = _contraction(spectrum, inputs.beta)
    decay = -math.log(rho)

    star_argument = spectrum.eigengap / (spectrum.lam1 ** 2 * inputs.beta)
    if star_argument <= 1:
        raise ConfigurationError(f"L_star log argument must exceed 1, got {star_argument:.6g}")
    zero_argument = inputs.c * spectrum.M
    if zero_argument <= 0:
        raise ConfigurationError(f"L_zero log argument c*M must be positive, got {zero_argument:.6g}")

    L_star = max(1, math.ceil(inputs.xi * math.log(star_argument) / decay))
    L_zero = max(1, math.ceil(math.log(zero_argument) / decay))
    return L_star, L_zero


def psi_residual(spectrum: SpectrumParams, beta: float, xi: float) -> float:
    """beta * sum_m (lambda_1 lambda_m + lambda_1^2 r^(0.5 - 4 xi)) / (lambda_1 - lambda_m), r the rescaled stepsize"""
    lam1, tail = _tail_terms(spectrum)
    noise = lam1 ** 2 * rescaled_stepsize(spectrum, beta) ** (0.5 - 4.0 * xi)
    return beta * math.fsum((lam1 * lam + noise) / (lam1 - lam) for lam in tail)


def _check_hypothesis(name: str, value: float, limit: float, force: bool, flags: list):
    if value <= limit:
        return
    message = f"{name} hypothesis violated: {value:.6g} > {limit:.6g}"
    if not force:
        raise HypothesisViolation(message)
    logger.warning(f"{message} (forced)")
    flags.append('hypothesis_forced')


def theorem1_bound(spectrum: SpectrumParams, inputs: BoundInputs, l: int) -> BoundEvaluation:
    """
    Deterministic-start bound rho^(2(l - L0)) + psi with its probability floor
    1 - M L0 G - 2M L_star G, G = exp(-c r^(-2 xi)).

    The floor is reported raw; a non-positive floor is flagged as vacuous.
    """
    L_star, L_zero = rescaled_indices(spectrum, inputs)
    if l < L_zero:
        raise ConfigurationError(f"Iteration l = {l} precedes L_zero = {L_zero}")
    rho = _contraction(spectrum, inputs.beta)
    psi = psi_residual(spectrum, inputs.beta, inputs.xi)

    r = rescaled_stepsize(spectrum, inputs.beta)
    failure = math.exp(-inputs.c * r ** (-2.0 * inputs.xi))
    M = spectrum.M
    floor = 1.0 - M * L_zero * failure - 2 * M * L_star * failure

    flags = []
    scaling = M * inputs.beta ** (1.0 - 2.0 * inputs.xi)
    if scaling > constants.SCALING_FLAG_LEVEL:
        flags.append('scaling')
    if floor <= 0:
        flags.append('vacuous')
        logger.warning(f"Theorem 1 probability floor is vacuous ({floor:.4g})")

    return BoundEvaluation(theorem='theorem1', value=rho ** (2 * (l - L_zero)) + psi, probability_floor=floor,
                           psi=psi, prefactor=1.0, hypothesis_value=scaling, flags=flags)


def theorem2_bound(spectrum: SpectrumParams, inputs: BoundInputs, l: int, force: bool = False) -> BoundEvaluation:
    """
    Uniform-start bound delta^4 M^2 rho^(2l) + psi with floor 1 - 2 delta,
    valid when M r^(1 - 2 xi) <= delta^2.
    """
    if l < 0:
        raise ConfigurationError(f"Iteration l must be non-negative, got {l}")
    rho = _contraction(spectrum, inputs.beta)
    M = spectrum.M
    flags = []
    hypothesis = M * rescaled_stepsize(spectrum, inputs.beta) ** (1.0 - 2.0 * inputs.xi)
    _check_hypothesis('Theorem 2', hypothesis, inputs.delta ** 2, force, flags)

    psi = psi_residual(spectrum, inputs.beta, inputs.xi)
    prefactor = inputs.delta ** 4 * M ** 2
    return BoundEvaluation(theorem='theorem2', value=prefactor * rho ** (2 * l) + psi,
                           probability_floor=1.0 - 2.0 * inputs.delta, psi=psi, prefactor=prefactor,
                           hypothesis_value=hypothesis, flags=flags)


def theorem3_stepsize(spectrum: SpectrumParams, L: int) -> float:
    """log L / ((lambda_1 - lambda_2) L)"""
    return math.log(L) / (spectrum.eigengap * L)


def theorem3_bound(spectrum: SpectrumParams, M: int, L: int, delta: float, xi: float,
                   force: bool = False) -> BoundEvaluation:
    """
    Finite-sample bound psi' = (lambda_1 / gap) sum_m lambda_m / (lambda_1 - lambda_m) * log L / L
    under M [lambda_1^2 gap^-2 log L / L]^(1 - 2 xi) <= delta^2.
    """
    if L < 3:
        raise ConfigurationError(f"L must be at least 3, got {L}")
    lam1, tail = _tail_terms(spectrum)
    gap = spectrum.eigengap
    rate = math.log(L) / L

    flags = []
    hypothesis = M * (lam1 ** 2 / gap ** 2 * rate) ** (1.0 - 2.0 * xi)
    _check_hypothesis('Theorem 3', hypothesis, delta ** 2, force, flags)

    psi_prime = lam1 / gap * math.fsum(lam / (lam1 - lam) for lam in tail) * rate
    return BoundEvaluation(theorem='theorem3', value=psi_prime, probability_floor=1.0 - 2.0 * delta,
                           psi=psi_prime, hypothesis_value=hypothesis, flags=flags)


def appendixC_multiplier(spectrum: SpectrumParams, M: int, L: int, delta: float, xi: float,
                         l: Optional[int] = None, force: bool = False) -> MultiplierEvaluation:
    """
    Multiplier D = D1 + D2 that turns the finite-sample bound into a
    constant times log L / L, with the Theorem 3 stepsize.

    D1 = A / T with A = delta^2 M rho^(2l), T = (lambda_1 / gap) S log L / L;
    D2 = delta sum_m (lambda_1 lambda_m + B) / ((lambda_1 - lambda_m) gap) / ((lambda_1 / gap) S);
    S = sum_m lambda_m / (lambda_1 - lambda_m), B = lambda_1^2 r^(0.5 - 4 xi).
    Also returns C with D1 <= C / (L^(2 xi) (log L)^(2 - 2 xi)) for l = L.
    """
    # raises on a violated hypothesis unless forced
    theorem3_bound(spectrum, M, L, delta, xi, force=force)
    lam1, tail = _tail_terms(spectrum)
    gap = spectrum.eigengap
    rate = math.log(L) / L
    beta = theorem3_stepsize(spectrum, L)
    if l is None:
        l = L

    S = math.fsum(lam / (lam1 - lam) for lam in tail)
    weight = lam1 / gap * S
    rho = 1.0 - beta * gap
    A = delta ** 2 * M * rho ** (2 * l)
    B = lam1 ** 2 * rescaled_stepsize(spectrum, beta) ** (0.5 - 4.0 * xi)

    D1 = A / (weight * rate)
    D2 = delta * math.fsum((lam1 * lam + B) / ((lam1 - lam) * gap) for lam in tail) / weight
    C = delta * (lam1 / gap) ** (4.0 * xi - 2.0) / (lam1 * spectrum.lam2 / gap ** 2)
    D1_bound = C / (L ** (2.0 * xi) * math.log(L) ** (2.0 - 2.0 * xi))
    return MultiplierEvaluation(D=D1 + D2, D1=D1, D2=D2, C=C, D1_bound=D1_bound)


def multiplier_flatness(spectrum: SpectrumParams, M: int, sizes: Sequence[int], delta: float, xi: float,
                        tail_points: int = 3, force: bool = False) -> Tuple[float, bool]:
    """
    Slope of D against log L over the largest `tail_points` sizes and
    whether it is below 0.05 in magnitude.
    """
    sizes = sorted(sizes)
    if len(sizes) < 2:
        raise ConfigurationError("Flatness needs at least two sample sizes")
    values = [appendixC_multiplier(spectrum, M, L, delta, xi, force=force).D for L in sizes]
    count = min(max(tail_points, 2), len(sizes))
    slope = float(np.polyfit(np.log(sizes[-count:]), values[-count:], 1)[0])
    return slope, abs(slope) < 0.05


def tan_angle_sq(v_hat: np.ndarray, v_star: np.ndarray, basis: Optional[np.ndarray] = None) -> float:
    """tan^2 of the angle between v_hat and the aligned v*, +inf at a right angle"""
    v_hat = v_hat / np.linalg.norm(v_hat)
    target = align(basis if basis is not None else v_star / np.linalg.norm(v_star), v_hat)
    cos_sq = float(v_hat @ target) ** 2
    if cos_sq == 0:
        return math.inf
    return max(1.0 - cos_sq, 0.0) / cos_sq


def rescale(vectors: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Coordinates in the eigenbasis V: z = V^T y (rows of `vectors` are samples)"""
    return vectors @ V


def ratio_of_iteration(u_hat: np.ndarray) -> float:
    """sum_(m >= 2) u_m^2 / u_1^2 in eigenbasis coordinates, +inf when u_1 = 0"""
    lead = float(u_hat[0]) ** 2
    if lead == 0:
        return math.inf
    return float(np.sum(u_hat[1:] ** 2)) / lead
