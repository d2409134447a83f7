"""
Analysis Data Models
Defines spectra, bound parameters and bound evaluation results.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..utils.validation_utils import ConfigurationError, NumericalError


@dataclass(frozen=True)
class SpectrumParams:
    """Descending eigenvalues of the real covariance Xi with a positive eigengap"""

    eigenvalues: tuple
    antennas: Optional[int] = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.eigenvalues)
        object.__setattr__(self, 'eigenvalues', values)
        if len(values) < 2:
            raise ConfigurationError("A spectrum needs at least two eigenvalues")
        if any(a < b for a, b in zip(values, values[1:])):
            raise ConfigurationError("Eigenvalues must be sorted in descending order")
        if values[-1] < 0:
            raise ConfigurationError("Eigenvalues must be non-negative")
        if not values[0] > values[1]:
            raise NumericalError("Eigengap lambda_1 - lambda_2 must be positive")

    @classmethod
    def from_array(cls, eigenvalues: Sequence[float], antennas: Optional[int] = None) -> 'SpectrumParams':
        return cls(tuple(sorted((float(v) for v in eigenvalues), reverse=True)), antennas)

    @property
    def lam1(self) -> float:
        return self.eigenvalues[0]

    @property
    def lam2(self) -> float:
        return self.eigenvalues[1]

    @property
    def eigengap(self) -> float:
        return self.eigenvalues[0] - self.eigenvalues[1]

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    @property
    def M(self) -> int:
        """Antenna count; half the real dimension unless given"""
        return self.antennas if self.antennas is not None else max(self.dimension // 2, 1)

    def to_dict(self) -> Dict[str, Any]:
        return {'eigenvalues': list(self.eigenvalues), 'antennas': self.M}


@dataclass(frozen=True)
class BoundInputs:
    """Stepsize beta, tuning xi, warm constant c, control factor delta and sample size L"""

    beta: float
    xi: float
    c: float = 0.5
    delta: float = 0.1
    L: int = 1000

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if not self.xi > 0:
            raise ConfigurationError(f"xi must be positive, got {self.xi}")
        if not 0 < self.c < 1:
            raise ConfigurationError(f"c must lie in (0, 1), got {self.c}")
        if not 0 < self.delta < 0.5:
            raise ConfigurationError(f"delta must lie in (0, 1/2), got {self.delta}")
        if self.L < 1:
            raise ConfigurationError(f"L must be at least 1, got {self.L}")

    def to_dict(self) -> Dict[str, Any]:
        return {'beta': self.beta, 'xi': self.xi, 'c': self.c, 'delta': self.delta, 'L': self.L}


@dataclass
class BoundEvaluation:
    """One evaluated convergence bound"""

    theorem: str
    value: float
    probability_floor: float
    psi: float
    prefactor: float = 1.0
    hypothesis_value: Optional[float] = None
    flags: List[str] = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.probability_floor <= 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem,
            'bound': self.value,
            'probability_floor': self.probability_floor,
            'psi': self.psi,
            'prefactor': self.prefactor,
            'hypothesis_value': self.hypothesis_value,
            'flags': ';'.join(self.flags),
        }


@dataclass
class MultiplierEvaluation:
    """D = D1 + D2 and the closed-form constant bounding D1"""

    D: float
    D1: float
    D2: float
    C: float
    D1_bound: float

    def to_dict(self) -> Dict[str, Any]:
        return {'D': self.D, 'D1': self.D1, 'D2': self.D2, 'C': self.C, 'D1_bound': self.D1_bound}
