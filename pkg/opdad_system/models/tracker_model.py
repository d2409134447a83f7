"""
Tracker Data Models
Defines the real-embedded covariance, the tracker state and the density feature.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np


@dataclass(frozen=True)
class RealEmbeddedCovariance:
    """Xi = [[A, -B], [B, A]] for a complex covariance Q = A + iB"""

    xi: np.ndarray

    @property
    def dimension(self) -> int:
        return self.xi.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Descending eigenvalues"""
        return np.linalg.eigvalsh(self.xi)[::-1]


@dataclass
class TrackerState:
    """Principal-direction estimate after `iteration` updates"""

    estimate: np.ndarray
    iteration: int = 0
    kappa: float = 1.0
    eigengap_hint: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.estimate.shape[0]

    @property
    def stepsize(self) -> float:
        """beta for the next update, kappa / l with l = iteration + 1"""
        return self.kappa / (self.iteration + 1)

    def copy(self) -> 'TrackerState':
        return TrackerState(estimate=self.estimate.copy(), iteration=self.iteration,
                            kappa=self.kappa, eigengap_hint=self.eigengap_hint)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estimate': self.estimate.tolist(),
            'iteration': self.iteration,
            'kappa': self.kappa,
            'eigengap_hint': self.eigengap_hint,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrackerState':
        return cls(
            estimate=np.asarray(data['estimate'], dtype=float),
            iteration=int(data.get('iteration', 0)),
            kappa=float(data.get('kappa', 1.0)),
            eigengap_hint=data.get('eigengap_hint'),
        )


@dataclass
class DensityFeature:
    """Unit-norm M-vector derived from the tracked direction"""

    values: np.ndarray
    block_index: int = 0
    mode: str = field(default='ratio', compare=False)

    def distance(self, other: np.ndarray) -> float:
        return float(np.linalg.norm(self.values - other))
