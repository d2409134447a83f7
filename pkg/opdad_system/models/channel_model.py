"""
Channel Data Models
Defines geometry, covariance and per-block realization structures.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict

import numpy as np


class TransmitterKind(str, Enum):
    """Which side of the uplink a transmitter belongs to"""
    LEGITIMATE = 'legitimate'
    JAMMER = 'jammer'


@dataclass(frozen=True)
class ChannelGeometry:
    """Mean angle of arrival, angular half-width and distance of one transmitter"""

    mean_aoa: float
    angular_spread: float
    distance: float
    kind: TransmitterKind = TransmitterKind.LEGITIMATE

    def sector(self):
        """Angular interval [mean - spread, mean + spread] seen at the array"""
        return self.mean_aoa - self.angular_spread, self.mean_aoa + self.angular_spread

    def overlaps(self, other: 'ChannelGeometry', separation: float = 0.0) -> bool:
        """True when the two sectors, padded by separation, intersect"""
        low, high = self.sector()
        other_low, other_high = other.sector()
        return low - separation < other_high and other_low - separation < high

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean_aoa': self.mean_aoa,
            'angular_spread': self.angular_spread,
            'distance': self.distance,
            'kind': self.kind.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ChannelGeometry':
        return cls(
            mean_aoa=float(data['mean_aoa']),
            angular_spread=float(data.get('angular_spread', math.radians(5.0))),
            distance=float(data['distance']),
            kind=TransmitterKind(data.get('kind', 'legitimate')),
        )


@dataclass(frozen=True)
class CovarianceMatrix:
    """Hermitian, unit-diagonal M x M spatial covariance"""

    entries: np.ndarray

    @property
    def antenna_count(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of the Hermitian matrix"""
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading channel draw h ~ CN(0, R)"""

    vector: np.ndarray
    block_index: int = 1
