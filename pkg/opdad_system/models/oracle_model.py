"""
Oracle Data Models
Defines the brute-force principal direction reference.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np


@dataclass(frozen=True)
class PrincipalDirectionTruth:
    """
    Top eigenvector v* and descending spectrum of a (sample) covariance.

    For circular complex data the top real eigenvalue is double; `basis`
    then holds the two orthonormal columns spanning that eigenspace and
    `eigengap` is measured to the next distinct eigenvalue.
    """

    vector: np.ndarray
    eigenvalues: np.ndarray
    eigengap: float
    degenerate: bool = False
    basis: Optional[np.ndarray] = None

    @property
    def dimension(self) -> int:
        return self.vector.shape[0]

    @property
    def reference(self) -> np.ndarray:
        """What comparison vectors get aligned against"""
        return self.basis if self.basis is not None else self.vector

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lambda_1': float(self.eigenvalues[0]),
            'eigengap': self.eigengap,
            'degenerate': self.degenerate,
            'circular': self.basis is not None,
        }
