"""Smooth dyadic cutoff profiles.

``psi`` is a C-infinity radial profile equal to 1 on [0, 1], vanishing
beyond 2, strictly decreasing in between; ``phi(t) = psi(t) - psi(2t)``
is the induced annular bump supported in [1/2, 2].  The dyadic dilates
``phi(2^-k t)`` telescope to a partition of unity on t > 0: the partial
sum from -K to K equals psi(2^-K t) - psi(2^(K+1) t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def _bump(u: np.ndarray, sharpness: float) -> np.ndarray:
    """exp(-sharpness/u) for u > 0, zero otherwise; C-infinity in u."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    pos = u > 0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-sharpness / u[pos])
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Evaluator pair (psi, phi) built from a normalized smooth step.

    The transition on (1, 2) is S(2 - t) with
    S(u) = B(u) / (B(u) + B(1-u)) and B(u) = exp(-sharpness/u);
    larger ``sharpness`` steepens the middle of the transition while
    keeping the exact plateau and support.
    """

    sharpness: float = 1.0

    def __post_init__(self):
        if not (self.sharpness > 0 and np.isfinite(self.sharpness)):
            raise ValidationError(
                f"cutoff sharpness must be positive, got {self.sharpness}"
            )

    def psi(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=np.float64))
        u = 2.0 - t
        b = _bump(u, self.sharpness)
        out = b / (b + _bump(1.0 - u, self.sharpness))
        out = np.where(t <= 1.0, 1.0, out)
        out = np.where(t >= 2.0, 0.0, out)
        return out

    def phi(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return self.psi(t) - self.psi(2.0 * t)


#: Profile used whenever an operation is not handed an explicit one.
DEFAULT_CUTOFF = CutoffProfile()


def build_cutoff(sharpness: float) -> CutoffProfile:
    """Construct a cutoff profile with the given transition sharpness."""
    return CutoffProfile(sharpness)
