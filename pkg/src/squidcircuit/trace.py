"""Complex transmission trace on a frequency grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .errors import AlignmentError, DataQualityError


@dataclass(frozen=True)
class ComplexTrace:
    """S21 samples on a strictly increasing angular-frequency grid (rad/s)."""

    omega: np.ndarray
    s21: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        s = np.asarray(self.s21, dtype=complex)
        if w.ndim != 1 or w.shape != s.shape:
            raise DataQualityError("omega and s21 must be 1-D arrays of equal length")
        if w.size < 2 or np.any(np.diff(w) <= 0):
            raise DataQualityError("frequency grid must be strictly increasing")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(s))):
            raise DataQualityError("trace contains non-finite values")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "s21", s)

    @classmethod
    def from_hz(cls, freq_hz, s21) -> "ComplexTrace":
        return cls(TWO_PI * np.asarray(freq_hz, dtype=float), s21)

    @property
    def freq_hz(self) -> np.ndarray:
        return self.omega / TWO_PI

    def __len__(self):
        return self.omega.size

    def aligned_with(self, other: "ComplexTrace", rtol=1e-9) -> bool:
        return self.omega.shape == other.omega.shape and np.allclose(
            self.omega, other.omega, rtol=rtol, atol=0.0)

    def divide(self, other: "ComplexTrace") -> "ComplexTrace":
        if not self.aligned_with(other):
            raise AlignmentError("trace grids do not align")
        if np.any(other.s21 == 0):
            raise DataQualityError("reference trace has zero samples")
        return ComplexTrace(self.omega, self.s21 / other.s21)

    def select(self, mask) -> "ComplexTrace":
        return ComplexTrace(self.omega[mask], self.s21[mask])
