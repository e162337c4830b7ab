"""Linear circuit algebra of the lumped-element resonator.

Covers the bare LC resonance, the coupling-capacitor linewidth relation and
the series/parallel impedance transforms that map a lossy nanobridge
constriction onto an effective internal linewidth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, RegimeError


@dataclass(frozen=True)
class CircuitParams:
    """Electrical parameters of the resonator before constriction cutting.

    Attributes
    ----------
    L : float
        Total circuit inductance including ``L_loop/4`` (H).
    C : float
        Capacitance of the interdigitated capacitors (F).
    C_c : float
        Coupling capacitance to the feedline (F).
    Z0 : float
        Feedline impedance (Ohm).
    L_loop : float
        SQUID loop self-inductance (H).
    R : float, optional
        Parallel loss resistance (Ohm).
    """

    L: float
    C: float
    C_c: float = 0.0
    Z0: float = 50.0
    L_loop: float = 0.0
    R: Optional[float] = None

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if not self.C > 0:
            raise DomainError(f"C must be positive, got {self.C}")
        if self.C_c < 0:
            raise DomainError(f"C_c must be non-negative, got {self.C_c}")
        if not self.Z0 > 0:
            raise DomainError(f"Z0 must be positive, got {self.Z0}")
        if not 0 <= self.L_loop < 4 * self.L:
            raise DomainError(f"L_loop must lie in [0, 4L), got {self.L_loop}")
        if self.R is not None and not self.R > 0:
            raise DomainError(f"R must be positive when given, got {self.R}")

    @property
    def C_tot(self) -> float:
        return self.C + self.C_c

    @property
    def omega_b(self) -> float:
        """Bare resonance frequency (rad/s)."""
        return resonance_from_lc(self.L, self.C_tot)

    @property
    def kappa_e(self) -> float:
        """External linewidth set by the coupling capacitor (rad/s)."""
        return external_linewidth(self)

    @property
    def kappa_i(self) -> float:
        """Internal linewidth ``1/(R C_tot)``; zero for a lossless circuit."""
        if self.R is None:
            return 0.0
        return 1.0 / (self.R * self.C_tot)

    @classmethod
    def from_total_capacitance(cls, L, C_tot, C_c, **kwargs) -> "CircuitParams":
        return cls(L=L, C=C_tot - C_c, C_c=C_c, **kwargs)


@dataclass(frozen=True)
class ConstrictionElement:
    """A single nanobridge: inductance ``L_c`` shunted by resistance ``R_c``."""

    L_c: float
    R_c: Optional[float] = None

    def __post_init__(self):
        if self.L_c < 0:
            raise DomainError(f"L_c must be non-negative, got {self.L_c}")
        if self.R_c is not None and not self.R_c > 0:
            raise DomainError(f"R_c must be positive when given, got {self.R_c}")


@dataclass(frozen=True)
class Linewidths:
    kappa_i: float
    kappa_e: float

    def __post_init__(self):
        if self.kappa_i < 0 or self.kappa_e < 0:
            raise DomainError("linewidths must be non-negative")

    @property
    def kappa_total(self) -> float:
        return self.kappa_i + self.kappa_e


def resonance_from_lc(L_tot, C_tot):
    """Angular resonance frequency ``1/sqrt(L C)`` (rad/s)."""
    L_arr = np.asarray(L_tot, dtype=float)
    C_arr = np.asarray(C_tot, dtype=float)
    if np.any(L_arr <= 0) or np.any(C_arr <= 0):
        raise DomainError("inductance and capacitance must be positive")
    out = 1.0 / np.sqrt(L_arr * C_arr)
    return float(out) if out.ndim == 0 else out


def resonance_with_constriction(omega_b, L, L_c):
    """Resonance after adding two constrictions of inductance ``L_c`` in parallel."""
    if not L > 0 or L_c < 0:
        raise DomainError("need L > 0 and L_c >= 0")
    return omega_b / math.sqrt(1.0 + L_c / (2.0 * L))


def constriction_inductance_from_shift(omega_b, omega_0, L):
    """Single-constriction inductance from the frequency drop caused by cutting.

    Returns ``2 L (omega_b**2 / omega_0**2 - 1)``.
    """
    if not L > 0:
        raise DomainError(f"L must be positive, got {L}")
    if not omega_0 > 0 or not omega_b > 0:
        raise DomainError("frequencies must be positive")
    if omega_0 > omega_b:
        raise DomainError(
            f"omega_0 ({omega_0:.6g}) above omega_b ({omega_b:.6g}) implies negative inductance"
        )
    return 2.0 * L * ((omega_b / omega_0) ** 2 - 1.0)


def external_linewidth(params: CircuitParams, omega=None) -> float:
    """Forward coupling relation ``omega^2 C_c^2 Z0 / (2 C_tot)``.

    ``omega`` defaults to the bare resonance of ``params``.
    """
    w = params.omega_b if omega is None else omega
    return w**2 * params.C_c**2 * params.Z0 / (2.0 * params.C_tot)


def coupling_capacitance(kappa_e, omega_b, C_tot, Z0=50.0) -> float:
    """Invert the coupling relation for ``C_c`` given the measured external linewidth."""
    if not kappa_e > 0:
        raise DomainError(f"kappa_e must be positive, got {kappa_e}")
    if not (omega_b > 0 and C_tot > 0 and Z0 > 0):
        raise DomainError("omega_b, C_tot and Z0 must be positive")
    return math.sqrt(2.0 * C_tot * kappa_e / (omega_b**2 * Z0))


def coupling_relations(params=None, direction="forward", kappa_e=None, *,
                       omega_b=None, C_tot=None, Z0=None):
    """Dispatch to the forward or inverse coupling relation.

    Forward takes a full :class:`CircuitParams` and returns ``kappa_e``. Inverse
    takes the measured ``kappa_e`` plus ``omega_b``, ``C_tot`` and ``Z0`` (falling
    back to the attributes of ``params`` when given) and returns ``C_c``.
    """
    if direction == "forward":
        if params is None:
            raise DomainError("forward coupling relation needs CircuitParams")
        return external_linewidth(params)
    if direction == "inverse":
        if params is not None:
            omega_b = params.omega_b if omega_b is None else omega_b
            C_tot = params.C_tot if C_tot is None else C_tot
            Z0 = params.Z0 if Z0 is None else Z0
        if kappa_e is None or omega_b is None or C_tot is None:
            raise DomainError("inverse coupling relation needs kappa_e, omega_b and C_tot")
        return coupling_capacitance(kappa_e, omega_b, C_tot, 50.0 if Z0 is None else Z0)
    raise DomainError(f"unknown direction {direction!r}")


def series_transform(omega_0, L, L_c, R_c):
    """Inductive branch ``L + (L_c || R_c)/2`` as a series pair ``(R_plus, L_plus)``."""
    x2 = (omega_0 * L_c) ** 2
    denom = R_c**2 + x2
    R_plus = 0.5 * x2 * R_c / denom
    L_plus = L + 0.5 * L_c * R_c**2 / denom
    return R_plus, L_plus


def parallel_transform(omega_0, R_plus, L_plus):
    """Series ``(R_plus, L_plus)`` as an equivalent parallel pair ``(R_star, L_star)``."""
    num = R_plus**2 + (omega_0 * L_plus) ** 2
    return num / R_plus, num / (omega_0**2 * L_plus)


def constriction_linewidth(R_c, omega_0, L, L_c, mode="exact"):
    """Internal linewidth contributed by the constriction resistance.

    With ``C_tot`` eliminated through ``omega_0 = 1/sqrt(C_tot L_star)`` the exact
    chain collapses to ``R_plus / L_plus``.
    """
    if not R_c > 0 or not L_c > 0:
        raise DomainError("R_c and L_c must be positive")
    if mode == "approximate":
        return omega_0**2 * L_c**2 / ((2.0 * L + L_c) * R_c)
    if mode == "exact":
        R_plus, L_plus = series_transform(omega_0, L, L_c, R_c)
        R_star, L_star = parallel_transform(omega_0, R_plus, L_plus)
        return omega_0**2 * L_star / R_star
    raise DomainError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ConstrictionResistance:
    """Result of :func:`constriction_resistance_from_linewidth`.

    ``ratio`` is ``R_c / (omega_0 L_c)``; ``valid`` is False when the
    high-resistance assumption behind the approximate formula is doubtful.
    """

    R_c: float
    mode: str
    ratio: float
    valid: bool


def constriction_resistance_from_linewidth(kappa_c, omega_0, L, L_c, mode="approximate",
                                           min_ratio=10.0) -> ConstrictionResistance:
    """Constriction shunt resistance that produces internal linewidth ``kappa_c``.

    The exact mode solves ``R_plus(R_c)/L_plus(R_c) = kappa_c`` on the
    high-resistance branch ``R_c >= omega_0 L_c``. When ``kappa_c`` exceeds the
    largest linewidth any shunt can produce a :class:`RegimeError` is raised.
    """
    if not kappa_c > 0:
        raise DomainError(f"kappa_c must be positive, got {kappa_c}")
    if not L_c > 0 or not L > 0:
        raise DomainError("L and L_c must be positive")
    x = omega_0 * L_c
    R_approx = omega_0**2 * L_c**2 / ((2.0 * L + L_c) * kappa_c)
    if mode == "approximate":
        R_c = R_approx
    elif mode == "exact":
        def resid(R):
            return constriction_linewidth(R, omega_0, L, L_c, "exact") - kappa_c

        lo = x
        if resid(lo) < 0:
            raise RegimeError(
                f"kappa_c={kappa_c:.4g} exceeds the maximum shunt-induced linewidth "
                f"{resid(lo) + kappa_c:.4g}"
            )
        hi = max(2.0 * R_approx, 2.0 * x)
        while resid(hi) > 0:
            hi *= 2.0
        R_c = brentq(resid, lo, hi, xtol=1e-14 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    ratio = R_c / x
    return ConstrictionResistance(R_c=R_c, mode=mode, ratio=ratio, valid=ratio >= min_ratio)
