"""Temperature dependence of inductances, critical current and loss.

Two-fluid penetration depth for the film, Bardeen critical current and a
kinetic linear inductance for the constrictions, and the thermal
quasiparticle linewidth of the bare circuit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .constants import MU0, PHI0
from .errors import DomainError


@dataclass(frozen=True)
class FilmParams:
    """Film and geometry of one superconducting structure.

    ``L_g`` and ``g`` describe the resonator; ``L_loop_g`` and ``g_loop`` the
    SQUID loop, which shares the film parameters.
    """

    lambda0: float
    T_c: float
    d_Nb: float
    L_g: float
    g: float
    L_loop_g: float = 12.8e-12
    g_loop: float = 12.0

    def __post_init__(self):
        for name in ("lambda0", "T_c", "d_Nb", "L_g", "g"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.L_loop_g < 0 or self.g_loop < 0:
            raise DomainError("loop geometry must be non-negative")


@dataclass(frozen=True)
class ConstrictionThermal:
    I_c: float
    T_cc: float
    L_off: float = 0.0
    L_lin0: float = 0.0

    def __post_init__(self):
        if not self.I_c > 0:
            raise DomainError("I_c must be positive")
        if not self.T_cc > 0:
            raise DomainError("T_cc must be positive")


@dataclass(frozen=True)
class LossParams:
    A_kappa: float
    kappa_e_const: float = 0.0

    def __post_init__(self):
        if self.A_kappa < 0 or self.kappa_e_const < 0:
            raise DomainError("A_kappa and kappa_e_const must be non-negative")


@dataclass(frozen=True)
class PenetrationProfile:
    lambda_L: np.ndarray
    lambda_eff: np.ndarray
    L_k: np.ndarray
    L_total: np.ndarray


def _temps(T, T_max, name="T_c"):
    T = np.asarray(T, dtype=float)
    if np.any(T < 0) or np.any(T >= T_max):
        raise DomainError(f"temperature must lie in [0, {name}={T_max})")
    return T


def london_depth(T, lambda0, T_c):
    T = _temps(T, T_c)
    return lambda0 / np.sqrt(1.0 - (T / T_c) ** 4)


def _coth(x):
    return 1.0 / np.tanh(x)


def penetration_profile(T, film: FilmParams, loop=False) -> PenetrationProfile:
    """London depth, thin-film effective depth and resulting inductances.

    With ``loop=True`` the loop geometry (``L_loop_g``, ``g_loop``) is used.
    """
    lam = london_depth(T, film.lambda0, film.T_c)
    lam_eff = lam * _coth(film.d_Nb / lam)
    g, L_g = (film.g_loop, film.L_loop_g) if loop else (film.g, film.L_g)
    L_k = MU0 * g * lam_eff
    return PenetrationProfile(lam, lam_eff, L_k, L_g + L_k)


def inductance_at(T, film: FilmParams, loop=False):
    return penetration_profile(T, film, loop=loop).L_total


def resonance_vs_temperature(T, film: FilmParams, C_tot):
    """Bare resonance ``omega_b(T) = 1/sqrt(C_tot L(T))`` (rad/s)."""
    if not C_tot > 0:
        raise DomainError("C_tot must be positive")
    return 1.0 / np.sqrt(C_tot * inductance_at(T, film))


def bardeen_critical_current(T, I_c, T_cc):
    """``I_0(T) = I_c (1 - (T/T_cc)^2)^(3/2)``; zero at ``T_cc``."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 0) or np.any(T > T_cc):
        raise DomainError(f"temperature must lie in [0, T_cc={T_cc}]")
    return I_c * (1.0 - (T / T_cc) ** 2) ** 1.5


def llin_vs_temperature(T, thermal: ConstrictionThermal):
    """Kinetic linear constriction inductance ``L_off + L_lin0/(1 - (T/T_cc)^4)``."""
    T = _temps(T, thermal.T_cc, "T_cc")
    return thermal.L_off + thermal.L_lin0 / (1.0 - (T / thermal.T_cc) ** 4)


def llin_negative_somewhere(thermal: ConstrictionThermal) -> bool:
    # the minimum over [0, T_cc) sits at T = 0 if L_lin0 >= 0, else the curve diverges to -inf
    return thermal.L_lin0 < 0 or thermal.L_off + thermal.L_lin0 < 0


def quasiparticle_linewidth(T, film: FilmParams, loss: LossParams, omega_b_of_T=None, C_tot=None):
    """Total bare linewidth ``kappa_e + kappa_qp(T)`` (rad/s).

    ``omega_b_of_T`` may be a callable; otherwise ``C_tot`` is used with the
    film model. Returns ``(kappa_b, kappa_i)``.
    """
    T = _temps(T, film.T_c)
    if omega_b_of_T is None:
        if C_tot is None:
            raise DomainError("need omega_b_of_T or C_tot")
        wb = resonance_vs_temperature(T, film, C_tot)
    else:
        wb = np.asarray(omega_b_of_T(T), dtype=float)
    lam = london_depth(T, film.lambda0, film.T_c)
    u = film.d_Nb / lam
    shape = _coth(u) + u / np.sinh(u) ** 2
    kappa_i = loss.A_kappa * wb ** 4 * lam ** 3 * (T / film.T_c) ** 4 * shape
    return loss.kappa_e_const + kappa_i, kappa_i


def josephson_inductance(I_0):
    I_0 = np.asarray(I_0, dtype=float)
    return PHI0 / (2.0 * np.pi * I_0)


def beta_vs_temperature(T, film: FilmParams, thermal: ConstrictionThermal):
    """Screening parameter from the thermal I_0, L_lin and loop-inductance models."""
    T = _temps(T, thermal.T_cc, "T_cc")
    I0 = bardeen_critical_current(T, thermal.I_c, thermal.T_cc)
    L_loop = inductance_at(T, film, loop=True)
    return 2.0 * I0 * (L_loop + 2.0 * llin_vs_temperature(T, thermal)) / PHI0


def linear_fraction(T, thermal: ConstrictionThermal):
    """``L_lin / L_c`` per constriction, with ``L_c = L_lin + L_J0``."""
    T = _temps(T, thermal.T_cc, "T_cc")
    L_lin = llin_vs_temperature(T, thermal)
    L_J0 = josephson_inductance(bardeen_critical_current(T, thermal.I_c, thermal.T_cc))
    return L_lin / (L_lin + L_J0)


@dataclass
class ThermalPrediction:
    T: np.ndarray
    values: np.ndarray
    flags: Dict[str, bool] = field(default_factory=dict)


def sweetspot_vs_temperature(T, film: FilmParams, thermal: ConstrictionThermal, C_tot,
                             measured_range=None) -> ThermalPrediction:
    """Sweetspot resonance ``omega_0(T)`` from the thermal models (rad/s).

    The two constrictions act in parallel, so ``L_J0 + L_lin`` enters with a
    factor 1/2, the zero-flux limit of the flux-tuning relation. Points
    outside ``measured_range`` carry the ``model-extrapolation`` flag.
    """
    T = _temps(T, thermal.T_cc, "T_cc")
    L = inductance_at(T, film)
    L_J0 = josephson_inductance(bardeen_critical_current(T, thermal.I_c, thermal.T_cc))
    w0 = 1.0 / np.sqrt(C_tot * (L + 0.5 * (L_J0 + llin_vs_temperature(T, thermal))))
    flags = {}
    if measured_range is not None:
        lo, hi = measured_range
        flags["model-extrapolation"] = bool(np.any((T < lo) | (T > hi)))
    if llin_negative_somewhere(thermal):
        flags["negative-llin"] = True
        warnings.warn("L_lin(T) model turns negative inside [0, T_cc)", RuntimeWarning)
    return ThermalPrediction(T=T, values=w0, flags=flags)


def beta_extrapolation(T, film: FilmParams, thermal: ConstrictionThermal, measured_range) -> ThermalPrediction:
    """Screening parameter prediction carrying the extrapolation flag."""
    T = np.atleast_1d(np.asarray(T, dtype=float))
    beta = beta_vs_temperature(T, film, thermal)
    lo, hi = measured_range
    flags = {"model-extrapolation": bool(np.any((T < lo) | (T > hi)))}
    if llin_negative_somewhere(thermal):
        flags["negative-llin"] = True
    return ThermalPrediction(T=T, values=beta, flags=flags)
