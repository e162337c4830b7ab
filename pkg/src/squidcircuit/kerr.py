"""Kerr nonlinearity of the flux-biased SQUID resonator.

The SQUID potential along the common-mode phase is expanded to fourth
order around its minimum. Each arm is a Josephson junction in series with a
linear inductance ``L_arm = L_loop/2 + L_lin``; ``zeta = L_arm/L_J0`` is the
ratio of the junction energy to the arm inductive energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .circuit import CircuitParams
from .constants import E_CHARGE, HBAR
from .errors import DomainError, SingularityError
from .flux import SquidParams, solve_total_flux

_DENOM_MIN = 1e-9


@dataclass(frozen=True)
class PotentialExpansion:
    zeta: float
    phi0: float
    c2: float
    c3: float
    c4: float


@dataclass(frozen=True)
class KerrEstimate:
    K: float
    K_plus: Optional[float] = None
    K_minus: Optional[float] = None
    phi_ext: Optional[float] = None
    junction_phase: Optional[float] = None


def potential_coefficients(zeta, phi0) -> PotentialExpansion:
    """Second and fourth derivatives of ``U(phi_s)/E_J`` at the minimum.

    ``c3`` vanishes for the symmetric SQUID.
    """
    if zeta < 0:
        raise DomainError("zeta must be non-negative")
    c = math.cos(phi0)
    s = math.sin(phi0)
    D = 1.0 + zeta * c
    if abs(D) < _DENOM_MIN:
        raise SingularityError(f"1 + zeta cos(phi0) = {D:.3g}")
    c2 = 2.0 * c / D
    c4 = -2.0 * (c * D + 3.0 * zeta * s * s) / D ** 5
    return PotentialExpansion(zeta=zeta, phi0=phi0, c2=c2, c3=0.0, c4=c4)


def _stable_point(squid: SquidParams, phi_ext, branch=None):
    n = int(round(phi_ext)) if branch is None else int(branch)
    pt = solve_total_flux(phi_ext, squid.beta_L, seed=float(n), branch=n)
    if not pt.stable:
        raise DomainError(f"phi_ext={phi_ext} is not on a stable branch")
    return pt


def kerr_from_expansion(circuit: CircuitParams, squid: SquidParams, exp: PotentialExpansion) -> float:
    """``K = p^3 K_s`` with the SQUID-only Kerr ``K_s`` and participation ``p``."""
    K_s = E_CHARGE ** 2 / (2.0 * HBAR * circuit.C_tot) * exp.c4 / exp.c2
    L_s = squid.L_J0 / exp.c2
    p = L_s / (circuit.L - 0.25 * squid.L_loop + L_s)
    return p ** 3 * K_s


def kerr_pipeline(circuit: CircuitParams, squid: SquidParams, phi_ext, branch=None) -> KerrEstimate:
    """Kerr constant through the Taylor coefficients and participation ratio (rad/s)."""
    pt = _stable_point(squid, phi_ext, branch)
    exp = potential_coefficients(squid.L_arm / squid.L_J0, pt.junction_phase)
    return KerrEstimate(K=kerr_from_expansion(circuit, squid, exp), phi_ext=phi_ext,
                        junction_phase=pt.junction_phase)


def _closed_form(circuit, squid, phase, with_bracket=True):
    c = math.cos(phase)
    L_J = squid.L_J0 / c
    L_arm = squid.L_arm
    ratio = L_J / (2.0 * circuit.L + squid.L_lin + L_J)
    bracket = 1.0
    if with_bracket:
        lam = L_arm / (L_arm + L_J)
        bracket += 3.0 * lam * math.tan(phase) ** 2
    return -E_CHARGE ** 2 / (2.0 * HBAR * circuit.C_tot) * ratio ** 3 * bracket


def kerr_at_flux(circuit: CircuitParams, squid: SquidParams, phi_ext, branch=None) -> KerrEstimate:
    """Closed-form Kerr constant (rad/s per photon, negative).

    ``branch`` defaults to the arch nearest ``phi_ext``; pass it explicitly to
    follow a metastable arch of a hysteretic SQUID.
    """
    pt = _stable_point(squid, phi_ext, branch)
    return KerrEstimate(K=_closed_form(circuit, squid, pt.junction_phase), phi_ext=phi_ext,
                        junction_phase=pt.junction_phase)


def kerr_simplified(circuit: CircuitParams, squid: SquidParams, phi_ext, branch=None) -> KerrEstimate:
    """Participation-ratio-only Kerr constant, the closed form without the tan^2 term."""
    pt = _stable_point(squid, phi_ext, branch)
    return KerrEstimate(K=_closed_form(circuit, squid, pt.junction_phase, with_bracket=False),
                        phi_ext=phi_ext, junction_phase=pt.junction_phase)
