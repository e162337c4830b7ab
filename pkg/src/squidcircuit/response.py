"""Driven response of a Kerr cavity with nonlinear damping.

Mean-field treatment in the frame rotating at the drive: single-tone steady
state from the cubic photon-number polynomial, linearised two-tone probe
susceptibility, dressed modes and the inversion from measured shift and
broadening to the intracavity pump photon number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import HBAR
from .cubic import _polish, cubic_residual, real_cubic_roots
from .errors import DataQualityError, DomainError, RegimeError


@dataclass(frozen=True)
class CavityMode:
    """Single cavity mode.

    ``kappa`` is the total bare linewidth; ``K`` and ``kappa_nl`` are the
    frequency shift and the extra damping per intracavity photon.
    """

    omega_c: float
    kappa: float
    kappa_e: float
    K: float = 0.0
    kappa_nl: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not 0 <= self.kappa_e <= self.kappa:
            raise DomainError("need 0 <= kappa_e <= kappa")
        if self.kappa_nl < 0:
            raise DomainError("kappa_nl must be non-negative")

    @property
    def kappa_i(self) -> float:
        return self.kappa - self.kappa_e


@dataclass(frozen=True)
class SteadyState:
    roots: Tuple[float, ...]
    stable: Tuple[bool, ...]
    selected: float
    bifurcation: bool = False
    residuals: Tuple[float, ...] = ()

    @property
    def multistable(self) -> bool:
        return len(self.roots) == 3


@dataclass(frozen=True)
class TwoToneObservation:
    P_p: float
    omega_p: float
    delta_omega0: float
    kappa_p: float
    kappa_e: Optional[float] = None


def s21_linear(omega, mode: CavityMode):
    """Notch transmission ``1 - kappa_e / (kappa + 2i(omega - omega_c))``."""
    w = np.asarray(omega, dtype=float)
    return 1.0 - mode.kappa_e / (mode.kappa + 2j * (w - mode.omega_c))


def photon_polynomial(mode: CavityMode, Delta, input_flux):
    """Coefficients (highest power first) of the photon-number cubic.

    ``Delta`` is drive minus cavity frequency and ``input_flux`` is ``|S_in|^2``
    in photons per second.
    """
    K, knl, k = mode.K, mode.kappa_nl, mode.kappa
    return (K * K + 0.25 * knl * knl,
            0.5 * k * knl - 2.0 * K * Delta,
            Delta * Delta + 0.25 * k * k,
            -0.5 * mode.kappa_e * input_flux)


def steady_state(mode: CavityMode, Delta, input_flux, policy="low") -> SteadyState:
    """Physical (non-negative real) intracavity photon numbers.

    With three roots the lowest and highest are stable; ``policy`` picks
    ``"low"`` or ``"high"`` as the selected state.
    """
    if input_flux < 0:
        raise DomainError("input_flux must be non-negative")
    if policy not in ("low", "high"):
        raise DomainError(f"unknown policy {policy!r}")
    coeffs = photon_polynomial(mode, Delta, input_flux)
    if input_flux == 0.0:
        return SteadyState(roots=(0.0,), stable=(True,), selected=0.0, residuals=(0.0,))
    if coeffs[0] == 0.0:
        # linear cavity: the cubic degenerates to a linear equation
        n = -coeffs[3] / coeffs[2]
        res = cubic_residual(coeffs, n)
        return SteadyState(roots=(n,), stable=(True,), selected=n, residuals=(res,))
    try:
        sol = real_cubic_roots(*coeffs)
    except OverflowError:
        # nonlinearity so weak that normalising by the leading coefficient overflows
        n = _polish(coeffs, -coeffs[3] / coeffs[2])
        return SteadyState(roots=(n,), stable=(True,), selected=n, residuals=(cubic_residual(coeffs, n),))
    roots = tuple(r for r in sol.roots if r > 0)
    if not roots:
        raise RegimeError("no positive photon-number root", coeffs=coeffs)
    if len(roots) == 3:
        stable = (True, False, True)
    else:
        stable = tuple(True for _ in roots)
    selected = roots[0] if policy == "low" else roots[-1]
    res = tuple(cubic_residual(coeffs, r) for r in roots)
    return SteadyState(roots=roots, stable=stable, selected=selected,
                       bifurcation=sol.degenerate, residuals=res)


def steady_state_sweep(mode: CavityMode, Delta, input_fluxes: Sequence[float],
                       policy="follow-from-below") -> List[SteadyState]:
    """Steady states along a drive sweep, continuing the selected branch.

    ``follow-from-below`` starts on the low-amplitude root and stays on it
    while it exists; ``follow-from-above`` does the same from the high root.
    """
    if policy not in ("follow-from-below", "follow-from-above"):
        raise DomainError(f"unknown sweep policy {policy!r}")
    start = "low" if policy == "follow-from-below" else "high"
    out: List[SteadyState] = []
    prev = None
    for s in input_fluxes:
        st = steady_state(mode, Delta, s, policy=start)
        if prev is not None and len(st.roots) > 1:
            cands = [r for r, ok in zip(st.roots, st.stable) if ok]
            pick = min(cands, key=lambda r: abs(math.log((r + 1e-300) / (prev + 1e-300))))
            st = SteadyState(roots=st.roots, stable=st.stable, selected=pick,
                             bifurcation=st.bifurcation, residuals=st.residuals)
        out.append(st)
        prev = st.selected
    return out


def bistable_window(mode: CavityMode, Delta, flux_max, n_scan=4000):
    """Drive interval with three physical roots found by a log-spaced scan."""
    fluxes = np.geomspace(flux_max * 1e-6, flux_max, n_scan)
    multi = [len(steady_state(mode, Delta, s).roots) == 3 for s in fluxes]
    idx = np.flatnonzero(multi)
    if idx.size == 0:
        return None
    return float(fluxes[idx[0]]), float(fluxes[idx[-1]])


def _susceptibilities(mode: CavityMode, Delta_p, n_c, Omega):
    a = 0.5 * (mode.kappa + 2.0 * mode.kappa_nl * n_c)
    D = Delta_p - 2.0 * mode.K * n_c
    chi = 1.0 / (a + 1j * (D + Omega))
    chi_bar = 1.0 / (a - 1j * (D - Omega))
    return chi, chi_bar


def two_tone_susceptibility(mode: CavityMode, omega_p, n_c, omega):
    """Probe susceptibility ``chi_g`` including the idler coupling."""
    Omega = np.asarray(omega, dtype=float) - omega_p
    Delta_p = omega_p - mode.omega_c
    chi, chi_bar = _susceptibilities(mode, Delta_p, n_c, Omega)
    G2 = (mode.K ** 2 + 0.25 * mode.kappa_nl ** 2) * n_c * n_c
    return chi / (1.0 - G2 * chi * chi_bar)


def two_tone_s21(mode: CavityMode, omega_p, n_c, omega):
    """Weak-probe transmission ``1 - (kappa_e/2) chi_g`` in presence of the pump."""
    return 1.0 - 0.5 * mode.kappa_e * two_tone_susceptibility(mode, omega_p, n_c, omega)


def _radicand(mode: CavityMode, Delta_p, n_c):
    Kn = mode.K * n_c
    return (Delta_p - Kn) * (Delta_p - 3.0 * Kn) - 0.25 * (mode.kappa_nl * n_c) ** 2


def dressed_modes(mode: CavityMode, omega_p, n_c):
    """Complex frequencies of the two pump-dressed modes, ``(omega_1, omega_2)``.

    Real parts are the resonances, twice the imaginary parts the linewidths.
    """
    Delta_p = omega_p - mode.omega_c
    a = 0.5 * (mode.kappa + 2.0 * mode.kappa_nl * n_c)
    r = complex(_radicand(mode, Delta_p, n_c)) ** 0.5
    return omega_p + 1j * a + r, omega_p + 1j * a - r


def pump_shift(mode: CavityMode, Delta_p, n_c):
    """Signed shift ``omega_0' - omega_0`` of the observed dressed mode and its linewidth.

    Negative for a softening Kerr constant under a blue-detuned pump.
    """
    R = _radicand(mode, Delta_p, n_c)
    if R < 0:
        raise RegimeError("dressed-mode radicand is negative", radicand=R, n_c=n_c)
    return Delta_p - math.sqrt(R), mode.kappa + 2.0 * mode.kappa_nl * n_c


def pump_photon_number(P_p, omega_p, kappa_e, kappa_0, kappa_p, delta, Delta_p, tol=1e-9):
    """Intracavity pump photons from the measured dressed mode, independent of ``K``.

    ``delta`` is ``|omega_p - omega_0'|`` and ``Delta_p = omega_p - omega_0``.
    ``tol`` (relative to ``kappa_0``) absorbs round-off when ``kappa_p`` is at
    the bare value. The effective detuning is taken on the root with the sign
    of ``Delta_p``; it is the only one for ``K < 0`` under a blue-detuned pump,
    and for ``K > 0`` it holds while ``3 K n_c < Delta_p``.
    """
    if P_p < 0 or not omega_p > 0:
        raise DomainError("need P_p >= 0 and omega_p > 0")
    if kappa_p < kappa_0 * (1.0 - tol):
        raise DataQualityError(f"pumped linewidth {kappa_p:.6g} below bare linewidth {kappa_0:.6g}")
    kappa_1 = max(0.5 * (kappa_p - kappa_0), 0.0)
    delta = abs(delta)
    dk2 = delta * delta + 0.25 * kappa_1 * kappa_1
    Dt2 = (2.0 / 9.0) * (Delta_p ** 2 + Delta_p * math.sqrt(Delta_p ** 2 + 3.0 * dk2) + 1.5 * dk2)
    k_eff = kappa_0 + kappa_1
    return 2.0 * P_p / (HBAR * omega_p) * kappa_e / (k_eff ** 2 + 4.0 * Dt2)


def observe_two_tone(mode: CavityMode, P_p, omega_p, policy="low", kappa_e_used=None) -> Tuple[TwoToneObservation, SteadyState]:
    """Forward model of one pump power: steady state, then shift and broadening."""
    Delta_p = omega_p - mode.omega_c
    st = steady_state(mode, Delta_p, P_p / (HBAR * omega_p), policy=policy)
    d, kp = pump_shift(mode, Delta_p, st.selected)
    obs = TwoToneObservation(P_p=P_p, omega_p=omega_p, delta_omega0=d, kappa_p=kp,
                             kappa_e=mode.kappa_e if kappa_e_used is None else kappa_e_used)
    return obs, st


def probe_validity_ratio(probe_flux, pump_flux) -> float:
    """Probe-to-pump photon ratio; the linearisation assumes this is small."""
    if not pump_flux > 0:
        return math.inf
    return probe_flux / pump_flux
