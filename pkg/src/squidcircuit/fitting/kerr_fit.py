"""Kerr constant and nonlinear damping from pump-power series, with error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import DataQualityError, FitError
from ..response import TwoToneObservation, pump_photon_number
from .lsq import solve

MIN_POWERS = 4


@dataclass
class KappaEProfile:
    """Degree-4 polynomial of ``kappa_e(omega_0)`` plus the measured points."""

    omega: np.ndarray
    kappa_e: np.ndarray
    coeffs: np.ndarray
    centre: float
    scale: float

    @classmethod
    def fit(cls, omega, kappa_e, degree=4) -> "KappaEProfile":
        w = np.asarray(omega, dtype=float)
        k = np.asarray(kappa_e, dtype=float)
        if w.shape != k.shape or w.size < 6 or w.size <= degree:
            raise FitError(f"kappa_e profile needs at least 6 points and more than {degree}",
                           n_points=int(w.size))
        order = np.argsort(w)
        w, k = w[order], k[order]
        centre = 0.5 * (w[0] + w[-1])
        scale = 0.5 * (w[-1] - w[0]) or 1.0
        u = (w - centre) / scale
        V = np.vander(u, degree + 1)
        sv = np.linalg.svd(V, compute_uv=False)
        if sv[-1] <= sv[0] * 1e-12:
            raise FitError("kappa_e profile is rank deficient", singular_values=sv.tolist())
        coeffs, *_ = np.linalg.lstsq(V, k, rcond=None)
        return cls(w, k, coeffs, centre, scale)

    def __call__(self, omega):
        return np.polyval(self.coeffs, (np.asarray(omega, dtype=float) - self.centre) / self.scale)

    def query(self, omega_p, window) -> Tuple[float, float, float]:
        """``(kappa_e, kappa_e_plus, kappa_e_minus)`` for a pump at ``omega_p``.

        ``kappa_e`` is the measured value closest to ``omega_p``. The bounds are
        the extremes of the polynomial and of the measured values inside a
        window of full width ``window`` centred on that point.
        """
        i = int(np.argmin(np.abs(self.omega - omega_p)))
        c = self.omega[i]
        lo, hi = c - 0.5 * window, c + 0.5 * window
        grid = np.linspace(lo, hi, 401)
        vals = [self(grid)]
        inside = (self.omega >= lo) & (self.omega <= hi)
        vals.append(self.kappa_e[inside])
        allv = np.concatenate(vals)
        return float(self.kappa_e[i]), float(np.max(allv)), float(np.min(allv))


@dataclass
class KerrFit:
    K: float
    kappa_nl: float
    K_plus: float
    K_minus: float
    K_stderr: float
    n_c: np.ndarray
    n_c_plus: np.ndarray
    n_c_minus: np.ndarray
    kappa_nl_plus: float = math.nan
    kappa_nl_minus: float = math.nan
    rms: float = 0.0


def _photon_numbers(obs, kappa_e, kappa_0, Delta_p, power_factor=1.0, tol=1e-9):
    n = []
    for o in obs:
        delta = Delta_p - o.delta_omega0
        n.append(pump_photon_number(o.P_p * power_factor, o.omega_p, kappa_e, kappa_0,
                                    o.kappa_p, delta, Delta_p, tol=tol))
    return np.array(n)


def _fit_series(n, shift, kp, kappa_0, Delta_p):
    """kappa_nl from the broadening slope, then K from the shift with kappa_nl fixed."""
    kappa_nl = float(np.dot(n, kp - kappa_0) / (2.0 * np.dot(n, n)))
    K0 = float(np.dot(n, shift) / (2.0 * np.dot(n, n)))
    scale = abs(K0) if K0 != 0 else 1.0
    sh_scale = float(np.max(np.abs(shift))) or 1.0

    def resid(p):
        K = p[0] * scale
        out = np.empty(n.size)
        for i, ni in enumerate(n):
            Kn = K * ni
            R = (Delta_p - Kn) * (Delta_p - 3 * Kn) - 0.25 * (kappa_nl * ni) ** 2
            out[i] = (Delta_p - math.sqrt(max(R, 0.0)) - shift[i]) / sh_scale
        return out

    r = solve(resid, [K0 / scale], name="Kerr fit")
    return float(r.x[0] * scale), kappa_nl, float(r.stderr[0] * scale), float(r.rms * sh_scale)


def fit_kerr(observations: Sequence[TwoToneObservation], kappa_0, Delta_p, kappa_e=None,
             profile: Optional[KappaEProfile] = None, power_uncertainty_db=1.0,
             kappa_e_bounds: Optional[Tuple[float, float]] = None, tol=1e-9) -> KerrFit:
    """Extract ``K`` and ``kappa_nl`` from one flux point's pump-power series.

    ``kappa_e`` is given directly or queried from ``profile`` at the pump
    frequency. The bounds repeat the fit with photon numbers built from
    ``(kappa_e_plus, +dB)`` for ``K_plus`` and ``(kappa_e_minus, -dB)`` for
    ``K_minus``.
    """
    obs = list(observations)
    if len(obs) < MIN_POWERS:
        raise DataQualityError(f"need at least {MIN_POWERS} pump powers, got {len(obs)}")
    for o in obs:
        if o.kappa_p < kappa_0 * (1.0 - tol):
            raise DataQualityError(f"pumped linewidth below the bare value at P_p={o.P_p:.3g} W")
    omega_p = obs[0].omega_p
    if profile is not None:
        ke, ke_plus, ke_minus = profile.query(omega_p, kappa_0)
        if kappa_e is not None:
            ke = kappa_e
    elif kappa_e is not None:
        ke = kappa_e
        ke_plus, ke_minus = kappa_e_bounds if kappa_e_bounds is not None else (ke, ke)
    else:
        ke = obs[0].kappa_e
        if ke is None:
            raise DataQualityError("no external linewidth available")
        ke_plus, ke_minus = kappa_e_bounds if kappa_e_bounds is not None else (ke, ke)
    shift = np.array([o.delta_omega0 for o in obs])
    kp = np.array([o.kappa_p for o in obs])
    g = 10.0 ** (power_uncertainty_db / 10.0)
    n = _photon_numbers(obs, ke, kappa_0, Delta_p, tol=tol)
    n_plus = _photon_numbers(obs, ke_plus, kappa_0, Delta_p, g, tol)
    n_minus = _photon_numbers(obs, ke_minus, kappa_0, Delta_p, 1.0 / g, tol)
    K, knl, K_err, rms = _fit_series(n, shift, kp, kappa_0, Delta_p)
    K_p, knl_p, _, _ = _fit_series(n_plus, shift, kp, kappa_0, Delta_p)
    K_m, knl_m, _, _ = _fit_series(n_minus, shift, kp, kappa_0, Delta_p)
    return KerrFit(K=K, kappa_nl=knl, K_plus=K_p, K_minus=K_m, K_stderr=K_err,
                   n_c=n, n_c_plus=n_plus, n_c_minus=n_minus,
                   kappa_nl_plus=knl_p, kappa_nl_minus=knl_m, rms=rms)
