"""Two-step background correction of raw transmission traces.

Step one divides by a reference trace when one exists. Step two fits a
smooth background (quadratic amplitude, linear phase) together with the
Fano rotation of the resonance circle, then divides the background off and
undoes the rotation about the off-resonant anchor ``1 + 0i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DataQualityError, FitError
from ..trace import ComplexTrace
from .lsq import solve
from .resonance import seed_notch


@dataclass(frozen=True)
class BackgroundModel:
    """``(a0 + a1 w + a2 w^2) exp(i(phi0 + phi1 w))`` plus Fano angle ``theta``."""

    a0: float = 1.0
    a1: float = 0.0
    a2: float = 0.0
    phi0: float = 0.0
    phi1: float = 0.0
    theta: float = 0.0
    # (centre, half span, A0, A1, A2, P0, P1) of the fit in normalised frequency;
    # evaluating there avoids cancellation between the absolute coefficients
    normalised: Optional[tuple] = field(default=None, compare=False, repr=False)

    def amplitude(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.normalised is not None:
            c, s, A0, A1, A2, _, _ = self.normalised
            u = (w - c) / s
            return A0 + A1 * u + A2 * u * u
        return self.a0 + self.a1 * w + self.a2 * w * w

    def phase(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.normalised is not None:
            c, s, _, _, _, P0, P1 = self.normalised
            return P0 + P1 * (w - c) / s
        return self.phi0 + self.phi1 * w

    def evaluate(self, omega):
        return self.amplitude(omega) * np.exp(1j * self.phase(omega))

    def apply(self, omega, s21_ideal):
        """Raw transmission from an ideal notch response."""
        f = 1.0 - np.asarray(s21_ideal)
        return self.evaluate(omega) * (1.0 - f * np.exp(1j * self.theta))

    def remove(self, omega, s21_raw):
        """Inverse of :meth:`apply`."""
        f = 1.0 - np.asarray(s21_raw) / self.evaluate(omega)
        return 1.0 - f * np.exp(-1j * self.theta)


@dataclass
class BackgroundResult:
    corrected: ComplexTrace
    model: BackgroundModel
    resonance_found: bool
    rms: float
    resonance: dict = field(default_factory=dict)


def _to_absolute(A, P, c, s):
    A0, A1, A2 = A
    P0, P1 = P
    a2 = A2 / s ** 2
    a1 = A1 / s - 2 * A2 * c / s ** 2
    a0 = A0 - A1 * c / s + A2 * c ** 2 / s ** 2
    return a0, a1, a2, P0 - P1 * c / s, P1 / s


def _fit_offres(u, y, mask):
    """Linear fits of amplitude and unwrapped phase on off-resonant points."""
    amp = np.abs(y[mask])
    ph = np.unwrap(np.angle(y[mask]))
    A = np.polyfit(u[mask], amp, 2)[::-1]
    P = np.polyfit(u[mask], ph, 1)[::-1]
    return A, P


def correct_trace(raw: ComplexTrace, reference: Optional[ComplexTrace] = None,
                  mask_linewidths=5.0, min_offres_fraction=0.2) -> BackgroundResult:
    """Remove the transmission background and the Fano rotation from ``raw``.

    The resonance window (``mask_linewidths`` total linewidths either side of
    the dip) is excluded from the initial background estimate; the final fit
    of background, rotation and notch uses every sample.
    """
    tr = raw.divide(reference) if reference is not None else raw
    w = tr.omega
    c = 0.5 * (w[0] + w[-1])
    s = 0.5 * (w[-1] - w[0])
    u = (w - c) / s
    y = tr.s21

    # rough dip estimate on the amplitude-flattened trace
    A, P = _fit_offres(u, y, np.ones_like(u, dtype=bool))
    flat = y / (np.polyval(A[::-1], u) * np.exp(1j * np.polyval(P[::-1], u)))
    guess = seed_notch(ComplexTrace(w, flat))
    x_dip = (guess["omega_0"] - c) / s
    k_dip = guess["kappa"] / s
    mask = np.abs(u - x_dip) > mask_linewidths * k_dip
    found = guess["kappa_e"] / guess["kappa"] > 1e-4
    if mask.mean() < min_offres_fraction or not found:
        A, P = _fit_offres(u, y, np.ones_like(u, dtype=bool))
        a = _to_absolute(A, P, c, s)
        model = BackgroundModel(*a, theta=0.0, normalised=(c, s, *A, *P))
        corrected = ComplexTrace(w, y / model.evaluate(w))
        return BackgroundResult(corrected, model, resonance_found=False,
                                rms=float(np.sqrt(np.mean(np.abs(corrected.s21 - 1) ** 2))))
    A, P = _fit_offres(u, y, mask)

    # full model: A0..A2, P0, P1, theta, x0, k, ke (notch in normalised units)
    def model_of(p):
        A0, A1, A2, P0, P1, th, x0, k, ke = p
        bg = (A0 + A1 * u + A2 * u * u) * np.exp(1j * (P0 + P1 * u))
        return bg * (1.0 - ke / (k + 2j * (u - x0)) * np.exp(1j * th))

    def resid(p):
        r = model_of(p) - y
        return np.concatenate([r.real, r.imag])

    # seed theta from the direction of the dip relative to the anchor
    y_flat = y / ((A[0] + A[1] * u + A[2] * u * u) * np.exp(1j * (P[0] + P[1] * u)))
    i_dip = int(np.argmin(np.abs(u - x_dip)))
    th0 = float(np.angle(1.0 - y_flat[i_dip])) if abs(1.0 - y_flat[i_dip]) > 0 else 0.0
    ke0 = abs(1.0 - y_flat[i_dip]) * k_dip
    best = None
    for th_seed in (th0, 0.0):
        p0 = np.array([A[0], A[1], A[2], P[0], P[1], th_seed, x_dip, k_dip, ke0])
        try:
            r = solve(resid, p0, name="background fit")
        except FitError:
            continue
        if best is None or r.cost < best.cost:
            best = r
    if best is None:
        raise FitError("background fit failed for all seeds", x_dip=x_dip, k_dip=k_dip)
    A0, A1, A2, P0, P1, th, x0, k, ke = best.x
    if ke < 0:
        # the same circle with the opposite orientation
        ke, th = -ke, th + np.pi
    th = float((th + np.pi) % (2 * np.pi) - np.pi)
    a = _to_absolute((A0, A1, A2), (P0, P1), c, s)
    model = BackgroundModel(*a, theta=th, normalised=(c, s, A0, A1, A2, P0, P1))
    if np.any(model.amplitude(w) <= 0):
        raise DataQualityError("fitted background amplitude is not positive over the window")
    corrected = ComplexTrace(w, model.remove(w, y))
    res = {"omega_0": c + x0 * s, "kappa": k * s, "kappa_e": ke * s}
    return BackgroundResult(corrected, model, resonance_found=True, rms=best.rms, resonance=res)
