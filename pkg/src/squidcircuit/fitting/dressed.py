"""Pole fit of a pump-dressed probe trace.

Under a pump the probe response has two poles with a common decay rate: the
observed dressed mode at ``omega_0'`` and its idler image at
``2 omega_p - omega_0'``. Fitting only a single notch lets the idler tail bias
the linewidth, so both poles are kept with free complex residues and the
residues are eliminated by linear least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FitError
from ..trace import ComplexTrace
from .lsq import solve
from .resonance import fit_resonance


@dataclass
class DressedFit:
    omega_0: float
    kappa: float
    residues: np.ndarray
    offset: complex
    rms: float
    stderr: dict = field(default_factory=dict)

    @property
    def kappa_e(self) -> float:
        # a notch residue i*kappa_e/2 in units of the linewidth
        return float(2.0 * abs(self.residues[0]))


def _basis(u, x0, k, xp):
    p1 = x0 + 0.5j * k
    p2 = 2.0 * xp - x0 + 0.5j * k
    return np.column_stack([np.ones_like(u, dtype=complex), 1.0 / (u - p1), 1.0 / (u - p2)])


def fit_dressed_mode(trace: ComplexTrace, omega_p, seed=None) -> DressedFit:
    """Fit ``c + r1/(w - p1) + r2/(w - p2)`` with ``p2`` mirrored about ``omega_p``.

    ``seed`` is a single-notch :class:`ResonanceFit`; one is made if omitted.
    """
    if seed is None:
        seed = fit_resonance(trace)
    scale = seed.kappa
    centre = seed.omega_0
    u = (trace.omega - centre) / scale
    xp = (omega_p - centre) / scale
    y = trace.s21

    def coeffs(p):
        A = _basis(u, p[0], p[1], xp)
        c, *_ = np.linalg.lstsq(A, y, rcond=None)
        return A, c

    def resid(p):
        A, c = coeffs(p)
        r = A @ c - y
        return np.concatenate([r.real, r.imag])

    r = solve(resid, [0.0, 1.0], name="dressed-mode fit")
    x0, k = r.x
    if not k > 0:
        raise FitError("dressed-mode fit converged to a non-positive linewidth", x=r.x.tolist())
    _, c = coeffs(r.x)
    err = r.stderr * scale
    return DressedFit(omega_0=centre + x0 * scale, kappa=k * scale, residues=c[1:] * scale,
                      offset=complex(c[0]), rms=r.rms,
                      stderr={"omega_0": float(err[0]), "kappa": float(err[1])})
