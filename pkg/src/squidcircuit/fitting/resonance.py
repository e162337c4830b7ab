"""Least-squares fit of the ideal notch response to a corrected trace."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import FitError
from ..trace import ComplexTrace
from .lsq import solve


@dataclass
class ResonanceFit:
    omega_0: float
    kappa_i: float
    kappa_e: float
    theta: float = 0.0
    background: Optional[object] = None
    rms: float = 0.0
    stderr: dict = field(default_factory=dict)
    seed: dict = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        return self.kappa_i + self.kappa_e


def notch(omega, omega_0, kappa, kappa_e):
    return 1.0 - kappa_e / (kappa + 2j * (np.asarray(omega) - omega_0))


def seed_notch(trace: ComplexTrace):
    """Seed from the dip position, its half-power width and its depth."""
    w = trace.omega
    d = np.abs(1.0 - trace.s21) ** 2
    i = int(np.argmax(d))
    peak = d[i]
    if peak <= 0:
        raise FitError("trace has no resolvable dip", seed=None)
    half = d >= 0.5 * peak
    # walk out from the dip to the half-power crossings
    lo = i
    while lo > 0 and half[lo - 1]:
        lo -= 1
    hi = i
    while hi < w.size - 1 and half[hi + 1]:
        hi += 1
    width = w[min(hi + 1, w.size - 1)] - w[max(lo - 1, 0)]
    width = max(width - (w[1] - w[0]), w[1] - w[0])
    depth = float(np.sqrt(peak))
    kappa = float(width)
    kappa_e = min(max(depth, 1e-6), 1.0) * kappa
    return {"omega_0": float(w[i]), "kappa": kappa, "kappa_e": kappa_e}


def fit_resonance(trace: ComplexTrace, seed=None, weights=None) -> ResonanceFit:
    """Fit ``1 - kappa_e/(kappa + 2i(omega - omega_0))`` to real and imaginary parts jointly.

    ``seed`` may override any of ``omega_0``, ``kappa_i``, ``kappa_e``.
    """
    s0 = seed_notch(trace)
    if seed:
        if "kappa_i" in seed and "kappa_e" in seed:
            s0["kappa"] = seed["kappa_i"] + seed["kappa_e"]
        s0.update({k: v for k, v in seed.items() if k in ("omega_0", "kappa_e")})
        if "kappa_i" in seed and "kappa_e" not in seed:
            s0["kappa"] = seed["kappa_i"] + s0["kappa_e"]
    w = trace.omega
    scale = s0["kappa"]
    centre = s0["omega_0"]
    u = (w - centre) / scale
    y = trace.s21
    wt = np.ones_like(u) if weights is None else np.asarray(weights, dtype=float)

    def model(p):
        x0, k, ke = p
        return 1.0 - ke / (k + 2j * (u - x0))

    def resid(p):
        r = (model(p) - y) * wt
        return np.concatenate([r.real, r.imag])

    def jac(p):
        x0, k, ke = p
        den = k + 2j * (u - x0)
        d_x0 = -ke * 2j / den ** 2
        d_k = ke / den ** 2
        d_ke = -1.0 / den
        cols = [c * wt for c in (d_x0, d_k, d_ke)]
        return np.column_stack([np.concatenate([c.real, c.imag]) for c in cols])

    p0 = np.array([0.0, 1.0, s0["kappa_e"] / scale])
    r = solve(resid, p0, jac=jac, name="resonance fit")
    x0, k, ke = r.x
    if not k > 0:
        raise FitError("resonance fit converged to a non-positive linewidth", seed=s0, x=r.x.tolist())
    err = r.stderr * scale
    return ResonanceFit(
        omega_0=centre + x0 * scale, kappa_i=(k - ke) * scale, kappa_e=ke * scale,
        rms=r.rms, seed=s0,
        stderr={"omega_0": err[0], "kappa": err[1], "kappa_e": err[2],
                "kappa_i": float(np.sqrt(max(r.cov[1, 1] + r.cov[2, 2] - 2 * r.cov[1, 2], 0.0))) * scale},
    )
