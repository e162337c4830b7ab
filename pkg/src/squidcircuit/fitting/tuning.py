"""Flux-arch fit: SQUID parameters and coil-current calibration from omega_0 data."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..circuit import CircuitParams
from ..constants import PHI0
from ..errors import DataQualityError, FitError
from .lsq import ConditioningWarning, solve

_PH = 1e-12
_MHZ = 2 * math.pi * 1e6


@dataclass
class FluxFit:
    L_J0: float
    L_lin: float
    L_loop: float
    period: float
    offset: float
    branches: np.ndarray
    stderr: dict = field(default_factory=dict)
    covariance: Optional[np.ndarray] = None
    rms: float = 0.0
    singular_values: Optional[np.ndarray] = None

    @property
    def I_0(self) -> float:
        return PHI0 / (2 * math.pi * self.L_J0)

    @property
    def beta_L(self) -> float:
        return (self.L_loop + 2 * self.L_lin) / (math.pi * self.L_J0)

    def phi_ext(self, coil):
        return (np.asarray(coil, dtype=float) - self.offset) / self.period


def _principal_reduced(r, b):
    """Root of ``y + b sin(pi y) = r`` with ``|y| < 1/2``, vectorised bisection plus Newton."""
    shape = np.shape(r)
    r_all = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    edge = 0.5 + b
    inside = np.abs(r_all) < edge
    # outside the stable range the point cannot sit on this branch; pin it near the edge
    out = np.sign(r_all) * (0.5 - 1e-6)
    r = r_all[inside]
    y = np.clip(r / (1.0 + math.pi * b), -0.5, 0.5)
    lo = np.full_like(r, -0.5)
    hi = np.full_like(r, 0.5)
    for _ in range(60):
        g = y + b * np.sin(np.pi * y) - r
        lo = np.where(g < 0, y, lo)
        hi = np.where(g >= 0, y, hi)
        d = 1.0 + math.pi * b * np.cos(np.pi * y)
        yn = y - g / d
        bad = (yn < lo) | (yn > hi) | ~np.isfinite(yn)
        yn = np.where(bad, 0.5 * (lo + hi), yn)
        done = np.all(np.abs(yn - y) < 1e-12)
        y = yn
        if done:
            # Newton is quadratic here, so one more step reaches round-off
            g = y + b * np.sin(np.pi * y) - r
            y = y - g / (1.0 + math.pi * b * np.cos(np.pi * y))
            break
    out[inside] = y
    return out.reshape(shape)


def arch_model(x, branches, L_J0, L_lin, L_loop, L, omega_b):
    """``omega_0`` for flux ``x`` (Phi0) on the stable part of the labelled branches."""
    beta = (L_loop + 2 * L_lin) / (math.pi * L_J0)
    y = _principal_reduced(np.asarray(x) - branches, 0.5 * beta)
    cos = np.cos(np.pi * y)
    return omega_b / np.sqrt(1.0 + (L_lin + L_J0 / cos) / (2.0 * L))


def autocorrelation_period(coil, omega):
    """Dominant period of ``omega(coil)`` from the first autocorrelation maximum."""
    coil = np.asarray(coil, dtype=float)
    order = np.argsort(coil)
    c, w = coil[order], np.asarray(omega, dtype=float)[order]
    n = max(256, 4 * c.size)
    grid = np.linspace(c[0], c[-1], n)
    v = np.interp(grid, c, w)
    v = v - v.mean()
    ac = np.correlate(v, v, mode="full")[n - 1:]
    if ac[0] <= 0:
        return None
    ac = ac / ac[0]
    # first local maximum after the first zero crossing
    neg = np.flatnonzero(ac < 0)
    if neg.size == 0:
        return None
    start = neg[0]
    k = start + int(np.argmax(ac[start:]))
    if k >= n - 2 or ac[k] < 0.1:
        return None
    return float(k * (grid[1] - grid[0]))


def split_segments(values, sigma, threshold=5.0):
    """Indices where consecutive values jump by more than ``threshold*sigma``."""
    v = np.asarray(values, dtype=float)
    jumps = np.flatnonzero(np.abs(np.diff(v)) > threshold * sigma) + 1
    return np.split(np.arange(v.size), jumps)


def _local_scatter(v):
    d = np.diff(np.asarray(v, dtype=float))
    if d.size < 3:
        return float(np.std(v)) + 1e-30
    # median absolute second difference is blind to smooth trends
    dd = np.diff(d)
    return float(1.4826 * np.median(np.abs(dd - np.median(dd)))) / math.sqrt(6) + 1e-30


def fit_tuning_curve(coil, omega_0, circuit: CircuitParams, omega_b, L_loop=None,
                     branches: Optional[Sequence[int]] = None, flux_units=False,
                     seed: Optional[dict] = None, sigma=None, iterations=4) -> FluxFit:
    """Fit the flux arch(es) for ``L_J0``, ``L_lin``, period and offset.

    ``coil`` is a coil current (A) or, with ``flux_units=True``, the external
    flux in Phi0 (period and offset then stay at 1 and 0). ``branches`` labels
    the arch index of each point; without labels the data are split at
    frequency jumps larger than five times the local scatter and every
    segment is assigned the branch that fits it best.
    """
    x_data = np.asarray(coil, dtype=float)
    w = np.asarray(omega_0, dtype=float)
    if x_data.shape != w.shape or x_data.size < 6:
        raise DataQualityError("need at least 6 matching (coil, omega_0) points")
    L_loop = circuit.L_loop if L_loop is None else L_loop
    L = circuit.L
    seed = dict(seed or {})

    # calibration seeds
    if flux_units:
        period, offset = 1.0, 0.0
    else:
        period = seed.get("period") or autocorrelation_period(x_data, w)
        if period is None:
            raise DataQualityError("cannot seed the flux period; supply seed['period']")
        offset = seed.get("offset")
        if offset is None:
            offset = float(x_data[np.argmax(w)])
    w_max = float(np.max(w))
    L_c0 = max(2.0 * L * (omega_b ** 2 / w_max ** 2 - 1.0), 1e-15)

    labels = None if branches is None else np.asarray(branches, dtype=int)
    sig = sigma if sigma is not None else _local_scatter(w)
    segments = split_segments(w, sig) if labels is None else None

    def assign(p_L_J0, p_L_lin, per, off):
        phi = (x_data - off) / per
        if labels is not None:
            return labels
        out = np.empty(x_data.size, dtype=int)
        for seg in segments:
            base = int(np.round(np.median(phi[seg])))
            best, best_cost = base, np.inf
            for n in (base - 1, base, base + 1):
                m = arch_model(phi[seg], n, p_L_J0, p_L_lin, L_loop, L, omega_b)
                cost = float(np.sum((m - w[seg]) ** 2))
                if cost < best_cost:
                    best, best_cost = n, cost
            out[seg] = best
        return out

    def make_resid(n_arr):
        def resid(p):
            if flux_units:
                a, b = p
                per, off = 1.0, 0.0
            else:
                a, b, per, off = p
            phi = (x_data - off) / per
            m = arch_model(phi, n_arr, a * _PH, b * _PH, L_loop, L, omega_b)
            return (m - w) / _MHZ
        return resid

    fractions = [seed["L_J0"] / L_c0] if "L_J0" in seed else [0.3, 0.5, 0.7, 0.9]
    best = None
    for frac in fractions:
        a0 = frac * L_c0 / _PH
        b0 = seed.get("L_lin", (1 - frac) * L_c0) / _PH
        p = np.array([a0, b0] if flux_units else [a0, b0, period, offset])
        n_arr = assign(a0 * _PH, b0 * _PH, p[2] if not flux_units else 1.0, p[3] if not flux_units else 0.0)
        try:
            for _ in range(iterations):
                bounds = ([1e-6, 0.0] + ([] if flux_units else [-np.inf, -np.inf]),
                          [np.inf, np.inf] + ([] if flux_units else [np.inf, np.inf]))
                if not flux_units:
                    if p[2] > 0:
                        bounds[0][2] = 0.0
                    else:
                        bounds[1][2] = 0.0
                p = np.clip(p, np.array(bounds[0]) + 1e-12, bounds[1])
                r = solve(make_resid(n_arr), p, bounds=bounds, name="flux fit",
                          x_scale=np.abs(p) + 1e-3)
                p = r.x
                per = 1.0 if flux_units else p[2]
                off = 0.0 if flux_units else p[3]
                n_new = assign(p[0] * _PH, p[1] * _PH, per, off)
                if np.array_equal(n_new, n_arr):
                    break
                n_arr = n_new
        except FitError:
            continue
        if best is None or r.cost < best[0].cost:
            best = (r, n_arr)
    if best is None:
        raise FitError("flux fit failed from every seed", L_c0=L_c0, period=period, offset=offset)
    r, n_arr = best
    sv = r.singular_values
    coverage = np.ptp((x_data - (0.0 if flux_units else r.x[3])) / (1.0 if flux_units else r.x[2]))
    if coverage < 0.5 or (sv[-1] <= 0 or sv[0] / sv[-1] > 1e10):
        warnings.warn(f"flux fit poorly conditioned: flux coverage {coverage:.3g} Phi0, "
                      f"singular values {sv}", ConditioningWarning, stacklevel=2)
    names = ["L_J0", "L_lin"] + ([] if flux_units else ["period", "offset"])
    units = [_PH, _PH, 1.0, 1.0]
    stderr = {k: float(e * u) for k, e, u in zip(names, r.stderr, units)}
    period_f, offset_f = (1.0, 0.0) if flux_units else (float(r.x[2]), float(r.x[3]))
    # the offset is defined modulo one period; fold it towards zero and relabel
    k = int(np.round(offset_f / period_f))
    if k:
        offset_f -= k * period_f
        n_arr = np.asarray(n_arr) + k
    return FluxFit(
        L_J0=float(r.x[0] * _PH), L_lin=float(r.x[1] * _PH), L_loop=L_loop,
        period=period_f, offset=offset_f,
        branches=n_arr, stderr=stderr, covariance=r.cov, rms=float(r.rms * _MHZ),
        singular_values=sv,
    )
