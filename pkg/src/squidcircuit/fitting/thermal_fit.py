"""Fits of the temperature models to omega_b(T), kappa_b(T), I_0(T) and L_lin(T) series."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..errors import DataQualityError, DomainError
from ..thermal import (ConstrictionThermal, FilmParams, LossParams, llin_negative_somewhere,
                       quasiparticle_linewidth, resonance_vs_temperature)
from .lsq import solve

MIN_POINTS = {"omega_b": 4, "kappa_b": 2, "I_0": 3, "L_lin": 3}


@dataclass
class ThermalFit:
    kind: str
    params: Dict[str, float]
    stderr: Dict[str, float]
    rms: float
    masked: List[int] = field(default_factory=list)
    flags: Dict[str, bool] = field(default_factory=dict)
    covariance: Optional[np.ndarray] = None


def _check(kind, T, y):
    T = np.asarray(T, dtype=float)
    y = np.asarray(y, dtype=float)
    if T.shape != y.shape or T.ndim != 1:
        raise DataQualityError("temperature and data arrays must be 1-D and equal length")
    if T.size < MIN_POINTS[kind]:
        raise DataQualityError(f"{kind} fit needs at least {MIN_POINTS[kind]} points, got {T.size}")
    if not (np.all(np.isfinite(T)) and np.all(np.isfinite(y))):
        raise DataQualityError("non-finite values in thermal series")
    return T, y


def _fit_omega_b(T, y, film: FilmParams, seed):
    lam0 = seed.get("lambda0", film.lambda0)
    Tc = seed.get("T_c", film.T_c)
    w_low = y[np.argmin(T)]
    L_seed = float(film.L_g + 4e-7 * np.pi * film.g * lam0)
    C0 = seed.get("C_tot", 1.0 / (w_low ** 2 * L_seed))
    scale_w = float(np.mean(y))

    def model(p):
        f = FilmParams(lambda0=p[0] * 1e-9, T_c=p[1], d_Nb=film.d_Nb, L_g=film.L_g, g=film.g)
        return resonance_vs_temperature(T, f, p[2] * 1e-12)

    def resid(p):
        if p[1] <= np.max(T) or p[0] <= 0 or p[2] <= 0:
            return np.full(T.size, 1e3)
        return (model(p) - y) / scale_w * 1e6

    r = solve(resid, [lam0 * 1e9, Tc, C0 * 1e12], name="omega_b(T) fit")
    return ({"lambda0": r.x[0] * 1e-9, "T_c": r.x[1], "C_tot": r.x[2] * 1e-12},
            {"lambda0": r.stderr[0] * 1e-9, "T_c": r.stderr[1], "C_tot": r.stderr[2] * 1e-12},
            r.rms * scale_w * 1e-6, r.cov)


def _fit_kappa_b(T, y, film, C_tot, kappa_e):
    # linear in A_kappa: y - kappa_e = A * shape(T)
    _, shape = quasiparticle_linewidth(T, film, LossParams(A_kappa=1.0), C_tot=C_tot)
    shape = np.asarray(shape, dtype=float)
    z = y - kappa_e
    A = float(np.dot(shape, z) / np.dot(shape, shape))
    res = z - A * shape
    dof = max(T.size - 1, 1)
    s2 = float(np.dot(res, res)) / dof
    err = float(np.sqrt(s2 / np.dot(shape, shape)))
    return {"A_kappa": A}, {"A_kappa": err}, float(np.sqrt(np.mean(res ** 2))), np.array([[err ** 2]])


def _fit_I0(T, y, seed):
    scale = float(np.max(y))
    Tcc0 = seed.get("T_cc")
    if Tcc0 is None:
        # near T_cc, I_0^(2/3) is linear in T^2: extrapolate that line to zero
        z = (y / scale) ** (2.0 / 3.0)
        coef = np.polyfit(T ** 2, z, 1)
        Tcc0 = float(np.sqrt(-coef[1] / coef[0])) if coef[0] < 0 and coef[1] > 0 else 1.2 * np.max(T)
        Tcc0 = max(Tcc0, 1.001 * np.max(T))
    Ic0 = seed.get("I_c", float(np.max(y / (1 - (T / Tcc0) ** 2) ** 1.5)))

    def resid(p):
        Ic, Tcc = p[0] * scale, p[1]
        base = np.clip(1.0 - (T / Tcc) ** 2, 0.0, None)
        return (Ic * base ** 1.5 - y) / scale

    r = solve(resid, [Ic0 / scale, Tcc0], name="I_0(T) fit")
    return ({"I_c": r.x[0] * scale, "T_cc": r.x[1]},
            {"I_c": r.stderr[0] * scale, "T_cc": r.stderr[1]}, r.rms * scale, r.cov)


def _fit_llin(T, y, T_cc):
    u = 1.0 / (1.0 - (T / T_cc) ** 4)
    X = np.column_stack([np.ones_like(T), u])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = y - X @ coef
    dof = max(T.size - 2, 1)
    s2 = float(np.dot(res, res)) / dof
    cov = np.linalg.pinv(X.T @ X) * s2
    err = np.sqrt(np.clip(np.diag(cov), 0, None))
    return ({"L_off": float(coef[0]), "L_lin0": float(coef[1])},
            {"L_off": float(err[0]), "L_lin0": float(err[1])}, float(np.sqrt(np.mean(res ** 2))), cov)


def fit_thermal(kind, T, data, film: Optional[FilmParams] = None, C_tot=None, kappa_e=None,
                T_cc=None, seed=None) -> ThermalFit:
    """Fit one temperature series.

    ``omega_b``: free ``lambda0, T_c, C_tot`` with ``L_g, g, d_Nb`` from ``film``.
    ``kappa_b``: free ``A_kappa`` with ``film``, ``C_tot`` and ``kappa_e`` fixed.
    ``I_0``: free ``I_c, T_cc``; points at or above the fitted ``T_cc`` are
    masked and the fit repeated until the mask is stable.
    ``L_lin``: free ``L_off, L_lin0`` with ``T_cc`` fixed.
    """
    if kind not in MIN_POINTS:
        raise DomainError(f"unknown thermal series {kind!r}; choose from {sorted(MIN_POINTS)}")
    T, y = _check(kind, T, data)
    seed = dict(seed or {})
    masked: List[int] = []
    flags: Dict[str, bool] = {}
    if kind == "omega_b":
        if film is None:
            raise DomainError("omega_b fit needs the film geometry (L_g, g, d_Nb)")
        p, e, rms, cov = _fit_omega_b(T, y, film, seed)
    elif kind == "kappa_b":
        if film is None or C_tot is None or kappa_e is None:
            raise DomainError("kappa_b fit needs film, C_tot and kappa_e")
        p, e, rms, cov = _fit_kappa_b(T, y, film, C_tot, kappa_e)
    elif kind == "I_0":
        keep = np.ones(T.size, dtype=bool)
        if np.any(y <= 0):
            # a vanishing critical current is only consistent with T >= T_cc
            keep &= y > 0
        for _ in range(T.size):
            if keep.sum() < MIN_POINTS["I_0"]:
                raise DataQualityError("too few points below T_cc for an I_0(T) fit",
                                       masked=np.flatnonzero(~keep).tolist())
            p, e, rms, cov = _fit_I0(T[keep], y[keep], seed)
            above = keep & (T >= p["T_cc"])
            # leave-one-out test on the hottest point guards against one
            # outlier dragging T_cc upward
            hot = int(np.argmax(np.where(keep, T, -np.inf)))
            trial = keep.copy()
            trial[hot] = False
            if not above.any() and trial.sum() >= MIN_POINTS["I_0"]:
                p2, *_ = _fit_I0(T[trial], y[trial], seed)
                if T[hot] >= p2["T_cc"]:
                    above[hot] = True
            if not above.any():
                break
            keep &= ~above
        masked = np.flatnonzero(~keep).tolist()
        flags["masked-above-T_cc"] = bool(masked)
    else:
        if T_cc is None:
            raise DomainError("L_lin fit needs T_cc")
        if np.any(T >= T_cc):
            raise DomainError("L_lin data must lie below T_cc")
        p, e, rms, cov = _fit_llin(T, y, T_cc)
        p["T_cc"] = T_cc
        th = ConstrictionThermal(I_c=1.0, T_cc=T_cc, L_off=p["L_off"], L_lin0=p["L_lin0"])
        if llin_negative_somewhere(th):
            flags["negative-llin"] = True
            warnings.warn("fitted L_lin(T) turns negative inside [0, T_cc)", RuntimeWarning)
    return ThermalFit(kind=kind, params=p, stderr=e, rms=rms, masked=masked, flags=flags, covariance=cov)
