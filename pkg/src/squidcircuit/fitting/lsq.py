"""Thin wrapper around scipy's least-squares solvers used by every fit."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import least_squares

from ..errors import FitError


class ConditioningWarning(UserWarning):
    pass


@dataclass
class LsqResult:
    x: np.ndarray
    cov: np.ndarray
    stderr: np.ndarray
    residual: np.ndarray
    rms: float
    singular_values: np.ndarray
    nfev: int
    cost: float

    @property
    def condition(self) -> float:
        s = self.singular_values
        return float(s[0] / s[-1]) if s.size and s[-1] > 0 else float("inf")


def solve(fun: Callable, x0, jac="2-point", bounds=None, x_scale=1.0, method=None,
          max_nfev=2000, tol=1e-15, name="fit") -> LsqResult:
    """Damped Gauss-Newton fit with covariance from the final Jacobian.

    The covariance is ``(J^T J)^-1 s^2`` with ``s^2`` the residual variance per
    degree of freedom (zero for an exact fit).
    """
    x0 = np.asarray(x0, dtype=float)
    if method is None:
        method = "lm" if bounds is None else "trf"
    kw = dict(jac=jac, x_scale=x_scale, method=method, max_nfev=max_nfev,
              xtol=tol, ftol=tol, gtol=tol)
    if bounds is not None:
        kw["bounds"] = bounds
    try:
        with np.errstate(all="ignore"):
            res = least_squares(fun, x0, **kw)
    except Exception as exc:  # scipy raises plain ValueErrors on bad residuals
        raise FitError(f"{name}: least squares failed ({exc})", seed=x0.tolist()) from exc
    if not np.all(np.isfinite(res.fun)) or not np.all(np.isfinite(res.x)):
        raise FitError(f"{name}: non-finite residuals", seed=x0.tolist(), x=res.x.tolist())
    if res.status <= 0:
        raise FitError(f"{name}: did not converge ({res.message})", seed=x0.tolist(),
                       x=res.x.tolist(), nfev=res.nfev)
    J = np.atleast_2d(res.jac)
    sv = np.linalg.svd(J, compute_uv=False)
    m, p = J.shape
    dof = max(m - p, 1)
    s2 = float(np.sum(res.fun ** 2)) / dof
    # pseudo-inverse through the SVD keeps rank-deficient problems finite
    _, s, Vt = np.linalg.svd(J, full_matrices=False)
    cutoff = s.max() * max(m, p) * np.finfo(float).eps if s.size else 0.0
    inv = np.where(s > cutoff, 1.0 / np.where(s > 0, s, 1.0) ** 2, 0.0)
    cov = (Vt.T * inv) @ Vt * s2
    return LsqResult(x=res.x, cov=cov, stderr=np.sqrt(np.clip(np.diag(cov), 0, None)),
                     residual=res.fun, rms=float(np.sqrt(np.mean(res.fun ** 2))),
                     singular_values=sv, nfev=res.nfev, cost=float(res.cost))


def warn_conditioning(result: LsqResult, limit=1e10, what="fit"):
    if result.condition > limit:
        warnings.warn(f"{what} is poorly conditioned (singular values {result.singular_values})",
                      ConditioningWarning, stacklevel=3)
