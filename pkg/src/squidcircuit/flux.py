"""Flux quantization and flux tuning of the symmetric nanobridge SQUID.

Flux values are in units of the flux quantum throughout. Each flux arch is
labelled by an integer branch ``n``; on branch ``n`` the junction phase is
``pi*(phi_total - n)`` and the total flux obeys

    phi_total - n = (phi_ext - n) - (beta_L / 2) * sin(pi * (phi_total - n)),

which makes the tuning curve exactly periodic in ``phi_ext`` with period one.
A state is *stable* while ``cos(pi*(phi_total - n)) > 0``: the Josephson
inductance is positive and both SQUID potential curvatures are positive.
``flux_stable`` only requires the weaker ``d(phi_ext)/d(phi_total) > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .circuit import CircuitParams
from .constants import PHI0
from .errors import DomainError, SingularityError, SolverError

#: beta_L above which a single branch of the flux map folds over.
BETA_HYSTERETIC = 2.0 / math.pi
RESPONSIVITY_STEP = 1e-4
_COS_SINGULAR = 1e-9


@dataclass(frozen=True)
class SquidParams:
    """Junction and loop parameters of the SQUID.

    ``I_0`` is the critical current of one constriction, ``L_lin`` its linear
    series inductance and ``L_loop`` the total geometric plus kinetic loop
    inductance.
    """

    I_0: float
    L_lin: float = 0.0
    L_loop: float = 0.0

    def __post_init__(self):
        if not self.I_0 > 0:
            raise DomainError(f"I_0 must be positive, got {self.I_0}")
        if self.L_lin < 0 or self.L_loop < 0:
            raise DomainError("L_lin and L_loop must be non-negative")

    @classmethod
    def from_josephson_inductance(cls, L_J0, L_lin=0.0, L_loop=0.0) -> "SquidParams":
        if not L_J0 > 0:
            raise DomainError(f"L_J0 must be positive, got {L_J0}")
        return cls(I_0=PHI0 / (2 * math.pi * L_J0), L_lin=L_lin, L_loop=L_loop)

    @property
    def L_J0(self) -> float:
        return PHI0 / (2 * math.pi * self.I_0)

    @property
    def L_arm(self) -> float:
        """Linear inductance of one SQUID arm, ``L_loop/2 + L_lin``."""
        return 0.5 * self.L_loop + self.L_lin

    @property
    def beta_L(self) -> float:
        return (self.L_loop + 2 * self.L_lin) / (math.pi * self.L_J0)

    @property
    def hysteretic(self) -> bool:
        return self.beta_L > BETA_HYSTERETIC


def screening_parameter(I_0, L_loop, L_lin) -> float:
    """``beta_L = 2 I_0 (L_loop + 2 L_lin) / Phi0``."""
    if I_0 < 0 or L_loop < 0 or L_lin < 0:
        raise DomainError("I_0, L_loop and L_lin must be non-negative")
    return 2.0 * I_0 * (L_loop + 2.0 * L_lin) / PHI0


@dataclass(frozen=True)
class FluxPoint:
    phi_ext: float
    phi_total: float
    branch_index: int
    residual: float

    @property
    def reduced(self) -> float:
        """Flux relative to the centre of the branch, ``phi_total - n``."""
        return self.phi_total - self.branch_index

    @property
    def junction_phase(self) -> float:
        return math.pi * self.reduced

    @property
    def stable(self) -> bool:
        return math.cos(self.junction_phase) > 0.0


def flux_residual(phi_total, phi_ext, beta_L, branch=0):
    y = phi_total - branch
    return y - (phi_ext - branch) + 0.5 * beta_L * np.sin(np.pi * y)


def flux_slope(phi_total, beta_L, branch=0):
    """``d(phi_ext)/d(phi_total)`` on a branch."""
    return 1.0 + 0.5 * math.pi * beta_L * np.cos(np.pi * (phi_total - branch))


def _bracket_near(g, y0, step=0.01, limit=4.0):
    if g(y0) == 0.0:
        return y0, y0
    k = 1
    while k * step <= limit:
        for a, b in ((y0 - k * step, y0 - (k - 1) * step), (y0 + (k - 1) * step, y0 + k * step)):
            if g(a) * g(b) <= 0.0:
                return a, b
        k += 1
    return None


def _safe_newton(g, dg, lo, hi, y0, tol=1e-15, maxiter=200):
    """Newton iteration kept inside a sign-changing bracket, bisecting when it escapes."""
    glo = g(lo)
    y = min(max(y0, lo), hi)
    for _ in range(maxiter):
        gy = g(y)
        if gy == 0.0:
            return y
        if (gy < 0) == (glo < 0):
            lo, glo = y, gy
        else:
            hi = y
        d = dg(y)
        step_ok = d != 0.0
        if step_ok:
            y_new = y - gy / d
            step_ok = lo < y_new < hi
        if not step_ok:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= tol * max(1.0, abs(y_new)) or hi - lo <= tol:
            return y_new
        y = y_new
    raise SolverError("flux solver did not converge", bracket=(lo, hi), last=y)


def solve_total_flux(phi_ext, beta_L, seed=0.0, branch: Optional[int] = None) -> FluxPoint:
    """Total SQUID flux for external flux ``phi_ext`` (both in units of Phi0).

    The branch defaults to the integer nearest ``seed``; within that branch the
    root closest to ``seed`` is returned, which is what a continuation along a
    sweep needs when the map is multivalued.
    """
    if beta_L < 0:
        raise DomainError(f"beta_L must be non-negative, got {beta_L}")
    n = int(round(seed)) if branch is None else int(branch)
    x = phi_ext - n
    b = 0.5 * beta_L
    y0 = seed - n

    def g(y):
        return y + b * math.sin(math.pi * y) - x

    def dg(y):
        return 1.0 + math.pi * b * math.cos(math.pi * y)

    if beta_L <= BETA_HYSTERETIC:
        # monotone map: the global bracket always contains the single root
        lo, hi = x - b - 1e-12, x + b + 1e-12
    else:
        br = _bracket_near(g, y0)
        if br is None:
            raise SolverError("no root bracket found near seed", phi_ext=phi_ext,
                              beta_L=beta_L, seed=seed, branch=n)
        lo, hi = br
    y = _safe_newton(g, dg, lo, hi, y0)
    # one polishing step in case bisection terminated the loop
    d = dg(y)
    if d != 0.0:
        y -= g(y) / d
    res = g(y)
    if not abs(res) < 1e-10:
        raise SolverError("flux residual above tolerance", residual=res, phi_ext=phi_ext,
                          beta_L=beta_L, seed=seed, branch=n)
    return FluxPoint(phi_ext=float(phi_ext), phi_total=n + y, branch_index=n, residual=abs(res))


def enumerate_flux_roots(phi_ext, beta_L, branch=0, n_grid=20001, span=None):
    """All roots of the branch equation by sign changes on a grid plus bisection.

    Used as an independent oracle for :func:`solve_total_flux`; roots lie within
    ``beta_L/2`` of ``phi_ext - branch`` so the grid covers exactly that interval.
    """
    from scipy.optimize import brentq

    x = phi_ext - branch
    b = 0.5 * beta_L
    half = b + 1e-9 if span is None else span
    grid = np.linspace(x - half, x + half, n_grid)

    def g(y):
        return y + b * np.sin(np.pi * y) - x

    vals = g(grid)
    exact = np.flatnonzero(vals == 0.0)
    # compare signs rather than products, which underflow for tiny residuals
    sgn = np.sign(vals)
    change = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    roots = [grid[i] for i in exact]
    roots += [brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15) for i in change]
    return [branch + r for r in sorted(roots)]


def _check_circuit(omega_b, L):
    if not omega_b > 0 or not L > 0:
        raise DomainError("omega_b and L must be positive")


def resonance_from_phase(omega_b, L, L_lin, L_J0, junction_phase):
    """Flux-tuned resonance for a given junction phase ``pi*(phi_total - n)``.

    Returns NaN instead of a complex number when the total inductance turns
    negative (possible only where the Josephson inductance is negative).
    """
    c = math.cos(junction_phase)
    if abs(c) < _COS_SINGULAR:
        raise SingularityError(f"cos(junction phase) = {c:.3g}: Josephson inductance diverges")
    arg = 1.0 + (L_lin + L_J0 / c) / (2.0 * L)
    if arg <= 0:
        return math.nan
    return omega_b / math.sqrt(arg)


def resonance_at_flux(circuit: CircuitParams, squid: SquidParams, omega_b, phi_ext,
                      seed=None, branch: Optional[int] = None) -> float:
    """Resonance frequency at external flux ``phi_ext`` (rad/s).

    ``seed`` and ``branch`` select the flux state, defaulting to the arch
    centred on the integer nearest ``phi_ext``.
    """
    _check_circuit(omega_b, circuit.L)
    if seed is None:
        seed = float(round(phi_ext)) if branch is None else float(branch)
    pt = solve_total_flux(phi_ext, squid.beta_L, seed=seed, branch=branch)
    return resonance_from_phase(omega_b, circuit.L, squid.L_lin, squid.L_J0, pt.junction_phase)


@dataclass(frozen=True)
class TuningPoint:
    phi_ext: float
    omega_0: float
    responsivity: float
    phi_total: float
    branch_index: int
    stable: bool
    flux_stable: bool


@dataclass
class TuningCurve:
    points: List[TuningPoint]
    sweep_direction: str
    beta_L: float
    switches: List[float] = field(default_factory=list)

    @property
    def phi_ext(self) -> np.ndarray:
        return np.array([p.phi_ext for p in self.points])

    @property
    def omega_0(self) -> np.ndarray:
        return np.array([p.omega_0 for p in self.points])

    @property
    def responsivity(self) -> np.ndarray:
        return np.array([p.responsivity for p in self.points])

    @property
    def branches(self) -> np.ndarray:
        return np.array([p.branch_index for p in self.points], dtype=int)

    def tuning_range(self, window=None) -> float:
        """``max(omega_0) - min(omega_0)`` over stable points inside ``window``."""
        mask = np.array([p.stable for p in self.points])
        if window is not None:
            lo, hi = window
            mask &= (self.phi_ext >= lo) & (self.phi_ext <= hi)
        w = self.omega_0[mask]
        if w.size == 0:
            return 0.0
        return float(np.nanmax(w) - np.nanmin(w))

    def max_responsivity(self, window=None) -> float:
        mask = np.array([p.stable for p in self.points])
        if window is not None:
            lo, hi = window
            mask &= (self.phi_ext >= lo) & (self.phi_ext <= hi)
        r = np.abs(self.responsivity[mask])
        return float(np.nanmax(r)) if r.size else 0.0


def _responsivity(omega_b, L, squid, pt: FluxPoint, h=RESPONSIVITY_STEP):
    vals = []
    for dx in (h, -h):
        q = solve_total_flux(pt.phi_ext + dx, squid.beta_L, seed=pt.phi_total,
                             branch=pt.branch_index)
        vals.append(resonance_from_phase(omega_b, L, squid.L_lin, squid.L_J0, q.junction_phase))
    return (vals[0] - vals[1]) / (2 * h)


def tuning_curve(circuit: CircuitParams, squid: SquidParams, omega_b, flux_grid: Sequence[float],
                 sweep_direction="up", switching="auto", escape_cos=0.0) -> TuningCurve:
    """Branch-continued tuning curve along a monotone flux sweep.

    ``switching`` chooses how the state changes arch. ``"ground"`` always sits
    on the arch nearest ``phi_ext``; ``"metastable"`` stays on the current arch
    until ``cos(junction phase)`` drops to ``escape_cos`` (or the branch folds)
    and then moves one arch along the sweep. ``"auto"`` picks ground for
    non-hysteretic SQUIDs and metastable otherwise. Responsivity is
    ``d omega_0 / d phi_ext`` per flux quantum.
    """
    _check_circuit(omega_b, circuit.L)
    grid = np.asarray(flux_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("flux grid must be a non-empty 1-D sequence")
    if sweep_direction not in ("up", "down"):
        raise DomainError(f"sweep_direction must be 'up' or 'down', got {sweep_direction!r}")
    diffs = np.diff(grid)
    if sweep_direction == "up" and np.any(diffs <= 0) or sweep_direction == "down" and np.any(diffs >= 0):
        raise DomainError("flux grid must be strictly monotone in the sweep direction")
    if switching == "auto":
        switching = "metastable" if squid.hysteretic else "ground"
    if switching not in ("ground", "metastable"):
        raise DomainError(f"unknown switching policy {switching!r}")
    beta = squid.beta_L
    step = 1 if sweep_direction == "up" else -1

    points: List[TuningPoint] = []
    switches: List[float] = []
    prev: Optional[FluxPoint] = None
    for x in grid:
        try:
            if switching == "ground" or prev is None:
                n = int(round(x))
                seed = n + (prev.reduced if prev is not None and prev.branch_index == n else 0.0)
                pt = solve_total_flux(x, beta, seed=seed, branch=n)
                if prev is None and switching == "metastable":
                    pt = solve_total_flux(x, beta, seed=float(n), branch=n)
            else:
                pt = solve_total_flux(x, beta, seed=prev.phi_total, branch=prev.branch_index)
                jumped = (math.cos(pt.junction_phase) <= escape_cos
                          or flux_slope(pt.phi_total, beta, pt.branch_index) <= 0
                          or abs(pt.reduced - prev.reduced) > 0.25)
                if jumped:
                    n = prev.branch_index + step
                    pt = solve_total_flux(x, beta, seed=float(n), branch=n)
                    switches.append(float(x))
            if prev is not None and pt.branch_index != prev.branch_index and switching == "ground":
                switches.append(float(x))
            w0 = resonance_from_phase(omega_b, circuit.L, squid.L_lin, squid.L_J0, pt.junction_phase)
            resp = _responsivity(omega_b, circuit.L, squid, pt)
        except (SolverError, SingularityError) as exc:
            raise type(exc)(f"at phi_ext={x:.6g}: {exc}") from exc
        points.append(TuningPoint(
            phi_ext=float(x), omega_0=w0, responsivity=resp, phi_total=pt.phi_total,
            branch_index=pt.branch_index, stable=pt.stable,
            flux_stable=bool(flux_slope(pt.phi_total, beta, pt.branch_index) > 0),
        ))
        prev = pt
    return TuningCurve(points=points, sweep_direction=sweep_direction, beta_L=beta, switches=switches)


def stable_arch_halfwidth(beta_L, escape_cos=0.0) -> float:
    """External-flux half width of one stable arch.

    The arch ends where ``cos(pi*y)`` falls to ``escape_cos``, or at the fold of
    the flux map if that comes first.
    """
    b = 0.5 * beta_L
    y_esc = math.acos(escape_cos) / math.pi
    if math.pi * b > 1.0:
        y_fold = math.acos(-1.0 / (math.pi * b)) / math.pi
        y_esc = min(y_esc, y_fold)
    return y_esc + b * math.sin(math.pi * y_esc)


def cpr_curve(currents, I_0, L_lin, branch=0):
    """Phase across one constriction as a function of current.

    ``phase = (-1)**n arcsin(I/I_0) + 2 pi L_lin I / Phi0 + n pi`` for the piece
    ``n`` of the forward-skewed current-phase relation. Returns ``(phase, I)``.
    """
    I = np.asarray(currents, dtype=float)
    if not I_0 > 0:
        raise DomainError("I_0 must be positive")
    if np.any(np.abs(I) > I_0 * (1 + 1e-12)):
        raise DomainError("|I| must not exceed I_0")
    ratio = np.clip(I / I_0, -1.0, 1.0)
    phase = (-1) ** branch * np.arcsin(ratio) + 2 * np.pi * L_lin * I / PHI0 + branch * np.pi
    return phase, I


def cpr_skew(I_0, L_lin) -> float:
    """Phase of maximum supercurrent minus pi/2, i.e. ``L_lin / L_J0``."""
    return 2 * math.pi * L_lin * I_0 / PHI0


def arch_curve(circuit: CircuitParams, squid: SquidParams, omega_b, half_width=0.5,
               branch=0, n_points=2001) -> TuningCurve:
    """One flux arch evaluated on a fixed branch, without arch switching.

    Points outside the stable part of the branch are kept but flagged.
    """
    if not half_width > 0:
        raise DomainError("half_width must be positive")
    grid = branch + np.linspace(-half_width, half_width, n_points)
    beta = squid.beta_L
    points = []
    for x in grid:
        seeds = [branch + 0.0]
        if points:
            seeds.insert(0, points[-1].phi_total)
        pt = solve_total_flux(x, beta, seed=seeds[0], branch=branch)
        stable = pt.stable
        if stable:
            w0 = resonance_from_phase(omega_b, circuit.L, squid.L_lin, squid.L_J0, pt.junction_phase)
            resp = _responsivity(omega_b, circuit.L, squid, pt)
        else:
            w0 = resp = math.nan
        points.append(TuningPoint(
            phi_ext=float(x), omega_0=w0, responsivity=resp, phi_total=pt.phi_total,
            branch_index=branch, stable=stable,
            flux_stable=bool(flux_slope(pt.phi_total, beta, branch) > 0),
        ))
    return TuningCurve(points=points, sweep_direction="up", beta_L=beta)


def tuning_range(circuit: CircuitParams, squid: SquidParams, omega_b, half_width=0.5,
                 n_points=2001) -> float:
    """``omega_0(0) - min omega_0`` over ``|phi_ext| <= half_width`` on the central arch.

    The default half width of one half period suits non-hysteretic SQUIDs;
    for hysteretic ones pass the observed arch half width, since the stable
    branch extends until the Josephson inductance diverges.
    """
    return arch_curve(circuit, squid, omega_b, half_width, 0, n_points).tuning_range()
