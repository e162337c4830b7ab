"""Trace-level analysis chains built from the fitting routines."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .circuit import CircuitParams
from .errors import DataQualityError
from .fitting.background import BackgroundResult, correct_trace
from .fitting.dressed import fit_dressed_mode
from .fitting.kerr_fit import KappaEProfile, fit_kerr
from .fitting.resonance import ResonanceFit, fit_resonance
from .fitting.tuning import fit_tuning_curve
from .response import TwoToneObservation
from .trace import ComplexTrace


@dataclass
class ResonanceAnalysis:
    background: BackgroundResult
    fit: ResonanceFit


def analyze_resonance(raw: ComplexTrace, reference: Optional[ComplexTrace] = None,
                      mask_linewidths=5.0, correct=True) -> ResonanceAnalysis:
    """Background correction followed by the notch fit."""
    if correct:
        bg = correct_trace(raw, reference, mask_linewidths=mask_linewidths)
        if not bg.resonance_found:
            raise DataQualityError("no resonance found in trace")
        seed = {"omega_0": bg.resonance["omega_0"], "kappa_e": bg.resonance["kappa_e"],
                "kappa_i": bg.resonance["kappa"] - bg.resonance["kappa_e"]}
        fit = fit_resonance(bg.corrected, seed=seed)
        fit.theta = bg.model.theta
        fit.background = bg.model
    else:
        tr = raw.divide(reference) if reference is not None else raw
        from .fitting.background import BackgroundModel
        bg = BackgroundResult(tr, BackgroundModel(), True, 0.0)
        fit = fit_resonance(tr)
    return ResonanceAnalysis(bg, fit)


def map_ordered(func, items, jobs=1):
    """``[func(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(func, items))


def analyze_flux_sweep(traces: Sequence[ComplexTrace], coil, circuit: CircuitParams, omega_b,
                       L_loop=None, branches=None, correct=True, jobs=1, flux_units=False,
                       seed=None, mask_linewidths=5.0):
    """Resonance fit of every trace, then the flux-arch fit of the resulting omega_0."""
    fits = map_ordered(lambda t: analyze_resonance(t, correct=correct,
                                                   mask_linewidths=mask_linewidths).fit, traces, jobs)
    w0 = np.array([f.omega_0 for f in fits])
    flux = fit_tuning_curve(coil, w0, circuit, omega_b, L_loop=L_loop, branches=branches,
                            flux_units=flux_units, seed=seed)
    return fits, flux


def cut_guard_band(trace: ComplexTrace, omega_p, guard) -> ComplexTrace:
    """Remove samples within ``guard`` (rad/s) of the pump frequency."""
    keep = np.abs(trace.omega - omega_p) > guard
    if keep.sum() < 10:
        raise DataQualityError("guard band leaves too few samples")
    return trace.select(keep)


def dressed_observation(trace: ComplexTrace, P_p, omega_p, omega_0, guard, kappa_e=None,
                        correct=False, model="two-pole") -> TwoToneObservation:
    """Fit of a pump-dressed trace, reported as shift and broadening.

    ``model="notch"`` uses the single linear notch; ``"two-pole"`` also keeps
    the idler pole so its tail does not bias the linewidth.
    """
    tr = cut_guard_band(trace, omega_p, guard)
    if correct:
        tr = correct_trace(tr).corrected
    fit = fit_resonance(tr)
    if model == "two-pole":
        fit = fit_dressed_mode(tr, omega_p, seed=fit)
    elif model != "notch":
        raise ValueError(f"unknown dressed-mode model {model!r}")
    return TwoToneObservation(P_p=P_p, omega_p=omega_p, delta_omega0=fit.omega_0 - omega_0,
                              kappa_p=fit.kappa, kappa_e=kappa_e if kappa_e is not None else fit.kappa_e)


def analyze_two_tone(unpumped: ComplexTrace, traces: Sequence[ComplexTrace], powers_w, omega_p,
                     guard, profile: Optional[KappaEProfile] = None, power_uncertainty_db=1.0,
                     jobs=1, correct=False, model="two-pole"):
    """Unpumped reference fit, dressed-mode fits per power, then the Kerr fit.

    Returns ``(reference_fit, observations, kerr_fit)``.
    """
    ref = fit_resonance(correct_trace(unpumped).corrected if correct else unpumped)
    obs = map_ordered(lambda a: dressed_observation(a[0], a[1], omega_p, ref.omega_0, guard,
                                                    ref.kappa_e, correct, model),
                      list(zip(traces, powers_w)), jobs)
    kappa_0 = ref.kappa
    # the dressed linewidth may dip below the bare one only within fit noise
    tol = max(1e-9, 5.0 * np.sqrt(2.0) * ref.stderr["kappa"] / kappa_0)
    kf = fit_kerr(obs, kappa_0, omega_p - ref.omega_0, kappa_e=ref.kappa_e, profile=profile,
                  power_uncertainty_db=power_uncertainty_db, tol=tol)
    return ref, obs, kf
