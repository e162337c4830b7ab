"""Synthetic measurement sets mirroring the experiments, with truth records.

Every scenario draws its noise from one PCG64 stream seeded by the caller,
so a seed and a configuration fix every byte of the output. ``noise_snr`` is
the ratio of the resonance dip depth ``kappa_e/kappa`` to the rms of the
complex noise; ``None`` gives noiseless traces.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .calibration import NoiseCalibration, dbm_to_watt, synthetic_calibration_traces
from .config import RunConfig
from .constants import HBAR, TWO_PI
from .errors import ConfigError, RegimeError
from .fitting.background import BackgroundModel
from .fitting.resonance import notch
from .flux import resonance_at_flux, tuning_curve
from .io import sidecar_path, write_array_csv, write_json, write_trace
from .kerr import kerr_at_flux
from .response import CavityMode, pump_shift, steady_state, two_tone_s21
from .thermal import (bardeen_critical_current, llin_vs_temperature, quasiparticle_linewidth,
                      resonance_vs_temperature)
from .trace import ComplexTrace

SCENARIOS = ("resonance", "flux-sweep", "temperature-sweep", "two-tone", "calibration")
RNG_NAME = "numpy.random.PCG64"


@dataclass
class Scenario:
    name: str
    traces: List[Tuple[str, ComplexTrace, Dict[str, Any]]] = field(default_factory=list)
    tables: List[Tuple[str, Sequence[str], Sequence[np.ndarray], Optional[dict]]] = field(default_factory=list)
    truth: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def write(self, out_dir) -> str:
        """Write traces, tables and ``manifest.json``; returns the manifest path."""
        os.makedirs(out_dir, exist_ok=True)
        for name, tr, meta in self.traces:
            write_trace(os.path.join(out_dir, name), tr, meta)
        for name, cols, arrays, meta in self.tables:
            write_array_csv(os.path.join(out_dir, name), cols, arrays)
            if meta is not None:
                write_json(sidecar_path(os.path.join(out_dir, name)), meta)
        manifest = {
            "scenario": self.name,
            "traces": [t[0] for t in self.traces],
            "tables": [t[0] for t in self.tables],
            "truth": self.truth,
            "provenance": self.provenance,
        }
        path = os.path.join(out_dir, "manifest.json")
        write_json(path, manifest)
        return path


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _grid(omega_0, kappa, cfg: RunConfig):
    sim = cfg.simulation
    half = 0.5 * sim["span_linewidths"] * kappa
    return np.linspace(omega_0 - half, omega_0 + half, sim["n_points"])


def _background(omega, cfg: RunConfig) -> BackgroundModel:
    b = cfg.simulation.get("background")
    if not b:
        return BackgroundModel()
    c = 0.5 * (omega[0] + omega[-1])
    s = 0.5 * (omega[-1] - omega[0])
    a0, a1, a2 = b.get("a0", 1.0), b.get("a1", 0.0), b.get("a2", 0.0)
    p0, p1 = b.get("phi0", 0.0), b.get("phi1", 0.0)
    return BackgroundModel(theta=b.get("theta", 0.0), normalised=(c, s, a0, a1, a2, p0, p1))


def _noise(rng, n, depth, snr):
    if snr is None:
        return np.zeros(n, dtype=complex)
    sigma = depth / snr / math.sqrt(2.0)
    return sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _notch_trace(omega, omega_0, kappa, kappa_e, cfg, rng, background=True):
    ideal = notch(omega, omega_0, kappa, kappa_e)
    raw = _background(omega, cfg).apply(omega, ideal) if background else ideal
    return ComplexTrace(omega, raw + _noise(rng, omega.size, kappa_e / kappa,
                                            cfg.simulation["noise_snr"]))


def _provenance(cfg: RunConfig, seed) -> Dict[str, Any]:
    return {"seed": int(seed), "rng": RNG_NAME, "config_sha256": cfg.digest,
            "tool": "squidcircuit", "version": __version__}


def _hz(x):
    return float(x) / TWO_PI


def simulate_resonance(cfg: RunConfig, rng) -> Scenario:
    w0 = resonance_at_flux(cfg.circuit, cfg.squid, cfg.omega_b, 0.0)
    k, ke = cfg.kappa_i + cfg.kappa_e, cfg.kappa_e
    omega = _grid(w0, k, cfg)
    tr = _notch_trace(omega, w0, k, ke, cfg, rng)
    sc = Scenario("resonance")
    sc.traces.append(("resonance.csv", tr, {"T_s": cfg.temperature}))
    sc.truth = {"f0_hz": _hz(w0), "kappa_i_hz": _hz(cfg.kappa_i), "kappa_e_hz": _hz(ke)}
    return sc


def simulate_flux_sweep(cfg: RunConfig, rng) -> Scenario:
    fl = cfg.simulation["flux"]
    coil = np.linspace(fl["coil_min"], fl["coil_max"], fl["n_flux"])
    if fl["sweep_direction"] == "down":
        coil = coil[::-1]
    phi = (coil - fl["offset"]) / fl["period"]
    curve = tuning_curve(cfg.circuit, cfg.squid, cfg.omega_b, phi, sweep_direction=fl["sweep_direction"])
    k, ke = cfg.kappa_i + cfg.kappa_e, cfg.kappa_e
    span = 0.5 * cfg.simulation["span_linewidths"] * k
    sc = Scenario("flux-sweep")
    for i, (c, w0) in enumerate(zip(coil, curve.omega_0)):
        omega = np.linspace(w0 - span, w0 + span, cfg.simulation["n_points"])
        tr = _notch_trace(omega, w0, k, ke, cfg, rng)
        sc.traces.append((f"flux_{i:03d}.csv", tr, {"coil_current": float(c), "T_s": cfg.temperature}))
    sq = cfg.squid
    sc.truth = {
        "I_0": sq.I_0, "L_J0": sq.L_J0, "L_lin": sq.L_lin, "L_loop": sq.L_loop, "beta_L": sq.beta_L,
        "period": fl["period"], "offset": fl["offset"], "branches": curve.branches.tolist(),
        "f0_hz": (curve.omega_0 / TWO_PI).tolist(), "coil_current": coil.tolist(),
        "kappa_i_hz": _hz(cfg.kappa_i), "kappa_e_hz": _hz(ke), "f_b_hz": _hz(cfg.omega_b),
    }
    sc.tables.append(("tuning_truth.csv", ("coil_current", "phi_ext", "f0_hz", "responsivity_hz_per_phi0"),
                      (coil, phi, curve.omega_0 / TWO_PI, curve.responsivity / TWO_PI), None))
    return sc


def _temperatures(cfg: RunConfig):
    T = cfg.simulation.get("temperatures")
    if T is None:
        lo, hi = cfg.device.measured_T
        T = np.linspace(lo, hi, 6)
    return np.asarray(T, dtype=float)


def simulate_temperature_sweep(cfg: RunConfig, rng) -> Scenario:
    """Pre-cut resonator traces per temperature plus the constriction series.

    The ``I_0`` and ``L_lin`` series stand in for per-temperature flux fits.
    """
    dev = cfg.device
    T = _temperatures(cfg)
    th = cfg.thermal
    if np.any(T >= th.T_cc):
        raise ConfigError("temperatures must stay below T_cc", path="$.simulation.temperatures")
    wb = resonance_vs_temperature(T, dev.film, dev.C_tot)
    kb, _ = quasiparticle_linewidth(T, dev.film, cfg.loss, C_tot=dev.C_tot)
    ke = cfg.loss.kappa_e_const
    sc = Scenario("temperature-sweep")
    for i, (t, w, k) in enumerate(zip(T, wb, kb)):
        omega = _grid(w, k, cfg)
        tr = _notch_trace(omega, w, k, ke, cfg, rng)
        sc.traces.append((f"precut_{i:03d}.csv", tr, {"T_s": float(t)}))
    I0 = bardeen_critical_current(T, th.I_c, th.T_cc)
    Ll = llin_vs_temperature(T, th)
    sc.tables.append(("thermal_series.csv", ("T_s", "I_0", "L_lin"), (T, I0, Ll), None))
    sc.truth = {
        "device": dev.name, "lambda0": dev.film.lambda0, "T_c": dev.film.T_c, "C_tot": dev.C_tot,
        "A_kappa": cfg.loss.A_kappa, "kappa_e_hz": _hz(ke), "I_c": th.I_c, "T_cc": th.T_cc,
        "L_off": th.L_off, "L_lin0": th.L_lin0, "beta_L_zero": dev.beta_L_zero,
        "f_b_hz": (wb / TWO_PI).tolist(), "kappa_b_hz": (kb / TWO_PI).tolist(),
    }
    return sc


def pump_power_range(mode: CavityMode, omega_p, max_shift_linewidths=1.0):
    """Largest pump power (W) whose linear photon estimate shifts the mode by the given amount."""
    if mode.K == 0:
        raise RegimeError("pump range needs a nonzero Kerr constant")
    n_max = max_shift_linewidths * mode.kappa / (2.0 * abs(mode.K))
    D = omega_p - mode.omega_c
    return n_max * HBAR * omega_p * (D * D + 0.25 * mode.kappa ** 2) / (0.5 * mode.kappa_e)


def simulate_two_tone(cfg: RunConfig, rng) -> Scenario:
    tt = cfg.simulation["two_tone"]
    cal = cfg.calibration
    att = cal.get("attenuation_db", cfg.simulation["calibration"]["attenuation_db"])
    extra = cal["two_tone_extra_loss_db"]
    snr = cfg.simulation["noise_snr"]
    k, ke = cfg.kappa_i + cfg.kappa_e, cfg.kappa_e
    sc = Scenario("two-tone")
    truth_points = []
    for j, x in enumerate(tt["flux_points"]):
        wc = resonance_at_flux(cfg.circuit, cfg.squid, cfg.omega_b, x)
        K = cfg.K if cfg.K is not None else kerr_at_flux(cfg.circuit, cfg.squid, x).K
        mode = CavityMode(wc, k, ke, K, cfg.kappa_nl)
        wp = wc + tt["pump_detuning_linewidths"] * k
        if "P_max_dbm" in tt:
            Pw = dbm_to_watt(np.linspace(tt["P_min_dbm"], tt["P_max_dbm"], tt["n_powers"]))
        else:
            P_hi = pump_power_range(mode, wp, tt.get("max_shift_linewidths", 1.0))
            Pw = np.geomspace(P_hi / 200.0, P_hi, tt["n_powers"])
        omega = _grid(wc, k, cfg)
        omega = np.linspace(omega[0], max(omega[-1], wp + 2 * k), omega.size)
        base = ComplexTrace(omega, notch(omega, wc, k, ke) + _noise(rng, omega.size, ke / k, snr))
        sc.traces.append((f"flux{j}_unpumped.csv", base, {"flux_index": j, "phi_ext": x}))
        rows = []
        for i, P in enumerate(Pw):
            st = steady_state(mode, wp - wc, P / (HBAR * wp))
            s = two_tone_s21(mode, wp, st.selected, omega)
            tr = ComplexTrace(omega, s + _noise(rng, omega.size, ke / k, snr))
            p_dbm = float(10.0 * np.log10(P / 1e-3))
            meta = {"flux_index": j, "phi_ext": x, "pump_dbm_on_chip": p_dbm,
                    "pump_dbm_generator": p_dbm - att + extra, "pump_freq_hz": _hz(wp),
                    "attenuation_db": att, "extra_loss_db": extra}
            sc.traces.append((f"flux{j}_power{i:02d}.csv", tr, meta))
            shift, kp = pump_shift(mode, wp - wc, st.selected)
            rows.append({"P_w": float(P), "n_c": st.selected, "delta_f0_hz": _hz(shift),
                         "kappa_p_hz": _hz(kp)})
        truth_points.append({"phi_ext": x, "f_c_hz": _hz(wc), "f_p_hz": _hz(wp), "K_hz": _hz(K),
                             "kappa_nl_hz": _hz(cfg.kappa_nl), "kappa_hz": _hz(k), "kappa_e_hz": _hz(ke),
                             "powers": rows})
    sc.truth = {"flux_points": truth_points, "attenuation_db": att, "extra_loss_db": extra}
    return sc


def simulate_calibration(cfg: RunConfig, rng) -> Scenario:
    sc_cfg = cfg.simulation["calibration"]
    cal = cfg.calibration
    f = np.linspace(sc_cfg["f_min_hz"], sc_cfg["f_max_hz"], sc_cfg["n_points"])
    nc = NoiseCalibration(T_s=cal["T_s"], f_IFBW=cal["f_IFBW_hz"],
                          post_sample_loss=cal["post_sample_loss_db"])
    tr = synthetic_calibration_traces(TWO_PI * f, sc_cfg["attenuation_db"], cal["output_power_dbm"], nc,
                                      n_repeats=sc_cfg["n_repeats"], rng=rng)
    sc = Scenario("calibration")
    n_rep = tr.shape[0]
    cols = ["freq_hz"] + [f"re_{i:03d}" for i in range(n_rep)] + [f"im_{i:03d}" for i in range(n_rep)]
    meta = {"T_s": cal["T_s"], "f_IFBW_hz": cal["f_IFBW_hz"], "output_power_dbm": cal["output_power_dbm"],
            "post_sample_loss_db": cal["post_sample_loss_db"], "n_repeats": n_rep}
    sc.tables.append(("calibration_traces.csv", cols, [f] + list(tr.real) + list(tr.imag), meta))
    sc.truth = dict(meta, attenuation_db=sc_cfg["attenuation_db"])
    return sc


_BUILDERS = {
    "resonance": simulate_resonance,
    "flux-sweep": simulate_flux_sweep,
    "temperature-sweep": simulate_temperature_sweep,
    "two-tone": simulate_two_tone,
    "calibration": simulate_calibration,
}


def simulate(cfg: RunConfig, scenario: str, seed: int = 0) -> Scenario:
    if scenario not in _BUILDERS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {list(SCENARIOS)}", path="scenario")
    sc = _BUILDERS[scenario](cfg, make_rng(seed))
    sc.provenance = _provenance(cfg, seed)
    return sc
