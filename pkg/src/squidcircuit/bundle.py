"""File-level pipelines: read inputs, run the analysis chain, build a result bundle.

A bundle is a JSON document with the fitted numbers, their uncertainties,
plot-ready tables for the figures the pipeline can feed, and provenance
(input digests, configuration digest, tool version). Inputs are referred to
by file name only so bundles do not depend on where the data live.
"""

from __future__ import annotations

import math
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from . import __version__
from .calibration import (AttenuationProfile, NoiseCalibration, attenuation_profile, dbm_to_watt,
                          on_chip_power)
from .config import RunConfig
from .constants import PHI0, TWO_PI
from .errors import DataQualityError
from .fitting.resonance import notch
from .fitting.thermal_fit import fit_thermal
from .fitting.tuning import arch_model
from .flux import SquidParams, cpr_curve, tuning_curve
from .io import (TRACE_HEADER, read_array_csv, read_curves, read_json, read_trace, sha256_file,
                 write_array_csv)
from .kerr import kerr_at_flux, kerr_simplified
from .pipeline import analyze_flux_sweep, analyze_resonance, analyze_two_tone, map_ordered
from .thermal import (ConstrictionThermal, FilmParams, LossParams, bardeen_critical_current,
                      beta_vs_temperature, inductance_at, linear_fraction, llin_vs_temperature,
                      quasiparticle_linewidth, resonance_vs_temperature, sweetspot_vs_temperature)

PIPELINES = ("resonance", "flux", "thermal", "kerr")
BUNDLE_FORMAT = "squidcircuit-bundle/1"

BUNDLE_SCHEMA = {
    "type": "object",
    "required": ["format", "pipeline", "results", "plots", "provenance"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": BUNDLE_FORMAT},
        "pipeline": {"enum": list(PIPELINES) + ["calibration"]},
        "results": {"type": "object"},
        "plots": {
            "type": "object",
            "additionalProperties": {
                "type": "object", "required": ["columns", "rows"], "additionalProperties": False,
                "properties": {"columns": {"type": "array", "items": {"type": "string"}},
                               "rows": {"type": "array", "items": {"type": "array"}}},
            },
        },
        "provenance": {
            "type": "object", "required": ["inputs", "config_sha256", "version"],
            "properties": {"inputs": {"type": "array"}, "config_sha256": {"type": "string"},
                           "version": {"type": "string"}},
        },
        "artifacts": {"type": "object"},
    },
}


def _hz(x):
    return float(x) / TWO_PI


def _table(columns, *arrays, labels=None):
    rows = []
    cols = list(columns)
    for i, vals in enumerate(zip(*arrays)):
        r = [float(v) if v is not None else None for v in vals]
        if labels is not None:
            r = [labels[i]] + r
        rows.append(r)
    return {"columns": cols, "rows": rows}


def _concat(*tables):
    out = {"columns": tables[0]["columns"], "rows": []}
    for t in tables:
        out["rows"].extend(t["rows"])
    return out


def expand_inputs(paths: Sequence[str]) -> Tuple[List[str], Optional[Dict[str, Any]]]:
    """Input files in order; a ``manifest.json`` expands to the files it lists."""
    files: List[str] = []
    manifest = None
    for p in paths:
        if os.path.basename(p).endswith(".json"):
            m = read_json(p)
            if "traces" not in m:
                raise DataQualityError(f"{p}: not a manifest (no 'traces' key)")
            base = os.path.dirname(p)
            files += [os.path.join(base, f) for f in list(m.get("traces", [])) + list(m.get("tables", []))]
            manifest = m
        else:
            files.append(p)
    for f in files:
        if not os.path.exists(f):
            raise DataQualityError(f"input file not found: {f}")
    return files, manifest


def _is_trace(path) -> bool:
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.readline().strip()
    return tuple(c.strip() for c in head.split(",")) == TRACE_HEADER


def _provenance(files, cfg: RunConfig, seed=None):
    inputs = []
    for f in files:
        inputs.append({"file": os.path.basename(f), "sha256": sha256_file(f)})
        side = os.path.splitext(f)[0] + ".json"
        if os.path.exists(side) and side not in files:
            inputs.append({"file": os.path.basename(side), "sha256": sha256_file(side)})
    out = {"inputs": inputs, "config_sha256": cfg.digest, "version": __version__, "tool": "squidcircuit"}
    if seed is not None:
        out["seed"] = int(seed)
    return out


def _require(meta, key, path):
    if key not in meta or meta[key] is None:
        raise DataQualityError(f"{os.path.basename(path)}: metadata key {key!r} is missing")
    return meta[key]


def _bundle(pipeline, results, plots, files, cfg, seed=None, artifacts=None):
    b = {"format": BUNDLE_FORMAT, "pipeline": pipeline, "results": results, "plots": plots,
         "provenance": _provenance(files, cfg, seed)}
    if artifacts:
        b["artifacts"] = artifacts
    return b


def validate_bundle(bundle) -> None:
    try:
        jsonschema.validate(bundle, BUNDLE_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise DataQualityError(f"bundle schema violation at {path}: {exc.message}") from exc


def _resonance_record(name, fit):
    e = fit.stderr
    return {
        "file": name, "f0_hz": _hz(fit.omega_0), "kappa_hz": _hz(fit.kappa),
        "kappa_i_hz": _hz(fit.kappa_i), "kappa_e_hz": _hz(fit.kappa_e), "theta": float(fit.theta),
        "stderr": {"f0_hz": _hz(e.get("omega_0", math.nan)), "kappa_i_hz": _hz(e.get("kappa_i", math.nan)),
                   "kappa_e_hz": _hz(e.get("kappa_e", math.nan))},
        "rms": float(fit.rms),
    }


def run_resonance(paths, cfg: RunConfig, jobs=1, seed=None):
    files, _ = expand_inputs(paths)
    files = [f for f in files if _is_trace(f)]
    if not files:
        raise DataQualityError("no trace files among the inputs")
    pipe = cfg.pipeline
    loaded = [read_trace(f) for f in files]
    analyses = map_ordered(lambda tm: analyze_resonance(tm[0], mask_linewidths=pipe["mask_linewidths"],
                                                        correct=pipe["background_correction"]),
                           loaded, jobs)
    records, plot, corrected = [], [], {}
    for f, (tr, _), an in zip(files, loaded, analyses):
        name = os.path.basename(f)
        records.append(_resonance_record(name, an.fit))
        model = notch(tr.omega, an.fit.omega_0, an.fit.kappa, an.fit.kappa_e)
        plot.append(_table(["file", "freq_hz", "abs_s21_raw", "abs_s21_corrected", "abs_s21_fit"],
                           tr.freq_hz, np.abs(tr.s21), np.abs(an.background.corrected.s21), np.abs(model),
                           labels=[name] * tr.omega.size))
        corrected[name] = an.background.corrected
    results = {"resonances": records}
    return _bundle("resonance", results, {"1f": _concat(*plot)}, files, cfg, seed), corrected


def _flux_inputs(files):
    traces, coil, temps = [], [], []
    for f in files:
        if not _is_trace(f):
            continue
        tr, meta = read_trace(f)
        traces.append(tr)
        coil.append(float(_require(meta, "coil_current", f)))
        temps.append(meta.get("T_s"))
    if not traces:
        raise DataQualityError("no trace files among the inputs")
    return traces, np.array(coil), temps


def run_flux(paths, cfg: RunConfig, jobs=1, seed=None):
    files, _ = expand_inputs(paths)
    traces, coil, temps = _flux_inputs(files)
    pipe = cfg.pipeline
    branches = pipe.get("branches") if pipe["branch_policy"] == "labels" else None
    if pipe["branch_policy"] == "labels" and (branches is None or len(branches) != len(traces)):
        raise DataQualityError("branch_policy 'labels' needs one branch label per trace")
    circuit = cfg.circuit
    fseed = {k: pipe[k + "_seed"] for k in ("period", "offset") if k + "_seed" in pipe}
    fits, ff = analyze_flux_sweep(traces, coil, circuit, cfg.omega_b, L_loop=circuit.L_loop,
                                  branches=branches, correct=pipe["background_correction"], jobs=jobs,
                                  flux_units=pipe["flux_units"], mask_linewidths=pipe["mask_linewidths"],
                                  seed=fseed or None)
    w0 = np.array([f.omega_0 for f in fits])
    phi = ff.phi_ext(coil)
    model = arch_model(phi, ff.branches, ff.L_J0, ff.L_lin, ff.L_loop, circuit.L, cfg.omega_b)
    squid = SquidParams.from_josephson_inductance(ff.L_J0, ff.L_lin, ff.L_loop)
    # dense fitted curve in the direction of the recorded sweep
    up = bool(np.all(np.diff(phi) > 0))
    grid = np.linspace(phi.min(), phi.max(), 401)
    curve = tuning_curve(circuit, squid, cfg.omega_b, grid if up else grid[::-1],
                         sweep_direction="up" if up else "down")
    T_label = temps[0] if temps[0] is not None else cfg.temperature
    names = [os.path.basename(f) for f in files if _is_trace(f)]
    results = {
        "I_0": ff.I_0, "L_J0": ff.L_J0, "L_lin": ff.L_lin, "L_loop": ff.L_loop, "beta_L": ff.beta_L,
        "period": ff.period, "offset": ff.offset, "branches": ff.branches.tolist(),
        "stderr": ff.stderr, "rms_hz": _hz(ff.rms), "T_s": T_label,
        "points": [dict(_resonance_record(n, f), coil_current=float(c), phi_ext=float(p))
                   for n, f, c, p in zip(names, fits, coil, phi)],
    }
    k_i = np.array([f.kappa_i for f in fits])
    plots = {
        "2c": _table(["coil_current", "phi_ext", "f0_hz_data", "f0_hz_fit"], coil, phi, w0 / TWO_PI,
                     model / TWO_PI),
        "3a": _table(["T_s", "phi_ext", "f0_hz_data", "f0_hz_fit"], [T_label] * phi.size, phi, w0 / TWO_PI,
                     model / TWO_PI),
        "S11": _table(["T_s", "phi_ext", "responsivity_hz_per_phi0", "f0_hz_fit"], [T_label] * grid.size,
                      curve.phi_ext, np.abs(curve.responsivity) / TWO_PI, curve.omega_0 / TWO_PI),
        "S12": _table(["T_s", "phi_ext", "kappa_i_hz"], [T_label] * phi.size, phi, k_i / TWO_PI),
    }
    return _bundle("flux", results, plots, files, cfg, seed), None


def _thermal_inputs(files):
    traces, temps, series = [], [], None
    for f in files:
        if _is_trace(f):
            tr, meta = read_trace(f)
            traces.append((os.path.basename(f), tr))
            temps.append(float(_require(meta, "T_s", f)))
        else:
            cols, _ = read_curves(f)
            if set(("T_s", "I_0", "L_lin")) <= set(cols):
                series = read_array_csv(f)
    return traces, np.array(temps), series


def run_thermal(paths, cfg: RunConfig, jobs=1, seed=None):
    """Pre-cut resonances give omega_b(T) and kappa_b(T); the constriction series gives I_0(T), L_lin(T)."""
    files, _ = expand_inputs(paths)
    traces, T, series = _thermal_inputs(files)
    if len(traces) == 0 and series is None:
        raise DataQualityError("thermal pipeline needs pre-cut traces and/or a T_s,I_0,L_lin series")
    film = cfg.film
    results: Dict[str, Any] = {}
    plots: Dict[str, Any] = {}
    T_dense_hi = None
    if traces:
        pipe = cfg.pipeline
        fits = map_ordered(lambda nt: analyze_resonance(nt[1], mask_linewidths=pipe["mask_linewidths"],
                                                        correct=pipe["background_correction"]).fit,
                           traces, jobs)
        wb = np.array([f.omega_0 for f in fits])
        kb = np.array([f.kappa for f in fits])
        ke = float(np.mean([f.kappa_e for f in fits]))
        fo = fit_thermal("omega_b", T, wb, film=film)
        film_fit = FilmParams(lambda0=fo.params["lambda0"], T_c=fo.params["T_c"], d_Nb=film.d_Nb,
                              L_g=film.L_g, g=film.g, L_loop_g=film.L_loop_g, g_loop=film.g_loop)
        C_fit = fo.params["C_tot"]
        fk = fit_thermal("kappa_b", T, kb, film=film_fit, C_tot=C_fit, kappa_e=ke)
        Td = np.linspace(0.0, max(T.max(), 0.95 * film_fit.T_c), 201)
        Td = Td[Td < film_fit.T_c]
        wb_fit = resonance_vs_temperature(T, film_fit, C_fit)
        kb_fit, _ = quasiparticle_linewidth(Td, film_fit, LossParams(fk.params["A_kappa"], ke), C_tot=C_fit)
        results.update({
            "lambda0": fo.params["lambda0"], "T_c": fo.params["T_c"], "C_tot": C_fit,
            "A_kappa": fk.params["A_kappa"], "kappa_e_hz": _hz(ke),
            "stderr": {**fo.stderr, **fk.stderr},
            "precut": [dict(_resonance_record(n, f), T_s=float(t)) for (n, _), f, t in zip(traces, fits, T)],
            "L_2p5K": float(inductance_at(2.5, film_fit)) if film_fit.T_c > 2.5 else None,
        })
        plots["S5"] = _concat(
            _table(["kind", "T_s", "kappa_b_hz"], T, kb / TWO_PI, labels=["data"] * T.size),
            _table(["kind", "T_s", "kappa_b_hz"], Td, np.asarray(kb_fit) / TWO_PI, labels=["fit"] * Td.size))
        results["f_b_fit_hz"] = (wb_fit / TWO_PI).tolist()
        T_dense_hi = film_fit
    if series is not None:
        Ts, I0, Ll = series["T_s"], series["I_0"], series["L_lin"]
        fi = fit_thermal("I_0", Ts, I0)
        T_cc = fi.params["T_cc"]
        keep = np.ones(Ts.size, dtype=bool)
        keep[fi.masked] = False
        fl = fit_thermal("L_lin", Ts[keep], Ll[keep], T_cc=T_cc)
        th = ConstrictionThermal(I_c=fi.params["I_c"], T_cc=T_cc, L_off=fl.params["L_off"],
                                 L_lin0=fl.params["L_lin0"])
        film_beta = T_dense_hi if T_dense_hi is not None else film
        Td = np.linspace(0.0, 0.999 * T_cc, 201)
        L_loop_T = inductance_at(Ts[keep], film_beta, loop=True)
        beta_data = (L_loop_T + 2 * Ll[keep]) * 2 * I0[keep] / PHI0
        beta_fit = beta_vs_temperature(Td, film_beta, th)
        beta0 = float(beta_vs_temperature(np.array([0.0]), film_beta, th)[0])
        results.update({
            "I_c": th.I_c, "T_cc": T_cc, "L_off": th.L_off, "L_lin0": th.L_lin0,
            "beta_L_zero": beta0, "masked_T": Ts[~keep].tolist(),
            "flags": {**fi.flags, **fl.flags, "model-extrapolation": True},
            "series_stderr": {**fi.stderr, **fl.stderr},
        })
        I_fit = bardeen_critical_current(Td, th.I_c, th.T_cc)
        L_fit = llin_vs_temperature(Td, th)
        plots["3b"] = _concat(
            _table(["kind", "T_s", "I_0"], Ts, I0, labels=["data"] * Ts.size),
            _table(["kind", "T_s", "I_0"], Td, I_fit, labels=["fit"] * Td.size))
        plots["3c"] = _concat(
            _table(["kind", "T_s", "beta_L"], Ts[keep], beta_data, labels=["data"] * int(keep.sum())),
            _table(["kind", "T_s", "beta_L"], Td, beta_fit, labels=["fit"] * Td.size))
        plots["S9"] = _concat(
            _table(["kind", "T_s", "L_lin", "L_lin_over_L_c"], Ts, Ll, Ll / (Ll + PHI0 / (TWO_PI * I0)),
                   labels=["data"] * Ts.size),
            _table(["kind", "T_s", "L_lin", "L_lin_over_L_c"], Td, L_fit, linear_fraction(Td, th),
                   labels=["fit"] * Td.size))
        cpr_rows = []
        for t, i0, ll in zip(Ts[keep], I0[keep], Ll[keep]):
            I = np.linspace(-i0, i0, 201)
            for n in (0, 1):
                ph, cur = cpr_curve(I, i0, ll, branch=n)
                cpr_rows.append(_table(["T_s", "branch", "phase", "current"], [t] * I.size, [n] * I.size,
                                       ph, cur))
        plots["S10"] = _concat(*cpr_rows)
        if traces:
            C_tot = results["C_tot"]
            pred = sweetspot_vs_temperature(Td, film_beta, th, C_tot, measured_range=(Ts.min(), Ts.max()))
            w_data = sweetspot_vs_temperature(Ts[keep], film_beta, th, C_tot).values
            plots["S8"] = _concat(
                _table(["kind", "T_s", "f0_sweetspot_hz"], Ts[keep], w_data / TWO_PI,
                       labels=["series"] * int(keep.sum())),
                _table(["kind", "T_s", "f0_sweetspot_hz"], Td, pred.values / TWO_PI, labels=["fit"] * Td.size))
    return _bundle("thermal", results, plots, files, cfg, seed), None


def _kerr_groups(files):
    groups: Dict[int, Dict[str, Any]] = {}
    for f in files:
        if not _is_trace(f):
            continue
        tr, meta = read_trace(f)
        j = int(_require(meta, "flux_index", f))
        g = groups.setdefault(j, {"unpumped": None, "pumped": [], "phi_ext": meta.get("phi_ext")})
        if "pump_dbm_generator" in meta or "pump_dbm_on_chip" in meta:
            g["pumped"].append((f, tr, meta))
        else:
            g["unpumped"] = (f, tr, meta)
    if not groups:
        raise DataQualityError("no trace files among the inputs")
    return [groups[k] for k in sorted(groups)]


def run_kerr(paths, cfg: RunConfig, jobs=1, seed=None):
    """Per flux point: unpumped reference, dressed-mode fits, K and kappa_nl with bounds."""
    files, _ = expand_inputs(paths)
    cal = cfg.calibration
    pipe = cfg.pipeline
    groups = _kerr_groups(files)
    points, plots_b, plots_c, nc_rows = [], [], [], []
    refs = []
    for g in groups:
        if g["unpumped"] is None:
            raise DataQualityError(f"flux point {g['phi_ext']}: no unpumped reference trace")
        if len(g["pumped"]) == 0:
            raise DataQualityError(f"flux point {g['phi_ext']}: no pumped traces")
    for g in groups:
        f_ref, un, _ = g["unpumped"]
        powers, wps, traces = [], [], []
        for f, tr, meta in g["pumped"]:
            if "pump_dbm_generator" in meta:
                P_dbm, _, _ = on_chip_power(meta["pump_dbm_generator"], cal["attenuation_db"],
                                            cal["two_tone_extra_loss_db"], cal["power_uncertainty_db"])
            else:
                P_dbm = meta["pump_dbm_on_chip"]
            powers.append(float(dbm_to_watt(P_dbm)))
            wps.append(TWO_PI * float(_require(meta, "pump_freq_hz", f)))
            traces.append(tr)
        if np.ptp(wps) > 0:
            raise DataQualityError("pump frequency must be fixed within one power series")
        omega_p = wps[0]
        refs.append((g, un))
        ref0 = analyze_resonance(un, correct=False).fit
        guard = pipe["guard_band_linewidths"] * ref0.kappa
        ref, obs, kf = analyze_two_tone(un, traces, powers, omega_p, guard,
                                        power_uncertainty_db=cal["power_uncertainty_db"], jobs=jobs,
                                        correct=False, model=pipe["dressed_model"])
        x = g["phi_ext"]
        rec = {"phi_ext": x, "f0_hz": _hz(ref.omega_0), "kappa_0_hz": _hz(ref.kappa),
               "kappa_e_hz": _hz(ref.kappa_e), "f_p_hz": _hz(omega_p),
               "K_hz": _hz(kf.K), "K_plus_hz": _hz(kf.K_plus), "K_minus_hz": _hz(kf.K_minus),
               "K_stderr_hz": _hz(kf.K_stderr), "kappa_nl_hz": _hz(kf.kappa_nl),
               "kappa_nl_plus_hz": _hz(kf.kappa_nl_plus), "kappa_nl_minus_hz": _hz(kf.kappa_nl_minus),
               "n_c": kf.n_c.tolist(), "n_c_plus": kf.n_c_plus.tolist(), "n_c_minus": kf.n_c_minus.tolist(),
               "P_p_w": powers}
        points.append(rec)
        shift = np.array([o.delta_omega0 for o in obs])
        kp = np.array([o.kappa_p for o in obs])
        Dp = omega_p - ref.omega_0
        n = kf.n_c
        Kn = kf.K * n
        R = np.clip((Dp - Kn) * (Dp - 3 * Kn) - 0.25 * (kf.kappa_nl * n) ** 2, 0.0, None)
        lab = [x] * n.size
        plots_b.append(_table(["phi_ext", "n_c", "n_c_plus", "n_c_minus", "delta_f0_hz_data", "delta_f0_hz_fit"],
                              lab, n, kf.n_c_plus, kf.n_c_minus, shift / TWO_PI, (Dp - np.sqrt(R)) / TWO_PI))
        plots_c.append(_table(["phi_ext", "n_c", "kappa_p_hz_data", "kappa_p_hz_fit"], lab, n, kp / TWO_PI,
                              (ref.kappa + 2 * kf.kappa_nl * n) / TWO_PI))
        nc_rows.append(_table(["phi_ext", "P_p_w", "n_c", "n_c_plus", "n_c_minus", "delta_f0_hz", "kappa_p_hz"],
                              lab, powers, n, kf.n_c_plus, kf.n_c_minus, shift / TWO_PI, kp / TWO_PI))
    xs = np.array([p["phi_ext"] for p in points], dtype=float)
    circuit, squid = cfg.circuit, cfg.squid
    model_rows = []
    if np.all(np.isfinite(xs)):
        grid = np.linspace(min(0.0, xs.min()), max(xs.max(), 0.0) + 1e-9, 101)
        for xx in grid:
            try:
                model_rows.append(["model", float(xx), _hz(kerr_at_flux(circuit, squid, xx, branch=0).K),
                                   _hz(kerr_simplified(circuit, squid, xx, branch=0).K), None, None])
            except ValueError:
                continue
    data_rows = [["data", p["phi_ext"], p["K_hz"], None, p["K_plus_hz"], p["K_minus_hz"]] for p in points]
    plots = {
        "4b": _concat(*plots_b),
        "4c": _concat(*plots_c),
        "4d": {"columns": ["kind", "phi_ext", "K_hz", "K_simplified_hz", "K_plus_hz", "K_minus_hz"],
               "rows": data_rows + model_rows},
    }
    results = {"flux_points": points}
    artifacts = {"photon_numbers": _concat(*nc_rows)}
    return _bundle("kerr", results, plots, files, cfg, seed, artifacts), None


def read_calibration_bundle(path) -> Tuple[np.ndarray, np.ndarray, Dict[str, Any]]:
    """``(omega, traces, meta)`` from a ``freq_hz, re_###, im_###`` table and sidecar."""
    data = read_array_csv(path)
    side = os.path.splitext(path)[0] + ".json"
    meta = read_json(side) if os.path.exists(side) else {}
    if "freq_hz" not in data:
        raise DataQualityError(f"{os.path.basename(path)}: missing freq_hz column")
    re_cols = sorted(c for c in data if c.startswith("re_"))
    im_cols = sorted(c for c in data if c.startswith("im_"))
    if not re_cols or [c[3:] for c in re_cols] != [c[3:] for c in im_cols]:
        raise DataQualityError(f"{os.path.basename(path)}: need matching re_### and im_### columns")
    tr = np.array([data[r] + 1j * data[i] for r, i in zip(re_cols, im_cols)])
    return TWO_PI * data["freq_hz"], tr, meta


def run_calibration(path, cfg: RunConfig, seed=None):
    omega, tr, meta = read_calibration_bundle(path)
    cal_cfg = cfg.calibration
    for key in ("f_IFBW_hz", "T_s", "output_power_dbm"):
        _require(meta, key, path)
    nc = NoiseCalibration(T_s=float(meta["T_s"]), f_IFBW=float(meta["f_IFBW_hz"]),
                          post_sample_loss=float(meta.get("post_sample_loss_db", cal_cfg["post_sample_loss_db"])))
    prof = attenuation_profile(omega, tr, float(meta["output_power_dbm"]), nc,
                               smoothing_points=cal_cfg["smoothing_points"], band_db=cal_cfg["band_db"])
    results = {"mean_attenuation_db": float(np.mean(prof.attenuation)),
               "min_attenuation_db": float(np.min(prof.attenuation)),
               "max_attenuation_db": float(np.max(prof.attenuation)),
               "band_db": prof.band, "n_repeats": int(tr.shape[0])}
    plots = {"S3": _table(["freq_hz", "attenuation_db", "raw_db", "upper_db", "lower_db"],
                          omega / TWO_PI, prof.attenuation, prof.raw, prof.upper, prof.lower)}
    return _bundle("calibration", results, plots, [path], cfg, seed), prof


def write_profile(path, prof: AttenuationProfile) -> None:
    # micro-hertz rounding makes a read/write cycle reproduce the file exactly
    write_array_csv(path, ["freq_hz", "attenuation_db", "raw_db", "band_db"],
                    [np.round(prof.omega / TWO_PI, 6), prof.attenuation, prof.raw, np.full(prof.omega.size, prof.band)])


def read_profile(path) -> AttenuationProfile:
    d = read_array_csv(path)
    for c in ("freq_hz", "attenuation_db", "raw_db", "band_db"):
        if c not in d:
            raise DataQualityError(f"{os.path.basename(path)}: missing column {c!r}")
    return AttenuationProfile(omega=TWO_PI * d["freq_hz"], attenuation=d["attenuation_db"], raw=d["raw_db"],
                              band=float(d["band_db"][0]))


RUNNERS = {"resonance": run_resonance, "flux": run_flux, "thermal": run_thermal, "kerr": run_kerr}
