"""Run configuration: JSON document, schema validation and resolved parameter objects.

Frequencies and linewidths are given in Hz and powers in dBm; everything is
converted to angular units once here. Unknown keys are rejected and every
error carries the JSON path of the offending entry.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import jsonschema

from .calibration import TWO_TONE_EXTRA_LOSS_DB
from .circuit import CircuitParams
from .constants import TWO_PI
from .devices import DEVICES, T_REF, Device, reconstruct_constriction_thermal
from .errors import ConfigError
from .flux import SquidParams
from .thermal import (ConstrictionThermal, FilmParams, LossParams, bardeen_critical_current,
                      inductance_at, llin_vs_temperature)

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_NUM = {"type": "number"}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


SCHEMA: Dict[str, Any] = _obj({
    "device": _obj({
        "preset": {"enum": sorted(DEVICES)},
        "temperature": _NONNEG,
        "circuit": _obj({"L": _POS, "C": _POS, "C_c": _NONNEG, "Z0": _POS, "L_loop": _NONNEG,
                         "R": _POS}),
        "squid": _obj({"I_0": _POS, "L_lin": _NONNEG, "L_loop": _NONNEG}),
        "film": _obj({"lambda0": _POS, "T_c": _POS, "d_Nb": _POS, "L_g": _POS, "g": _POS,
                      "L_loop_g": _NONNEG, "g_loop": _NONNEG}),
        "constriction": _obj({"I_c": _POS, "T_cc": _POS, "L_off": _NUM, "L_lin0": _NUM}),
        "loss": _obj({"A_kappa": _NONNEG, "kappa_e_const_hz": _NONNEG}),
        "kappa_i_hz": _POS,
        "kappa_e_hz": _POS,
        "K_hz": _NUM,
        "kappa_nl_hz": _NONNEG,
    }),
    "pipeline": _obj({
        "mask_linewidths": _POS,
        "guard_band_linewidths": _POS,
        "background_correction": {"type": "boolean"},
        "dressed_model": {"enum": ["two-pole", "notch"]},
        "branch_policy": {"enum": ["auto", "labels"]},
        "branches": {"type": "array", "items": {"type": "integer"}},
        "flux_units": {"type": "boolean"},
        "period_seed": _NUM,
        "offset_seed": _NUM,
        "kappa_e_profile": {"type": "boolean"},
    }),
    "calibration": _obj({
        "T_s": _POS,
        "f_IFBW_hz": _POS,
        "post_sample_loss_db": _NUM,
        "two_tone_extra_loss_db": _NUM,
        "power_uncertainty_db": _NONNEG,
        "band_db": _NONNEG,
        "smoothing_points": {"type": "integer", "minimum": 1},
        "output_power_dbm": _NUM,
        "attenuation_db": _NUM,
        "hemt_offset_k": _NUM,
        "hemt_slope_k_per_grad": _NUM,
    }),
    "simulation": _obj({
        "noise_snr": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "minimum": 16},
        "span_linewidths": _POS,
        "background": _obj({"a0": _NUM, "a1": _NUM, "a2": _NUM, "phi0": _NUM, "phi1": _NUM,
                            "theta": _NUM}),
        "flux": _obj({"coil_min": _NUM, "coil_max": _NUM, "n_flux": {"type": "integer", "minimum": 8},
                      "period": _POS, "offset": _NUM,
                      "sweep_direction": {"enum": ["up", "down"]}}),
        "temperatures": {"type": ["array", "null"], "items": _NONNEG, "minItems": 1},
        "two_tone": _obj({
            "n_powers": {"type": "integer", "minimum": 4},
            "P_min_dbm": _NUM, "P_max_dbm": _NUM,
            "flux_points": {"type": "array", "items": _NUM, "minItems": 1},
            "pump_detuning_linewidths": _POS,
            "max_shift_linewidths": _POS,
        }),
        "calibration": _obj({
            "attenuation_db": _NUM, "n_repeats": {"type": "integer", "minimum": 2},
            "f_min_hz": _POS, "f_max_hz": _POS, "n_points": {"type": "integer", "minimum": 2},
        }),
    }),
})

DEFAULTS: Dict[str, Any] = {
    "device": {"preset": "3D1", "temperature": T_REF},
    "pipeline": {
        "mask_linewidths": 5.0,
        "guard_band_linewidths": 0.05,
        "background_correction": True,
        "dressed_model": "two-pole",
        "branch_policy": "auto",
        "flux_units": False,
        "kappa_e_profile": False,
    },
    "calibration": {
        "T_s": T_REF,
        "f_IFBW_hz": 1.0,
        "post_sample_loss_db": 1.0,
        "two_tone_extra_loss_db": TWO_TONE_EXTRA_LOSS_DB,
        "power_uncertainty_db": 1.0,
        "band_db": 1.0,
        "smoothing_points": 101,
        "output_power_dbm": -20.0,
        "attenuation_db": -39.0,
    },
    "simulation": {
        "noise_snr": None,
        "n_points": 801,
        "span_linewidths": 40.0,
        "flux": {"coil_min": -1.25, "coil_max": 1.25, "n_flux": 81, "period": 1.0, "offset": 0.0,
                 "sweep_direction": "up"},
        "temperatures": None,
        "two_tone": {"n_powers": 20, "flux_points": [0.0, 0.2], "pump_detuning_linewidths": 1.0,
                     "max_shift_linewidths": 1.0},
        "calibration": {"attenuation_db": -39.0, "n_repeats": 200, "f_min_hz": 3.9e9,
                        "f_max_hz": 5.1e9, "n_points": 301},
    },
}

# illustrative nonlinear damping for simulation when none is configured
DEFAULT_KAPPA_NL_HZ = 50.0


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _path(err) -> str:
    parts = ["$"] + [f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path]
    return "".join(parts)


def validate(doc) -> None:
    """Raise :class:`ConfigError` with a JSON path on the first schema violation."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", path="$")
    v = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(v.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        e = errors[0]
        path = _path(e)
        if e.validator == "additionalProperties":
            extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
            path = path + "." + extra[0] if extra else path
            raise ConfigError(f"unknown key {extra[0]!r}" if extra else e.message, path=path)
        raise ConfigError(e.message, path=path)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass
class RunConfig:
    """Validated configuration with defaults filled in.

    The device is a preset with optional overrides. ``temperature`` moves the
    film inductances and the constriction parameters along their thermal
    models; explicit ``circuit`` or ``squid`` sections replace the result.
    """

    doc: Dict[str, Any]

    @classmethod
    def from_dict(cls, doc: Optional[Dict[str, Any]] = None) -> "RunConfig":
        doc = {} if doc is None else doc
        validate(doc)
        cfg = cls(_merge(DEFAULTS, doc))
        cfg._check()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc.msg} at line {exc.lineno})", path="$") from exc
        return cls.from_dict(doc)

    def _check(self):
        fl = self.simulation["flux"]
        if fl["coil_max"] <= fl["coil_min"]:
            raise ConfigError("coil_max must exceed coil_min", path="$.simulation.flux.coil_max")
        tt = self.simulation["two_tone"]
        if ("P_min_dbm" in tt) != ("P_max_dbm" in tt):
            raise ConfigError("give both P_min_dbm and P_max_dbm or neither", path="$.simulation.two_tone")
        if "P_max_dbm" in tt and tt["P_max_dbm"] <= tt["P_min_dbm"]:
            raise ConfigError("P_max_dbm must exceed P_min_dbm", path="$.simulation.two_tone.P_max_dbm")
        cal = self.simulation["calibration"]
        if cal["f_max_hz"] <= cal["f_min_hz"]:
            raise ConfigError("f_max_hz must exceed f_min_hz", path="$.simulation.calibration.f_max_hz")
        try:
            self.circuit, self.squid
        except ValueError as exc:
            raise ConfigError(str(exc), path="$.device") from exc

    @property
    def pipeline(self):
        return self.doc["pipeline"]

    @property
    def calibration(self):
        return self.doc["calibration"]

    @property
    def simulation(self):
        return self.doc["simulation"]

    @property
    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.doc).encode()).hexdigest()

    @property
    def temperature(self) -> float:
        return float(self.doc["device"]["temperature"])

    @property
    def device(self) -> Device:
        d = self.doc["device"]
        dev = DEVICES[d["preset"]]
        if "film" in d:
            dev = replace(dev, film=replace(dev.film, **d["film"]))
        return dev

    @property
    def film(self) -> FilmParams:
        return self.device.film

    @property
    def thermal(self) -> ConstrictionThermal:
        d = self.doc["device"]
        base = reconstruct_constriction_thermal(self.device)
        return replace(base, **d["constriction"]) if "constriction" in d else base

    @property
    def loss(self) -> LossParams:
        d = self.doc["device"].get("loss")
        base = self.device.loss
        if d is None:
            return base
        return LossParams(A_kappa=d.get("A_kappa", base.A_kappa),
                          kappa_e_const=TWO_PI * d["kappa_e_const_hz"] if "kappa_e_const_hz" in d
                          else base.kappa_e_const)

    @property
    def circuit(self) -> CircuitParams:
        d = self.doc["device"]
        dev = self.device
        T = self.temperature
        L = float(inductance_at(T, dev.film))
        L_loop = float(inductance_at(T, dev.film, loop=True))
        base = CircuitParams.from_total_capacitance(L, dev.C_tot, dev.C_c, L_loop=L_loop)
        return replace(base, **d["circuit"]) if "circuit" in d else base

    @property
    def squid(self) -> SquidParams:
        d = self.doc["device"]
        th = self.thermal
        T = self.temperature
        if T >= th.T_cc:
            raise ConfigError(f"temperature {T} K is at or above T_cc={th.T_cc} K",
                              path="$.device.temperature")
        dev = self.device
        if T == T_REF and "constriction" not in d:
            I_0, L_lin = dev.I_0, dev.L_lin
        else:
            I_0 = float(bardeen_critical_current(T, th.I_c, th.T_cc))
            L_lin = float(llin_vs_temperature(T, th))
        base = SquidParams(I_0=I_0, L_lin=L_lin, L_loop=self.circuit.L_loop)
        return replace(base, **d["squid"]) if "squid" in d else base

    @property
    def omega_b(self) -> float:
        return self.circuit.omega_b

    @property
    def kappa_e(self) -> float:
        d = self.doc["device"]
        return TWO_PI * d["kappa_e_hz"] if "kappa_e_hz" in d else self.device.kappa_e_b

    @property
    def kappa_i(self) -> float:
        d = self.doc["device"]
        return TWO_PI * d["kappa_i_hz"] if "kappa_i_hz" in d else self.device.kappa_i_b

    @property
    def K(self) -> Optional[float]:
        """Configured Kerr constant (rad/s), or None to use the circuit model."""
        K = self.doc["device"].get("K_hz")
        return None if K is None else TWO_PI * K

    @property
    def kappa_nl(self) -> float:
        return TWO_PI * self.doc["device"].get("kappa_nl_hz", DEFAULT_KAPPA_NL_HZ)
