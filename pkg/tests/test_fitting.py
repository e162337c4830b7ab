import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from squidcircuit.circuit import CircuitParams
from squidcircuit.constants import TWO_PI
from squidcircuit.devices import get_device
from squidcircuit.errors import DataQualityError, DomainError, FitError
from squidcircuit.fitting import (BackgroundModel, KappaEProfile, correct_trace, fit_dressed_mode,
                                  fit_kerr, fit_resonance, fit_thermal, fit_tuning_curve, notch)
from squidcircuit.flux import screening_parameter, tuning_curve
from squidcircuit.response import CavityMode, dressed_modes, observe_two_tone, two_tone_s21
from squidcircuit.thermal import ConstrictionThermal, bardeen_critical_current, llin_vs_temperature
from squidcircuit.trace import ComplexTrace

W0 = TWO_PI * 4.197e9
K_TOT = TWO_PI * 1.5e6
K_E = 0.6 * K_TOT
L_LOOP = 17e-12


def _grid(n=801, span=20):
    return np.linspace(W0 - span * K_TOT, W0 + span * K_TOT, n)


def _noisy(w, rng, snr=100.0):
    sigma = (K_E / K_TOT) / snr / math.sqrt(2)
    s = notch(w, W0, K_TOT, K_E) + sigma * (rng.standard_normal(w.size) + 1j * rng.standard_normal(w.size))
    return ComplexTrace(w, s)


def test_resonance_monte_carlo_accuracy():
    # the bound needs a dense sweep: the omega_0 variance is 1/(2e4 pi rho) kappa^2
    # for rho points per linewidth, so 200 per linewidth keeps 100 seeds inside kappa/1e3
    rng = np.random.default_rng(2024)
    w = _grid(4001, span=10)
    d0, pulls = [], []
    for _ in range(100):
        f = fit_resonance(_noisy(w, rng))
        d0.append(f.omega_0 - W0)
        pulls.append((f.omega_0 - W0) / f.stderr["omega_0"])
    assert np.max(np.abs(d0)) < K_TOT / 1e3
    # reported uncertainties match the scatter
    assert 0.75 < np.std(pulls) < 1.25


def test_resonance_stderr_scales_with_points():
    rng = np.random.default_rng(5)
    e1 = np.mean([fit_resonance(_noisy(_grid(401), rng)).stderr["omega_0"] for _ in range(10)])
    e4 = np.mean([fit_resonance(_noisy(_grid(1601), rng)).stderr["omega_0"] for _ in range(10)])
    assert e1 / e4 == pytest.approx(2.0, rel=0.1)


def test_resonance_seed_override():
    w = _grid()
    f = fit_resonance(ComplexTrace(w, notch(w, W0, K_TOT, K_E)),
                      seed={"omega_0": W0 + 0.3 * K_TOT, "kappa_i": 0.5 * K_TOT, "kappa_e": 0.4 * K_TOT})
    assert f.omega_0 == pytest.approx(W0, rel=1e-12)
    assert f.kappa == pytest.approx(K_TOT, rel=1e-9)


def test_flat_trace_has_no_dip():
    w = _grid()
    with pytest.raises(FitError):
        fit_resonance(ComplexTrace(w, np.ones_like(w, dtype=complex)))


def test_background_without_resonance():
    w = _grid()
    bg = BackgroundModel(a0=0.7, phi0=0.3, phi1=1e-9)
    res = correct_trace(ComplexTrace(w, bg.evaluate(w)))
    assert not res.resonance_found
    assert np.allclose(res.corrected.s21, 1.0, atol=1e-12)


def test_background_apply_remove_inverse():
    w = _grid()
    bg = BackgroundModel(a0=0.9, a1=1e-12, phi0=0.2, phi1=1e-9, theta=0.3)
    s = notch(w, W0, K_TOT, K_E)
    assert np.allclose(bg.remove(w, bg.apply(w, s)), s, atol=1e-13)


def test_reference_division():
    w = _grid()
    ref = ComplexTrace(w, 0.5 * np.exp(1j * 1e-9 * w))
    raw = ComplexTrace(w, ref.s21 * notch(w, W0, K_TOT, K_E))
    f = fit_resonance(correct_trace(raw, reference=ref).corrected)
    assert f.kappa_e == pytest.approx(K_E, rel=1e-8)


def test_dressed_fit_beats_single_notch():
    mode = CavityMode(W0, K_TOT, K_E, K=-TWO_PI * 168.7, kappa_nl=TWO_PI * 50.0)
    wp, n_c = W0 + K_TOT, 3000.0
    w = _grid()
    tr = ComplexTrace(w, two_tone_s21(mode, wp, n_c, w))
    lower = dressed_modes(mode, wp, n_c)[1]
    two_pole = fit_dressed_mode(tr, wp)
    single = fit_resonance(tr)
    err_two = abs(two_pole.kappa / (2 * lower.imag) - 1)
    err_one = abs(single.kappa / (2 * lower.imag) - 1)
    assert err_two < 1e-8
    assert err_one > 100 * err_two


def _device_curve(name, phi):
    d = get_device(name)
    sq = d.squid(L_LOOP)
    circuit = CircuitParams.from_total_capacitance(d.L, d.C_tot, d.C_c, L_loop=L_LOOP)
    return d, sq, circuit, tuning_curve(circuit, sq, d.omega_b_measured, phi)


def test_flux_fit_auto_branches_and_beta_identity():
    # stay off the half-integer points where neighbouring arches meet
    phi = np.linspace(-1.4, 1.4, 140)
    d, sq, circuit, curve = _device_curve("3D2", phi)
    ff = fit_tuning_curve(phi, curve.omega_0, circuit, d.omega_b_measured, flux_units=True)
    assert np.array_equal(ff.branches, curve.branches)
    assert ff.L_J0 == pytest.approx(sq.L_J0, rel=1e-6)
    assert ff.L_lin == pytest.approx(sq.L_lin, rel=1e-6)
    assert ff.beta_L == pytest.approx(screening_parameter(ff.I_0, ff.L_loop, ff.L_lin), rel=1e-14)


def test_flux_fit_offset_folded_into_first_period():
    phi = np.linspace(-0.45, 0.45, 61)
    d, sq, circuit, curve = _device_curve("3D1", phi)
    ff = fit_tuning_curve(0.3 * phi + 0.31, curve.omega_0, circuit, d.omega_b_measured,
                          seed={"period": 0.3, "offset": 0.31})
    assert abs(ff.offset) <= 0.5 * ff.period
    assert ff.phi_ext(0.31) - np.round(ff.phi_ext(0.31)) == pytest.approx(0.0, abs=1e-6)


def test_flux_fit_needs_points():
    with pytest.raises(DataQualityError):
        fit_tuning_curve([0.0, 0.1], [1.0, 1.0], CircuitParams(L=5e-10, C=2e-12), 1.0)


def test_thermal_fit_masks_points_above_Tcc():
    th = ConstrictionThermal(I_c=30e-6, T_cc=3.2)
    T = np.array([2.4, 2.6, 2.8, 3.0, 3.1, 3.3, 3.5])
    I = np.where(T < th.T_cc, bardeen_critical_current(np.minimum(T, th.T_cc), th.I_c, th.T_cc), 0.0)
    f = fit_thermal("I_0", T, I)
    assert f.masked == [5, 6]
    assert f.flags["masked-above-T_cc"]
    assert f.params["T_cc"] == pytest.approx(3.2, rel=1e-6)


def test_thermal_fit_flags_negative_llin():
    th = ConstrictionThermal(I_c=30e-6, T_cc=3.5, L_off=-25e-12, L_lin0=10e-12)
    T = np.linspace(2.4, 3.2, 6)
    with pytest.warns(RuntimeWarning, match="negative"):
        f = fit_thermal("L_lin", T, llin_vs_temperature(T, th), T_cc=3.5)
    assert f.flags.get("negative-llin")


def test_thermal_fit_validation():
    with pytest.raises(DomainError):
        fit_thermal("resistance", [1.0, 2.0], [1.0, 2.0])
    with pytest.raises(DataQualityError):
        fit_thermal("I_0", [2.4, 2.6], [1e-5, 9e-6])
    with pytest.raises(DomainError):
        fit_thermal("L_lin", [2.4, 2.6, 3.6], [1e-11, 1e-11, 1e-11], T_cc=3.5)


def _series(K=-TWO_PI * 500.0, knl=TWO_PI * 50.0, n=10):
    mode = CavityMode(W0, K_TOT, K_E, K=K, kappa_nl=knl)
    wp = W0 + K_TOT
    return mode, wp, [observe_two_tone(mode, P, wp)[0] for P in np.geomspace(1e-16, 1e-13, n)]


@settings(max_examples=25, deadline=None)
@given(db=st.floats(0.1, 3.0), lo=st.floats(0.8, 1.0), hi=st.floats(1.0, 1.2))
def test_kerr_bound_ordering(db, lo, hi):
    mode, wp, obs = _series()
    kf = fit_kerr(obs, mode.kappa, wp - mode.omega_c, kappa_e=K_E, power_uncertainty_db=db,
                  kappa_e_bounds=(hi * K_E, lo * K_E))
    assert abs(kf.K_minus) >= abs(kf.K) >= abs(kf.K_plus)


def test_kerr_power_shift_scales_photon_numbers():
    mode, wp, obs = _series()
    kf = fit_kerr(obs, mode.kappa, wp - mode.omega_c, kappa_e=K_E, power_uncertainty_db=1.0)
    assert np.allclose(kf.n_c_plus / kf.n_c, 10 ** 0.1, rtol=1e-12)
    assert np.allclose(kf.n_c_minus / kf.n_c, 10 ** -0.1, rtol=1e-12)
    assert kf.K == pytest.approx(mode.K, rel=1e-6)


def test_kerr_fit_input_checks():
    mode, wp, obs = _series()
    with pytest.raises(DataQualityError):
        fit_kerr(obs[:3], mode.kappa, wp - mode.omega_c, kappa_e=K_E)
    with pytest.raises(DataQualityError):
        fit_kerr(obs, 2 * mode.kappa, wp - mode.omega_c, kappa_e=K_E)


def test_kappa_e_profile_constant_and_linear():
    w = np.linspace(TWO_PI * 4.0e9, TWO_PI * 4.4e9, 8)
    const = KappaEProfile.fit(w, np.full(w.size, K_E))
    assert np.allclose(const(w), K_E, rtol=1e-12)
    lin = KappaEProfile.fit(w, K_E * (1 + (w - w[0]) / np.ptp(w)))
    mid = 0.5 * (w[0] + w[-1])
    assert float(lin(mid)) == pytest.approx(1.5 * K_E, rel=1e-12)


def test_kappa_e_profile_query():
    w = np.linspace(TWO_PI * 4.0e9, TWO_PI * 4.4e9, 9)
    ke = K_E * (1 + (w - w[0]) / np.ptp(w))
    prof = KappaEProfile.fit(w, ke)
    val, upper, lower = prof.query(w[3] + 0.1 * (w[4] - w[3]), window=w[1] - w[0])
    # nearest measured point, bounded by the polynomial across the window
    assert val == ke[3]
    assert upper == pytest.approx(0.5 * (ke[3] + ke[4]), rel=1e-9)
    assert lower == pytest.approx(0.5 * (ke[2] + ke[3]), rel=1e-9)


def test_kappa_e_profile_needs_six_points():
    w = np.linspace(TWO_PI * 4.0e9, TWO_PI * 4.4e9, 5)
    with pytest.raises(FitError):
        KappaEProfile.fit(w, np.full(5, K_E))
