import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from squidcircuit.constants import MU0, PHI0, TWO_PI
from squidcircuit.devices import DEVICES, T_REF, get_device
from squidcircuit.errors import DomainError
from squidcircuit.flux import screening_parameter
from squidcircuit.thermal import (ConstrictionThermal, FilmParams, LossParams, bardeen_critical_current,
                                  beta_extrapolation, beta_vs_temperature, inductance_at,
                                  josephson_inductance, linear_fraction, llin_negative_somewhere,
                                  llin_vs_temperature, london_depth, penetration_profile,
                                  quasiparticle_linewidth, resonance_vs_temperature,
                                  sweetspot_vs_temperature)

FILM = FilmParams(lambda0=153e-9, T_c=8.6, d_Nb=90e-9, L_g=511e-12, g=156)


def test_london_depth_limits():
    assert london_depth(0.0, 153e-9, 8.6) == pytest.approx(153e-9)
    with pytest.raises(DomainError):
        london_depth(8.6, 153e-9, 8.6)
    with pytest.raises(DomainError):
        london_depth(-0.1, 153e-9, 8.6)


def test_penetration_profile_thin_film_correction():
    p = penetration_profile(0.0, FILM)
    assert p.lambda_eff == pytest.approx(153e-9 / math.tanh(90 / 153))
    assert p.L_total == pytest.approx(511e-12 + MU0 * 156 * p.lambda_eff)


@given(T1=st.floats(0.0, 8.0), dT=st.floats(0.01, 0.5))
def test_inductance_grows_with_temperature(T1, dT):
    T2 = min(T1 + dT, 8.5)
    assert inductance_at(T2, FILM) > inductance_at(T1, FILM)
    assert resonance_vs_temperature(T2, FILM, 2.4e-12) < resonance_vs_temperature(T1, FILM, 2.4e-12)


def test_loop_inductance_at_reference():
    # loop geometry 12.8 pH and g = 12 give about 17 pH at 2.5 K
    assert float(inductance_at(T_REF, FILM, loop=True)) == pytest.approx(17.2e-12, rel=0.01)


def test_bardeen_critical_current():
    assert bardeen_critical_current(0.0, 2.0, 3.5) == pytest.approx(2.0)
    assert bardeen_critical_current(3.5, 2.0, 3.5) == pytest.approx(0.0)
    T = 2.0
    assert bardeen_critical_current(T, 1.0, 3.5) == pytest.approx((1 - (T / 3.5) ** 2) ** 1.5)
    with pytest.raises(DomainError):
        bardeen_critical_current(3.6, 1.0, 3.5)


def test_llin_model_and_negative_flag():
    th = ConstrictionThermal(I_c=1e-5, T_cc=3.5, L_off=5e-12, L_lin0=10e-12)
    T = 2.0
    assert llin_vs_temperature(T, th) == pytest.approx(5e-12 + 10e-12 / (1 - (T / 3.5) ** 4))
    assert not llin_negative_somewhere(th)
    assert llin_negative_somewhere(ConstrictionThermal(I_c=1e-5, T_cc=3.5, L_off=-20e-12, L_lin0=10e-12))
    assert llin_negative_somewhere(ConstrictionThermal(I_c=1e-5, T_cc=3.5, L_off=5e-12, L_lin0=-1e-12))


def test_beta_matches_screening_parameter():
    dev = get_device("3D1")
    th = dev.thermal
    T = 2.6
    I0 = bardeen_critical_current(T, th.I_c, th.T_cc)
    expected = screening_parameter(float(I0), float(inductance_at(T, dev.film, loop=True)),
                                   float(llin_vs_temperature(T, th)))
    assert float(beta_vs_temperature(T, dev.film, th)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("name", sorted(DEVICES))
def test_reconstructed_thermal_passes_table(name):
    dev = get_device(name)
    th = dev.thermal
    assert float(llin_vs_temperature(T_REF, th)) == pytest.approx(dev.L_lin, rel=1e-12)
    assert float(bardeen_critical_current(T_REF, th.I_c, th.T_cc)) == pytest.approx(dev.I_0, rel=1e-12)
    assert float(beta_vs_temperature(0.0, dev.film, th)) == pytest.approx(dev.beta_L_zero, rel=1e-12)


@pytest.mark.parametrize("name", sorted(DEVICES))
def test_reconstructed_loss_passes_table(name):
    dev = get_device(name)
    kb, ki = quasiparticle_linewidth(T_REF, dev.film, dev.loss, C_tot=dev.C_tot)
    assert float(ki) == pytest.approx(dev.kappa_i_b, rel=1e-12)
    assert float(kb) == pytest.approx(dev.kappa_i_b + dev.kappa_e_b, rel=1e-12)


def test_quasiparticle_linewidth_vanishes_at_zero_temperature():
    kb, ki = quasiparticle_linewidth(np.array([0.0, 1.0, 2.0]), FILM, LossParams(A_kappa=1e-14, kappa_e_const=5.0),
                                     C_tot=2.4e-12)
    assert ki[0] == 0.0
    assert np.all(np.diff(ki) > 0)
    assert kb[0] == 5.0
    with pytest.raises(DomainError):
        quasiparticle_linewidth(1.0, FILM, LossParams(A_kappa=1.0))


def test_quasiparticle_linewidth_with_callable_frequency():
    wb = lambda T: np.full_like(np.asarray(T, dtype=float), TWO_PI * 4e9)
    _, ki = quasiparticle_linewidth(2.0, FILM, LossParams(A_kappa=1e-14), omega_b_of_T=wb)
    lam = london_depth(2.0, FILM.lambda0, FILM.T_c)
    u = FILM.d_Nb / lam
    shape = 1 / math.tanh(u) + u / math.sinh(u) ** 2
    assert float(ki) == pytest.approx(1e-14 * (TWO_PI * 4e9) ** 4 * lam ** 3 * (2.0 / 8.6) ** 4 * shape)


def test_josephson_inductance():
    assert float(josephson_inductance(10e-6)) == pytest.approx(PHI0 / (TWO_PI * 10e-6))


def test_linear_fraction_between_zero_and_one():
    th = get_device("3D2").thermal
    lf = linear_fraction(np.linspace(0.0, 3.2, 9), th)
    assert np.all((lf > 0) & (lf < 1))


def test_sweetspot_prediction_and_flags():
    dev = get_device("3D1")
    pred = sweetspot_vs_temperature(np.array([2.4, 2.5, 3.0]), dev.film, dev.thermal, dev.C_tot,
                                    measured_range=dev.measured_T)
    assert pred.flags["model-extrapolation"]
    w0 = 1 / np.sqrt(dev.C_tot * (dev.L + 0.5 * (dev.L_J0 + dev.L_lin)))
    assert pred.values[1] == pytest.approx(w0, rel=1e-12)
    inside = sweetspot_vs_temperature(2.5, dev.film, dev.thermal, dev.C_tot, measured_range=(2.4, 2.8))
    assert not inside.flags["model-extrapolation"]


def test_beta_extrapolation_flags_negative_llin():
    th = ConstrictionThermal(I_c=3e-5, T_cc=3.5, L_off=-30e-12, L_lin0=10e-12)
    pred = beta_extrapolation([0.0, 2.5], FILM, th, (2.4, 2.8))
    assert pred.flags["model-extrapolation"]
    assert pred.flags["negative-llin"]
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        sweetspot_vs_temperature(2.5, FILM, th, 2.4e-12)
    assert any("negative" in str(r.message) for r in rec)


def test_film_validation():
    with pytest.raises(DomainError):
        FilmParams(lambda0=0.0, T_c=8.6, d_Nb=90e-9, L_g=5e-10, g=150)
    with pytest.raises(DomainError):
        ConstrictionThermal(I_c=0.0, T_cc=3.0)
    with pytest.raises(DomainError):
        LossParams(A_kappa=-1.0)
