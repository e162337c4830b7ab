import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from squidcircuit.circuit import CircuitParams
from squidcircuit.constants import E_CHARGE, HBAR, TWO_PI
from squidcircuit.errors import DomainError, SingularityError
from squidcircuit.flux import SquidParams
from squidcircuit.kerr import (kerr_at_flux, kerr_from_expansion, kerr_pipeline, kerr_simplified,
                               potential_coefficients)

L_LOOP = 17e-12
CIRCUIT = CircuitParams.from_total_capacitance(568e-12, 2.404e-12, 31e-15, L_loop=L_LOOP)
SQUID = SquidParams.from_josephson_inductance(33e-12, 28e-12, L_LOOP)


def test_coefficients_at_zero_phase():
    z = 1.3
    exp = potential_coefficients(z, 0.0)
    assert exp.c2 == pytest.approx(2 / (1 + z))
    assert exp.c4 == pytest.approx(-2 / (1 + z) ** 4)
    assert exp.c3 == 0.0


def test_coefficients_without_linear_inductance():
    # zeta = 0 reduces to a pair of bare junctions, 2 cos and -2 cos
    phi0 = 0.7
    exp = potential_coefficients(0.0, phi0)
    assert exp.c2 == pytest.approx(2 * math.cos(phi0))
    assert exp.c4 == pytest.approx(-2 * math.cos(phi0))


def test_coefficients_domain_and_singularity():
    with pytest.raises(DomainError):
        potential_coefficients(-0.1, 0.0)
    # 1 + zeta cos(phi0) = 0 at zeta = 2, phi0 = 2 pi / 3
    with pytest.raises(SingularityError):
        potential_coefficients(2.0, 2 * math.pi / 3)


def test_sweetspot_kerr_value():
    # at zero flux the participation ratio is the only thing left
    K = kerr_at_flux(CIRCUIT, SQUID, 0.0).K
    Ls = 0.5 * (SQUID.L_J0 + SQUID.L_lin)
    p = Ls / (CIRCUIT.L + Ls)
    # L_arm/(L_arm + L_J0) drops out at zero tan, leaving the cubed ratio
    ratio = SQUID.L_J0 / (2 * CIRCUIT.L + SQUID.L_lin + SQUID.L_J0)
    assert K == pytest.approx(-E_CHARGE ** 2 / (2 * HBAR * CIRCUIT.C_tot) * ratio ** 3, rel=1e-14)
    assert K < 0
    assert 0 < p < 1


def test_simplified_equals_full_at_sweetspot():
    assert kerr_simplified(CIRCUIT, SQUID, 0.0).K == pytest.approx(kerr_at_flux(CIRCUIT, SQUID, 0.0).K, rel=1e-15)
    # away from zero the tan^2 term makes the full model larger in size
    assert abs(kerr_at_flux(CIRCUIT, SQUID, 0.3).K) > abs(kerr_simplified(CIRCUIT, SQUID, 0.3).K)


@settings(max_examples=60)
@given(x=st.floats(-0.45, 0.45))
def test_pipeline_matches_closed_form(x):
    a = kerr_at_flux(CIRCUIT, SQUID, x).K
    b = kerr_pipeline(CIRCUIT, SQUID, x).K
    assert b == pytest.approx(a, rel=1e-12)
    assert a < 0


def test_kerr_symmetric_and_periodic():
    a = kerr_at_flux(CIRCUIT, SQUID, 0.21).K
    assert kerr_at_flux(CIRCUIT, SQUID, -0.21).K == pytest.approx(a, rel=1e-12)
    assert kerr_at_flux(CIRCUIT, SQUID, 1.21).K == pytest.approx(a, rel=1e-12)


def test_kerr_grows_towards_arch_edge():
    xs = np.linspace(0.0, 0.45, 10)
    K = np.array([kerr_at_flux(CIRCUIT, SQUID, x).K for x in xs])
    assert np.all(np.diff(np.abs(K)) > 0)


def test_kerr_order_of_magnitude():
    # a few hundred Hz per photon for the 3D1 geometry
    assert 50 < abs(kerr_at_flux(CIRCUIT, SQUID, 0.0).K) / TWO_PI < 1e3


def test_unstable_point_rejected():
    # following the central arch to 0.9 flux quanta lands past cos = 0
    with pytest.raises(DomainError):
        kerr_at_flux(CIRCUIT, SQUID, 0.9, branch=0)


def test_expansion_participation_limit():
    exp = potential_coefficients(SQUID.L_arm / SQUID.L_J0, 0.0)
    big = CircuitParams.from_total_capacitance(1.0, 2.404e-12, 31e-15, L_loop=L_LOOP)
    # a huge series inductance sends the participation ratio to zero
    assert abs(kerr_from_expansion(big, SQUID, exp)) < 1e-20
