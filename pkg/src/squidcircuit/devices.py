"""Parameter sets of the three reference circuits (2D, 3D1, 3D2).

Values at 2.5 K. The SQUID part uses the tabulated single-junction
inductance ``L_J0`` (the critical currents are the same numbers rounded
harder). The L_lin(T) model parameters are not tabulated; they are
reconstructed so the model passes through the tabulated ``L_lin(2.5 K)`` and
reaches the low-temperature screening parameter quoted for each device.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .circuit import CircuitParams
from .constants import PHI0, TWO_PI
from .flux import SquidParams
from .thermal import ConstrictionThermal, FilmParams, LossParams, bardeen_critical_current, inductance_at

T_REF = 2.5
D_NB = 90e-9


@dataclass(frozen=True)
class Device:
    name: str
    film: FilmParams
    C_tot: float
    C_c: float
    kappa_e_b: float
    kappa_i_b: float
    omega_b_measured: float
    omega_0_measured: float
    I_0: float  # at T_REF
    L_J0: float
    L_lin: float
    beta_L_table: float
    T_cc: float
    beta_L_zero: float
    measured_T: Tuple[float, float]

    @property
    def L(self) -> float:
        return float(inductance_at(T_REF, self.film))

    @property
    def L_loop(self) -> float:
        return float(inductance_at(T_REF, self.film, loop=True))

    @property
    def circuit(self) -> CircuitParams:
        return CircuitParams.from_total_capacitance(self.L, self.C_tot, self.C_c, L_loop=self.L_loop)

    def squid(self, L_loop=None) -> SquidParams:
        return SquidParams.from_josephson_inductance(self.L_J0, self.L_lin,
                                                     self.L_loop if L_loop is None else L_loop)

    @property
    def I_c(self) -> float:
        return self.I_0 / float(bardeen_critical_current(T_REF, 1.0, self.T_cc))

    @property
    def thermal(self) -> ConstrictionThermal:
        return reconstruct_constriction_thermal(self)

    @property
    def loss(self) -> LossParams:
        return reconstruct_loss(self)


def reconstruct_constriction_thermal(dev: Device) -> ConstrictionThermal:
    """L_off and L_lin0 from ``L_lin(T_REF)`` and the zero-temperature beta_L."""
    I_c = dev.I_c
    L_loop0 = float(inductance_at(0.0, dev.film, loop=True))
    L_lin_zero = 0.5 * (dev.beta_L_zero * PHI0 / (2 * I_c) - L_loop0)
    s = 1.0 / (1.0 - (T_REF / dev.T_cc) ** 4)
    # L_off + L_lin0 = L_lin_zero ; L_off + s L_lin0 = L_lin(T_REF)
    L_lin0 = (dev.L_lin - L_lin_zero) / (s - 1.0)
    return ConstrictionThermal(I_c=I_c, T_cc=dev.T_cc, L_off=L_lin_zero - L_lin0, L_lin0=L_lin0)


def reconstruct_loss(dev: Device) -> LossParams:
    """A_kappa that reproduces the tabulated kappa_i,b at T_REF."""
    from .thermal import quasiparticle_linewidth

    _, unit = quasiparticle_linewidth(T_REF, dev.film, LossParams(A_kappa=1.0), C_tot=dev.C_tot)
    return LossParams(A_kappa=dev.kappa_i_b / float(unit), kappa_e_const=dev.kappa_e_b)


def _film(L_g, g, lambda0):
    return FilmParams(lambda0=lambda0, T_c=8.6, d_Nb=D_NB, L_g=L_g, g=g)


def _ij(L_J0):
    return PHI0 / (TWO_PI * L_J0)


DEVICES: Dict[str, Device] = {
    "2D": Device(
        name="2D", film=_film(535e-12, 164, 157e-9), C_tot=2.652e-12, C_c=38e-15,
        kappa_e_b=TWO_PI * 1.4e6, kappa_i_b=TWO_PI * 89e3,
        omega_b_measured=TWO_PI * 3.995e9, omega_0_measured=TWO_PI * 3.981e9,
        I_0=_ij(5e-12), L_J0=5e-12, L_lin=3e-12, beta_L_table=1.49,
        T_cc=3.96, beta_L_zero=3.1, measured_T=(2.4, 3.4),
    ),
    "3D1": Device(
        name="3D1", film=_film(511e-12, 156, 153e-9), C_tot=2.404e-12, C_c=31e-15,
        kappa_e_b=TWO_PI * 1.2e6, kappa_i_b=TWO_PI * 73e3,
        omega_b_measured=TWO_PI * 4.308e9, omega_0_measured=TWO_PI * 4.197e9,
        I_0=_ij(33e-12), L_J0=33e-12, L_lin=28e-12, beta_L_table=0.69,
        T_cc=3.47, beta_L_zero=1.8, measured_T=(2.4, 2.8),
    ),
    "3D2": Device(
        name="3D2", film=_film(462e-12, 141, 153e-9), C_tot=1.936e-12, C_c=33e-15,
        kappa_e_b=TWO_PI * 2.2e6, kappa_i_b=TWO_PI * 120e3,
        omega_b_measured=TWO_PI * 5.047e9, omega_0_measured=TWO_PI * 4.811e9,
        I_0=_ij(58e-12), L_J0=58e-12, L_lin=45e-12, beta_L_table=0.59,
        T_cc=3.31, beta_L_zero=1.9, measured_T=(2.4, 2.7),
    ),
}


def get_device(name: str) -> Device:
    try:
        return DEVICES[name]
    except KeyError:
        raise KeyError(f"unknown device {name!r}; known: {sorted(DEVICES)}") from None
