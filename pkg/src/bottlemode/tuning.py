"""Mode spacings and temperature/strain tuning budgets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .materials import CONSTANTS, SILICA, SilicaProperties
from .modes import BottleMode, eigen_wavenumber


@dataclass(frozen=True)
class SpectrumReport:
    """Azimuthal and axial mode spacings in Hz."""

    dnu_m_numeric: float
    dnu_m_formula: float
    dnu_q_numeric: float
    dnu_q_formula: float
    frequency: float                     # mode frequency c k0 / 2 pi, Hz
    flags: tuple[str, ...] = field(default=())


def _central(fn, i: int, lowest: int) -> float:
    if i - 1 >= lowest:
        return 0.5 * (fn(i + 1) - fn(i - 1))
    return fn(i + 1) - fn(i)


def mode_spacings(mode: BottleMode) -> SpectrumReport:
    """Finite-difference spacings from the axial eigenvalue formula and the closed forms.

    Neighbouring eigenvalues use the solved R0 and delta_k; wavenumbers
    convert to frequency through nu = c k / (2 pi n_eff).
    """
    c = CONSTANTS.c
    R0, dk = mode.profile.R0, mode.profile.delta_k
    to_hz = c / (2 * math.pi * mode.n_eff)
    flags = []
    dnu_m = to_hz * _central(lambda mm: eigen_wavenumber(mm, mode.q, R0, dk), mode.m, 1)
    if mode.m == 1:
        flags.append("dnu_m_forward_difference")
    dnu_q = to_hz * _central(lambda qq: eigen_wavenumber(mode.m, qq, R0, dk), mode.q, 0)
    if mode.q == 0:
        flags.append("dnu_q_forward_difference")
    return SpectrumReport(
        dnu_m_numeric=dnu_m,
        dnu_m_formula=c / (2 * math.pi * mode.n_bulk * R0),
        dnu_q_numeric=dnu_q,
        dnu_q_formula=c * dk / (2 * math.pi),
        frequency=c * mode.k0 / (2 * math.pi),
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class TemperatureTuning:
    dT_direct: float     # shift / (dn/dT), K
    dT_strict: float     # shift * n / (dn/dT), K


def temperature_tuning(required_relative_shift: float, silica: SilicaProperties = SILICA,
                       n: float = 1.4525) -> TemperatureTuning:
    """Temperature change for a relative frequency shift, in two index conventions.

    ``dT_direct`` treats the shift as an absolute index change; ``dT_strict``
    uses dnu/nu = -dn/n.
    """
    if required_relative_shift < 0:
        raise ValueError("required shift must be non-negative")
    return TemperatureTuning(required_relative_shift / silica.dn_dT,
                             required_relative_shift * n / silica.dn_dT)


def strain_response(silica: SilicaProperties = SILICA, n: float = 1.4525) -> float:
    """Signed d(nu)/nu per unit axial strain dL/L for the polarization along the axis.

    The radius shrinks by the Poisson ratio and the index drops through
    the elasto-optic combination p11 - 2 nu_P p12.  Reported negative.
    """
    nu_p = silica.poisson_ratio
    geometric = nu_p
    elasto = 0.5 * n * n * (silica.p11 - 2.0 * nu_p * silica.p12)
    return -(geometric + elasto)


@dataclass(frozen=True)
class TuningBudget:
    relative_path_change_per_fsr: float
    temperature_delta: TemperatureTuning
    strain_per_fsr: float                # dL/L
    stress_per_fsr: float                # Pa
    safety_margin: float


def strain_budget(mode: BottleMode, spectrum: SpectrumReport,
                  silica: SilicaProperties = SILICA) -> TuningBudget:
    """Path, temperature and strain needed to tune across one axial FSR."""
    shift = spectrum.dnu_q_formula / spectrum.frequency
    coeff = abs(strain_response(silica, mode.n_bulk))
    if coeff == 0.0:
        raise ZeroDivisionError("strain response vanishes for these material constants")
    strain = shift / coeff
    stress = silica.youngs_modulus * strain
    return TuningBudget(
        relative_path_change_per_fsr=shift,
        temperature_delta=temperature_tuning(shift, silica, mode.n_bulk),
        strain_per_fsr=strain,
        stress_per_fsr=stress,
        safety_margin=silica.damage_threshold / stress,
    )


@dataclass(frozen=True)
class MicrosphereComparison:
    fsr: float                          # Hz
    relative_path_change_per_fsr: float
    linewidth_over_fsr: float


def microsphere_tuning_comparison(sphere_radius: float, Q: float, n: float = 1.4525,
                                  wavelength: float = 0.852) -> MicrosphereComparison:
    """FSR c / (2 pi n R) of a sphere and the tuning range and linewidth it implies."""
    if sphere_radius <= 0 or Q <= 0:
        raise ValueError("radius and Q must be positive")
    c = CONSTANTS.c
    fsr = c / (2 * math.pi * n * sphere_radius)
    nu = c / wavelength
    return MicrosphereComparison(fsr, fsr / nu, (nu / Q) / fsr)
