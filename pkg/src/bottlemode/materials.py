"""Physical constants, fused-silica data and the Cs D2 transition.

Lengths are in micrometres wherever a formula mixes them with the
resonator geometry; SI units are used for everything that enters the
coupling strength.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = _codata.c * 1e6          # um / s
    hbar: float = _codata.hbar          # J s
    eps0: float = _codata.epsilon_0     # F / m

    @property
    def c_si(self) -> float:
        return self.c * 1e-6


CONSTANTS = PhysicalConstants()

# Malitson (1965) three-term Sellmeier fit for fused silica, wavelength in um.
MALITSON_B = (0.6961663, 0.4079426, 0.8974794)
MALITSON_C = (0.0684043, 0.1162414, 9.896161)   # resonance wavelengths, um


@dataclass(frozen=True)
class SilicaProperties:
    sellmeier_b: tuple[float, float, float] = MALITSON_B
    sellmeier_c: tuple[float, float, float] = MALITSON_C
    dn_dT: float = 1.3e-5               # 1/K
    youngs_modulus: float = 7.2e10      # Pa
    poisson_ratio: float = 0.17
    p11: float = 0.121
    p12: float = 0.270
    damage_threshold: float = 3e9       # Pa

    def __post_init__(self):
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ValueError("Poisson ratio must lie in [0, 0.5)")
        for name in ("dn_dT", "youngs_modulus", "damage_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def with_overrides(self, **kw) -> "SilicaProperties":
        return replace(self, **kw)


SILICA = SilicaProperties()


@dataclass(frozen=True)
class AtomTransition:
    """A two-level dipole transition.

    ``dipole_moment`` is the matrix element that multiplies the
    single-photon field in g; the default is the Cs D2 cycling value
    (reduced element 3.80e-29 C m divided by sqrt 2).
    """

    vacuum_wavelength: float = 0.852347     # um
    dipole_moment: float = 2.69e-29         # C m
    natural_linewidth: float = 2 * math.pi * 5.234e6   # rad / s  (Gamma)
    name: str = "Cs D2"
    constants: PhysicalConstants = field(default=CONSTANTS, repr=False)

    def __post_init__(self):
        for name in ("vacuum_wavelength", "dipole_moment", "natural_linewidth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def angular_frequency(self) -> float:
        return 2 * math.pi * self.constants.c / self.vacuum_wavelength

    def with_overrides(self, **kw) -> "AtomTransition":
        return replace(self, **kw)


CS_D2 = AtomTransition()


class WavelengthRangeError(ValueError):
    pass


def silica_index(wavelength, silica: SilicaProperties = SILICA):
    """Refractive index of fused silica at ``wavelength`` (um), 0.2-2.0 um."""
    w = np.asarray(wavelength, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w < 0.2) or np.any(w > 2.0):
        raise WavelengthRangeError(f"wavelength outside Sellmeier validity 0.2-2.0 um: {wavelength}")
    w2 = w * w
    eps = 1.0
    for b, c in zip(silica.sellmeier_b, silica.sellmeier_c):
        eps = eps + b * w2 / (w2 - c * c)
    n = np.sqrt(eps)
    return float(n) if n.ndim == 0 else n
