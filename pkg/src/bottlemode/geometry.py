"""Resonator profile, adiabatic wave-vector decomposition and caustics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .specfun import hermite_gauss


class ClassicallyForbiddenError(ValueError):
    """Requested axial position lies beyond the caustic turning point."""


class NoBoundModeError(ValueError):
    pass


@dataclass(frozen=True)
class ResonatorProfile:
    """Bottle profile R(z) = R0 / sqrt(1 + (delta_k z)^2); lengths in um."""

    R0: float
    delta_k: float

    def __post_init__(self):
        if self.R0 <= 0 or self.delta_k < 0:
            raise ValueError("R0 must be positive and delta_k non-negative")
        if self.R0 * self.delta_k >= 0.1:
            raise ValueError(
                f"R0*delta_k = {self.R0 * self.delta_k:.3g} outside the adiabatic regime (< 0.1)"
            )


def radius(profile: ResonatorProfile, z):
    z = np.asarray(z, dtype=float)
    r = profile.R0 / np.sqrt(1.0 + (profile.delta_k * z) ** 2)
    return float(r) if r.ndim == 0 else r


def radius_slope(profile: ResonatorProfile, z):
    """dR/dz of the explicit profile."""
    z = np.asarray(z, dtype=float)
    a = profile.delta_k**2
    s = -profile.R0 * a * z / (1.0 + a * z * z) ** 1.5
    return float(s) if s.ndim == 0 else s


def parabolic_radius(profile: ResonatorProfile, z):
    """The parabolic approximation R0 (1 - (delta_k z)^2 / 2)."""
    z = np.asarray(z, dtype=float)
    r = profile.R0 * (1.0 - 0.5 * (profile.delta_k * z) ** 2)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class WaveVectorComponents:
    k_phi: np.ndarray | float
    k_z: np.ndarray | float
    k_rho_bound: np.ndarray | float


def turning_point(profile: ResonatorProfile, R_c: float) -> float:
    """Axial position where R(z) = R_c."""
    ratio = profile.R0 / R_c
    if ratio < 1.0:
        raise NoBoundModeError("caustic radius larger than R0")
    if profile.delta_k == 0.0:
        return math.inf
    return math.sqrt(ratio * ratio - 1.0) / profile.delta_k


def wavevector_components(k: float, R_c: float, profile: ResonatorProfile, z, sign: float = 1.0):
    """Azimuthal and axial wave-vector components at ``z`` (|z| <= z_turning).

    ``k_phi R(z) = k R_c`` is conserved; ``k_z`` carries ``sign``.
    """
    z = np.asarray(z, dtype=float)
    r = np.asarray(radius(profile, z))
    ratio = R_c / r
    # one ulp of slack so that z_turning itself is admitted
    if np.any(ratio > 1.0 + 4 * np.finfo(float).eps):
        raise ClassicallyForbiddenError("|z| beyond the turning point")
    ratio = np.minimum(ratio, 1.0)
    k_phi = k * ratio
    k_z = sign * k * np.sqrt(1.0 - ratio * ratio)
    k_rho = np.abs(np.asarray(radius_slope(profile, z))) * np.abs(k_z)
    sq = lambda a: float(a) if np.ndim(a) == 0 else a
    return WaveVectorComponents(sq(k_phi), sq(k_z), sq(k_rho))


@dataclass(frozen=True)
class CausticReport:
    z_turning: float         # classical turning point, um
    z_intensity_max: float   # outermost intensity maximum, um
    R_c: float               # radius at the turning point, um


def axial_level_spacing(profile: ResonatorProfile, m: int) -> float:
    """Delta E_m = 2 m delta_k / R0 (um^-2)."""
    return 2.0 * m * profile.delta_k / profile.R0


def outermost_hermite_peak(q: int) -> float:
    """Position x > 0 of the outermost maximum of h_q(x)^2 (0 for q = 0)."""
    if q == 0:
        return 0.0
    xt = math.sqrt(2 * q + 1)
    xs = np.linspace(0.5 * xt, xt + 3.0, 4000)
    d = np.asarray(hermite_gauss(q, xs).derivative)
    h = np.asarray(hermite_gauss(q, xs).value)
    # extrema of h are zeros of h'; the outermost one nearest the turning point
    idx = np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
    idx = [i for i in idx if abs(h[i]) > 1e-3 * np.abs(h).max()]
    i = idx[-1]
    f = lambda t: float(hermite_gauss(q, t).derivative)
    return optimize.brentq(f, xs[i], xs[i + 1], xtol=1e-13, rtol=1e-14)


def caustic(profile: ResonatorProfile, m: int, q: int, k: float) -> CausticReport:
    """Turning point and outermost intensity maximum of mode (m, q)."""
    energy = k * k - (m / profile.R0) ** 2
    if energy <= 0:
        raise NoBoundModeError(f"no bound axial mode: E = k^2 - m^2/R0^2 = {energy:.3g} <= 0")
    dE = axial_level_spacing(profile, m)
    z_turn = 2.0 * math.sqrt((q + 0.5) / dE)
    z_max = outermost_hermite_peak(q) / math.sqrt(dE / 2.0)
    return CausticReport(z_turn, z_max, float(radius(profile, z_turn)))


@dataclass(frozen=True)
class ParaxialBounds:
    ratio_bound: float   # max |k_rho / k_z| for |z| <= z_turning
    eq4_error: float     # relative change of k_z when k_rho is restored


def paraxial_error_bound(profile: ResonatorProfile, z_turning: float) -> ParaxialBounds:
    """Size of the neglected radial wave-vector component.

    With k_rho = (dR/dz) k_z the ratio |k_rho/k_z| is |dR/dz|, maximized
    on |z| <= z_turning.  Restoring k_rho in k^2 = k_z^2 + k_phi^2 + k_rho^2
    changes k_z by the factor sqrt(1 - ratio^2).
    """
    if profile.delta_k == 0.0:
        return ParaxialBounds(0.0, 0.0)
    slope = lambda z: -abs(radius_slope(profile, z))
    # |dR/dz| peaks at z = 1/(sqrt(2) delta_k)
    z_star = min(z_turning, 1.0 / (math.sqrt(2.0) * profile.delta_k))
    ratio = abs(radius_slope(profile, z_star))
    if z_star < z_turning:
        res = optimize.minimize_scalar(slope, bounds=(0.0, z_turning), method="bounded")
        ratio = max(ratio, -res.fun)
    err = 1.0 - math.sqrt(1.0 - ratio * ratio)
    return ParaxialBounds(ratio, err)
