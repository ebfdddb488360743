"""Atom-photon coupling strength of bottle and microsphere modes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize
from scipy.special import gammaln

from . import _io
from . import specfun as sf
from .fields import ModeVolumeResult, intensity, peak
from .geometry import radius
from .materials import CS_D2, AtomTransition, silica_index
from .modes import (SPHERE, BottleMode, highest_order_reaching, resonant_match,
                    standing_coefficients)


def g_max(volume: float, transition: AtomTransition = CS_D2) -> float:
    """Peak single-photon coupling (d/hbar) sqrt(hbar w / (2 eps0 V)), rad/s.

    ``volume`` is in um^3.
    """
    if volume <= 0:
        raise ValueError("mode volume must be positive")
    c = transition.constants
    v_si = volume * 1e-18
    field = math.sqrt(c.hbar * transition.angular_frequency / (2.0 * c.eps0 * v_si))
    return transition.dipole_moment * field / c.hbar


@dataclass(frozen=True)
class CouplingCurve:
    distance_axis: np.ndarray     # um from the dielectric surface
    g_axis: np.ndarray            # rad/s
    reference_label: str

    @property
    def g_over_2pi_MHz(self) -> np.ndarray:
        return self.g_axis / (2 * math.pi) / 1e6

    def decay_length(self) -> float:
        """Distance (um) at which g has dropped to g(0)/e, by interpolation in log g."""
        target = math.log(self.g_axis[0]) - 1.0
        lg = np.log(self.g_axis)
        i = int(np.argmax(lg < target))
        if lg[i] >= target:
            raise ValueError("curve does not reach g(0)/e; increase d_max")
        d0, d1 = self.distance_axis[i - 1], self.distance_axis[i]
        t = (lg[i - 1] - target) / (lg[i - 1] - lg[i])
        return float(d0 + t * (d1 - d0))

    def write_csv(self, stream: TextIO) -> None:
        _io.write_csv(stream, ("distance_um", "g_over_2pi_MHz"),
                      zip(self.distance_axis, self.g_over_2pi_MHz))

    def to_json_dict(self) -> dict:
        return {
            "reference_label": self.reference_label,
            "distance_um": self.distance_axis,
            "g_over_2pi_MHz": self.g_over_2pi_MHz,
        }


def coupling_curve(g_peak: float, field_abs: Callable[[np.ndarray], np.ndarray],
                   peak_abs: float, d_max: float, samples: int, label: str) -> CouplingCurve:
    """g(d) = g_peak |field(d)| / |field|_max on an even grid d in [0, d_max].

    Shared by every geometry; ``field_abs`` maps surface distances to
    field magnitudes on whatever line the geometry prescribes.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if d_max < 0:
        raise ValueError("d_max must be non-negative")
    d = np.linspace(0.0, d_max, samples) if samples > 1 else np.zeros(1)
    g = g_peak * np.asarray(field_abs(d), dtype=float) / peak_abs
    return CouplingCurve(d, g, label)


def _volume_value(volume) -> float:
    return volume.volume if isinstance(volume, ModeVolumeResult) else float(volume)


def g_at_surface_curve(mode: BottleMode, volume, transition: AtomTransition = CS_D2,
                       d_max: float = 1.0, samples: int = 201) -> CouplingCurve:
    """Coupling versus distance from the surface at the caustic z_c."""
    zc = mode.caustic.z_intensity_max
    Rz = float(radius(mode.profile, zc))
    field = lambda d: np.sqrt(intensity(mode, Rz + d, np.full_like(d, zc)))
    return coupling_curve(g_max(_volume_value(volume), transition), field,
                          math.sqrt(peak(mode).value), d_max, samples,
                          f"bottle m={mode.m} q={mode.q}")


def evanescent_decay_length(mode: BottleMode) -> float:
    """Closed-form 1/e length of the field just outside the surface at z_c.

    Uses the exterior azimuthal wavenumber m/R(z_c) against the local
    exterior wavenumber k0 R_c / R(z_c).
    """
    Rz = float(radius(mode.profile, mode.caustic.z_intensity_max))
    x = mode.k0 * mode.R_c
    return Rz / math.sqrt(mode.m ** 2 - x * x)


# ---------------------------------------------------------------------------
# microsphere reference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereMode:
    radius: float          # um
    l: int                 # = m for the equatorial fundamental mode
    k0: float              # 1/um
    n_bulk: float
    A: complex
    S: complex

    @property
    def m(self) -> int:
        return self.l

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k0


def sphere_mode(radius_um: float, target_wavelength: float, n_bulk: float | None = None) -> SphereMode:
    """Fundamental equatorial p = 1 mode of a dielectric sphere.

    Same resonance criterion as the bottle: highest order whose build-up
    maximum lies at or above the target wavelength.
    """
    if n_bulk is None:
        n_bulk = silica_index(target_wavelength)
    res = highest_order_reaching(radius_um, target_wavelength, n_bulk, SPHERE)
    A, S = resonant_match(res.m, res.x, n_bulk, SPHERE)
    return SphereMode(radius_um, res.m, res.k0, n_bulk, A, S)


def sphere_radial(mode: SphereMode, r) -> np.ndarray:
    """Radial function: A j_l(n k0 r) inside, h2 + S h1 at k0 r outside."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape, dtype=complex)
    inside = r < mode.radius
    if inside.any():
        out[inside] = mode.A * np.asarray(sf.sph_bessel(mode.l, mode.n_bulk * mode.k0 * r[inside]).value)
    if (~inside).any():
        x = mode.k0 * r[~inside]
        j = np.asarray(sf.sph_bessel(mode.l, x).value)
        y = np.asarray(sf.sph_bessel_y(mode.l, x).value)
        a, b = standing_coefficients(mode.A)
        out[~inside] = mode.A * (a * j + b * y)
    return out[()] if out.ndim == 0 else out


def sphere_field(mode: SphereMode, r, theta) -> np.ndarray:
    """psi(r, theta) with the fundamental angular envelope sin^l(theta)."""
    return sphere_radial(mode, r) * np.abs(np.sin(theta)) ** mode.l


def _sphere_real_exterior(mode: SphereMode, r):
    a, b = standing_coefficients(mode.A)
    x = mode.k0 * np.asarray(r, dtype=float)
    return a * np.asarray(sf.sph_bessel(mode.l, x).value) + \
        b * np.asarray(sf.sph_bessel_y(mode.l, x).value)


def sphere_cutoff(mode: SphereMode) -> float:
    """First zero of the exterior radial function beyond the surface."""
    R = mode.radius
    r = np.linspace(R, 3.0 * R, 20001)
    f = _sphere_real_exterior(mode, r)
    idx = np.nonzero(np.sign(f[1:]) != np.sign(f[:-1]))[0]
    if idx.size == 0:
        raise RuntimeError("no exterior zero within 3 R")
    i = idx[0]
    return optimize.brentq(lambda t: float(_sphere_real_exterior(mode, t)), r[i], r[i + 1],
                           xtol=1e-9)


def sphere_radial_peak(mode: SphereMode) -> tuple[float, float]:
    r = np.linspace(0.5 * mode.radius, 1.05 * mode.radius, 4001)
    f2 = np.abs(sphere_radial(mode, r)) ** 2
    i = int(np.argmax(f2))
    res = optimize.minimize_scalar(lambda t: -abs(complex(sphere_radial(mode, t))) ** 2,
                                   bounds=(r[i - 1], r[i + 1]), method="bounded",
                                   options={"xatol": 1e-12 * mode.radius})
    if -res.fun >= f2[i]:
        return float(res.x), float(-res.fun)
    return float(r[i]), float(f2[i])


def sphere_mode_volume(mode: SphereMode, eps_weighted: bool = True,
                       rtol: float = 1e-7, max_level: int = 4) -> ModeVolumeResult:
    """Volume of the equatorial mode by the same eps-weighted recipe as the bottle.

    Radial Gauss-Legendre quadrature out to the first exterior zero; the
    polar integral of sin^(2l+1) is exact, and the azimuth gives 2 pi.
    """
    r_cut = sphere_cutoff(mode)
    _, pk = sphere_radial_peak(mode)
    eps_in = mode.n_bulk ** 2 if eps_weighted else 1.0
    polar = math.exp(0.5 * math.log(math.pi) + gammaln(mode.l + 1) - gammaln(mode.l + 1.5))
    x_surface = mode.n_bulk * mode.k0 * mode.radius
    xg, wg = leggauss(12)
    prev = None
    for level in range(max_level + 1):
        parts = []
        for a, b, eps in ((0.0, mode.radius, eps_in), (mode.radius, r_cut, 1.0)):
            n = max(8, int(math.ceil(x_surface * (b - a) / mode.radius / 2.0))) * 2 ** level
            edges = np.linspace(a, b, n + 1)
            half = 0.5 * np.diff(edges)[:, None]
            nodes = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half * xg[None, :]
            w = half * wg[None, :]
            f2 = np.abs(sphere_radial(mode, nodes.ravel())) ** 2
            parts.append(eps * np.sum(w.ravel() * nodes.ravel() ** 2 * f2))
        total = 2 * math.pi * polar * (parts[0] + parts[1]) / pk
        if prev is not None and abs(total - prev) <= rtol * total:
            return ModeVolumeResult(float(total), float(parts[0] / (parts[0] + parts[1])),
                                    float(abs(total - prev)), eps_weighted)
        prev = total
    from .fields import AccuracyError
    raise AccuracyError("sphere mode-volume quadrature did not converge", prev, float("nan"))


def sphere_g_curve(mode: SphereMode, volume, transition: AtomTransition = CS_D2,
                   d_max: float = 1.0, samples: int = 201) -> CouplingCurve:
    """Coupling versus distance from the sphere surface in the equatorial plane."""
    _, pk = sphere_radial_peak(mode)
    field = lambda d: np.abs(sphere_radial(mode, mode.radius + d))
    return coupling_curve(g_max(_volume_value(volume), transition), field, math.sqrt(pk),
                          d_max, samples, f"sphere R={mode.radius:g}um l={mode.l}")


# ---------------------------------------------------------------------------
# regime assessment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    g: float            # rad/s
    kappa: float        # rad/s
    gamma: float        # rad/s
    strong_coupling: bool


def regime_report(g: float, Q: float, transition: AtomTransition = CS_D2) -> RegimeReport:
    """Compare g with the cavity decay w/Q and the atomic linewidth."""
    if Q <= 0:
        raise ValueError("Q must be positive")
    kappa = transition.angular_frequency / Q
    gamma = transition.natural_linewidth
    return RegimeReport(g, kappa, gamma, bool(g > kappa and g > gamma))
