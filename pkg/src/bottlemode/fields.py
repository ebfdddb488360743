"""Intensity distribution, exterior cutoff, mode volume and field grids."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import TextIO

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from . import _io
from . import specfun as sf
from .geometry import radius
from .modes import BottleMode, axial_wavefunction, radial_function, standing_coefficients


class CutoffSearchError(RuntimeError):
    pass


class AccuracyError(RuntimeError):
    """Quadrature did not reach its tolerance; ``partial`` holds the last estimate."""

    def __init__(self, message: str, partial: float, error: float):
        super().__init__(message)
        self.partial = partial
        self.error = error


# ---------------------------------------------------------------------------
# pointwise intensity and its maximum
# ---------------------------------------------------------------------------

def intensity(mode: BottleMode, rho, z, normalize: bool = False):
    """|Psi(rho, z)|^2, optionally divided by the global maximum."""
    psi = np.asarray(radial_function(mode, rho, z)) * np.asarray(axial_wavefunction(mode, z))
    out = (psi.real ** 2 + psi.imag ** 2)
    if normalize:
        out = out / peak(mode).value
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Peak:
    rho: float
    z: float
    value: float


def radial_peak(mode: BottleMode, z: float = 0.0) -> tuple[float, float]:
    """(rho, |Phi|^2) of the radial maximum at axial position ``z``."""
    R = float(radius(mode.profile, z))
    rho = np.linspace(0.0, 1.2 * R, 1201)[1:]
    phi2 = np.abs(np.asarray(radial_function(mode, rho, z))) ** 2
    i = int(np.argmax(phi2))
    lo, hi = rho[max(i - 1, 0)], rho[min(i + 1, rho.size - 1)]
    f = lambda r: -abs(complex(radial_function(mode, r, z))) ** 2
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10 * R})
    if -res.fun >= phi2[i]:
        return float(res.x), float(-res.fun)
    return float(rho[i]), float(phi2[i])


@lru_cache(maxsize=64)
def peak(mode: BottleMode) -> Peak:
    """Global maximum of |Psi|^2 (at the caustic), by bounded multistart search."""
    zc = mode.caustic.z_intensity_max
    starts = [zc, -zc] if zc > 0 else [0.0]
    best = None
    scale = None
    for z0 in starts:
        r0, _ = radial_peak(mode, z0)
        if scale is None:
            scale = intensity(mode, r0, z0)
        f = lambda p: -intensity(mode, p[0], p[1]) / scale
        R = float(radius(mode.profile, z0))
        half = 2.0 / math.sqrt(mode.delta_E / 2.0) / max(1.0, math.sqrt(2 * mode.q + 1))
        res = optimize.minimize(
            f, x0=[r0, z0], method="L-BFGS-B",
            bounds=[(0.5 * R, 1.05 * R), (z0 - half, z0 + half)],
            options={"ftol": 1e-15, "gtol": 1e-12},
        )
        cand = Peak(float(res.x[0]), float(res.x[1]), -float(res.fun) * scale)
        start = Peak(r0, z0, -f([r0, z0]) * scale)
        cand = cand if cand.value >= start.value else start
        if best is None or cand.value > best.value:
            best = cand
    return best


def caustic_enhancement(mode: BottleMode) -> float:
    """max_rho I(rho, z_c) / max_rho I(rho, 0)."""
    zc = mode.caustic.z_intensity_max
    _, pc = radial_peak(mode, zc)
    _, p0 = radial_peak(mode, 0.0)
    Zc = float(axial_wavefunction(mode, zc)) ** 2
    Z0 = float(axial_wavefunction(mode, 0.0)) ** 2
    return pc * Zc / (p0 * Z0)


# ---------------------------------------------------------------------------
# exterior cutoff
# ---------------------------------------------------------------------------

def _exterior_real(mode: BottleMode, rho, z):
    """Exterior field divided by the constant phase of A_m.

    A (a J + b Y) = H2 + S H1 with real a, b, so the zeros of Phi are the
    zeros of the real standing wave a J + b Y.
    """
    a, b = standing_coefficients(mode.A_m)
    R = np.asarray(radius(mode.profile, z))
    x = mode.k0 * mode.R_c / R * np.asarray(rho, dtype=float)
    J = np.asarray(sf.cyl_bessel_j(mode.m, x).value)
    Y = np.asarray(sf.cyl_bessel_y(mode.m, x).value)
    return a * J + b * Y


def rho_cutoff(mode: BottleMode, z: float) -> float:
    """First zero of the exterior radial function beyond R(z)."""
    R = float(radius(mode.profile, z))
    step = 0.02 * mode.wavelength
    a = R
    fa = float(_exterior_real(mode, a, z))
    while a < 10.0 * R:
        b = np.linspace(a, min(a + 200 * step, 10.0 * R), 201)
        fb = _exterior_real(mode, b, z)
        sign = np.sign(fb)
        idx = np.nonzero(sign[1:] * sign[:-1] <= 0)[0]
        # skip a zero sitting exactly at the surface
        idx = [i for i in idx if b[i + 1] > R]
        if np.sign(fa) * sign[0] <= 0 and b[0] > R:
            idx = [-1] + idx
        if idx:
            i = idx[0]
            lo, hi = b[i], b[i + 1]
            f = lambda r: float(_exterior_real(mode, r, z))
            return optimize.brentq(f, lo, hi, xtol=1e-7, rtol=1e-14)
        a, fa = b[-1], fb[-1]
    raise CutoffSearchError(f"no exterior zero within 10 R(z) at z={z}")


# ---------------------------------------------------------------------------
# mode volume
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeVolumeResult:
    volume: float                      # um^3
    interior_fraction: float
    quadrature_error_estimate: float   # um^3
    eps_weighted: bool = True


def _panels(a: float, b: float, n_panels: int, order: int):
    x, w = leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _volume_at_level(mode: BottleMode, level: int, u_cut: float, eps_in: float):
    """Tensor Gauss-Legendre estimate in (u = rho / R(z), z).

    In the scaled coordinate the integrand factorizes exactly,
    |Psi(u R(z), z)|^2 = |Phi(u R_c, z_c)|^2 Z(z)^2, because the local
    interior wavenumber scales as 1/R(z); the tensor-product sum is
    therefore the product of the two one-dimensional sums.
    """
    order = 12
    refine = 2 ** level
    x_surface = mode.n_bulk * mode.k0 * mode.R_c
    # radial panels: ~2 units of Bessel argument each
    n_in = max(8, int(math.ceil(x_surface / 2.0))) * refine
    n_out = max(4, int(math.ceil(x_surface * (u_cut - 1.0) / 2.0))) * refine
    u_i, w_i = _panels(0.0, 1.0, n_in, order)
    u_o, w_o = _panels(1.0, u_cut, n_out, order)
    zc = mode.caustic.z_intensity_max
    Rc = float(radius(mode.profile, zc))
    phi_i = np.abs(np.asarray(radial_function(mode, u_i * Rc, zc))) ** 2
    phi_o = np.abs(np.asarray(radial_function(mode, u_o * Rc, zc))) ** 2
    rad_in = eps_in * np.sum(w_i * u_i * phi_i)
    rad_out = np.sum(w_o * u_o * phi_o)

    s = math.sqrt(mode.delta_E / 2.0)
    z_end = mode.caustic.z_turning + 6.0 / s
    spacing = 2 * math.pi / (s * math.sqrt(2 * mode.q + 1))
    n_z = max(8, int(math.ceil(2 * z_end / (0.5 * spacing)))) * refine
    z, w_z = _panels(-z_end, z_end, n_z, order)
    R = np.asarray(radius(mode.profile, z))
    Z2 = np.asarray(axial_wavefunction(mode, z)) ** 2
    ax = np.sum(w_z * Z2 * R * R)
    return 2 * math.pi * ax * rad_in, 2 * math.pi * ax * rad_out


def mode_volume(mode: BottleMode, eps_weighted: bool = True, rtol: float = 1e-7,
                max_level: int = 4) -> ModeVolumeResult:
    """V = integral of eps * I / I_max over the mode, radially out to rho_0(z)."""
    pk = peak(mode)
    zc = mode.caustic.z_intensity_max
    Rc = float(radius(mode.profile, zc))
    # rho_0(z) / R(z) is z-independent for the same scaling reason
    u_cut = rho_cutoff(mode, zc) / Rc
    eps_in = mode.n_bulk ** 2 if eps_weighted else 1.0
    prev = None
    for level in range(max_level + 1):
        vin, vout = _volume_at_level(mode, level, u_cut, eps_in)
        total = (vin + vout) / pk.value
        if prev is not None:
            err = abs(total - prev[0])
            if err <= rtol * abs(total):
                return ModeVolumeResult(float(total), float(vin / (vin + vout)), float(err), eps_weighted)
        prev = (total, vin, vout)
    raise AccuracyError("mode-volume quadrature did not converge", prev[0],
                        abs(prev[0] - total))


# ---------------------------------------------------------------------------
# field grids
# ---------------------------------------------------------------------------

def caustic_feature_width(mode: BottleMode) -> float:
    """Full width at half maximum (um) of the outermost axial intensity lobe."""
    s = math.sqrt(mode.delta_E / 2.0)
    if mode.q == 0:
        return 2.0 * math.sqrt(2.0 * math.log(2.0)) / s
    x_peak = mode.caustic.z_intensity_max * s
    xs = np.linspace(0.0, math.sqrt(2 * mode.q + 1) + 6.0, 40001)
    h2 = np.asarray(sf.hermite_gauss(mode.q, xs).value) ** 2
    i0 = int(np.searchsorted(xs, x_peak))
    half = 0.5 * h2[i0]
    hi = i0 + int(np.argmax(h2[i0:] < half))
    lo = i0 - int(np.argmax(h2[i0::-1] < half))
    return float(xs[hi] - xs[lo]) / s


@dataclass(frozen=True)
class FieldGrid:
    rho_axis: np.ndarray
    z_axis: np.ndarray
    values: np.ndarray           # shape (len(z_axis), len(rho_axis))
    normalization: str           # "grid" or "peak"
    under_resolved: bool = False

    def write_csv(self, stream: TextIO) -> None:
        rows = ((r, z, v) for iz, z in enumerate(self.z_axis)
                for r, v in zip(self.rho_axis, self.values[iz]))
        _io.write_csv(stream, ("rho_um", "z_um", "intensity"), rows)

    def to_json_dict(self) -> dict:
        return {
            "rho_um": self.rho_axis,
            "z_um": self.z_axis,
            "shape": [int(self.values.shape[0]), int(self.values.shape[1])],
            "normalization": self.normalization,
            "under_resolved": bool(self.under_resolved),
            "intensity": [list(row) for row in self.values],
        }

    def write_json(self, stream: TextIO) -> None:
        stream.write(_io.dumps(self.to_json_dict()))


def field_grid(mode: BottleMode, rho_range: tuple[float, float], z_range: tuple[float, float],
               resolution: tuple[int, int], jobs: int = 1, rows_per_chunk: int = 16) -> FieldGrid:
    """Normalized intensity on a regular (rho, z) grid.

    ``resolution`` is (n_rho, n_z).  If the grid spans the global
    maximizer the samples are scaled so that their maximum is exactly 1;
    otherwise they are scaled by the true maximum.  Samples are computed
    independently, so the result does not depend on ``jobs``.
    """
    n_rho, n_z = (int(v) for v in resolution)
    if n_rho < 1 or n_z < 1:
        raise ValueError("resolution must be positive")
    (r0, r1), (z0, z1) = rho_range, z_range
    if r1 <= r0 or z1 <= z0 or r0 < 0:
        raise ValueError("ranges must have positive length and rho >= 0")
    rho = np.linspace(r0, r1, n_rho)
    z = np.linspace(z0, z1, n_z)
    chunks = [z[i:i + rows_per_chunk] for i in range(0, n_z, rows_per_chunk)]

    def work(zs):
        Z, RHO = np.meshgrid(zs, rho, indexing="ij")
        return intensity(mode, RHO, Z)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    raw = np.vstack(parts)

    pk = peak(mode)
    covers = (r0 <= pk.rho <= r1) and (z0 <= pk.z <= z1 or z0 <= -pk.z <= z1)
    if covers:
        vals, how = raw / raw.max(), "grid"
    else:
        vals, how = np.minimum(raw / pk.value, 1.0), "peak"
    dz = (z1 - z0) / max(n_z - 1, 1)
    under = dz > 0.5 * caustic_feature_width(mode)
    return FieldGrid(rho, z, vals, how, under)
