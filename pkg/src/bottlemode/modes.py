"""Bottle-mode eigenproblem: radial resonance, axial oscillator, wavefunction.

The radial problem at a cross-section of radius R is a dielectric
cylinder (index n) with interior solution A J_m(k rho) and exterior
solution H2_m(k rho / n) + S H1_m(k rho / n): a unit incoming wave plus
the scattered outgoing wave.  Value and slope are continuous at rho = R.
The p = 1 resonance of azimuthal order m is the real vacuum wavenumber
that maximizes the interior build-up |A|^2.

The same machinery handles a dielectric sphere (spherical Bessel
functions), used by ``coupling`` for the microsphere reference mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import specfun as sf
from .geometry import (
    CausticReport,
    ResonatorProfile,
    axial_level_spacing,
    caustic,
    radius,
)
from .materials import silica_index


class NumericalDegeneracyError(ArithmeticError):
    pass


class ResonanceNotFoundError(LookupError):
    pass


class SolverError(RuntimeError):
    def __init__(self, message: str, trace: list[float] | None = None):
        super().__init__(message)
        self.trace = list(trace or [])


# ---------------------------------------------------------------------------
# radial families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialFamily:
    """Regular/irregular solutions of the radial equation of one geometry."""

    name: str
    regular: Callable[[int, np.ndarray], sf.CylPair]
    irregular: Callable[[int, np.ndarray], sf.CylPair]
    wronskian: Callable[[np.ndarray], np.ndarray]     # W[reg, irr] = reg irr' - reg' irr
    nu_shift: float                                    # effective order nu = m + shift
    damping: float                                     # f'' + (damping/x) f' + (1 - c/x^2) f = 0
    centrifugal: Callable[[int], float]                # c(m)

    def second_derivative(self, m, x, f, fp):
        return -self.damping / x * fp - (1.0 - self.centrifugal(m) / (x * x)) * f


CYLINDER = RadialFamily(
    name="cylinder",
    regular=sf.cyl_bessel_j,
    irregular=sf.cyl_bessel_y,
    wronskian=lambda x: 2.0 / (np.pi * x),
    nu_shift=0.0,
    damping=1.0,
    centrifugal=lambda m: float(m * m),
)

SPHERE = RadialFamily(
    name="sphere",
    regular=sf.sph_bessel,
    irregular=sf.sph_bessel_y,
    wronskian=lambda x: 1.0 / (x * x),
    nu_shift=0.5,
    damping=2.0,
    centrifugal=lambda l: float(l * (l + 1)),
)


def _standing(family: RadialFamily, m: int, x_in, x_out, n: float):
    """Real exterior coefficients (a, b) with a f(x) + b g(x) matched to f(x_in).

    Value and slope continuity of the interior regular solution f
    (argument x_in, slope factor n) onto a j + b y at x_out.
    """
    J = family.regular(m, x_in)
    Jo = family.regular(m, x_out)
    Yo = family.irregular(m, x_out)
    W = family.wronskian(x_out)
    a = (J.value * Yo.derivative - n * J.derivative * Yo.value) / W
    b = (n * J.derivative * Jo.value - J.value * Jo.derivative) / W
    return a, b, J, Jo, Yo


def _from_standing(a: float, b: float, m: int, x_in, x_out):
    """A and S from a j + b y = ((a + ib) H2 + (a - ib) H1) / 2."""
    c = complex(a, b)
    if not np.isfinite(c) or c == 0:
        raise NumericalDegeneracyError(
            f"matching system singular for m={m}, x_in={x_in:g}, x_out={x_out:g}"
        )
    return 2.0 / c, c.conjugate() / c


def standing_coefficients(A: complex) -> tuple[float, float]:
    """(a, b) of the exterior standing wave A (a j + b y) = H2 + S H1."""
    c = 2.0 / A
    return c.real, c.imag


def radial_match(m: int, k_phi: float, R: float, n_bulk: float, family: RadialFamily = CYLINDER):
    """Interior amplitude A_m and scattering coefficient S_m.

    Interior ``A J_m(k_phi rho)``, exterior
    ``H2_m(k_phi rho/n) + S H1_m(k_phi rho/n)``; value and rho-derivative
    continuous at ``rho = R``.  The system is solved in its real
    standing-wave form, so ``|S| = 1`` holds to rounding.
    """
    if k_phi * R <= 0:
        raise ValueError("k_phi * R must be positive")
    x_in = k_phi * R
    x_out = x_in / n_bulk
    # underflowed J with overflowed Y gives nan here; the check below reports it
    with np.errstate(invalid="ignore", over="ignore"):
        a, b, J, _, _ = _standing(family, m, x_in, x_out, n_bulk)
    scale = np.hypot(J.value, n_bulk * J.derivative)
    if scale == 0 or not np.isfinite(scale):
        raise NumericalDegeneracyError(
            f"matching system singular for m={m}, x_in={x_in:g}, x_out={x_out:g}"
        )
    return _from_standing(float(a), float(b), m, x_in, x_out)


def _ab_slopes(family: RadialFamily, m: int, x, n: float):
    """(a, b, da/dx, db/dx) along the line x_in = n x."""
    x = np.asarray(x, dtype=float)
    a, b, J, Jo, Yo = _standing(family, m, n * x, x, n)
    W = family.wronskian(x)
    dlogW = -(family.damping) / x               # W ~ x^-damping
    Jpp = family.second_derivative(m, n * x, J.value, J.derivative)
    Jopp = family.second_derivative(m, x, Jo.value, Jo.derivative)
    Yopp = family.second_derivative(m, x, Yo.value, Yo.derivative)
    da = (J.value * Yopp - n * n * Jpp * Yo.value) / W - a * dlogW
    db = (n * n * Jpp * Jo.value - J.value * Jopp) / W - b * dlogW
    return a, b, da, db


def buildup(m: int, x, n: float, family: RadialFamily = CYLINDER):
    """Interior build-up |A|^2 = 4 / (a^2 + b^2) as a function of x = k0 R."""
    a, b, _, _ = _ab_slopes(family, m, x, n)
    return 4.0 / (a * a + b * b)


def _resonance_bracket(m: int, n: float, family: RadialFamily) -> tuple[float, float]:
    """Interval in x that contains the p = 1 resonance.

    The interior function must be past its first maximum (slope of the
    opposite sign to the decaying exterior) and before its first zero.
    """
    nu = m + family.nu_shift
    c = nu ** (1.0 / 3.0)
    return (nu + 0.5 * c) / n, (nu + 2.6 * c) / n


def _resonance_x(m: int, n: float, family: RadialFamily) -> float:
    """x = k0 R of the p = 1 resonance (maximum of |A|^2).

    The maximum sits where the irregular-function weight a crosses zero,
    displaced by -b b' / a'^2; for high orders that displacement is far
    below double-precision resolution.
    """
    lo, hi = _resonance_bracket(m, n, family)
    xs = np.linspace(lo, hi, 257)
    a = _ab_slopes(family, m, xs, n)[0]
    idx = np.nonzero(np.sign(a[:-1]) != np.sign(a[1:]))[0]
    if a[0] <= 0 or idx.size == 0:
        raise ResonanceNotFoundError(f"p=1 resonance of order {m} not bracketed")
    i = idx[0]
    fa = lambda t: float(_ab_slopes(family, m, t, n)[0])
    x0 = optimize.brentq(fa, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    a0, b0, da, db = (float(v) for v in _ab_slopes(family, m, x0, n))
    return x0 - (a0 * da + b0 * db) / (da * da + db * db)


def resonant_match(m: int, x: float, n_bulk: float, family: RadialFamily = CYLINDER):
    """A and S at the build-up maximum next to ``x``.

    At the maximum a a' + b b' = 0, so a = -b b' / a'.  Using that value
    instead of a(x) keeps the field shape exact even when the resonance
    is narrower than the spacing of representable x.
    """
    a, b, da, db = (float(v) for v in _ab_slopes(family, m, x, n_bulk))
    a_star = -b * db / da
    return _from_standing(a_star, b, m, n_bulk * x, x)



@dataclass(frozen=True)
class Resonance:
    m: int
    k0: float            # vacuum wavenumber, 1/um
    x: float             # k0 R

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k0


def find_azimuthal_resonance(R_c: float, wavelength_window: tuple[float, float], n_bulk: float,
                             family: RadialFamily = CYLINDER) -> list[Resonance]:
    """All p = 1 resonances of radius ``R_c`` inside the wavelength window.

    Sorted by azimuthal order, highest first.
    """
    lam_lo, lam_hi = sorted(wavelength_window)
    if not (lam_lo > 0 and lam_hi > lam_lo):
        raise ResonanceNotFoundError("empty wavelength window")
    x_lo = 2 * math.pi * R_c / lam_hi
    x_hi = 2 * math.pi * R_c / lam_lo
    found = []
    m_first = max(1, int(math.floor(x_lo)) - 1)
    m_last = int(math.ceil(n_bulk * x_hi)) + 1
    for m in range(m_first, m_last + 1):
        if m > sf.MAX_ORDER:
            break
        lo, hi = _resonance_bracket(m, n_bulk, family)
        if hi < x_lo or lo > x_hi:
            continue
        x = _resonance_x(m, n_bulk, family)
        if x_lo <= x <= x_hi:
            found.append(Resonance(m, x / R_c, x))
    if not found:
        raise ResonanceNotFoundError(
            f"no p=1 resonance for R={R_c} um in window {lam_lo}-{lam_hi} um"
        )
    return sorted(found, key=lambda r: -r.m)


def highest_order_reaching(R_c: float, target_wavelength: float, n_bulk: float,
                           family: RadialFamily = CYLINDER) -> Resonance:
    """Highest-order p = 1 resonance whose wavelength is not shorter than the target.

    Equivalently: the largest m whose caustic radius for the target
    wavelength does not exceed ``R_c``.
    """
    # adjacent orders are ~1/x apart in relative wavelength; start with
    # a window of a few spacings and widen if it happens to be empty
    span = 3.0 * target_wavelength / (2 * math.pi * R_c)
    for _ in range(6):
        window = (target_wavelength, target_wavelength * (1.0 + span))
        try:
            return find_azimuthal_resonance(R_c, window, n_bulk, family)[0]
        except ResonanceNotFoundError:
            span *= 2.0
    raise ResonanceNotFoundError(f"no p=1 resonance above {target_wavelength} um for R={R_c} um")


# ---------------------------------------------------------------------------
# axial problem
# ---------------------------------------------------------------------------

def eigen_wavenumber(m: int, q: int, R0: float, delta_k: float) -> float:
    """k_mq = sqrt(m^2/R0^2 + (q + 1/2) 2 m delta_k / R0)."""
    if m < 1 or q < 0:
        raise ValueError("need m >= 1 and q >= 0")
    return math.sqrt((m / R0) ** 2 + (q + 0.5) * 2.0 * m * delta_k / R0)


@dataclass(frozen=True)
class AxialEnergy:
    E: float                 # k^2 - m^2 / R0^2, 1/um^2
    delta_E: float

    def V_of_z(self, z):
        return (0.5 * self.delta_E * np.asarray(z, dtype=float)) ** 2


def solve_R0(k: float, m: int, q: int, delta_k: float, R_start: float,
             tol: float = 1e-13, max_iter: int = 500) -> tuple[float, list[float]]:
    """Fixed point R0 = m / sqrt(k^2 - (2q+1) m delta_k / R0)."""
    R0 = R_start
    trace = [R0]
    for _ in range(max_iter):
        rad = k * k - (2 * q + 1) * m * delta_k / R0
        if rad <= 0:
            raise SolverError("fixed point left the bound-mode region", trace)
        new = m / math.sqrt(rad)
        trace.append(new)
        if abs(new - R0) <= tol * new:
            return new, trace
        R0 = new
    raise SolverError(f"R0 fixed point did not converge in {max_iter} iterations", trace)


# ---------------------------------------------------------------------------
# solved mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeIndices:
    m: int
    q: int
    p: int = 1

    def __post_init__(self):
        if self.p != 1:
            raise ValueError("only p = 1 modes are supported")
        if self.m < 1 or self.q < 0:
            raise ValueError("need m >= 1 and q >= 0")


@dataclass(frozen=True)
class BottleMode:
    indices: ModeIndices
    profile: ResonatorProfile
    k: float                 # m / R_c, 1/um
    k0: float                # vacuum wavenumber of the resonance, 1/um
    n_bulk: float
    n_eff: float
    R_c: float
    delta_E: float
    A_m: complex
    S_m: complex
    caustic: CausticReport
    target_wavelength: float
    R0_trace: tuple[float, ...] = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return self.indices.m

    @property
    def q(self) -> int:
        return self.indices.q

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k0

    @property
    def axial_energy(self) -> AxialEnergy:
        return AxialEnergy(self.k * self.k - (self.m / self.profile.R0) ** 2, self.delta_E)

    def interior_wavenumber(self, z):
        """Local interior wavenumber n k0 R_c / R(z); n k0 R_c / n at the exterior."""
        return self.n_bulk * self.k0 * self.R_c / np.asarray(radius(self.profile, z))

    def radial(self, rho, z):
        """Matched radial function Phi(rho, z) at the local radius R(z)."""
        return radial_function(self, rho, z)

    def axial(self, z):
        return axial_wavefunction(self, z)

    def wavefunction(self, rho, z):
        return wavefunction(self, rho, z)


def axial_wavefunction(mode: BottleMode, z):
    """Z_mq(z), normalized so that the integral of Z^2 over z is 1."""
    s = math.sqrt(mode.delta_E / 2.0)
    h = sf.hermite_gauss(mode.q, s * np.asarray(z, dtype=float))
    return np.asarray(h.value) * math.sqrt(s)


def axial_derivatives(mode: BottleMode, z):
    """(Z, Z', Z'') from the Hermite ladder relations."""
    s = math.sqrt(mode.delta_E / 2.0)
    h = sf.hermite_gauss(mode.q, s * np.asarray(z, dtype=float))
    c = math.sqrt(s)
    return (np.asarray(h.value) * c, np.asarray(h.derivative) * c * s,
            np.asarray(h.second_derivative) * c * s * s)


def radial_function(mode: BottleMode, rho, z):
    rho, z = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(z, dtype=float))
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    R = np.asarray(radius(mode.profile, z))
    k_in = mode.n_bulk * mode.k0 * mode.R_c / R
    x = k_in * rho
    out = np.zeros(rho.shape, dtype=complex)
    inside = rho < R
    if inside.any():
        out[inside] = mode.A_m * np.asarray(sf.cyl_bessel_j(mode.m, x[inside]).value)
    outside = ~inside
    if outside.any():
        a, b = standing_coefficients(mode.A_m)
        xo = x[outside] / mode.n_bulk
        J = np.asarray(sf.cyl_bessel_j(mode.m, xo).value)
        Y = np.asarray(sf.cyl_bessel_y(mode.m, xo).value)
        # equals H2 + S H1 without the cancellation between the two waves
        out[outside] = mode.A_m * (a * J + b * Y)
    return out[()] if out.ndim == 0 else out


def wavefunction(mode: BottleMode, rho, z):
    """Psi(rho, z) = Phi(rho, z) Z(z); the exp(i m phi) factor is omitted."""
    rho, z = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(z, dtype=float))
    psi = radial_function(mode, rho, z) * axial_wavefunction(mode, z)
    return psi[()] if np.ndim(psi) == 0 else psi


def solve_bottle_mode(target_wavelength: float, R_c: float, delta_k: float, q: int,
                      n_bulk: float | None = None) -> BottleMode:
    """Solve the (m, q, p=1) bottle mode with caustic radius ``R_c``.

    m is the highest azimuthal order whose p = 1 resonance at radius R_c
    does not fall below ``target_wavelength``.  R0 then follows from the
    axial eigenvalue condition with k = m / R_c.
    """
    if n_bulk is None:
        n_bulk = silica_index(target_wavelength)
    res = highest_order_reaching(R_c, target_wavelength, n_bulk)
    m = res.m
    k = m / R_c
    R0, trace = solve_R0(k, m, q, delta_k, R_start=R_c)
    profile = ResonatorProfile(R0, delta_k)
    dE = axial_level_spacing(profile, m)
    report = caustic(profile, m, q, k)
    A, S = resonant_match(m, res.x, n_bulk)
    return BottleMode(
        indices=ModeIndices(m, q),
        profile=profile,
        k=k,
        k0=res.k0,
        n_bulk=n_bulk,
        n_eff=m / (res.k0 * R_c),
        R_c=R_c,
        delta_E=dE,
        A_m=A,
        S_m=S,
        caustic=report,
        target_wavelength=target_wavelength,
        R0_trace=tuple(trace),
    )
