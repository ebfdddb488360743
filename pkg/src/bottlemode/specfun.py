r"""Bessel, Hankel and Hermite-Gauss functions for high-order WGM work.

Everything here is evaluated by recurrence on numpy arrays:

* :math:`J_m` by Miller's downward recurrence, normalized with the
  sum rule :math:`J_0^2 + 2\sum_{k\ge1} J_k^2 = 1`;
* :math:`Y_m` by upward recurrence from :math:`Y_0, Y_1`, which are built
  from the same Miller sequence via the Neumann series;
* spherical :math:`j_l` by downward recurrence normalized with
  :math:`\sum_l (2l+1) j_l^2 = 1`, and :math:`y_l` by upward recurrence;
* orthonormal Hermite functions :math:`h_q` by the three-term recurrence
  with the Gaussian factored out.

Intermediate values are rescaled by exact powers of two, so the "scaled"
entry points can represent numbers far outside double range (for example
:math:`J_{257}(1)\approx 10^{-584}`).  The plain entry points return
ordinary floats, which underflow to zero or overflow to ``inf`` where the
true value is not representable.

Every element of an input array is processed independently of the others:
the recurrence start index and the rescaling decisions depend only on that
element's argument, so results are bit-identical however a grid is split.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 1000
MAX_HERMITE = 500
MIN_ARGUMENT = 1e-100            # smallest positive argument (0 itself is allowed)

_EULER_GAMMA = 0.57721566490153286061
_SHIFT = 500                     # rescale by 2**-_SHIFT
_BIG = 2.0**_SHIFT


class CapabilityError(ValueError):
    """Requested order lies outside the supported range."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


@dataclass(frozen=True)
class CylPair:
    """Function value and its derivative with respect to the argument."""

    value: np.ndarray | float | complex
    derivative: np.ndarray | float | complex


@dataclass(frozen=True)
class ScaledPair:
    """Value and derivative sharing a power-of-two exponent.

    The true values are ``ldexp(mantissa, exponent)`` and
    ``ldexp(derivative_mantissa, exponent)``.
    """

    mantissa: np.ndarray
    derivative_mantissa: np.ndarray
    exponent: np.ndarray

    def unscaled(self) -> CylPair:
        # out-of-range values become 0 or inf by design
        with np.errstate(over="ignore", under="ignore"):
            return CylPair(
                _squeeze(np.ldexp(self.mantissa, self.exponent)),
                _squeeze(np.ldexp(self.derivative_mantissa, self.exponent)),
            )


@dataclass(frozen=True)
class HermiteGaussValue:
    """Orthonormal Hermite function with first and second derivatives."""

    value: np.ndarray | float
    derivative: np.ndarray | float
    second_derivative: np.ndarray | float


def _squeeze(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def _check_order(order: int, limit: int = MAX_ORDER) -> int:
    if int(order) != order or order < 0:
        raise CapabilityError(f"order must be a non-negative integer, got {order!r}")
    if order > limit:
        raise CapabilityError(f"order {order} exceeds supported maximum {limit}")
    return int(order)


def _as_args(x, allow_zero: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite")
    if allow_zero:
        if np.any(x < 0):
            raise DomainError("argument must be non-negative")
    elif np.any(x <= 0):
        raise DomainError("argument must be strictly positive")
    if np.any((x > 0) & (x < MIN_ARGUMENT)):
        raise CapabilityError(f"positive arguments below {MIN_ARGUMENT:g} are not supported")
    return x


def _start_index(order: int, x: np.ndarray) -> np.ndarray:
    top = np.maximum(float(order), x)
    n = top + 30.0 + 10.0 * np.cbrt(top)
    return (2 * np.ceil(n / 2.0)).astype(np.int64) + 2


def _align(m1, e1, m2, e2):
    """Bring two scaled numbers onto their common (larger) exponent."""
    e = np.maximum(e1, e2)
    return np.ldexp(m1, e1 - e), np.ldexp(m2, e2 - e), e


# ---------------------------------------------------------------------------
# cylindrical functions
# ---------------------------------------------------------------------------

def _miller_cyl(order: int, x: np.ndarray):
    """Downward Miller sweep for x > 0 (1-D array).

    Returns scaled J_order, J_{order-1}, and the unscaled J_0, J_1, Y_0, Y_1.
    """
    start = _start_index(order, x)
    nmax = int(start.max()) if x.size else 0
    size = x.shape
    fk = np.zeros(size)            # f_k
    fk1 = np.zeros(size)           # f_{k+1}
    count = np.zeros(size, dtype=np.int64)
    sq = np.zeros(size)            # 2 * sum_{k>=1} f_k^2, in count-scale squared
    lin = np.zeros(size)           # f_0 + 2 sum f_{2k}: only its sign is used
    y0s = np.zeros(size)           # sum_{k>=1} (-1)^k f_{2k} / k
    y1s = np.zeros(size)           # sum_{j>=1} (-1)^j (f_{2j-1} - f_{2j+1}) / j
    store = {}
    twox = 2.0 / x
    for k in range(nmax, 0, -1):
        seed = start == k
        if seed.any():
            fk = np.where(seed, 1.0, fk)
            fk1 = np.where(seed, 0.0, fk1)
        if k == order or k == order - 1:
            store[k] = (fk.copy(), count.copy())
        sq += 2.0 * fk * fk
        if k % 2 == 0:
            j = k // 2
            lin += 2.0 * fk
            y0s += (1.0 if j % 2 == 0 else -1.0) * fk / j
        else:
            jp = (k + 1) // 2
            coef = (1.0 if jp % 2 == 0 else -1.0) / jp
            if k >= 3:
                jm = (k - 1) // 2
                coef -= (1.0 if jm % 2 == 0 else -1.0) / jm
            y1s += coef * fk
        fnew = k * twox * fk - fk1
        fk1, fk = fk, fnew
        big = np.abs(fk) > _BIG
        if big.any():
            scale = np.where(big, 2.0**-_SHIFT, 1.0)
            fk = fk * scale
            fk1 = fk1 * scale
            lin = lin * scale
            y0s = y0s * scale
            y1s = y1s * scale
            sq = sq * scale * scale
            count = count + big
    f0 = fk
    f1 = fk1
    if order <= 1:
        store[0] = (f0.copy(), count.copy())
    sq += f0 * f0
    lin += f0
    norm = np.sqrt(sq) * np.where(lin < 0, -1.0, 1.0)

    def scaled(key):
        mant, c = store[key]
        return mant / norm, -_SHIFT * (count - c)

    jo = scaled(order)
    jo1 = scaled(order - 1) if order >= 1 else None
    j0 = f0 / norm
    j1 = f1 / norm
    ln = np.log(0.5 * x) + _EULER_GAMMA
    y0 = (2.0 / np.pi) * (ln * j0 - 2.0 * y0s / norm)
    y1 = (2.0 / np.pi) * (ln * j1 - j0 / x + y1s / norm)
    return jo, jo1, j0, j1, y0, y1


def _cyl_jy_scaled(order: int, x: np.ndarray, want_j: bool = True, want_y: bool = True):
    """Scaled J_order and/or Y_order from a single Miller sweep."""
    flat = x.reshape(-1)
    shape = x.shape
    mant = np.zeros(flat.shape)
    dmant = np.zeros(flat.shape)
    expo = np.zeros(flat.shape, dtype=np.int64)
    zero = flat == 0.0
    pos = ~zero
    if zero.any():
        mant[zero] = 1.0 if order == 0 else 0.0
        dmant[zero] = 0.5 if order == 1 else 0.0
    jpair = ypair = None
    if pos.any():
        xp = flat[pos]
        (jm, em), jo1, j0, j1, y0, y1 = _miller_cyl(max(order, 1), xp)
        if order == 0:
            mant[pos], dmant[pos], expo[pos] = j0, -j1, 0
        else:
            jl, el = jo1
            a, b, e = _align(jm, em, jl, el)
            mant[pos] = a
            dmant[pos] = b - order / xp * a
            expo[pos] = e
        if want_y:
            ym, ydm, ye = _upward(order, xp, y0, y1, lambda k: 2.0 * k, lambda k: float(k))
            ypair = ScaledPair(ym.reshape(shape), ydm.reshape(shape), ye.reshape(shape))
    if want_j:
        jpair = ScaledPair(mant.reshape(shape), dmant.reshape(shape), expo.reshape(shape))
    return jpair, ypair


def _cyl_j_scaled(order: int, x: np.ndarray) -> ScaledPair:
    return _cyl_jy_scaled(order, x, want_y=False)[0]


def _cyl_y_scaled(order: int, x: np.ndarray) -> ScaledPair:
    return _cyl_jy_scaled(order, x, want_j=False)[1]


def _upward(order, x, f0, f1, coef, dcoef):
    """Generic upward recurrence f_{k+1} = coef(k)/x f_k - f_{k-1}.

    ``dcoef(k)`` gives the derivative rule f_k' = f_{k-1} - dcoef(k)/x f_k
    (for k >= 1; k = 0 uses f_0' = -f_1).
    """
    count = np.zeros(x.shape, dtype=np.int64)
    if order == 0:
        return f0, -f1, count
    prev, cur = f0, f1
    for k in range(1, order):
        prev, cur = cur, coef(k) / x * cur - prev
        big = np.abs(cur) > _BIG
        if big.any():
            scale = np.where(big, 2.0**-_SHIFT, 1.0)
            prev = prev * scale
            cur = cur * scale
            count = count + big
    return cur, prev - dcoef(order) / x * cur, _SHIFT * count


def cyl_bessel_j(order: int, x) -> CylPair:
    """Bessel function of the first kind J_order(x) and its derivative.

    Parameters
    ----------
    order : int
        Non-negative integer order, at most ``MAX_ORDER``.
    x : float or array_like
        Non-negative real argument(s).
    """
    order = _check_order(order)
    return _cyl_j_scaled(order, _as_args(x, allow_zero=True)).unscaled()


def cyl_bessel_j_scaled(order: int, x) -> ScaledPair:
    order = _check_order(order)
    return _cyl_j_scaled(order, _as_args(x, allow_zero=True))


def cyl_bessel_y(order: int, x) -> CylPair:
    """Bessel function of the second kind Y_order(x) and its derivative (x > 0)."""
    order = _check_order(order)
    return _cyl_y_scaled(order, _as_args(x, allow_zero=False)).unscaled()


def cyl_bessel_y_scaled(order: int, x) -> ScaledPair:
    order = _check_order(order)
    return _cyl_y_scaled(order, _as_args(x, allow_zero=False))


def cyl_bessel_jy_scaled(order: int, x) -> tuple[ScaledPair, ScaledPair]:
    """Scaled J and Y pairs for x > 0 sharing one recurrence sweep."""
    order = _check_order(order)
    return _cyl_jy_scaled(order, _as_args(x, allow_zero=False))


def cyl_hankel(kind: int, order: int, x) -> CylPair:
    """Hankel function H^(1) = J + iY or H^(2) = J - iY, with derivative."""
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    order = _check_order(order)
    jp, yp = _cyl_jy_scaled(order, _as_args(x, allow_zero=False))
    j, y = jp.unscaled(), yp.unscaled()
    sign = 1.0 if kind == 1 else -1.0
    return CylPair(
        _squeeze(np.asarray(j.value) + sign * 1j * np.asarray(y.value)),
        _squeeze(np.asarray(j.derivative) + sign * 1j * np.asarray(y.derivative)),
    )


# ---------------------------------------------------------------------------
# spherical functions
# ---------------------------------------------------------------------------

def _sph_j_scaled(order: int, x: np.ndarray) -> ScaledPair:
    flat = x.reshape(-1)
    mant = np.zeros(flat.shape)
    dmant = np.zeros(flat.shape)
    expo = np.zeros(flat.shape, dtype=np.int64)
    zero = flat == 0.0
    if zero.any():
        mant[zero] = 1.0 if order == 0 else 0.0
        dmant[zero] = 1.0 / 3.0 if order == 1 else 0.0
    pos = ~zero
    if pos.any():
        xp = flat[pos]
        start = _start_index(order, xp)
        nmax = int(start.max())
        fk = np.zeros(xp.shape)
        fk1 = np.zeros(xp.shape)
        count = np.zeros(xp.shape, dtype=np.int64)
        sq = np.zeros(xp.shape)
        store = {}
        for k in range(nmax, 0, -1):
            seed = start == k
            if seed.any():
                fk = np.where(seed, 1.0, fk)
                fk1 = np.where(seed, 0.0, fk1)
            if k == order or k == order - 1:
                store[k] = (fk.copy(), count.copy())
            sq += (2 * k + 1) * fk * fk
            fnew = (2 * k + 1) / xp * fk - fk1
            fk1, fk = fk, fnew
            big = np.abs(fk) > _BIG
            if big.any():
                scale = np.where(big, 2.0**-_SHIFT, 1.0)
                fk = fk * scale
                fk1 = fk1 * scale
                sq = sq * scale * scale
                count = count + big
        if order <= 1:
            store[0] = (fk.copy(), count.copy())
        sq += fk * fk
        # sign from whichever closed form j_0, j_1 is larger in magnitude
        s, c = np.sin(xp), np.cos(xp)
        j0c = s / xp
        j1c = s / xp**2 - c / xp
        ref = np.where(np.abs(j0c) >= np.abs(j1c), j0c * fk, j1c * fk1)
        norm = np.sqrt(sq) * np.where(ref < 0, -1.0, 1.0)

        def scaled(key):
            m_, c_ = store[key]
            return m_ / norm, -_SHIFT * (count - c_)

        jm, em = scaled(order)
        if order == 0:
            mant[pos], dmant[pos], expo[pos] = jm, -fk1 / norm, em
        else:
            jl, el = scaled(order - 1)
            a, b, e = _align(jm, em, jl, el)
            mant[pos] = a
            dmant[pos] = b - (order + 1) / xp * a
            expo[pos] = e
    return ScaledPair(mant.reshape(x.shape), dmant.reshape(x.shape), expo.reshape(x.shape))


def _sph_y_scaled(order: int, x: np.ndarray) -> ScaledPair:
    flat = x.reshape(-1)
    s, c = np.sin(flat), np.cos(flat)
    y0 = -c / flat
    y1 = -c / flat**2 - s / flat
    mant, dmant, expo = _upward(order, flat, y0, y1, lambda k: 2.0 * k + 1.0, lambda k: k + 1.0)
    return ScaledPair(mant.reshape(x.shape), dmant.reshape(x.shape), expo.reshape(x.shape))


def sph_bessel(order: int, x) -> CylPair:
    """Spherical Bessel function j_order(x) and its derivative."""
    order = _check_order(order)
    return _sph_j_scaled(order, _as_args(x, allow_zero=True)).unscaled()


def sph_bessel_scaled(order: int, x) -> ScaledPair:
    order = _check_order(order)
    return _sph_j_scaled(order, _as_args(x, allow_zero=True))


def sph_bessel_y(order: int, x) -> CylPair:
    """Spherical Bessel function of the second kind y_order(x) (x > 0)."""
    order = _check_order(order)
    return _sph_y_scaled(order, _as_args(x, allow_zero=False)).unscaled()


def sph_bessel_y_scaled(order: int, x) -> ScaledPair:
    order = _check_order(order)
    return _sph_y_scaled(order, _as_args(x, allow_zero=False))


def sph_hankel1(order: int, x) -> CylPair:
    """Spherical Hankel function h^(1)_order = j + i y, with derivative."""
    order = _check_order(order)
    x = _as_args(x, allow_zero=False)
    j = _sph_j_scaled(order, x).unscaled()
    y = _sph_y_scaled(order, x).unscaled()
    return CylPair(
        _squeeze(np.asarray(j.value) + 1j * np.asarray(y.value)),
        _squeeze(np.asarray(j.derivative) + 1j * np.asarray(y.derivative)),
    )


# ---------------------------------------------------------------------------
# Hermite functions
# ---------------------------------------------------------------------------

def hermite_gauss(q: int, x) -> HermiteGaussValue:
    r"""Orthonormal Hermite function :math:`h_q(x)` with two derivatives.

    :math:`h_q(x) = H_q(x) e^{-x^2/2} / \sqrt{2^q q! \sqrt\pi}`, so that
    :math:`\int h_q^2\,dx = 1`.  Neither :math:`H_q` nor :math:`q!` is ever
    formed; the Gaussian is applied at the end together with the tracked
    power-of-two exponent, so no intermediate overflows.

    The derivatives come from the ladder relations
    :math:`h_q' = \sqrt{2q}\,h_{q-1} - x h_q` and its derivative.
    """
    q = _check_order(q, MAX_HERMITE)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite")
    count = np.zeros(x.shape, dtype=np.int64)
    g2 = np.zeros(x.shape)                       # g_{k-2}
    g1 = np.zeros(x.shape)                       # g_{k-1}
    g = np.full(x.shape, np.pi**-0.25)           # g_k
    for k in range(q):
        g2, g1, g = g1, g, np.sqrt(2.0 / (k + 1)) * x * g - np.sqrt(k / (k + 1)) * g1
        big = np.abs(g) > _BIG
        if big.any():
            scale = np.where(big, 2.0**-_SHIFT, 1.0)
            g, g1, g2 = g * scale, g1 * scale, g2 * scale
            count = count + big
    factor = np.exp(count * (_SHIFT * np.log(2.0)) - 0.5 * x * x)
    h, hm1, hm2 = g * factor, g1 * factor, g2 * factor
    dh = np.sqrt(2.0 * q) * hm1 - x * h
    dhm1 = np.sqrt(2.0 * (q - 1)) * hm2 - x * hm1 if q >= 1 else np.zeros(x.shape)
    d2h = np.sqrt(2.0 * q) * dhm1 - h - x * dh
    return HermiteGaussValue(_squeeze(h), _squeeze(dh), _squeeze(d2h))
