"""Slow arbitrary-precision reference values for the special functions.

Dev-time tool, not part of the installed package.  Values come from the
defining power series summed in mpmath with enough working digits to
absorb the cancellation between terms (roughly x / ln 10 extra digits).

Input: plain text, one ``function order x`` triple per line (``#``
comments allowed).  Output: the same triple followed by the value at 30
significant digits.

Functions:
    J, Jp    cylindrical Bessel J_n and dJ_n/dx
    Y, Yp    cylindrical Bessel Y_n and dY_n/dx
    sj, sjp  spherical Bessel j_l and dj_l/dx
    sy, syp  spherical Bessel y_l and dy_l/dx

Usage::

    python tools/bigfloat_oracle.py triples.txt > table.txt
"""
from __future__ import annotations

import sys

import mpmath as mp

FUNCTIONS = ("J", "Jp", "Y", "Yp", "sj", "sjp", "sy", "syp")


def _digits_for(x) -> int:
    return 40 + int(float(x) / 2.0) + 10


def _series_j(nu, x):
    """sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), any real nu."""
    h = x / 2
    h2 = h * h
    term = h**nu / mp.gamma(nu + 1) if not (mp.isint(nu) and nu < 0) else None
    if term is None:
        raise ValueError("negative integer order not supported by the series")
    total = term
    k = 0
    tiny = mp.mpf(10) ** (-mp.mp.dps - 5)
    while True:
        k += 1
        term = -term * h2 / (k * (k + nu))
        total += term
        if abs(term) < tiny * abs(total) and k > h:
            return total


def _series_y_int(n: int, x):
    """Y_n for integer n >= 0 (Abramowitz & Stegun 9.1.11)."""
    h = x / 2
    h2 = h * h
    first = mp.mpf(0)
    for k in range(n):
        first += mp.factorial(n - k - 1) / mp.factorial(k) * h ** (2 * k - n)
    jn = _series_j(n, x)
    term = h**n / mp.factorial(n)
    psi_sum = mp.digamma(1) + mp.digamma(n + 1)
    third = term * psi_sum
    k = 0
    tiny = mp.mpf(10) ** (-mp.mp.dps - 5)
    while True:
        k += 1
        term = -term * h2 / (k * (k + n))
        psi_sum += mp.mpf(1) / k + mp.mpf(1) / (k + n)
        contrib = term * psi_sum
        third += contrib
        if abs(contrib) < tiny * (abs(third) + abs(first)) and k > h:
            break
    return -first / mp.pi + 2 / mp.pi * mp.log(h) * jn - third / mp.pi


def _sph(kind: str, l: int, x):
    pref = mp.sqrt(mp.pi / (2 * x))
    if kind == "j":
        return pref * _series_j(mp.mpf(l) + mp.mpf(1) / 2, x)
    return (-1) ** (l + 1) * pref * _series_j(-mp.mpf(l) - mp.mpf(1) / 2, x)


def evaluate(func: str, order: int, x: str | float):
    """High-precision value of ``func`` at ``(order, x)`` as an mpf."""
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}")
    with mp.workdps(_digits_for(x)):
        xv = mp.mpf(x)
        n = int(order)
        if func == "J":
            return +_series_j(n, xv)
        if func == "Jp":
            if n == 0:
                return -_series_j(1, xv)
            return (_series_j(n - 1, xv) - _series_j(n + 1, xv)) / 2
        if func == "Y":
            return +_series_y_int(n, xv)
        if func == "Yp":
            if n == 0:
                return -_series_y_int(1, xv)
            return (_series_y_int(n - 1, xv) - _series_y_int(n + 1, xv)) / 2
        kind = func[1]
        if func.endswith("p"):
            if n == 0:
                return -_sph(kind, 1, xv)
            return _sph(kind, n - 1, xv) - (n + 1) / xv * _sph(kind, n, xv)
        return +_sph(kind, n, xv)


def radial_match(m: int, k_phi, R, n):
    """High-precision A, S for interior A J_m(k rho), exterior H2 + S H1 at k rho / n.

    Solves the continuity system directly with complex Hankel functions.
    """
    with mp.workdps(60):
        k, R, n = mp.mpf(k_phi), mp.mpf(R), mp.mpf(n)
        xi, xo = k * R, k * R / n
        J = mp.besselj(m, xi)
        Jp = mp.besselj(m, xi, derivative=1)
        H1 = mp.hankel1(m, xo)
        H2 = mp.hankel2(m, xo)
        H1p = (mp.hankel1(m - 1, xo) - mp.hankel1(m + 1, xo)) / 2
        H2p = (mp.hankel2(m - 1, xo) - mp.hankel2(m + 1, xo)) / 2
        # A J - S H1 = H2 ;  A n J' - S H1' = H2'
        M = mp.matrix([[J, -H1], [n * Jp, -H1p]])
        sol = mp.lu_solve(M, mp.matrix([H2, H2p]))
        return sol[0], sol[1]


def exterior_zero(m: int, A, S, k_out, R):
    """First zero of Re(e^{-i arg(A)} (H2 + S H1)(k_out rho)) beyond rho = R."""
    with mp.workdps(40):
        phase = mp.exp(-1j * mp.arg(A))
        f = lambda r: mp.re(phase * (mp.hankel2(m, k_out * r) + S * mp.hankel1(m, k_out * r)))
        r, step = mp.mpf(R), mp.mpf("0.01")
        fa = f(r)
        while True:
            fb = f(r + step)
            if fa * fb <= 0:
                return mp.findroot(f, (r, r + step), solver="anderson")
            r, fa = r + step, fb


def format_line(func: str, order: int, x: str, value) -> str:
    return f"{func} {order} {x} {mp.nstr(value, 30, min_fixed=1, max_fixed=0)}"


def main(argv: list[str]) -> int:
    source = open(argv[1], encoding="utf-8") if len(argv) > 1 else sys.stdin
    for raw in source:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        func, order, x = line.split()
        print(format_line(func, int(order), x, evaluate(func, int(order), x)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
