"""Compare the special functions against a table of high-precision reference values.

Table format: one ``function order x value`` record per line, ``#``
comments allowed.  Functions are ``J Jp Y Yp`` (cylindrical) and
``sj sjp sy syp`` (spherical).  Values may lie far outside double range;
the comparison uses the scaled (mantissa, power-of-two) entry points and
decimal arithmetic, so nothing underflows.
"""
from __future__ import annotations

import decimal
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

import numpy as np

from . import specfun as sf

_SCALED = {
    "J": (sf.cyl_bessel_j_scaled, False),
    "Jp": (sf.cyl_bessel_j_scaled, True),
    "Y": (sf.cyl_bessel_y_scaled, False),
    "Yp": (sf.cyl_bessel_y_scaled, True),
    "sj": (sf.sph_bessel_scaled, False),
    "sjp": (sf.sph_bessel_scaled, True),
    "sy": (sf.sph_bessel_y_scaled, False),
    "syp": (sf.sph_bessel_y_scaled, True),
}

_CTX = decimal.Context(prec=40, Emax=10**7, Emin=-10**7)


@dataclass(frozen=True)
class OracleRecord:
    func: str
    order: int
    x: str
    reference: Decimal


@dataclass(frozen=True)
class OracleComparison:
    record: OracleRecord
    computed: Decimal
    relative_error: float
    ok: bool


def load_table(path: str | Path) -> list[OracleRecord]:
    out = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in _SCALED:
            raise ValueError(f"{path}:{lineno}: malformed oracle record {raw!r}")
        out.append(OracleRecord(parts[0], int(parts[1]), parts[2], Decimal(parts[3])))
    return out


def evaluate(func: str, order: int, x: float) -> Decimal:
    """Value of ``func`` as an exact decimal expansion of mantissa * 2**exponent."""
    fn, deriv = _SCALED[func]
    pair = fn(order, np.array([float(x)]))
    mant = float(np.ravel(pair.derivative_mantissa if deriv else pair.mantissa)[0])
    exp = int(np.ravel(pair.exponent)[0])
    return _CTX.multiply(Decimal(mant), _CTX.power(Decimal(2), exp))


def compare(records: list[OracleRecord], rtol: float = 5e-9) -> list[OracleComparison]:
    """Relative agreement of each record; ``ok`` when within ``rtol``."""
    out = []
    for rec in records:
        got = evaluate(rec.func, rec.order, float(rec.x))
        if rec.reference == 0:
            err = float(abs(got))
        else:
            err = float(_CTX.divide(abs(_CTX.subtract(got, rec.reference)), abs(rec.reference)))
        out.append(OracleComparison(rec, got, err, err <= rtol))
    return out
