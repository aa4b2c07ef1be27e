"""Correlation of features with writer age.

Pearson's r, its two-tailed significance under the t distribution with
``n - 2`` degrees of freedom, correlation bands, and the tabulations behind
the age histogram and the age/feature scatter plots.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .capture import WriterMeta
from .errors import (
    EmptyInput,
    LengthMismatch,
    TooFewWriters,
    TooShort,
    UnknownFeature,
    ZeroVariance,
)
from .features import FEATURE_NAMES, FeatureVector, format_float

CF_TOLERANCE = 1e-12
CF_MAX_ITER = 10_000
_TINY = 1e-300


class Band(str, enum.Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"
    NEGLIGIBLE = "negligible"
    NOT_APPLICABLE = "n/a"


def pearson(x: ArrayLike, y: ArrayLike) -> float:
    """Pearson product-moment correlation, clamped to ``[-1, 1]``."""
    xs = np.asarray(x, dtype=float).ravel()
    ys = np.asarray(y, dtype=float).ravel()
    if xs.size != ys.size:
        raise LengthMismatch(f"lengths differ: {xs.size} != {ys.size}")
    if xs.size < 3:
        raise TooShort("correlation needs at least 3 pairs")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or np.ptp(xs) == 0:
        raise ZeroVariance("x")
    if syy == 0.0 or np.ptp(ys) == 0:
        raise ZeroVariance("y")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOLERANCE:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)`` for ``a, b > 0``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_statistic(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return math.copysign(math.inf, rho)
    return rho * math.sqrt((n - 2) / (1.0 - rho * rho))


def p_value(rho: float, n: int) -> float:
    """Two-tailed p-value of a Pearson correlation ``rho`` over ``n`` pairs."""
    if n < 3:
        raise TooShort("p-value needs n >= 3")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    if abs(rho) == 1.0:
        return 0.0
    nu = n - 2
    t = t_statistic(rho, n)
    w = nu / (nu + t * t)
    return min(1.0, max(0.0, betainc(nu / 2.0, 0.5, w)))


def classify_band(rho: float) -> Band:
    """Correlation band by ``|rho|``; each band includes its lower edge."""
    r = abs(rho)
    if r >= 0.5:
        return Band.HIGH
    if r >= 0.3:
        return Band.MEDIUM
    if r >= 0.1:
        return Band.LOW
    return Band.NEGLIGIBLE


@dataclass(frozen=True)
class CorrelationRow:
    feature_name: str
    rho: float | None
    t_stat: float | None
    p_value: float | None
    n: int
    band: Band

    @property
    def applicable(self) -> bool:
        return self.rho is not None


@dataclass(frozen=True)
class CorrelationReport:
    rows: tuple[CorrelationRow, ...]
    n: int
    excluded: tuple[tuple[str, str], ...] = field(default=())

    def row(self, name: str) -> CorrelationRow:
        for r in self.rows:
            if r.feature_name == name:
                return r
        raise UnknownFeature(name)

    def to_csv(self, table1_style: bool = False) -> str:
        lines = ["feature,rho,p,t,n,band"]
        for r in self.rows:
            if r.applicable:
                if table1_style:
                    cells = [_fmt_rho_table1(r.rho), f"{r.p_value:.2E}", f"{r.t_stat:.2f}"]
                else:
                    cells = [format_float(r.rho), format_float(r.p_value), format_float(r.t_stat)]
            else:
                cells = ["NA", "NA", "NA"]
            lines.append(",".join([r.feature_name, *cells, str(r.n), r.band.value]))
        return "\n".join(lines) + "\n"

    def to_json(self, table1_style: bool = False) -> str:
        rows = []
        for r in self.rows:
            if r.applicable and table1_style:
                rho, p, t = _fmt_rho_table1(r.rho), f"{r.p_value:.2E}", f"{r.t_stat:.2f}"
            else:
                rho, p, t = r.rho, r.p_value, r.t_stat
            rows.append({"feature": r.feature_name, "rho": rho, "p": p, "t": t, "n": r.n, "band": r.band.value})
        doc = {
            "n": self.n,
            "rows": rows,
            "excluded": [{"writer": w, "reason": why} for w, why in self.excluded],
        }
        return json.dumps(doc, indent=2) + "\n"


def _fmt_rho_table1(rho: float) -> str:
    text = f"{rho:.2f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def correlate_cohort(
    features: Mapping[str, FeatureVector],
    meta: Mapping[str, WriterMeta],
) -> CorrelationReport:
    """Correlate every feature with writer age across the writers in both maps.

    Keys of the two maps identify writers. Features that do not vary across
    writers produce not-applicable rows instead of failing the report.
    """
    shared = sorted(set(features) & set(meta))
    excluded = [(k, "no metadata") for k in sorted(set(features) - set(meta))]
    excluded += [(k, "no recording") for k in sorted(set(meta) - set(features))]
    n = len(shared)
    if n < 3:
        raise TooFewWriters(f"{n} writers matched, at least 3 required")

    ages = np.array([meta[k].age for k in shared], dtype=float)
    table = np.array([features[k].values() for k in shared], dtype=float)
    rows = []
    for j, name in enumerate(FEATURE_NAMES):
        try:
            rho = pearson(table[:, j], ages)
        except ZeroVariance:
            rows.append(CorrelationRow(name, None, None, None, n, Band.NOT_APPLICABLE))
            continue
        rows.append(CorrelationRow(name, rho, t_statistic(rho, n), p_value(rho, n), n, classify_band(rho)))
    return CorrelationReport(tuple(rows), n, tuple(excluded))


def histogram(values: Sequence[float], width: float, origin: float = 0.0) -> list[tuple[float, int]]:
    """Counts in half-open bins ``[origin + k*width, origin + (k+1)*width)``.

    Only occupied bins are returned, ordered by lower edge.
    """
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise EmptyInput("histogram of no values")
    if not width > 0:
        raise ValueError("bin width must be positive")
    k = np.floor((vals - origin) / width).astype(np.int64)
    idx, counts = np.unique(k, return_counts=True)
    return [(origin + int(i) * width, int(c)) for i, c in zip(idx, counts)]


def scatter_pairs(
    features: Mapping[str, FeatureVector],
    meta: Mapping[str, WriterMeta],
    feature_name: str,
) -> list[tuple[int, float]]:
    """``(age, feature value)`` for each writer in both maps, ordered by writer key."""
    if feature_name not in FEATURE_NAMES:
        raise UnknownFeature(feature_name)
    return [(meta[k].age, features[k][feature_name]) for k in sorted(set(features) & set(meta))]
