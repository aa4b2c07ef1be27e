"""The 39 per-recording handwriting features.

Feature names and their order follow the published feature table. Durations
are seconds, pressure is raw device units, rates are per second.

Definitions that are not obvious from the names:

* ``t_upm``/``t_downm`` are total in-air / on-surface durations and
  ``nt_up``/``nt_down`` are the same totals divided by the stroke counts.
* pressure statistics use pen-down samples only; ``p_modem`` breaks ties
  toward the smaller value and ``p_medianm`` takes the lower middle element.
* ``pNm`` is the fraction of pen-down samples with pressure strictly above N.
* ``dp``/``ddp`` are first and second time derivatives of pressure within each
  down stroke; mean/max statistics use absolute values, entropies use the
  signed values.
* ``ZCRm``/``NZCRm`` count sign changes of the mean-removed vertical velocity
  over all down strokes, per second of writing and per sample step.
* Teager energies are computed per down stroke on the stroke-centred x and y
  coordinates and on raw pressure, then pooled.
"""

from __future__ import annotations

import json
import math
from dataclasses import astuple, dataclass, fields
from typing import Mapping

import numpy as np
from numpy.typing import ArrayLike

from .capture import Recording, Stroke, StrokeKind, segment_strokes
from .errors import EmptySignal, TooShort, UnknownFeature, ZeroDuration
from .kinematics import derivative, derive

DEFAULT_ENTROPY_BINS = 16
PRESSURE_THRESHOLDS = (100, 200, 300, 400, 500, 600, 700, 800, 900)


@dataclass(frozen=True)
class FeatureVector:
    t_upm: float
    t_downm: float
    p_meanm: float
    p_maxm: float
    p_medianm: float
    p_modem: float
    p_stdm: float
    speed_maxm: float
    entropy_xm: float
    entropy_ym: float
    entropy_pm: float
    ZCRm: float
    NZCRm: float
    strokes_dm: float
    strokes_um: float
    nt_up: float
    nt_down: float
    dp_meanm: float
    dp_maxm: float
    ddp_maxm: float
    entropy_dpm: float
    entropy_ddpm: float
    entropy_accelerationm: float
    p100m: float
    p200m: float
    p300m: float
    p400m: float
    p500m: float
    p600m: float
    p700m: float
    p800m: float
    p900m: float
    teagerxmax: float
    teagerym: float
    teagerymedian: float
    teagerymax: float
    teagerpm: float
    teagerpmedian: float
    teagerpmax: float

    def __getitem__(self, name: str) -> float:
        if name not in FEATURE_INDEX:
            raise UnknownFeature(name)
        return getattr(self, name)

    def values(self) -> tuple[float, ...]:
        return astuple(self)

    def to_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values()))

    @classmethod
    def from_dict(cls, mapping: Mapping[str, float]) -> FeatureVector:
        unknown = set(mapping) - set(FEATURE_NAMES)
        if unknown:
            raise UnknownFeature(sorted(unknown)[0])
        return cls(**{name: float(mapping[name]) for name in FEATURE_NAMES})

    def to_csv_row(self) -> str:
        return ",".join(format_float(v) for v in self.values())

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURE_NAMES)}
CSV_HEADER = ",".join(FEATURE_NAMES)


def format_float(value: float) -> str:
    """Shortest round-trip text for ``value``; integral values print without '.0'."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def teager(signal: ArrayLike) -> np.ndarray:
    """Discrete Teager-Kaiser energy ``s[n]**2 - s[n-1]*s[n+1]`` at interior points."""
    s = np.asarray(signal, dtype=float)
    if s.ndim != 1 or s.size < 3:
        raise TooShort("Teager operator needs at least 3 samples")
    return s[1:-1] ** 2 - s[:-2] * s[2:]


def entropy(signal: ArrayLike, bins: int = DEFAULT_ENTROPY_BINS) -> float:
    """Shannon entropy in bits of a ``bins``-bin histogram over ``[min, max]``."""
    s = np.asarray(signal, dtype=float).ravel()
    if s.size == 0:
        raise EmptySignal("entropy of an empty signal")
    if bins < 1:
        raise ValueError("bins must be positive")
    lo, hi = s.min(), s.max()
    if lo == hi:
        return 0.0
    # binned by normalised position; np.histogram rejects ranges only a few ulps wide
    idx = np.minimum(np.floor((s - lo) / (hi - lo) * bins), bins - 1).astype(np.intp)
    counts = np.bincount(idx, minlength=bins)
    q = counts[counts > 0] / s.size
    h = float(-(q * np.log2(q)).sum())
    return min(max(h, 0.0), math.log2(bins))


def zero_crossing_rate(signal: ArrayLike, duration: float) -> tuple[float, float]:
    """Sign changes of the mean-removed signal per second and per sample step.

    Samples that land exactly on the mean carry the sign of the previous
    nonzero sample.
    """
    s = np.asarray(signal, dtype=float).ravel()
    if s.size < 2:
        raise TooShort("zero crossing rate needs at least 2 samples")
    if not duration > 0:
        raise ZeroDuration("duration must be positive")
    if s.min() == s.max():
        return 0.0, 0.0
    signs = np.sign(s - s.mean())
    nonzero = signs[signs != 0]
    count = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
    return count / duration, count / (s.size - 1)


def _lower_median(values: np.ndarray) -> float:
    ordered = np.sort(values)
    return float(ordered[(ordered.size - 1) // 2])


def _mode(values: np.ndarray) -> float:
    uniq, counts = np.unique(values, return_counts=True)
    return float(uniq[np.argmax(counts)])


def _pool(parts: list[np.ndarray]) -> np.ndarray:
    return np.concatenate(parts) if parts else np.empty(0)


def _max(a: np.ndarray) -> float:
    return float(a.max()) if a.size else 0.0


def _mean(a: np.ndarray) -> float:
    return float(a.mean()) if a.size else 0.0


def _median(a: np.ndarray) -> float:
    return float(np.median(a)) if a.size else 0.0


def _entropy_or_zero(a: np.ndarray, bins: int) -> float:
    return entropy(a, bins) if a.size else 0.0


def extract(rec: Recording, bins: int = DEFAULT_ENTROPY_BINS, strokes: list[Stroke] | None = None) -> FeatureVector:
    """Compute the feature vector of a validated recording."""
    if strokes is None:
        strokes = segment_strokes(rec)
    down = [s for s in strokes if s.kind is StrokeKind.DOWN]
    up = [s for s in strokes if s.kind is StrokeKind.UP]

    t_up = sum(s.duration_ms for s in up) / 1000.0
    t_down = sum(s.duration_ms for s in down) / 1000.0
    n_up, n_down = len(up), len(down)

    pen_rows = np.concatenate([s.data for s in down])
    pressure = pen_rows[:, 6].astype(float)

    # kinematic quantities need a positive time span within a stroke
    moving = [s for s in down if len(s) >= 2 and s.duration_ms > 0]
    speeds, vys, accels, dps, ddps = [], [], [], [], []
    zcr_duration_ms = 0
    for s in moving:
        trace = derive(s.x, s.y, s.t)
        speeds.append(trace.speed[1:-1])
        vys.append(trace.vy)
        accels.append(trace.accel_mag)
        dp = derivative(s.pressure, s.t)
        dps.append(dp)
        ddps.append(derivative(dp, s.t))
        zcr_duration_ms += s.duration_ms
    vy = _pool(vys)
    dp = _pool(dps)
    ddp = _pool(ddps)

    if vy.size >= 2 and zcr_duration_ms > 0:
        zcr, nzcr = zero_crossing_rate(vy, zcr_duration_ms / 1000.0)
    else:
        zcr, nzcr = 0.0, 0.0

    teo_x, teo_y, teo_p = [], [], []
    for s in down:
        if len(s) < 3:
            continue
        teo_x.append(teager(s.x - s.x.mean()))
        teo_y.append(teager(s.y - s.y.mean()))
        teo_p.append(teager(s.pressure))
    tx, ty, tp = _pool(teo_x), _pool(teo_y), _pool(teo_p)

    exceed = {n: float(np.count_nonzero(pressure > n)) / pressure.size for n in PRESSURE_THRESHOLDS}

    return FeatureVector(
        t_upm=t_up,
        t_downm=t_down,
        p_meanm=float(pressure.mean()),
        p_maxm=float(pressure.max()),
        p_medianm=_lower_median(pressure),
        p_modem=_mode(pressure),
        p_stdm=float(pressure.std()),
        speed_maxm=_max(_pool(speeds)),
        entropy_xm=entropy(pen_rows[:, 0], bins),
        entropy_ym=entropy(pen_rows[:, 1], bins),
        entropy_pm=entropy(pressure, bins),
        ZCRm=zcr,
        NZCRm=nzcr,
        strokes_dm=float(n_down),
        strokes_um=float(n_up),
        nt_up=t_up / n_up if n_up else 0.0,
        nt_down=t_down / n_down,
        dp_meanm=_mean(np.abs(dp)),
        dp_maxm=_max(np.abs(dp)),
        ddp_maxm=_max(np.abs(ddp)),
        entropy_dpm=_entropy_or_zero(dp, bins),
        entropy_ddpm=_entropy_or_zero(ddp, bins),
        entropy_accelerationm=_entropy_or_zero(_pool(accels), bins),
        p100m=exceed[100],
        p200m=exceed[200],
        p300m=exceed[300],
        p400m=exceed[400],
        p500m=exceed[500],
        p600m=exceed[600],
        p700m=exceed[700],
        p800m=exceed[800],
        p900m=exceed[900],
        teagerxmax=_max(tx),
        teagerym=_mean(ty),
        teagerymedian=_median(ty),
        teagerymax=_max(ty),
        teagerpm=_mean(tp),
        teagerpmedian=_median(tp),
        teagerpmax=_max(tp),
    )
