"""Finite-difference kinematics of pen trajectories.

Timestamps are milliseconds; derived rates are per second. No smoothing or
resampling is applied. Callers should pass one pen-down stroke at a time so
that differences never straddle a pen lift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import TooShort, ZeroTimeSpan

RADIUS_CAP = 1e6
CURVATURE_FLOOR = 1e-6
SPEED_FLOOR = 1e-9


def derivative(signal: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Time derivative of ``signal`` sampled at millisecond times ``t``.

    Central differences over the actual (possibly irregular) timestamps at
    interior points, one-sided differences at both ends. Where the time
    window of a stencil is zero the derivative is reported as 0.

    >>> derivative([0, 1, 0], [0, 10, 20]).tolist()
    [100.0, 0.0, -100.0]
    """
    s = np.asarray(signal, dtype=float)
    ts = np.asarray(t, dtype=float)
    if s.shape != ts.shape or s.ndim != 1:
        raise ValueError("signal and t must be 1-D sequences of equal length")
    if s.size < 2:
        raise TooShort("derivative needs at least 2 samples")

    ds = np.empty_like(s)
    dt = np.empty_like(ts)
    ds[1:-1] = s[2:] - s[:-2]
    dt[1:-1] = ts[2:] - ts[:-2]
    ds[0], dt[0] = s[1] - s[0], ts[1] - ts[0]
    ds[-1], dt[-1] = s[-1] - s[-2], ts[-1] - ts[-2]

    out = np.zeros_like(s)
    ok = dt > 0
    # differences are taken in milliseconds so a constant time offset cancels exactly
    out[ok] = ds[ok] / (dt[ok] / 1000.0)
    return out


@dataclass(frozen=True)
class KinematicTrace:
    """Per-sample kinematic quantities, aligned with the source samples."""

    vx: np.ndarray
    vy: np.ndarray
    speed: np.ndarray
    theta: np.ndarray
    ds: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    accel_mag: np.ndarray
    a_tangential: np.ndarray
    curvature: np.ndarray
    curvature_radius: np.ndarray
    a_centripetal: np.ndarray

    def __len__(self) -> int:
        return self.vx.size


def derive(x: ArrayLike, y: ArrayLike, t: ArrayLike) -> KinematicTrace:
    """Velocity, acceleration, trajectory angle and curvature of a path.

    ``curvature`` is the signed curvature ``(vx*ay - vy*ax) / speed**3``. Where
    ``|curvature| < 1e-6`` or the pen is at rest, the curvature is taken as
    zero and the radius is capped at :data:`RADIUS_CAP`.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    ts = np.asarray(t, dtype=float)
    if not (xs.shape == ys.shape == ts.shape) or xs.ndim != 1:
        raise ValueError("x, y and t must be 1-D sequences of equal length")
    if xs.size < 2:
        raise TooShort("kinematics need at least 2 samples")
    if ts[-1] == ts[0]:
        raise ZeroTimeSpan("all timestamps are equal")

    vx = derivative(xs, ts)
    vy = derivative(ys, ts)
    speed = np.hypot(vx, vy)
    theta = np.arctan2(vy, vx)
    ds = np.zeros_like(xs)
    ds[1:] = np.hypot(np.diff(xs), np.diff(ys))
    ax = derivative(vx, ts)
    ay = derivative(vy, ts)
    accel_mag = np.hypot(ax, ay)
    a_tangential = derivative(speed, ts)

    moving = speed >= SPEED_FLOOR
    curvature = np.zeros_like(xs)
    curvature[moving] = (vx[moving] * ay[moving] - vy[moving] * ax[moving]) / speed[moving] ** 3
    curvature[np.abs(curvature) < CURVATURE_FLOOR] = 0.0
    bent = curvature != 0.0
    radius = np.full_like(xs, RADIUS_CAP)
    radius[bent] = np.minimum(1.0 / np.abs(curvature[bent]), RADIUS_CAP)
    a_centripetal = speed**2 * np.abs(curvature)

    return KinematicTrace(
        vx=vx,
        vy=vy,
        speed=speed,
        theta=theta,
        ds=ds,
        ax=ax,
        ay=ay,
        accel_mag=accel_mag,
        a_tangential=a_tangential,
        curvature=curvature,
        curvature_radius=radius,
        a_centripetal=a_centripetal,
    )
