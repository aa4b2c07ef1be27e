"""Seeded synthetic handwriting corpora.

Each writer gets a handful of writer-level latent traits (in-air pause length,
stroke length, pen force). A trait is standard normal; when a correlation with
age is planted on a feature driven by that trait, the trait becomes
``rho * z_age + sqrt(1 - rho**2) * noise`` where ``z_age`` is the writer's age
standardized under the uniform age distribution. The trait then moves a
physical knob of the generator, so the planted effect travels through the
whole parse/extract path.

Randomness comes from numpy's Philox counter-based generator keyed by
``(seed, writer index, stream)``, which makes every writer reproducible on its
own and independent of how many other writers are generated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .capture import ALTITUDE_MAX, AZIMUTH_MAX, PRESSURE_MAX, Recording, Sex, WriterMeta, validate_recording
from .errors import BadSpec, IoFailure
from .ingest import write_capture, write_metadata

# feature -> latent trait that drives it
PLANTABLE = {
    "nt_up": "pause",
    "t_upm": "pause",
    "nt_down": "stroke_length",
    "t_downm": "stroke_length",
    "p_meanm": "force",
    "p_medianm": "force",
    "p_maxm": "force",
}
TRAITS = ("pause", "stroke_length", "force")

_STREAM_AGE, _STREAM_TRAITS, _STREAM_SHAPE, _STREAM_SEX = range(4)


@dataclass(frozen=True)
class SynthSpec:
    """Generator parameters.

    Times are milliseconds, lengths tablet units, pressures device units.
    ``pause_ms``/``stroke_ms``/``force`` are population means of the
    writer-level traits and ``*_sd_ms``/``force_sd`` their spreads.
    ``pressure_swing`` is the per-stroke spread of peak pressure around the
    writer's force.
    """

    seed: int = 0
    writers: int = 400
    age_min: int = 18
    age_max: int = 70
    session: int = 2
    strokes_min: int = 4
    strokes_max: int = 8
    sample_interval_ms: int = 10
    stroke_ms: int = 600
    stroke_sd_ms: int = 100
    pause_ms: int = 400
    pause_sd_ms: int = 80
    pause_jitter_ms: int = 0
    amplitude: float = 300.0
    frequency_hz: float = 3.0
    force: float = 620.0
    force_sd: float = 110.0
    pressure_swing: float = 300.0
    hover_samples: int = 3
    planted: Mapping[str, float] = field(default_factory=dict)

    def check(self) -> SynthSpec:
        if not 0 <= self.seed < 2**64:
            raise BadSpec("seed must be an unsigned 64-bit integer")
        if self.writers < 1:
            raise BadSpec("writers must be positive")
        if not 1 <= self.age_min <= self.age_max <= 130:
            raise BadSpec("need 1 <= age_min <= age_max <= 130")
        if not 1 <= self.strokes_min <= self.strokes_max:
            raise BadSpec("need 1 <= strokes_min <= strokes_max")
        if self.sample_interval_ms < 1:
            raise BadSpec("sample_interval_ms must be at least 1")
        for name in ("stroke_ms", "pause_ms"):
            if getattr(self, name) < 2 * self.sample_interval_ms:
                raise BadSpec(f"{name} must span at least two sample intervals")
        for name in ("stroke_sd_ms", "pause_sd_ms", "pause_jitter_ms", "force_sd", "pressure_swing", "amplitude"):
            if getattr(self, name) < 0:
                raise BadSpec(f"{name} must be non-negative")
        if self.frequency_hz <= 0:
            raise BadSpec("frequency_hz must be positive")
        if not 0 < self.force <= PRESSURE_MAX:
            raise BadSpec("force must lie in (0, 1024]")
        if self.hover_samples < 0:
            raise BadSpec("hover_samples must be non-negative")
        traits_used: dict[str, str] = {}
        for name, rho in self.planted.items():
            if name not in PLANTABLE:
                raise BadSpec(f"cannot plant a correlation on {name!r}; plantable: {', '.join(sorted(PLANTABLE))}")
            if not -1.0 <= rho <= 1.0:
                raise BadSpec(f"planted correlation for {name} must lie in [-1, 1]")
            trait = PLANTABLE[name]
            if trait in traits_used:
                raise BadSpec(f"{name} and {traits_used[trait]} share one generator knob")
            traits_used[trait] = name
        return self


def _rng(spec: SynthSpec, index: int, stream: int) -> np.random.Generator:
    seq = np.random.SeedSequence([spec.seed & 0xFFFFFFFF, spec.seed >> 32, index, stream])
    return np.random.Generator(np.random.Philox(seq))


def writer_id(index: int) -> str:
    return f"w{index + 1:04d}"


def writer_age(spec: SynthSpec, index: int) -> int:
    return int(_rng(spec, index, _STREAM_AGE).integers(spec.age_min, spec.age_max, endpoint=True))


def writer_meta(spec: SynthSpec, index: int) -> WriterMeta:
    sex = Sex.MALE if _rng(spec, index, _STREAM_SEX).random() < 0.5 else Sex.FEMALE
    return WriterMeta(writer_id(index), writer_age(spec, index), sex, spec.session)


def _standard_age(spec: SynthSpec, age: int) -> float:
    # moments of the discrete uniform distribution on [age_min, age_max]
    k = spec.age_max - spec.age_min + 1
    if k == 1:
        return 0.0
    mean = (spec.age_min + spec.age_max) / 2.0
    sd = math.sqrt((k * k - 1) / 12.0)
    return (age - mean) / sd


def _traits(spec: SynthSpec, index: int) -> dict[str, float]:
    rng = _rng(spec, index, _STREAM_TRAITS)
    noise = rng.standard_normal(len(TRAITS))
    z = _standard_age(spec, writer_age(spec, index))
    rho_by_trait = {PLANTABLE[name]: rho for name, rho in spec.planted.items()}
    out = {}
    for trait, eps in zip(TRAITS, noise):
        rho = rho_by_trait.get(trait, 0.0)
        out[trait] = rho * z + math.sqrt(1.0 - rho * rho) * float(eps)
    return out


def _quantize(ms: float, dt: int) -> int:
    """Round a duration to whole sample intervals, keeping at least two."""
    return max(2, int(round(ms / dt)))


def generate_recording(spec: SynthSpec, index: int) -> Recording:
    """Synthetic recording of writer ``index``.

    Down strokes are looping sinusoidal trajectories with a bell-shaped
    pressure profile; up strokes are straight in-air moves between them. A
    few hover samples precede and follow the writing.
    """
    spec.check()
    if index < 0:
        raise BadSpec("writer index must be non-negative")
    dt = spec.sample_interval_ms
    traits = _traits(spec, index)
    rng = _rng(spec, index, _STREAM_SHAPE)

    n_strokes = int(rng.integers(spec.strokes_min, spec.strokes_max, endpoint=True))
    stroke_steps = _quantize(spec.stroke_ms + spec.stroke_sd_ms * traits["stroke_length"], dt)
    pause_mean = spec.pause_ms + spec.pause_sd_ms * traits["pause"]
    force = spec.force + spec.force_sd * traits["force"]

    rows: list[np.ndarray] = []
    t = int(rng.integers(0, 1000))
    pen_x, pen_y = 2000.0, 5000.0
    azimuth = float(rng.uniform(300, 3300))
    altitude = float(rng.uniform(400, 700))

    def emit(xs, ys, pen, pressures):
        nonlocal t
        m = len(xs)
        ts = t + dt * np.arange(m)
        az = np.clip(np.round(azimuth + 40 * np.sin(np.linspace(0, math.pi, m))), 0, AZIMUTH_MAX)
        al = np.clip(np.round(altitude + 20 * np.cos(np.linspace(0, math.pi, m))), 0, ALTITUDE_MAX)
        block = np.column_stack(
            [
                np.clip(np.round(xs), 0, None),
                np.clip(np.round(ys), 0, None),
                ts,
                np.full(m, pen),
                az,
                al,
                np.clip(np.round(pressures), 0, PRESSURE_MAX),
            ]
        ).astype(np.int64)
        rows.append(block)
        t = int(ts[-1]) + dt

    def hover(n):
        if n:
            emit(np.full(n, pen_x), np.full(n, pen_y + 80), 0, np.zeros(n))

    hover(spec.hover_samples)
    for k in range(n_strokes):
        if k:
            steps = _quantize(pause_mean + spec.pause_jitter_ms * rng.standard_normal(), dt)
            nxt_x = pen_x + rng.uniform(60, 180)
            u = np.linspace(0.0, 1.0, steps + 1)
            emit(pen_x + (nxt_x - pen_x) * u, pen_y + 60 * np.sin(math.pi * u), 0, np.zeros(steps + 1))
            pen_x = nxt_x
        tau = np.arange(stroke_steps + 1) * dt / 1000.0
        phase = rng.uniform(0, 2 * math.pi)
        freq = spec.frequency_hz * rng.uniform(0.8, 1.25)
        amp = spec.amplitude * rng.uniform(0.7, 1.3)
        drift = rng.uniform(200, 500)
        xs = pen_x + drift * tau + 0.5 * amp * (np.cos(2 * math.pi * freq * tau + phase) - math.cos(phase))
        ys = pen_y + amp * (np.sin(2 * math.pi * freq * tau + phase) - math.sin(phase))
        bell = np.sin(math.pi * (np.arange(stroke_steps + 1) + 0.5) / (stroke_steps + 1))
        peak = force + spec.pressure_swing * rng.uniform(-0.5, 0.5)
        pressures = np.clip(peak * (0.1 + 0.9 * bell), 1, PRESSURE_MAX)
        emit(xs, ys, 1, pressures)
        pen_x, pen_y = float(xs[-1]), float(ys[-1])
    hover(spec.hover_samples)

    rec = Recording(np.vstack(rows), writer_id(index), "paragraph")
    return validate_recording(rec)


def generate_cohort(spec: SynthSpec, out_dir: str | os.PathLike[str]) -> tuple[Path, Path]:
    """Write ``<writer_id>_s<session>.svc`` files and ``metadata.csv`` into ``out_dir``.

    Returns the corpus directory and the metadata path.
    """
    spec.check()
    target = Path(out_dir)
    try:
        target.mkdir(parents=True, exist_ok=True)
        metas = []
        for i in range(spec.writers):
            m = writer_meta(spec, i)
            metas.append(m)
            text = write_capture(generate_recording(spec, i))
            (target / f"{m.key}.svc").write_bytes(text.encode("ascii"))
        meta_path = target / "metadata.csv"
        meta_path.write_text(write_metadata(metas), encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"cannot write corpus to {target}: {exc}") from exc
    return target, meta_path


def parse_spec(text: str) -> SynthSpec:
    """Read a ``key = value`` spec; ``#`` starts a comment.

    Planted correlations use ``planted.<feature> = <rho>``.
    """
    types = {f.name: f.type for f in fields(SynthSpec) if f.name != "planted"}
    values: dict[str, object] = {}
    planted: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise BadSpec(f"line {lineno}: expected 'key = value'")
        try:
            if key.startswith("planted."):
                planted[key[len("planted.") :]] = float(value)
            elif key in types:
                values[key] = int(value) if types[key] in (int, "int") else float(value)
            else:
                raise BadSpec(f"line {lineno}: unknown key {key!r}")
        except ValueError:
            raise BadSpec(f"line {lineno}: bad value {value!r} for {key}") from None
    return SynthSpec(**values, planted=planted).check()  # type: ignore[arg-type]


def load_spec(path: str | os.PathLike[str]) -> SynthSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror}") from exc
    return parse_spec(text)


def with_seed(spec: SynthSpec, seed: int) -> SynthSpec:
    return replace(spec, seed=seed).check()
