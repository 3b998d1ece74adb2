"""Scenario model: launch profiles, validated configuration, TOML round-trip.

Config schema (TOML, unknown keys are rejected):

    [engine]
    kind = "optical" | "quantum" | "relativistic"
    eikonal = false                    # optional, default false
    lambda0_over_w0 = 2e-4             # normalized route, gaussian launch only
    # or explicit constants instead of the ratio:
    # k0 = 1.0                         # optical
    # energy = 0.5, mass = 1.0         # quantum
    # energy = 1.0, rest_mass = 0.0    # relativistic

    [medium]
    kind = "vacuum" | "refractive" | "potential"
    form = "uniform" | "linear" | "harmonic"      # non-vacuum
    value = 1.0                                   # uniform / linear offset
    gradient = [1e-3, 0.0]                        # linear
    omega = 1.0                                   # harmonic (potential only)
    box = [xmin, xmax, zmin, zmax]                # optional domain bounds

    [launch]
    kind = "gaussian" | "slits"
    w0 = 1.0                 # gaussian waist; derived when lambda0_over_w0 given
    ray_count = 201
    truncation_factor = 4.0  # optional; half-width X = factor * w0 (gaussian)
    p0 = 1.0                 # optional launch momentum override
    [[launch.slits]]
    center = -6.0; width = 2.0; peak_width = 1.0

    [integration]
    dt = 0.1        # optional; default advances the fastest ray lambda0/20
    steps = 1000
    output_cadence = 10   # optional; default max(1, steps // 100)

    [output]
    dir = "out"           # optional
    planes = [0.0, 10.0]  # optional z stations
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .bundle import Wavefront
from .engines import OPTICAL, QUANTUM, RELATIVISTIC, EngineSpec
from .errors import ConfigError
from .medium import INDEX, POTENTIAL, Medium
from .transport import _segments, tube_widths

GAUSSIAN = "gaussian"
SLITS = "slits"


@dataclass(frozen=True)
class SlitSpec:
    """One slit: a smooth gaussian peak of scale ``peak_width`` at ``center``.

    ``width`` is the physical opening; the peak must fit inside it.
    """

    center: float
    width: float
    peak_width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigError("launch.slits.width: must be positive")
        if not 0 < self.peak_width <= self.width:
            raise ConfigError("launch.slits.peak_width: must be in (0, width]")


@dataclass(frozen=True)
class LaunchProfile:
    """Amplitude distribution over the launch surface z = 0.

    ``min_amplitude`` drops grid rays whose launch amplitude falls below the
    given fraction of the profile peak.  Slit launches need it: the near-dead
    trough between slits would otherwise be sampled by rays whose tubes the
    exact dynamics compresses beyond any fixed time step; an unsampled trough
    is carried by a single wide tube instead, which costs nothing.
    """

    kind: str
    ray_count: int
    w0: Optional[float] = None
    truncation_factor: float = 4.0
    slits: Tuple[SlitSpec, ...] = ()
    momentum: Optional[float] = None   # overrides the engine launch momentum
    min_amplitude: float = 0.0         # trough floor, fraction of peak (slits)

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, SLITS):
            raise ConfigError(f"launch.kind: expected 'gaussian' or 'slits', got {self.kind!r}")
        if self.ray_count < 3:
            raise ConfigError("launch.ray_count: must be at least 3 "
                              "(the transverse stencil needs three samples)")
        if self.truncation_factor <= 0:
            raise ConfigError("launch.truncation_factor: must be positive")
        if self.kind == GAUSSIAN:
            if self.w0 is None or self.w0 <= 0:
                raise ConfigError("launch.w0: gaussian launch needs a positive waist")
            if self.slits:
                raise ConfigError("launch.slits: not allowed for a gaussian launch")
            if self.min_amplitude:
                raise ConfigError("launch.min_amplitude: only meaningful for slit launches")
        else:
            if not self.slits:
                raise ConfigError("launch.slits: slit launch needs at least one slit")
        if self.momentum is not None and self.momentum <= 0:
            raise ConfigError("launch.p0: must be positive")
        if not 0.0 <= self.min_amplitude < 1.0:
            raise ConfigError("launch.min_amplitude: must be in [0, 1)")

    @property
    def half_width(self) -> float:
        """Transverse truncation half-width X of the sampled bundle."""
        if self.kind == GAUSSIAN:
            return self.truncation_factor * self.w0
        return max(abs(s.center) + self.truncation_factor * s.peak_width
                   for s in self.slits)

    def amplitude_at(self, x) -> np.ndarray:
        """Launch amplitude R(x; z=0), peak-normalized for the gaussian."""
        x = np.asarray(x, dtype=float)
        if self.kind == GAUSSIAN:
            return np.exp(-(x * x) / (self.w0 * self.w0))
        total = np.zeros_like(x)
        for s in self.slits:
            d = x - s.center
            total += np.exp(-(d * d) / (s.peak_width * s.peak_width))
        return total


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated simulation input."""

    engine: EngineSpec
    medium: Medium
    launch: LaunchProfile
    dt: float
    steps: int
    output_cadence: int
    output_planes: Tuple[float, ...] = ()
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("integration.dt: must be positive")
        if self.steps < 1:
            raise ConfigError("integration.steps: must be at least 1")
        if not 1 <= self.output_cadence:
            raise ConfigError("integration.output_cadence: must be at least 1")
        kind = self.engine.kind
        mfield = self.medium.field
        if kind == OPTICAL and mfield != INDEX:
            raise ConfigError("medium.kind: the optical engine needs a refractive "
                              "medium (or vacuum)")
        if kind != OPTICAL and mfield != POTENTIAL:
            raise ConfigError("medium.kind: particle engines need a potential "
                              "medium (or vacuum)")


def build_launch(profile: LaunchProfile, engine: EngineSpec) -> Wavefront:
    """Sample the launch surface into a sealed wavefront.

    Rays sit at uniform transverse spacing over [-X, +X] (construction keeps
    the grid exactly symmetric in floating point), each with p = (0, p0),
    amplitude from the profile, zero accumulated phase.  The flux R^2 |p| g
    of every tube (region between adjacent rays, amplitude sampled at the
    tube center) is frozen here and conserved for the rest of the run.
    """
    n = profile.ray_count
    x_half = profile.half_width
    h = 2.0 * x_half / (n - 1)
    offsets = (np.arange(n, dtype=float) - (n - 1) / 2.0) * h
    amplitude = profile.amplitude_at(offsets)
    if profile.min_amplitude > 0.0:
        # Drop only trough rays strictly between the outermost slit centers;
        # the exact dynamics compresses trough tubes beyond any fixed time
        # step, while the monotone outer tails transport harmlessly.
        lo = min(s.center for s in profile.slits)
        hi = max(s.center for s in profile.slits)
        trough = (offsets > lo) & (offsets < hi)
        keep = ~trough | (amplitude >= profile.min_amplitude * np.max(amplitude))
        if np.count_nonzero(keep) < 3:
            raise ConfigError("launch.min_amplitude: fewer than 3 rays survive the floor")
        offsets = offsets[keep]
        amplitude = amplitude[keep]
        n = offsets.size
    positions = np.zeros((n, 2))
    positions[:, 0] = offsets
    p0 = profile.momentum if profile.momentum is not None else engine.launch_momentum
    momenta = np.zeros((n, 2))
    momenta[:, 1] = p0
    tube_amp = profile.amplitude_at(0.5 * (offsets[:-1] + offsets[1:]))
    if not (np.all(amplitude > 0.0) and np.all(tube_amp > 0.0)):
        raise ConfigError("launch: profile decayed to zero on sampled rays; "
                          "reduce truncation_factor or widen the profile")
    front = Wavefront(
        positions=positions,
        momenta=momenta,
        amplitude=amplitude,
        phase=np.zeros(n),
        launch_peak=float(np.max(amplitude)),
    )
    tube_widths(front)
    front.tube_flux = tube_amp ** 2 * p0 * front.tube_gaps
    if n >= 6:
        for lo, hi in _segments(front.tube_gaps):
            if hi - lo + 1 < 6:
                raise ConfigError(
                    "launch: a sampled sub-bundle has fewer than 6 rays; raise "
                    "ray_count or rebalance truncation_factor / min_amplitude")
    return front


# --- config document handling -------------------------------------------------

_SECTIONS = {
    "engine": {"kind", "eikonal", "lambda0_over_w0", "k0", "energy", "mass", "rest_mass"},
    "medium": {"kind", "form", "value", "gradient", "omega", "box"},
    "launch": {"kind", "w0", "ray_count", "truncation_factor", "p0", "slits",
               "min_amplitude"},
    "integration": {"dt", "steps", "output_cadence"},
    "output": {"dir", "planes"},
}
_SLIT_KEYS = {"center", "width", "peak_width"}


def _check_keys(mapping, allowed, path):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key: {path}.{sorted(unknown)[0]}")


def _get_number(section, key, path, default=None, required=False, integer=False):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}: missing required key")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number")
    if integer:
        if not isinstance(value, int):
            raise ConfigError(f"{path}.{key}: expected an integer")
        return value
    return float(value)


def _parse_engine(section, launch_kind):
    _check_keys(section, _SECTIONS["engine"], "engine")
    kind = section.get("kind")
    if kind not in (OPTICAL, QUANTUM, RELATIVISTIC):
        raise ConfigError("engine.kind: expected 'optical', 'quantum' or "
                          f"'relativistic', got {kind!r}")
    eikonal = section.get("eikonal", False)
    if not isinstance(eikonal, bool):
        raise ConfigError("engine.eikonal: expected true or false")
    ratio = _get_number(section, "lambda0_over_w0", "engine")
    if ratio is not None:
        if ratio <= 0:
            raise ConfigError("engine.lambda0_over_w0: must be positive")
        if launch_kind != GAUSSIAN:
            raise ConfigError("engine.lambda0_over_w0: requires launch.kind = 'gaussian'")
        for key in ("k0", "energy", "mass"):
            if key in section:
                raise ConfigError(f"engine.{key}: conflicts with lambda0_over_w0")
    if kind == OPTICAL:
        for key in ("energy", "mass", "rest_mass"):
            if key in section:
                raise ConfigError(f"engine.{key}: not an optical-engine constant")
        engine = EngineSpec.optical(k0=_get_number(section, "k0", "engine", default=1.0),
                                    eikonal=eikonal)
    elif kind == QUANTUM:
        for key in ("k0", "rest_mass"):
            if key in section:
                raise ConfigError(f"engine.{key}: not a quantum-engine constant")
        engine = EngineSpec.quantum(
            energy=_get_number(section, "energy", "engine", default=0.5),
            mass=_get_number(section, "mass", "engine", default=1.0),
            eikonal=eikonal,
        )
    else:
        for key in ("k0", "mass"):
            if key in section:
                raise ConfigError(f"engine.{key}: not a relativistic-engine constant")
        rest_mass = _get_number(section, "rest_mass", "engine", default=0.0)
        default_energy = math.sqrt(1.0 + rest_mass ** 2)  # launch momentum 1
        engine = EngineSpec.relativistic(
            energy=_get_number(section, "energy", "engine", default=default_energy),
            rest_mass=rest_mass,
            eikonal=eikonal,
        )
    return engine, ratio


def _parse_medium(section, engine):
    field_kind = INDEX if engine.kind == OPTICAL else POTENTIAL
    if section is None:
        return Medium.vacuum(field_kind)
    _check_keys(section, _SECTIONS["medium"], "medium")
    kind = section.get("kind")
    if kind not in ("vacuum", "refractive", "potential"):
        raise ConfigError("medium.kind: expected 'vacuum', 'refractive' or "
                          f"'potential', got {kind!r}")
    bounds = None
    if "box" in section:
        box = section["box"]
        if not (isinstance(box, list) and len(box) == 4
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in box)):
            raise ConfigError("medium.box: expected [xmin, xmax, zmin, zmax]")
        bounds = tuple(float(v) for v in box)
    if kind == "vacuum":
        for key in ("form", "value", "gradient", "omega"):
            if key in section:
                raise ConfigError(f"medium.{key}: not allowed for a vacuum medium")
        medium = Medium.vacuum(field_kind)
        return replace(medium, bounds=bounds) if bounds else medium
    field_name = INDEX if kind == "refractive" else POTENTIAL
    form = section.get("form", "uniform")
    allowed_params = {"uniform": {"value"}, "linear": {"value", "gradient"},
                      "harmonic": {"omega"}}.get(form)
    if allowed_params is None:
        raise ConfigError("medium.form: expected 'uniform', 'linear' or "
                          f"'harmonic', got {form!r}")
    for key in {"value", "gradient", "omega"} - allowed_params:
        if key in section:
            raise ConfigError(f"medium.{key}: not a parameter of the {form} form")
    gradient = (0.0, 0.0)
    if "gradient" in section:
        grad = section["gradient"]
        if not (isinstance(grad, list) and len(grad) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in grad)):
            raise ConfigError("medium.gradient: expected [gx, gz]")
        gradient = (float(grad[0]), float(grad[1]))
    return Medium(
        field=field_name,
        form=form,
        value=_get_number(section, "value", "medium",
                          default=1.0 if field_name == INDEX else 0.0),
        gradient=gradient,
        mass=engine.mass if form == "harmonic" else 1.0,
        omega=_get_number(section, "omega", "medium", default=1.0),
        bounds=bounds,
    )


def _parse_launch(section, w0_override):
    _check_keys(section, _SECTIONS["launch"], "launch")
    kind = section.get("kind")
    w0 = _get_number(section, "w0", "launch")
    if w0_override is not None:
        if w0 is not None:
            raise ConfigError("launch.w0: conflicts with engine.lambda0_over_w0")
        w0 = w0_override
    slits = []
    for i, raw in enumerate(section.get("slits", [])):
        if not isinstance(raw, dict):
            raise ConfigError(f"launch.slits[{i}]: expected a table")
        _check_keys(raw, _SLIT_KEYS, f"launch.slits[{i}]")
        slits.append(SlitSpec(
            center=_get_number(raw, "center", f"launch.slits[{i}]", required=True),
            width=_get_number(raw, "width", f"launch.slits[{i}]", required=True),
            peak_width=_get_number(raw, "peak_width", f"launch.slits[{i}]", required=True),
        ))
    return LaunchProfile(
        kind=kind if kind is not None else "",
        ray_count=_get_number(section, "ray_count", "launch", required=True, integer=True),
        w0=w0,
        truncation_factor=_get_number(section, "truncation_factor", "launch", default=4.0),
        slits=tuple(slits),
        momentum=_get_number(section, "p0", "launch"),
        min_amplitude=_get_number(section, "min_amplitude", "launch", default=0.0),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document; reject unknown keys outright."""
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from None
    _check_keys(doc, set(_SECTIONS), "config")
    for name in ("engine", "launch", "integration"):
        if name not in doc:
            raise ConfigError(f"missing required section: {name}")

    launch_kind = doc["launch"].get("kind")
    engine, ratio = _parse_engine(doc["engine"], launch_kind)
    w0_override = None
    if ratio is not None:
        # lambda0 = 2 pi hbar / p0 with the normalized launch momentum.
        w0_override = engine.wavelength / ratio
    launch = _parse_launch(doc["launch"], w0_override)
    medium = _parse_medium(doc.get("medium"), engine)

    integration = doc["integration"]
    _check_keys(integration, _SECTIONS["integration"], "integration")
    steps = _get_number(integration, "steps", "integration", required=True, integer=True)
    dt = _get_number(integration, "dt", "integration")
    if dt is None:
        # Fastest ray advances lambda0 / 20 per step.
        p0 = launch.momentum if launch.momentum is not None else engine.launch_momentum
        dt = engine.wavelength / 20.0 / _launch_speed(engine, p0)
    cadence = _get_number(integration, "output_cadence", "integration", integer=True,
                          default=max(1, steps // 100))

    output = doc.get("output", {})
    _check_keys(output, _SECTIONS["output"], "output")
    planes = output.get("planes", [])
    if not (isinstance(planes, list)
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in planes)):
        raise ConfigError("output.planes: expected a list of numbers")
    out_dir = output.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("output.dir: expected a string")

    return ScenarioConfig(
        engine=engine,
        medium=medium,
        launch=launch,
        dt=float(dt),
        steps=steps,
        output_cadence=cadence,
        output_planes=tuple(float(v) for v in planes),
        output_dir=out_dir,
    )


def _launch_speed(engine: EngineSpec, p0: float) -> float:
    if engine.kind == OPTICAL:
        return engine.c
    if engine.kind == QUANTUM:
        return p0 / engine.mass
    return engine.c ** 2 * p0 / engine.energy


def _fmt(value: float) -> str:
    return repr(float(value))


def serialize_config(config: ScenarioConfig) -> str:
    """Emit the explicit TOML form; parse_config(serialize_config(c)) == c."""
    engine = config.engine
    lines = ["[engine]", f'kind = "{engine.kind}"',
             f"eikonal = {'true' if engine.eikonal else 'false'}"]
    if engine.kind == OPTICAL:
        lines.append(f"k0 = {_fmt(engine.k0)}")
    elif engine.kind == QUANTUM:
        lines.append(f"energy = {_fmt(engine.energy)}")
        lines.append(f"mass = {_fmt(engine.mass)}")
    else:
        lines.append(f"energy = {_fmt(engine.energy)}")
        lines.append(f"rest_mass = {_fmt(engine.rest_mass)}")

    medium = config.medium
    lines.append("")
    lines.append("[medium]")
    if medium.is_uniform and medium.value == (1.0 if medium.field == INDEX else 0.0):
        lines.append('kind = "vacuum"')
    else:
        lines.append(f'kind = "{"refractive" if medium.field == INDEX else "potential"}"')
        lines.append(f'form = "{medium.form}"')
        if medium.form == "harmonic":
            lines.append(f"omega = {_fmt(medium.omega)}")
        else:
            lines.append(f"value = {_fmt(medium.value)}")
            if medium.form == "linear":
                lines.append(f"gradient = [{_fmt(medium.gradient[0])}, "
                             f"{_fmt(medium.gradient[1])}]")
    if medium.bounds is not None:
        lines.append("box = [" + ", ".join(_fmt(v) for v in medium.bounds) + "]")

    launch = config.launch
    lines.append("")
    lines.append("[launch]")
    lines.append(f'kind = "{launch.kind}"')
    lines.append(f"ray_count = {launch.ray_count}")
    if launch.w0 is not None:
        lines.append(f"w0 = {_fmt(launch.w0)}")
    lines.append(f"truncation_factor = {_fmt(launch.truncation_factor)}")
    if launch.min_amplitude:
        lines.append(f"min_amplitude = {_fmt(launch.min_amplitude)}")
    if launch.momentum is not None:
        lines.append(f"p0 = {_fmt(launch.momentum)}")
    for s in launch.slits:
        lines.append("")
        lines.append("[[launch.slits]]")
        lines.append(f"center = {_fmt(s.center)}")
        lines.append(f"width = {_fmt(s.width)}")
        lines.append(f"peak_width = {_fmt(s.peak_width)}")

    lines.append("")
    lines.append("[integration]")
    lines.append(f"dt = {_fmt(config.dt)}")
    lines.append(f"steps = {config.steps}")
    lines.append(f"output_cadence = {config.output_cadence}")

    lines.append("")
    lines.append("[output]")
    if config.output_dir is not None:
        lines.append(f'dir = "{config.output_dir}"')
    lines.append("planes = [" + ", ".join(_fmt(v) for v in config.output_planes) + "]")
    return "\n".join(lines) + "\n"
