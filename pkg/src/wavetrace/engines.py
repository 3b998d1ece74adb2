"""The three ray engines and their coupled symplectic time stepping.

Engine dispersion functions (normalized units, c = hbar = 1 by default):

    optical       D = (c/2k0) [k^2 - (n k0)^2] + W            conserved: D
    quantum       H = p^2/2m + V + Q                          conserved: E
    relativistic  H = V + sqrt((pc)^2 + (m0 c^2)^2 + 2 E Q)   conserved: E

with the Wave Potential W or Q supplied per ray by the wavefront-transport
closure.  The wave force is exactly perpendicular to each momentum, so in a
uniform medium |p| is an invariant of the exact dynamics and its numerical
drift measures integrator error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bundle import Wavefront
from .errors import (
    ConfigError,
    ImaginaryMomentumError,
    MidpointDivergenceError,
    SingularVelocityError,
)
from .medium import Medium
from .transport import (
    WavePotentialField,
    transport_amplitude,
    tube_widths,
    wave_potential,
)

OPTICAL = "optical"
QUANTUM = "quantum"
RELATIVISTIC = "relativistic"
_KINDS = (OPTICAL, QUANTUM, RELATIVISTIC)

MIDPOINT_TOL = 1e-12
MIDPOINT_MAX_ITER = 50


@dataclass(frozen=True)
class EngineSpec:
    """Which Hamiltonian to integrate, plus its constants.

    ``eikonal`` forces the Wave Potential to zero, reducing every engine to
    its classical (geometrical-optics) limit.
    """

    kind: str
    eikonal: bool = False
    k0: float = 1.0           # optical wavenumber; omega = c * k0
    energy: float = 0.5       # total energy E (quantum, relativistic)
    mass: float = 1.0         # quantum particle mass
    rest_mass: float = 0.0    # relativistic rest mass m0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"engine.kind: expected one of {_KINDS}, got {self.kind!r}")
        if self.kind == OPTICAL and self.k0 <= 0:
            raise ConfigError("engine.k0: must be positive")
        if self.kind == QUANTUM:
            if self.energy <= 0:
                raise ConfigError("engine.energy: must be positive")
            if self.mass <= 0:
                raise ConfigError("engine.mass: must be positive")
        if self.kind == RELATIVISTIC:
            if self.rest_mass < 0:
                raise ConfigError("engine.rest_mass: must be non-negative")
            if self.energy <= self.rest_mass * self.c ** 2:
                raise ConfigError(
                    "engine.energy: must exceed the rest energy m0 c^2 "
                    "(launch momentum must be real)"
                )

    @classmethod
    def optical(cls, k0: float = 1.0, eikonal: bool = False) -> "EngineSpec":
        return cls(kind=OPTICAL, k0=k0, eikonal=eikonal)

    @classmethod
    def quantum(cls, energy: float = 0.5, mass: float = 1.0, eikonal: bool = False) -> "EngineSpec":
        return cls(kind=QUANTUM, energy=energy, mass=mass, eikonal=eikonal)

    @classmethod
    def relativistic(cls, energy: float = 1.0, rest_mass: float = 0.0,
                     eikonal: bool = False) -> "EngineSpec":
        return cls(kind=RELATIVISTIC, energy=energy, rest_mass=rest_mass, eikonal=eikonal)

    @property
    def launch_momentum(self) -> float:
        """|p| (or |k|) of a ray launched where the medium vanishes."""
        if self.kind == OPTICAL:
            return self.k0
        if self.kind == QUANTUM:
            return float(np.sqrt(2.0 * self.mass * self.energy))
        rest = self.rest_mass * self.c ** 2
        return float(np.sqrt(self.energy ** 2 - rest ** 2) / self.c)

    @property
    def wavelength(self) -> float:
        """Launch wavelength 2 pi / k0 with k0 = p0 / hbar."""
        return 2.0 * np.pi * self.hbar / self.launch_momentum

    @property
    def wave_coefficient(self) -> float:
        """Scale of the Wave Potential: -coeff * lap(R)/R."""
        if self.kind == OPTICAL:
            return self.c / (2.0 * self.k0)
        if self.kind == QUANTUM:
            return self.hbar ** 2 / (2.0 * self.mass)
        return (self.hbar * self.c) ** 2 / (2.0 * self.energy)

    @property
    def energy_scale(self) -> float:
        """Normalization for conservation diagnostics."""
        if self.kind == OPTICAL:
            return self.c * self.k0
        return abs(self.energy)

    @property
    def conserved_value(self) -> float:
        """Value the dispersion function holds on exact trajectories."""
        return 0.0 if self.kind == OPTICAL else self.energy


def hamiltonian_value(engine: EngineSpec, momenta, medium_values, potential_values,
                      step=None) -> np.ndarray:
    """Dispersion function per ray: D (optical) or H (particle engines)."""
    p = np.asarray(momenta, dtype=float)
    p2 = p[..., 0] ** 2 + p[..., 1] ** 2
    v = np.asarray(medium_values, dtype=float)
    q = np.asarray(potential_values, dtype=float)
    if engine.kind == OPTICAL:
        return (engine.c / (2.0 * engine.k0)) * (p2 - (v * engine.k0) ** 2) + q
    if engine.kind == QUANTUM:
        return p2 / (2.0 * engine.mass) + v + q
    rest = engine.rest_mass * engine.c ** 2
    radicand = p2 * engine.c ** 2 + rest ** 2 + 2.0 * engine.energy * q
    if np.any(radicand <= 0.0):
        i = int(np.argmax(radicand <= 0.0)) if radicand.ndim else None
        raise ImaginaryMomentumError(
            "dispersion radicand non-positive (classically forbidden region)",
            ray=i, step=step,
        )
    return v + np.sqrt(radicand)


def ray_velocity(engine: EngineSpec, momenta, medium_values=None, step=None) -> np.ndarray:
    """dr/dt per ray.  The relativistic engine needs V(r) via ``medium_values``."""
    p = np.asarray(momenta, dtype=float)
    if engine.kind == OPTICAL:
        return p * (engine.c / engine.k0)
    if engine.kind == QUANTUM:
        return p / engine.mass
    if medium_values is None:
        raise ValueError("relativistic ray_velocity requires the medium values")
    denom = engine.energy - np.asarray(medium_values, dtype=float)
    if np.any(denom <= 0.0):
        i = int(np.argmax(denom <= 0.0)) if denom.ndim else None
        raise SingularVelocityError("E - V(r) is non-positive", ray=i, step=step)
    return p * (engine.c ** 2 / denom)[..., None]


def force(engine: EngineSpec, medium_values, medium_gradients,
          potential_gradients=None, step=None) -> np.ndarray:
    """dp/dt per ray with the Wave-Potential gradient frozen from phase 1."""
    v = np.asarray(medium_values, dtype=float)
    gv = np.asarray(medium_gradients, dtype=float)
    if potential_gradients is None:
        gq = np.zeros_like(gv)
    else:
        gq = np.asarray(potential_gradients, dtype=float)
    if engine.kind == OPTICAL:
        # grad[(c k0 / 2) n^2] - grad W
        return (engine.c * engine.k0) * v[..., None] * gv - gq
    if engine.kind == QUANTUM:
        return -(gv + gq)
    scale = 1.0 - v / engine.energy
    if np.any(scale <= 0.0):
        i = int(np.argmax(scale <= 0.0)) if scale.ndim else None
        raise SingularVelocityError("1 - V/E is non-positive", ray=i, step=step)
    return -(gv + gq / scale[..., None])


@dataclass
class FrontState:
    """Phase-1 snapshot: everything derived from one front, frozen for the step."""

    medium_values: np.ndarray
    medium_gradients: np.ndarray
    potential: WavePotentialField
    hamiltonian: np.ndarray
    forces: np.ndarray


def _wave_kick_force(engine, state, step=None):
    """The Wave-Potential part of dp/dt, with the relativistic 1/(1 - V/E) scale."""
    gq = state.potential.gradients
    if engine.kind != RELATIVISTIC:
        return -gq
    scale = 1.0 - state.medium_values / engine.energy
    if np.any(scale <= 0.0):
        i = int(np.argmax(scale <= 0.0))
        raise SingularVelocityError("1 - V/E is non-positive", ray=i, step=step)
    return -gq / scale[..., None]


def close_front(front: Wavefront, engine: EngineSpec, medium: Medium,
                pending_dt: Optional[float] = None) -> FrontState:
    """Phase 1 of a step: transport the amplitude and build the coupling fields.

    When ``pending_dt`` is given, ``front.momenta`` still holds the half-kicked
    momenta from the previous advance; the trailing half kick is completed in
    place with this front's fields before the Hamiltonian is evaluated, which
    is what makes the splitting a proper velocity-Verlet / Strang scheme.

    In eikonal mode the closure degenerates to classical dynamics: no widths,
    no amplitude transport, no caustic detection, and a zero Wave Potential.
    Amplitudes then keep their launch values.
    """
    step = front.step_index
    if not engine.eikonal:
        tube_widths(front)
        transport_amplitude(front, front)
    vals, grads = medium.evaluate(front.positions, step=step)
    potential = wave_potential(front, engine)
    state = FrontState(
        medium_values=vals,
        medium_gradients=grads,
        potential=potential,
        hamiltonian=None,
        forces=None,
    )
    if pending_dt is not None:
        if engine.kind == RELATIVISTIC:
            kick = _wave_kick_force(engine, state, step=step)
        else:
            kick = force(engine, vals, grads, potential.gradients, step=step)
        front.momenta = front.momenta + (0.5 * pending_dt) * kick
    state.hamiltonian = hamiltonian_value(engine, front.momenta, vals,
                                          potential.values, step=step)
    state.forces = force(engine, vals, grads, potential.gradients, step=step)
    return state


def _advance_verlet(front, state, engine, dt):
    """Velocity-Verlet advance: half kick, exact drift.

    The trailing half kick needs the force field at the new positions and is
    completed by the next closure (``pending_dt``), so each step evaluates the
    coupled field exactly once.
    """
    p_half = front.momenta + (0.5 * dt) * state.forces
    positions = front.positions + dt * ray_velocity(engine, p_half)
    delta = positions - front.positions
    phase = front.phase + (p_half[:, 0] * delta[:, 0] + p_half[:, 1] * delta[:, 1])
    return front.evolved(positions, p_half, phase, dt)


def _advance_midpoint(front, state, engine, medium, dt):
    """Strang split for the non-separable relativistic Hamiltonian.

    Half wave kick with the frozen field, then an implicit-midpoint step of
    the medium part (fixed-point iteration on (r, p), per-block relative
    tolerance MIDPOINT_TOL); the trailing half wave kick is completed by the
    next closure.
    """
    step = front.step_index
    r0 = front.positions
    p0 = front.momenta + (0.5 * dt) * _wave_kick_force(engine, state, step=step)
    r1 = r0 + dt * ray_velocity(engine, p0, state.medium_values, step=step)
    p1 = p0 + dt * force(engine, state.medium_values, state.medium_gradients,
                         None, step=step)
    p_mid = p0
    for _ in range(MIDPOINT_MAX_ITER):
        r_mid = 0.5 * (r0 + r1)
        p_mid = 0.5 * (p0 + p1)
        vals, grads = medium.evaluate(r_mid, step=step)
        r_new = r0 + dt * ray_velocity(engine, p_mid, vals, step=step)
        p_new = p0 + dt * force(engine, vals, grads, None, step=step)
        dr = np.max(np.abs(r_new - r1)) / max(1.0, np.max(np.abs(r_new)))
        dp = np.max(np.abs(p_new - p1)) / max(1.0, np.max(np.abs(p_new)))
        r1, p1 = r_new, p_new
        if dr < MIDPOINT_TOL and dp < MIDPOINT_TOL:
            break
    else:
        raise MidpointDivergenceError(
            f"no convergence within {MIDPOINT_MAX_ITER} iterations", step=step,
        )
    delta = r1 - r0
    phase = front.phase + (p_mid[:, 0] * delta[:, 0] + p_mid[:, 1] * delta[:, 1])
    return front.evolved(r1, p1, phase, dt)


def advance_bundle(front: Wavefront, state: FrontState, engine: EngineSpec,
                   medium: Medium, dt: float) -> Wavefront:
    """Phase 2: move the bundle one step, leaving the trailing half kick pending."""
    if front.caustic:
        raise ValueError("cannot step a front with the caustic flag set")
    if engine.kind == RELATIVISTIC:
        return _advance_midpoint(front, state, engine, medium, dt)
    return _advance_verlet(front, state, engine, dt)


def step_bundle(front: Wavefront, engine: EngineSpec, medium: Medium, dt: float,
                state: Optional[FrontState] = None) -> Wavefront:
    """Advance the whole bundle one full time step.

    Self-contained form: runs the phase-1 closure, the phase-2 update, and the
    completing closure at the new positions, returning a synchronized front.
    Loops that also need the per-step field states (like :func:`wavetrace.
    runner.run`) drive ``close_front`` / ``advance_bundle`` directly and pay
    one closure per step.
    """
    if state is None:
        state = close_front(front, engine, medium)
    nxt = advance_bundle(front, state, engine, medium, dt)
    close_front(nxt, engine, medium, pending_dt=dt)
    return nxt
