"""End-to-end orchestration: step loop, cadence records, output-plane sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .bundle import Wavefront
from .engines import EngineSpec, FrontState, advance_bundle, close_front
from .errors import SimulationError
from .scenario import ScenarioConfig, build_launch


@dataclass
class StepRecord:
    """Per-cadence snapshot taken after the phase-1 closure of a step."""

    step: int
    time: float
    positions: np.ndarray    # (n, 2)
    momenta: np.ndarray      # (n, 2)
    amplitude: np.ndarray    # (n,)
    potential: np.ndarray    # (n,) W or Q
    hamiltonian: np.ndarray  # (n,)


@dataclass
class PlaneProfile:
    """State of every ray where its trajectory crosses a fixed z plane.

    Values are linear interpolations in z between the bracketing steps.
    ``filled`` marks rays that actually crossed before the run ended.
    """

    plane: float
    x: np.ndarray
    time: np.ndarray
    momenta: np.ndarray
    amplitude: np.ndarray
    potential: np.ndarray
    hamiltonian: np.ndarray
    filled: np.ndarray

    @classmethod
    def empty(cls, plane: float, n: int) -> "PlaneProfile":
        return cls(
            plane=plane,
            x=np.full(n, np.nan),
            time=np.full(n, np.nan),
            momenta=np.full((n, 2), np.nan),
            amplitude=np.full(n, np.nan),
            potential=np.full(n, np.nan),
            hamiltonian=np.full(n, np.nan),
            filled=np.zeros(n, dtype=bool),
        )

    @property
    def intensity(self) -> np.ndarray:
        return self.amplitude ** 2


@dataclass
class ConservationReport:
    """Worst-case drifts accumulated over a run (all relative, dimensionless)."""

    hamiltonian_drift: float = 0.0   # max |H - H(0)| / engine.energy_scale
    momentum_drift: Optional[float] = None  # max ||p| - p0| / p0, uniform media only
    flux_drift: Optional[float] = None      # max |R^2 |p| d / flux0 - 1|


@dataclass
class RunResult:
    config: ScenarioConfig
    records: List[StepRecord] = field(default_factory=list)
    final: Optional[Wavefront] = None
    planes: Dict[float, PlaneProfile] = field(default_factory=dict)
    conservation: ConservationReport = field(default_factory=ConservationReport)
    h_initial: Optional[np.ndarray] = None


class _PlaneTracker:
    def __init__(self, planes, n_rays):
        self.profiles = {float(zp): PlaneProfile.empty(float(zp), n_rays) for zp in planes}

    def seed(self, snap):
        """Fill planes at or behind the launch surface from the launch state."""
        for zp, prof in self.profiles.items():
            hit = ~prof.filled & (snap["z"] >= zp)
            if np.any(hit):
                self._write(prof, hit, snap, np.zeros_like(snap["z"]), snap)

    def update(self, prev, cur):
        for zp, prof in self.profiles.items():
            hit = ~prof.filled & (prev["z"] < zp) & (cur["z"] >= zp)
            if np.any(hit):
                frac = np.zeros_like(cur["z"])
                dz = cur["z"] - prev["z"]
                frac[hit] = (zp - prev["z"][hit]) / dz[hit]
                self._write(prof, hit, prev, frac, cur)

    @staticmethod
    def _write(prof, hit, prev, frac, cur):
        f = frac[hit]
        for name, attr in (("x", "x"), ("t", "time"), ("R", "amplitude"),
                           ("Q", "potential"), ("H", "hamiltonian")):
            lo, hi = prev[name][hit], cur[name][hit]
            getattr(prof, attr)[hit] = lo + f * (hi - lo)
        for col, name in ((0, "px"), (1, "pz")):
            lo, hi = prev[name][hit], cur[name][hit]
            prof.momenta[hit, col] = lo + f * (hi - lo)
        prof.filled[hit] = True


def _snapshot(front: Wavefront, state: FrontState) -> dict:
    return {
        "x": front.positions[:, 0].copy(),
        "z": front.positions[:, 1].copy(),
        "px": front.momenta[:, 0].copy(),
        "pz": front.momenta[:, 1].copy(),
        "R": front.amplitude.copy(),
        "Q": state.potential.values.copy(),
        "H": state.hamiltonian.copy(),
        "t": np.full(front.n_rays, front.time),
    }


def _record(front: Wavefront, state: FrontState) -> StepRecord:
    return StepRecord(
        step=front.step_index,
        time=front.time,
        positions=front.positions.copy(),
        momenta=front.momenta.copy(),
        amplitude=front.amplitude.copy(),
        potential=state.potential.values.copy(),
        hamiltonian=state.hamiltonian.copy(),
    )


def run(config: ScenarioConfig) -> RunResult:
    """Integrate a validated scenario end to end.

    Deterministic for a fixed config (single-threaded, order-independent
    reductions).  Engine errors are re-raised with the partial result attached
    as ``exc.partial`` so callers can preserve the output gathered so far.
    """
    engine = config.engine
    medium = config.medium
    dt = config.dt
    result = RunResult(config=config)
    front = build_launch(config.launch, engine)
    n = front.n_rays
    p0 = front.momentum_magnitude()
    track_p = medium.is_uniform
    planes = _PlaneTracker(config.output_planes, n)
    cons = result.conservation
    if track_p:
        cons.momentum_drift = 0.0
    if not engine.eikonal:
        cons.flux_drift = 0.0

    def observe(front, state):
        h_drift = np.max(np.abs(state.hamiltonian - result.h_initial))
        cons.hamiltonian_drift = max(cons.hamiltonian_drift,
                                     float(h_drift) / engine.energy_scale)
        if track_p:
            p_drift = np.max(np.abs(front.momentum_magnitude() - p0) / p0)
            cons.momentum_drift = max(cons.momentum_drift, float(p_drift))
        if not engine.eikonal:
            pm = front.momentum_magnitude()
            flux = front.tube_amplitude ** 2 * (0.5 * (pm[:-1] + pm[1:])) * front.tube_gaps
            f_drift = np.max(np.abs(flux / front.tube_flux - 1.0))
            cons.flux_drift = max(cons.flux_drift, float(f_drift))

    try:
        state = close_front(front, engine, medium)
        result.h_initial = state.hamiltonian.copy()
        observe(front, state)
        result.records.append(_record(front, state))
        snap = _snapshot(front, state)
        planes.seed(snap)
        for step in range(1, config.steps + 1):
            front = advance_bundle(front, state, engine, medium, dt)
            state = close_front(front, engine, medium, pending_dt=dt)
            observe(front, state)
            prev, snap = snap, _snapshot(front, state)
            planes.update(prev, snap)
            if step % config.output_cadence == 0 or step == config.steps:
                result.records.append(_record(front, state))
        result.final = front
    except SimulationError as exc:
        result.final = front
        result.planes = planes.profiles
        exc.partial = result
        raise
    result.planes = planes.profiles
    return result
