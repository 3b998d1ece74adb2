"""Ray bundle state: a wavefront is an ordered set of rays sharing one launch."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class Ray:
    """Single-ray view, mainly for tests and diagnostics."""

    position: np.ndarray   # (x, z)
    momentum: np.ndarray   # (px, pz); wave vector k for the optical engine
    amplitude: float
    phase: float = 0.0


@dataclass
class Wavefront:
    """Ordered bundle of rays, indexed by launch transverse position.

    A tube is the region between two adjacent rays, so ``tube_flux`` has one
    entry per ray pair.  It holds the conserved flux R^2 |p| g fixed at
    launch; amplitude transport reconstructs R from it, which keeps the flux
    invariant at rounding level regardless of step count.  ``widths`` plus
    the per-step geometry caches (tangents, signed arc offsets, tube
    cross-sections, tube amplitudes) are recomputed every step.
    """

    positions: np.ndarray          # (n, 2)
    momenta: np.ndarray            # (n, 2)
    amplitude: np.ndarray          # (n,)
    phase: np.ndarray              # (n,)
    tube_flux: Optional[np.ndarray] = None          # (n-1,)
    launch_peak: float = 1.0
    step_index: int = 0
    time: float = 0.0
    caustic: bool = False
    widths: Optional[np.ndarray] = None
    tangents: Optional[np.ndarray] = field(default=None, repr=False)
    arc_back: Optional[np.ndarray] = field(default=None, repr=False)   # h to ray i-1
    arc_fwd: Optional[np.ndarray] = field(default=None, repr=False)    # h to ray i+1
    tube_gaps: Optional[np.ndarray] = field(default=None, repr=False)  # (n-1,)
    tube_amplitude: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.momenta = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        self.amplitude = np.asarray(self.amplitude, dtype=float).ravel()
        self.phase = np.asarray(self.phase, dtype=float).ravel()
        n = self.positions.shape[0]
        if self.momenta.shape != (n, 2) or self.positions.shape != (n, 2):
            raise ValueError("positions and momenta must both have shape (n, 2)")
        if self.amplitude.shape != (n,) or self.phase.shape != (n,):
            raise ValueError("amplitude and phase must have shape (n,)")

    @property
    def n_rays(self) -> int:
        return self.positions.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def z(self) -> np.ndarray:
        return self.positions[:, 1]

    def momentum_magnitude(self) -> np.ndarray:
        p = self.momenta
        return np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)

    def ray(self, i: int) -> Ray:
        return Ray(
            position=self.positions[i].copy(),
            momentum=self.momenta[i].copy(),
            amplitude=float(self.amplitude[i]),
            phase=float(self.phase[i]),
        )

    def evolved(self, positions, momenta, phase, dt: float) -> "Wavefront":
        """Next-step front carrying the invariant launch data forward.

        Stencil caches are dropped; amplitudes are carried over and refreshed
        by the next closure.
        """
        return Wavefront(
            positions=positions,
            momenta=momenta,
            amplitude=self.amplitude.copy(),
            phase=phase,
            tube_flux=self.tube_flux,
            launch_peak=self.launch_peak,
            step_index=self.step_index + 1,
            time=self.time + dt,
            caustic=self.caustic,
        )
