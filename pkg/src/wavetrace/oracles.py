"""Analytic reference formulas used by tests and comparison reports.

Pure functions, no simulation state.  The planar geometry (one transverse
dimension) makes the paraxial amplitude scale as sqrt(w0 / w(z)); the 1D flux
integral of R^2 is then z-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ParaxialGaussian:
    """Free paraxial gaussian beam with waist w0 at z = 0."""

    w0: float
    lambda0: float

    @property
    def rayleigh_length(self) -> float:
        return np.pi * self.w0 ** 2 / self.lambda0

    def width(self, z):
        """Beam half-width w(z) = w0 sqrt(1 + (z/z_R)^2)."""
        z = np.asarray(z, dtype=float)
        return self.w0 * np.sqrt(1.0 + (z / self.rayleigh_length) ** 2)

    @property
    def divergence(self) -> float:
        """Asymptotic waist-line slope lambda0 / (pi w0)."""
        return self.lambda0 / (np.pi * self.w0)


def waist_line(beam: ParaxialGaussian, z):
    """Positive-branch waist line x(z) = sqrt(w0^2 + (lambda0 z / (pi w0))^2)."""
    z = np.asarray(z, dtype=float)
    return np.sqrt(beam.w0 ** 2 + (beam.divergence * z) ** 2)


def paraxial_amplitude(beam: ParaxialGaussian, x, z):
    """Relative amplitude sqrt(w0/w(z)) exp(-x^2 / w(z)^2), peak 1 at the waist."""
    x = np.asarray(x, dtype=float)
    w = beam.width(z)
    return np.sqrt(beam.w0 / w) * np.exp(-(x * x) / (w * w))


def two_slit_fringe_positions(slit_separation: float, lambda0: float,
                              screen_distance: float, order):
    """Fraunhofer intensity maxima x_m = m lambda0 z / d on a far screen."""
    m = np.asarray(order, dtype=float)
    return m * lambda0 * screen_distance / slit_separation


def harmonic_trajectory(mass: float, omega: float, x0: float, p0x: float, t):
    """Closed-form 1D harmonic motion: returns (x, p_x) at time t."""
    t = np.asarray(t, dtype=float)
    c = np.cos(omega * t)
    s = np.sin(omega * t)
    x = x0 * c + (p0x / (mass * omega)) * s
    px = -mass * omega * x0 * s + p0x * c
    return x, px
