"""Analytic media on the (x, z) plane: refractive index or potential energy.

Only closed-form fields are supported (uniform, linear, harmonic), so values
and gradients are exact at every query point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainEscapeError

INDEX = "index"
POTENTIAL = "potential"

_FIELDS = (INDEX, POTENTIAL)
_FORMS = ("uniform", "linear", "harmonic")


@dataclass(frozen=True)
class Medium:
    """External environment the rays propagate through.

    ``field`` selects the meaning of the scalar: a refractive index n(r) for
    the optical engine, or a potential energy V(r) for the particle engines.

    Forms:
        uniform     value
        linear      value + gradient[0]*x + gradient[1]*z
        harmonic    0.5 * mass * omega**2 * x**2   (potential only)

    ``bounds`` is an optional domain box (xmin, xmax, zmin, zmax); evaluating
    a point outside it raises :class:`DomainEscapeError`.
    """

    field: str
    form: str = "uniform"
    value: float = 0.0
    gradient: tuple = (0.0, 0.0)
    mass: float = 1.0
    omega: float = 1.0
    bounds: Optional[tuple] = None

    def __post_init__(self):
        if self.field not in _FIELDS:
            raise ConfigError(f"medium.field: expected one of {_FIELDS}, got {self.field!r}")
        if self.form not in _FORMS:
            raise ConfigError(f"medium.form: expected one of {_FORMS}, got {self.form!r}")
        if self.form == "harmonic":
            if self.field != POTENTIAL:
                raise ConfigError("medium.form: harmonic form is only defined for potential media")
            if self.omega <= 0 or self.mass <= 0:
                raise ConfigError("medium.omega / medium.mass: must be positive")
        if len(self.gradient) != 2:
            raise ConfigError("medium.gradient: expected a 2-vector [gx, gz]")
        if self.bounds is not None:
            if len(self.bounds) != 4:
                raise ConfigError("medium.box: expected [xmin, xmax, zmin, zmax]")
            xmin, xmax, zmin, zmax = self.bounds
            if not (xmin < xmax and zmin < zmax):
                raise ConfigError("medium.box: empty box")

    @classmethod
    def vacuum(cls, field: str) -> "Medium":
        """Vacuum for the given field kind: n = 1 (index) or V = 0 (potential)."""
        return cls(field=field, form="uniform", value=1.0 if field == INDEX else 0.0)

    @property
    def is_uniform(self) -> bool:
        return self.form == "uniform"

    def evaluate(self, points, step=None):
        """Return ``(values, gradients)`` at ``points`` of shape (..., 2).

        Gradients have the same leading shape with a trailing axis of 2.
        Raises :class:`DomainEscapeError` naming the first offending ray when
        a point falls outside the domain box.
        """
        pts = np.asarray(points, dtype=float)
        x = pts[..., 0]
        z = pts[..., 1]
        if self.bounds is not None:
            xmin, xmax, zmin, zmax = self.bounds
            outside = (x < xmin) | (x > xmax) | (z < zmin) | (z > zmax)
            if np.any(outside):
                idx = int(np.argmax(outside)) if outside.ndim else None
                raise DomainEscapeError(
                    f"position outside the domain box {self.bounds}", ray=idx, step=step
                )
        grads = np.zeros(pts.shape, dtype=float)
        if self.form == "uniform":
            vals = np.full(x.shape, float(self.value))
        elif self.form == "linear":
            gx, gz = (float(g) for g in self.gradient)
            vals = self.value + gx * x + gz * z
            grads[..., 0] = gx
            grads[..., 1] = gz
        else:  # harmonic, x-only per the planar geometry
            k = self.mass * self.omega ** 2
            vals = 0.5 * k * (x * x)
            grads[..., 0] = k * x
        return vals, grads


def evaluate_medium(medium: Medium, point, step=None):
    """Evaluate ``medium`` at one point or an array of points."""
    return medium.evaluate(point, step=step)
