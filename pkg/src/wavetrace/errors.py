"""Exception hierarchy for configuration and simulation failures."""


class WavetraceError(Exception):
    """Base class for all library errors."""


class ConfigError(WavetraceError):
    """Invalid scenario configuration; message names the offending field."""


class SimulationError(WavetraceError):
    """A run aborted mid-flight.  Carries the ray index and step when known."""

    def __init__(self, message, ray=None, step=None):
        self.ray = ray
        self.step = step
        # Partial results attached by the runner so callers can salvage output.
        self.partial = None
        prefix = []
        if step is not None:
            prefix.append(f"step {step}")
        if ray is not None:
            prefix.append(f"ray {ray}")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class CausticError(SimulationError):
    """Adjacent rays crossed or coincided; the single-valued wavefront broke down."""


class DomainEscapeError(SimulationError):
    """A ray left the configured domain box."""


class AmplitudeUnderflowError(SimulationError):
    """Ray amplitude fell below the positivity floor; dividing by it is meaningless."""


class ImaginaryMomentumError(SimulationError):
    """Relativistic dispersion radicand went non-positive (classically forbidden region)."""


class SingularVelocityError(SimulationError):
    """Relativistic velocity denominator E - V(r) is non-positive."""


class MidpointDivergenceError(SimulationError):
    """Implicit-midpoint fixed-point iteration failed to converge."""
