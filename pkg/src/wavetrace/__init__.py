"""wavetrace: exact coupled ray trajectories for monochromatic Helmholtz-type waves.

Monochromatic waves (optical, de Broglie, relativistic de Broglie) admit an
exact ray description once the amplitude curvature term, the Wave Potential,
is transported along the bundle and fed back into the Hamiltonian.  This
package integrates those coupled ray systems on the (x, z) plane, reproduces
gaussian-beam diffraction and slit interference from rays alone, and reduces
to classical ray/particle dynamics when the coupling is switched off.
"""

from .bundle import Ray, Wavefront
from .engines import (
    OPTICAL,
    QUANTUM,
    RELATIVISTIC,
    EngineSpec,
    FrontState,
    close_front,
    force,
    hamiltonian_value,
    ray_velocity,
    step_bundle,
)
from .errors import (
    AmplitudeUnderflowError,
    CausticError,
    ConfigError,
    DomainEscapeError,
    ImaginaryMomentumError,
    MidpointDivergenceError,
    SimulationError,
    SingularVelocityError,
    WavetraceError,
)
from .medium import INDEX, POTENTIAL, Medium, evaluate_medium
from .oracles import (
    ParaxialGaussian,
    harmonic_trajectory,
    paraxial_amplitude,
    two_slit_fringe_positions,
    waist_line,
)
from .runner import ConservationReport, PlaneProfile, RunResult, StepRecord, run
from .scenario import (
    GAUSSIAN,
    SLITS,
    LaunchProfile,
    ScenarioConfig,
    SlitSpec,
    build_launch,
    parse_config,
    serialize_config,
)
from .transport import (
    WavePotentialField,
    transport_amplitude,
    transverse_laplacian,
    tube_widths,
    wave_potential,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeUnderflowError", "CausticError", "ConfigError", "ConservationReport",
    "DomainEscapeError", "EngineSpec", "FrontState", "GAUSSIAN", "INDEX",
    "ImaginaryMomentumError", "LaunchProfile", "Medium", "MidpointDivergenceError",
    "OPTICAL", "POTENTIAL", "ParaxialGaussian", "PlaneProfile", "QUANTUM",
    "RELATIVISTIC", "Ray", "RunResult", "SLITS", "ScenarioConfig", "SimulationError",
    "SingularVelocityError", "SlitSpec", "StepRecord", "WavePotentialField",
    "Wavefront", "WavetraceError", "build_launch", "close_front", "evaluate_medium",
    "force", "hamiltonian_value", "harmonic_trajectory", "paraxial_amplitude",
    "parse_config", "ray_velocity", "run", "serialize_config", "step_bundle",
    "transport_amplitude", "transverse_laplacian", "tube_widths",
    "two_slit_fringe_positions", "waist_line", "wave_potential",
]
