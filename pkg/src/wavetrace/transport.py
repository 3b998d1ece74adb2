"""Wavefront transport: tube widths, flux-conserving amplitudes, Wave Potential.

The amplitude R lives on the moving ray bundle and varies only across the
front, so every derivative here is taken along wavefront arc length.  The
conserved flux R^2 |p| (cross-section) is carried per tube, the region
between two adjacent rays, and all derivative chains are staggered first
differences between tube and ray quantities:

    g_c   tube cross-section                      (tubes)
    u_c   ln R reconstructed from the tube flux   (tubes)
    u'_i  = (u_c[i] - u_c[i-1]) / d_i             (rays)
    (lap R / R)_c = u''_c + u'_i u'_{i+1}         (tubes)
    dQ_i  = (Q_c[i] - Q_c[i-1]) / d_i             (rays)

A collocated closure (per-ray flux against the centered width) is linearly
unstable around smooth beams: its Jacobian carries complex eigenvalue pairs
with growth ~ coeff * n / w0^2 that wreck a Rayleigh-length run at realistic
ray counts.  The staggered chain above has a neutral (purely oscillatory)
spectrum; see the decisions ledger.

Operand grouping in the stencils is deliberate: mirrored bundles (x -> -x,
reversed ray order) must produce bitwise-mirrored results, so sums are
arranged to commute under that reflection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import Wavefront
from .errors import AmplitudeUnderflowError, CausticError

# R below this fraction of the launch peak makes div-by-R meaningless.
AMPLITUDE_FLOOR = 1e-30


@dataclass
class WavePotentialField:
    """Per-ray Wave Potential and its trajectory-perpendicular gradient."""

    values: np.ndarray      # (n,) W or Q, engine units
    gradients: np.ndarray   # (n, 2), exactly perpendicular to each momentum

    @classmethod
    def zeros(cls, n: int) -> "WavePotentialField":
        return cls(values=np.zeros(n), gradients=np.zeros((n, 2)))


def _fail_caustic(front: Wavefront, ray: int, message: str):
    front.caustic = True
    raise CausticError(message, ray=ray, step=front.step_index)


def tube_widths(front: Wavefront) -> np.ndarray:
    """Per-ray tube cross-section measured along the local wavefront tangent.

    For an interior ray the width is half the tangent-projected distance
    between its two neighbors; boundary rays use the full projected distance
    to their single neighbor.  The signed projections must keep the launch
    ordering (each neighbor offset projects positively onto both adjacent
    tangents); any violation marks a caustic and aborts.

    Side effect: caches tangents, the signed neighbor arc offsets, and the
    inter-ray tube cross-sections on the front for the closure below.
    """
    n = front.n_rays
    if n < 3:
        raise ValueError("tube_widths needs at least 3 rays")
    p = front.momenta
    pm = np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)
    if np.any(pm == 0.0):
        _fail_caustic(front, int(np.argmax(pm == 0.0)), "stalled ray (zero momentum)")
    # Tangent (pz, -px)/|p| points toward increasing launch index; t . p = 0
    # holds exactly in floating point.
    t = np.empty_like(p)
    t[:, 0] = p[:, 1] / pm
    t[:, 1] = -p[:, 0] / pm

    dr = front.positions[1:] - front.positions[:-1]          # offset i -> i+1
    proj_fwd = dr[:, 0] * t[:-1, 0] + dr[:, 1] * t[:-1, 1]   # on tangent of i
    proj_bwd = dr[:, 0] * t[1:, 0] + dr[:, 1] * t[1:, 1]     # on tangent of i+1
    bad = ~((proj_fwd > 0.0) & (proj_bwd > 0.0))
    if np.any(bad):
        i = int(np.argmax(bad))
        _fail_caustic(front, i, "ray ordering violated between rays "
                                f"{i} and {i + 1} (crossing or coincident neighbors)")

    widths = np.empty(n)
    widths[1:-1] = 0.5 * (proj_fwd[1:] + proj_bwd[:-1])
    widths[0] = proj_fwd[0]
    widths[-1] = proj_bwd[-1]

    front.widths = widths
    front.tangents = t
    front.arc_fwd = proj_fwd
    front.arc_back = proj_bwd
    # Tube cross-section: the same inter-ray offset projected onto both
    # adjacent tangents, averaged (symmetric in the tube's two rays).
    front.tube_gaps = 0.5 * (proj_fwd + proj_bwd)
    return widths


def transport_amplitude(prev: Wavefront, front: Wavefront) -> np.ndarray:
    """Flux-conserving amplitude update between two fronts of the same bundle.

    Per tube, R_next = R_prev * sqrt((|p|_prev g_prev) / (|p|_next g_next)),
    realized by rebuilding R from the tube flux both fronts carry, so the
    flux R^2 |p| g never drifts with step count.  Returns the per-ray
    amplitudes (geometric mean of the two adjacent tubes; boundary rays
    log-extrapolate their half-tube offset).
    """
    if prev.tube_flux is None or prev.tube_flux is not front.tube_flux:
        raise ValueError("fronts do not share a launch flux (mismatched bundles)")
    if front.tube_gaps is None:
        raise ValueError("tube_widths must run on the target front first")
    pm = front.momentum_magnitude()
    p_tube = 0.5 * (pm[:-1] + pm[1:])
    tube_amp = np.sqrt(front.tube_flux / (p_tube * front.tube_gaps))
    u = np.log(tube_amp)
    n = front.n_rays
    amplitude = np.empty(n)
    amplitude[1:-1] = np.exp(0.5 * (u[:-1] + u[1:]))
    # Half-tube log extrapolation keeps the boundary rays on the local trend.
    amplitude[0] = np.exp(u[0] + 0.5 * (u[0] - u[1]))
    amplitude[-1] = np.exp(u[-1] + 0.5 * (u[-1] - u[-2]))
    front.tube_amplitude = tube_amp
    front.amplitude = amplitude
    return amplitude


def _stencil_spacings(front: Wavefront):
    if front.arc_back is None or front.arc_fwd is None:
        raise ValueError("tube_widths must run before stencil operations")
    h1 = front.arc_back[:-1]   # distance to ray i-1, interior rays
    h2 = front.arc_fwd[1:]     # distance to ray i+1, interior rays
    return h1, h2


def transverse_laplacian(front: Wavefront) -> np.ndarray:
    """Second derivative of R along wavefront arc length, per ray.

    Interior rays use the non-uniform 3-point stencil

        R'' ~= 2 * (R_{i-1}/(h1 S) + R_{i+1}/(h2 S) - R_i/(h1 h2)),  S = h1 + h2,

    exact for linear fields and second-order accurate on smooth ones.
    Boundary rays copy their nearest interior value.  Diagnostic view of the
    curvature the staggered closure below evaluates tube-wise.
    """
    n = front.n_rays
    h1, h2 = _stencil_spacings(front)
    s = h1 + h2
    f = front.amplitude
    lap = np.empty(n)
    lap[1:-1] = 2.0 * ((f[:-2] / (h1 * s) + f[2:] / (h2 * s)) - f[1:-1] / (h1 * h2))
    lap[0] = lap[1]
    lap[-1] = lap[-2]
    return lap


def wave_potential(front: Wavefront, engine) -> WavePotentialField:
    """Engine-scaled Wave Potential -coeff * lap(R)/R with its perpendicular gradient.

    The curvature is evaluated tube-wise through u = ln R, whose staggered
    derivative chain is exact for gaussian profiles on uniform fronts and
    keeps the coupled bundle neutrally stable.  The per-ray gradient is the
    arc-length derivative of the potential directed along the local tangent,
    hence exactly perpendicular to the local momentum.  In eikonal mode the
    field is identically zero and the engines reduce to classical ray
    dynamics.

    Bundles below 6 rays cannot support the staggered chain plus its edge
    extrapolation and fall back to the per-ray 3-point stencils.
    """
    n = front.n_rays
    if engine.eikonal:
        return WavePotentialField.zeros(n)
    if front.tube_amplitude is None:
        raise ValueError("transport_amplitude must run before wave_potential")
    rel = front.tube_amplitude / front.launch_peak
    if np.any(rel < AMPLITUDE_FLOOR):
        i = int(np.argmax(rel < AMPLITUDE_FLOOR))
        raise AmplitudeUnderflowError(
            f"amplitude fell below {AMPLITUDE_FLOOR:g} of the launch peak",
            ray=i, step=front.step_index,
        )
    if n < 6:
        return _wave_potential_collocated(front, engine)
    values = np.zeros(n)
    dvals = np.zeros(n)
    for lo, hi in _segments(front.tube_gaps):          # rays lo .. hi inclusive
        if hi - lo + 1 < 6:
            continue                                   # decoupled sliver: ballistic
        _segment_potential(front, engine, lo, hi, values, dvals)
    gradients = dvals[:, None] * front.tangents
    return WavePotentialField(values=values, gradients=gradients)


# A tube this much wider than both neighboring tubes is a void: the fields of
# the rays on its two sides do not overlap yet, so the sides are closed as
# independent sub-bundles until the gap comes back to scale.
VOID_RATIO = 4.0


def _segments(gaps: np.ndarray):
    """Split the bundle at void tubes; yield (first_ray, last_ray) per segment.

    A tube is a void only when it dwarfs its wider neighbor, so a collapsing
    sliver cannot flag the ordinary tubes around itself.
    """
    m = gaps.size                      # tubes 0 .. m-1, rays 0 .. m
    neighbor = np.empty(m)
    if m == 1:
        return [(0, 1)]
    neighbor[0] = gaps[1]
    neighbor[-1] = gaps[-2]
    if m > 2:
        neighbor[1:-1] = np.maximum(gaps[:-2], gaps[2:])
    void = gaps > VOID_RATIO * neighbor
    out = []
    start = 0
    for j in np.nonzero(void)[0]:
        out.append((start, j))
        start = j + 1
    out.append((start, m))
    return out


def _segment_potential(front, engine, lo, hi, values, dvals):
    """Staggered Wave-Potential chain on rays lo..hi (tubes lo..hi-1)."""
    u = np.log(front.tube_amplitude[lo:hi])    # tubes of this segment
    d = front.widths[lo:hi + 1]
    g = front.tube_gaps[lo:hi]
    du = (u[1:] - u[:-1]) / d[1:-1]            # u' at interior rays
    lap_over_r = np.empty(u.size)              # per tube; ends copied
    lap_over_r[1:-1] = (du[1:] - du[:-1]) / g[1:-1] + du[:-1] * du[1:]
    lap_over_r[0] = lap_over_r[1]
    lap_over_r[-1] = lap_over_r[-2]
    q_tube = -engine.wave_coefficient * lap_over_r
    dv = np.empty(d.size)
    dv[1:-1] = (q_tube[1:] - q_tube[:-1]) / d[1:-1]
    _fill_edge_slopes(dv, d)
    val = np.empty(d.size)
    val[1:-1] = 0.5 * (q_tube[:-1] + q_tube[1:])
    val[0] = q_tube[0]
    val[-1] = q_tube[-1]
    values[lo:hi + 1] = val
    dvals[lo:hi + 1] = dv


def _arc_derivative(front: Wavefront, values: np.ndarray) -> np.ndarray:
    """Non-uniform 3-point first derivative of a per-ray field along the front."""
    n = front.n_rays
    h1, h2 = _stencil_spacings(front)
    s = h1 + h2
    a = -h2 / (h1 * s)
    c = h1 / (h2 * s)
    b = (h2 - h1) / (h1 * h2)
    d = np.empty(n)
    d[1:-1] = (values[:-2] * a + values[2:] * c) + values[1:-1] * b
    d[0] = d[1]
    d[-1] = d[-2]
    return d


def _wave_potential_collocated(front: Wavefront, engine) -> WavePotentialField:
    """Per-ray stencil evaluation for bundles too small for the staggered chain."""
    lap_over_r = transverse_laplacian(front) / front.amplitude
    lap_over_r[0] = lap_over_r[1]
    lap_over_r[-1] = lap_over_r[-2]
    values = -engine.wave_coefficient * lap_over_r
    dvals = _arc_derivative(front, values)
    gradients = dvals[:, None] * front.tangents
    return WavePotentialField(values=values, gradients=gradients)


def _fill_edge_slopes(dvals: np.ndarray, d: np.ndarray) -> None:
    """Fill the potential slope on the two outermost rays of each side.

    The slope of the Wave Potential grows linearly across a gaussian-like
    profile, so linear extrapolation from the two nearest honest rays is
    exact for that shape; a plain copy underestimates the outward pull,
    stalls the edge rays and lets the error cascade inward.
    """
    dvals[1] = dvals[2] + (dvals[2] - dvals[3]) * (d[2] / d[3])
    dvals[0] = dvals[1] + (dvals[1] - dvals[2]) * (d[1] / d[2])
    dvals[-2] = dvals[-3] + (dvals[-3] - dvals[-4]) * (d[-3] / d[-4])
    dvals[-1] = dvals[-2] + (dvals[-2] - dvals[-3]) * (d[-2] / d[-3])
