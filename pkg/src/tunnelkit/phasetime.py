"""Phase time (group delay) of a barrier from the frequency derivative of arg t.

With fields exp(i(kx - wt)) the stationary-phase arrival time of a narrow-band
packet at the barrier exit is +d(phi)/d(omega), where phi is the phase of
the exit-plane / entrance-plane amplitude. The textbook form with a leading
minus sign corresponds to the opposite Fourier convention.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .analytic import ambient_wavenumber, decay_constant, plane_amplitudes
from .domain import BarrierModel, DelayResult, DomainError, OpaqueBarrierError

__all__ = [
    "DelayResult",
    "HartmanCurve",
    "HartmanPoint",
    "PhaseSeries",
    "hartman_curve",
    "phase_series",
    "phase_time",
    "principal_phase",
    "unwrap",
]

_TWO_PI = 2 * math.pi
_TINY = 1e-300


def principal_phase(t) -> float:
    """arg(t) on the branch (-pi, pi]."""
    z = complex(t)
    if z == 0 or not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("phase of a zero (or non-finite) amplitude is undefined")
    phi = math.atan2(z.imag, z.real)
    return math.pi if phi == -math.pi else phi


@dataclass(frozen=True)
class PhaseSeries:
    omegas: np.ndarray
    phases: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.omegas) != len(self.phases):
            raise ValueError("omegas and phases differ in length")
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("omegas must be strictly ascending")

    def group_delay(self) -> np.ndarray:
        """d(phase)/d(omega) by second-order finite differences."""
        return np.gradient(self.phases, self.omegas)


def unwrap(phases: Sequence[float], omegas: Sequence[float] | None = None) -> PhaseSeries:
    """Remove 2*pi jumps so neighbouring differences fall in (-pi, pi].

    The first sample is kept as is. A jump of exactly pi is ambiguous; it
    is resolved to +pi and reported in ``metadata['ties']`` because it
    usually means the sweep is undersampled.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.size < 2:
        raise ValueError("unwrap needs at least two samples")
    if omegas is None:
        omegas = np.arange(phases.size, dtype=float)
    d = np.diff(phases)
    wrapped = math.pi - np.mod(math.pi - d, _TWO_PI)
    ties = np.flatnonzero(np.abs(wrapped) == math.pi)
    # integer multiples of 2*pi keep jump-free samples bit-identical
    turns = np.concatenate(([0.0], np.cumsum(np.round((wrapped - d) / _TWO_PI))))
    out = phases + _TWO_PI * turns
    meta = {"ties": ties.tolist(), "possible_undersampling": bool(ties.size)}
    return PhaseSeries(np.asarray(omegas, dtype=float), out, meta)


def _traversal_phase(model: BarrierModel, omega: float) -> tuple[float, float]:
    t, _ = plane_amplitudes(model, omega)
    mag = abs(t)
    if not mag > _TINY or not math.isfinite(mag):
        raise OpaqueBarrierError(
            f"|t| underflows at omega={omega:.6g} rad/s; barrier too opaque for a phase"
        )
    return principal_phase(t), mag


def _free_phase(model: BarrierModel, omega: float) -> float:
    return ambient_wavenumber(model, omega) * model.length


def _central(model, omega0, delta, phase_fn) -> float:
    omegas = [omega0 * (1 - delta), omega0, omega0 * (1 + delta)]
    series = unwrap([phase_fn(model, w) for w in omegas], omegas)
    return (series.phases[2] - series.phases[0]) / (2 * omega0 * delta)


def phase_time(
    model: BarrierModel,
    omega0: float,
    delta: float = 1e-5,
    *,
    relative_to_free_flight: bool = False,
    adaptive: bool = True,
    rtol: float = 1e-6,
) -> DelayResult:
    """Traversal time d(phi)/d(omega) by central differences at ``omega0``.

    ``delta`` is the relative frequency step. With ``adaptive`` the step is
    halved until two successive estimates agree to ``rtol`` (or delta drops
    below 1e-9, which is flagged in the metadata). The value is the absolute
    time between entrance and exit planes; ``relative_to_free_flight``
    subtracts the time the ambient wave needs for the same length.
    """
    if not omega0 > 0:
        raise DomainError("omega0 must be positive")
    if not 1e-9 <= delta <= 1e-2:
        raise DomainError("delta must lie in [1e-9, 1e-2]")

    def estimate(dlt):
        return _central(model, omega0, dlt, lambda m, w: _traversal_phase(m, w)[0])

    coarse = estimate(delta)
    fine = estimate(delta / 2)
    converged = True
    if adaptive:
        delta /= 2
        while abs(fine - coarse) > rtol * abs(fine) and abs(fine - coarse) > 1e-40:
            if delta / 2 < 1e-9:
                converged = False
                break
            delta /= 2
            coarse, fine = fine, estimate(delta)
        value = fine
    else:
        value = coarse
    err = abs(fine - coarse) / 3
    free = _central(model, omega0, 1e-5, _free_phase)
    if relative_to_free_flight:
        value -= free
    _, mag = _traversal_phase(model, omega0)
    kappa = decay_constant(model, omega0)
    meta = {
        "delta": delta,
        "richardson_error_s": err,
        "richardson_value_s": fine + (fine - coarse) / 3 - (free if relative_to_free_flight else 0.0),
        "converged": converged,
        "relative_to_free_flight": relative_to_free_flight,
        "free_flight_s": free,
        "omega0": omega0,
        "transmission": mag * mag,
        "kappa_length": None if kappa is None else kappa * model.length,
    }
    return DelayResult(value, "phase_time", meta)


def phase_series(model: BarrierModel, omegas: Sequence[float]) -> PhaseSeries:
    """Unwrapped traversal phase over a frequency sweep (plot-ready)."""
    omegas = np.asarray(omegas, dtype=float)
    return unwrap([_traversal_phase(model, w)[0] for w in omegas], omegas)


# -- Hartman scans -----------------------------------------------------------

@dataclass(frozen=True)
class HartmanPoint:
    length: float
    delay: DelayResult | None
    kappa_length: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.delay is not None


@dataclass(frozen=True)
class HartmanCurve:
    points: list[HartmanPoint]
    saturation: float | None

    @property
    def lengths(self) -> np.ndarray:
        return np.array([p.length for p in self.points])

    @property
    def taus(self) -> np.ndarray:
        return np.array([p.delay.value if p.ok else np.nan for p in self.points])


def max_workers() -> int:
    env = os.environ.get("TUNNELKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def hartman_curve(
    family: Union[BarrierModel, Callable[[float], BarrierModel]],
    lengths: Sequence[float],
    omega0: float,
    *,
    opaque_threshold: float = 5.0,
    **phase_time_kwargs,
) -> HartmanCurve:
    """Phase time against barrier length at fixed frequency.

    ``family`` is either a callable length -> model or a model with a
    ``with_length`` method. A failing length is recorded on its point and
    the scan continues. ``saturation`` is max|tau_i - tau_last| / tau_last
    over the valid points with kappa*L above ``opaque_threshold``; it is
    None when no point is that opaque.
    """
    lengths = [float(x) for x in lengths]
    if not lengths:
        raise ValueError("need at least one length")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("lengths must be strictly ascending")
    build = family if callable(family) else family.with_length

    def one(length: float) -> HartmanPoint:
        model = build(length)
        kappa = decay_constant(model, omega0)
        kl = None if kappa is None else kappa * length
        try:
            return HartmanPoint(length, phase_time(model, omega0, **phase_time_kwargs), kl)
        except (OpaqueBarrierError, DomainError) as exc:
            return HartmanPoint(length, None, kl, str(exc))

    workers = min(max_workers(), len(lengths))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            points = list(pool.map(one, lengths))
    else:
        points = [one(x) for x in lengths]

    tail = [
        p.delay.value
        for p in points
        if p.ok and p.kappa_length is not None and p.kappa_length > opaque_threshold
    ]
    saturation = None
    if tail:
        ref = tail[-1]
        saturation = max(abs(v - ref) / abs(ref) for v in tail)
    return HartmanCurve(points, saturation)
