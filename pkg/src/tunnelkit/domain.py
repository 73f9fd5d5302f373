"""Physical constants, unit conversion and the shared barrier / packet types.

Everything is SI internally. Energies in eV and lengths in nm only appear at
the edges (constructors that say so, JSON scenario files, the CLI).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Union

import scipy.constants as sc


class DomainError(ValueError):
    """An argument lies outside the domain of a physical relation."""


class ConfigurationError(ValueError):
    """A simulation or model setup violates a guard (resolution, geometry)."""


class OpaqueBarrierError(ArithmeticError):
    """Transmission underflows; the phase of t is no longer meaningful."""


class NumericalError(ArithmeticError):
    """Solver breakdown or a non-finite state during evolution."""


class QuasiMonochromaticWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Constants:
    hbar: float
    hbar_ev: float
    h: float
    h_ev: float
    c: float
    m_e: float
    ev_to_joule: float


CONSTANTS = Constants(
    hbar=sc.hbar,
    hbar_ev=sc.hbar / sc.e,
    h=sc.h,
    h_ev=sc.h / sc.e,
    c=sc.c,
    m_e=sc.m_e,
    ev_to_joule=sc.e,
)

HBAR = CONSTANTS.hbar
HBAR_EV = CONSTANTS.hbar_ev
H = CONSTANTS.h
H_EV = CONSTANTS.h_ev
C = CONSTANTS.c
M_E = CONSTANTS.m_e
EV = CONSTANTS.ev_to_joule

NM = 1e-9


def ev_to_joule(energy_ev: float) -> float:
    return energy_ev * EV


def joule_to_ev(energy_j: float) -> float:
    return energy_j / EV


def energy_to_wavenumber(energy: float, mass: float = M_E) -> float:
    """Free-particle wavenumber ``sqrt(2 m E) / hbar`` for ``energy`` in eV."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r} eV")
    if not mass > 0:
        raise DomainError(f"mass must be positive, got {mass!r} kg")
    return math.sqrt(2.0 * mass * energy * EV) / HBAR


def wavenumber_to_energy(k: float, mass: float = M_E) -> float:
    """Inverse of :func:`energy_to_wavenumber`, result in eV."""
    if not k > 0:
        raise DomainError(f"wavenumber must be positive, got {k!r}")
    return (HBAR * k) ** 2 / (2.0 * mass) / EV


def energy_to_frequency(energy: float) -> float:
    """E = h nu, with ``energy`` in eV and the result in Hz."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r} eV")
    return energy / H_EV


def frequency_to_energy(nu: float) -> float:
    if not nu > 0:
        raise DomainError(f"frequency must be positive, got {nu!r} Hz")
    return nu * H_EV


def energy_frequency_convert(value: float, inverse: bool = False) -> float:
    """nu = E/h for ``value`` in eV, or E in eV from ``value`` in Hz when ``inverse``."""
    return frequency_to_energy(value) if inverse else energy_to_frequency(value)


def energy_to_omega(energy: float) -> float:
    """Angular frequency E/hbar (rad/s) for ``energy`` in eV."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r} eV")
    return energy / HBAR_EV


def omega_to_energy(omega: float) -> float:
    return omega * HBAR_EV


# -- barrier models ---------------------------------------------------------

@dataclass(frozen=True)
class RectangularBarrier:
    """Square potential barrier of height ``v0`` (eV) and ``width`` (m).

    ``v0 = 0`` is accepted so free flight can be run through the same code.
    """

    v0: float
    width: float
    mass: float = M_E

    def __post_init__(self):
        if not self.v0 >= 0:
            raise DomainError("v0 must be non-negative")
        if not self.width >= 0:
            raise DomainError("width must be non-negative")
        if not self.mass > 0:
            raise DomainError("mass must be positive")

    @property
    def length(self) -> float:
        return self.width

    def with_length(self, length: float) -> RectangularBarrier:
        return replace(self, width=length)

    def kappa(self, energy: float) -> float:
        """Decay constant inside the barrier for ``energy`` (eV) below v0."""
        if not 0 < energy < self.v0:
            raise DomainError("kappa is only defined for 0 < E < v0")
        return math.sqrt(2.0 * self.mass * (self.v0 - energy) * EV) / HBAR

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RectangularBarrier:
        return cls(**d)


@dataclass(frozen=True)
class Layer:
    refractive_index: float
    thickness: float


@dataclass(frozen=True)
class DielectricStack:
    """Lossless layers at normal incidence between identical half-spaces."""

    layers: tuple[Layer, ...] = ()
    ambient_index: float = 1.0

    def __post_init__(self):
        layers = tuple(
            lay if isinstance(lay, Layer) else Layer(*lay) for lay in self.layers
        )
        object.__setattr__(self, "layers", layers)
        for lay in layers:
            if not lay.thickness >= 0:
                raise DomainError("layer thickness must be non-negative")
            if not lay.refractive_index >= 1:
                raise DomainError("refractive index must be >= 1")
        if not self.ambient_index >= 1:
            raise DomainError("ambient index must be >= 1")

    @property
    def length(self) -> float:
        return sum(lay.thickness for lay in self.layers)

    def reversed(self) -> DielectricStack:
        return replace(self, layers=self.layers[::-1])

    def to_dict(self) -> dict:
        return {
            "layers": [asdict(lay) for lay in self.layers],
            "ambient_index": self.ambient_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DielectricStack:
        layers = tuple(Layer(**lay) for lay in d.get("layers", []))
        return cls(layers=layers, ambient_index=d.get("ambient_index", 1.0))

    @classmethod
    def quarter_wave(
        cls, n_high: float, n_low: float, periods: int, wavelength: float,
        ambient_index: float = 1.0,
    ) -> DielectricStack:
        """Bragg mirror (HL)^periods, quarter-wave at vacuum ``wavelength``."""
        pair = (
            Layer(n_high, wavelength / (4 * n_high)),
            Layer(n_low, wavelength / (4 * n_low)),
        )
        return cls(layers=pair * periods, ambient_index=ambient_index)


@dataclass(frozen=True)
class EvanescentGuide:
    """Undersized waveguide section of ``length`` (m) with ``cutoff_frequency`` (Hz).

    The feed guide on either side is taken to propagate with k = omega/c.
    """

    cutoff_frequency: float
    length: float

    def __post_init__(self):
        if not self.cutoff_frequency > 0:
            raise DomainError("cutoff frequency must be positive")
        if not self.length >= 0:
            raise DomainError("length must be non-negative")

    @property
    def cutoff_omega(self) -> float:
        return 2 * math.pi * self.cutoff_frequency

    def with_length(self, length: float) -> EvanescentGuide:
        return replace(self, length=length)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> EvanescentGuide:
        return cls(**d)


@dataclass(frozen=True)
class FtirGap:
    """Air gap of width ``gap`` (m) between two prisms of ``prism_index``."""

    prism_index: float
    angle: float
    gap: float
    polarization: str = "s"

    def __post_init__(self):
        if not self.prism_index > 1:
            raise DomainError("prism index must exceed 1")
        if not 0 <= self.angle < math.pi / 2:
            raise DomainError("angle must lie in [0, pi/2)")
        if not self.gap >= 0:
            raise DomainError("gap must be non-negative")
        if self.polarization not in ("s", "p"):
            raise DomainError("polarization must be 's' or 'p'")

    @property
    def length(self) -> float:
        return self.gap

    @property
    def evanescent(self) -> bool:
        return self.prism_index * math.sin(self.angle) > 1

    def with_length(self, length: float) -> FtirGap:
        return replace(self, gap=length)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> FtirGap:
        return cls(**d)


BarrierModel = Union[RectangularBarrier, DielectricStack, EvanescentGuide, FtirGap]

_MODEL_KINDS = {
    "rectangular": RectangularBarrier,
    "stack": DielectricStack,
    "guide": EvanescentGuide,
    "ftir": FtirGap,
}


def model_to_dict(model: BarrierModel) -> dict:
    """Tagged JSON form ``{"kind": ..., **fields}`` of any barrier model."""
    for kind, cls in _MODEL_KINDS.items():
        if isinstance(model, cls):
            return {"kind": kind, **model.to_dict()}
    raise TypeError(f"not a barrier model: {model!r}")


def model_from_dict(d: dict) -> BarrierModel:
    d = dict(d)
    try:
        cls = _MODEL_KINDS[d.pop("kind")]
    except KeyError as exc:
        raise DomainError(f"unknown or missing barrier kind in {d!r}") from exc
    return cls.from_dict(d)


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet; |psi|^2 has standard deviation ``spatial_sigma``."""

    center_wavenumber: float
    spatial_sigma: float
    center_position: float = 0.0

    def __post_init__(self):
        if not self.spatial_sigma > 0:
            raise DomainError("spatial_sigma must be positive")
        if self.center_wavenumber * self.spatial_sigma < 5:
            warnings.warn(
                f"k0*sigma = {self.center_wavenumber * self.spatial_sigma:.3g} < 5; "
                "packet is not quasi-monochromatic and traversal times lose meaning",
                QuasiMonochromaticWarning,
                stacklevel=3,
            )

    @property
    def k0(self) -> float:
        return self.center_wavenumber

    @property
    def sigma(self) -> float:
        return self.spatial_sigma

    @property
    def x0(self) -> float:
        return self.center_position

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> GaussianPacket:
        return cls(**d)


@dataclass(frozen=True)
class DelayResult:
    """A traversal time in seconds tagged with the method that produced it."""

    value: float
    method: str
    metadata: dict = field(default_factory=dict, compare=False)

    METHODS = ("phase_time", "universal_T", "universal_hE", "tau_A", "time_domain")

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not math.isfinite(self.value):
            raise NumericalError(f"non-finite delay {self.value!r}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "unit": "s",
            "method": self.method,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict) -> DelayResult:
        if d.get("unit", "s") != "s":
            raise DomainError(f"DelayResult unit must be 's', got {d['unit']!r}")
        return cls(d["value"], d["method"], dict(d.get("metadata", {})))
