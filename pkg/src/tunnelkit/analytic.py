"""Complex transmission amplitudes of the barrier models.

Convention: fields carry exp(i(kx - wt)). The public amplitudes are
referenced to the ambient plane wave exp(ikx) with the origin at the
barrier entrance, so a rectangular barrier gives the familiar

    t = exp(-ikd) / [cosh(kappa d) + (i/2)(kappa/k - k/kappa) sinh(kappa d)].

:func:`plane_amplitudes` returns the exit-plane / entrance-plane ratio
instead (t times exp(ik_ambient L)); its phase is what the phase time
differentiates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    C,
    EV,
    HBAR,
    BarrierModel,
    DielectricStack,
    DomainError,
    EvanescentGuide,
    FtirGap,
    RectangularBarrier,
    omega_to_energy,
)

_SERIES_LIMIT = 1e-4


@dataclass(frozen=True)
class ComplexAmplitude:
    re: float
    im: float
    regime: str = "tunneling"

    @classmethod
    def of(cls, z: complex, regime: str = "tunneling") -> ComplexAmplitude:
        z = complex(z)
        return cls(z.real, z.imag, regime)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return math.atan2(self.im, self.re)

    def to_dict(self) -> dict:
        return {"re": self.re, "im": self.im}

    @classmethod
    def from_dict(cls, d: dict) -> ComplexAmplitude:
        return cls(float(d["re"]), float(d["im"]))


@dataclass(frozen=True)
class TransferMatrix:
    """Characteristic matrix mapping (E, H) at the entrance to the exit plane.

    H is normalized so that a plane wave in a medium of index n has H = n E.
    """

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def identity(cls) -> TransferMatrix:
        return cls(1, 0, 0, 1)

    @classmethod
    def from_array(cls, a) -> TransferMatrix:
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def __matmul__(self, other: TransferMatrix) -> TransferMatrix:
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


# -- two-interface slab ------------------------------------------------------

def _cos_sinc(q2: float, d: float) -> tuple[float, float]:
    """cos(q d) and sin(q d)/q as entire functions of q^2 (q^2 may be negative)."""
    z = q2 * d * d
    if abs(z) < _SERIES_LIMIT**2:
        return 1 - z / 2 + z * z / 24, d * (1 - z / 6 + z * z / 120)
    if q2 > 0:
        q = math.sqrt(q2)
        return math.cos(q * d), math.sin(q * d) / q
    kappa = math.sqrt(-q2)
    return math.cosh(kappa * d), math.sinh(kappa * d) / kappa


def _slab(q2: float, d: float, eta_out: float, eps_in: float = 1.0) -> tuple[complex, complex]:
    """Plane-referenced (t, r) of a uniform slab between identical media.

    ``q2`` is the squared normal wavenumber inside the slab, ``eta_out`` the
    normal admittance outside (k for Schroedinger/TE, k/eps for TM) and
    ``eps_in`` the permittivity the slab admittance is divided by (TM only).
    Written in q^2 so the E = V0 / cutoff crossing needs no special casing.
    """
    y = eps_in * eta_out
    # exp(kappa d) beyond double range: t = 0 and r is the single-interface value
    opaque = (0j, complex(y, -math.sqrt(-q2)) / complex(y, math.sqrt(-q2))) if q2 < 0 else None
    try:
        cos_qd, sinc = _cos_sinc(q2, d)
    except OverflowError:
        return opaque
    a = q2 * sinc / y
    b = y * sinc
    denom = complex(cos_qd, -0.5 * (a + b))
    if not (math.isfinite(denom.real) and math.isfinite(denom.imag)):
        return opaque
    return 1 / denom, complex(0, 0.5 * (a - b)) / denom


def _rect_wavenumbers(energy: float, barrier: RectangularBarrier) -> tuple[float, float]:
    k = math.sqrt(2 * barrier.mass * energy * EV) / HBAR
    q2 = 2 * barrier.mass * (energy - barrier.v0) * EV / HBAR**2
    return k, q2


def _rect_plane(energy: float, barrier: RectangularBarrier) -> tuple[complex, complex]:
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy!r} eV")
    k, q2 = _rect_wavenumbers(energy, barrier)
    return _slab(q2, barrier.width, k)


def rect_barrier_amplitude(energy: float, barrier: RectangularBarrier) -> ComplexAmplitude:
    """Transmission amplitude t(E) of a square barrier, ``energy`` in eV.

    Below the barrier top the solution is evanescent; above it the same
    expression continues analytically into the oscillating branch.
    """
    t, _ = _rect_plane(energy, barrier)
    k, _ = _rect_wavenumbers(energy, barrier)
    regime = "tunneling" if energy < barrier.v0 else "propagating"
    return ComplexAmplitude.of(t * cmath.exp(-1j * k * barrier.width), regime)


def _layer_matrix(omega: float, n: float, thickness: float) -> TransferMatrix:
    delta = n * omega * thickness / C
    c, s = math.cos(delta), math.sin(delta)
    return TransferMatrix(c, 1j * s / n, 1j * n * s, c)


def stack_transfer_matrix(omega: float, stack: DielectricStack) -> TransferMatrix:
    """Characteristic matrix of the whole stack.

    Layers are applied first-layer-first, so the product reads
    ``M_N @ ... @ M_2 @ M_1``. An empty stack is the identity.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    m = TransferMatrix.identity()
    for layer in stack.layers:
        m = _layer_matrix(omega, layer.refractive_index, layer.thickness) @ m
    return m


def _stack_plane(omega: float, stack: DielectricStack) -> tuple[complex, complex]:
    m = stack_transfer_matrix(omega, stack)
    n0 = stack.ambient_index
    denom = n0 * m.m11 - n0 * n0 * m.m12 - m.m21 + n0 * m.m22
    t = 2 * n0 * m.det / denom
    r = (m.m21 + n0 * m.m22 - n0 * m.m11 - n0 * n0 * m.m12) / denom
    return t, r


def stack_amplitude(omega: float, stack: DielectricStack) -> ComplexAmplitude:
    t, _ = _stack_plane(omega, stack)
    k = stack.ambient_index * omega / C
    return ComplexAmplitude.of(t * cmath.exp(-1j * k * stack.length), "propagating")


def _guide_plane(omega: float, guide: EvanescentGuide) -> tuple[complex, complex]:
    if not omega > 0:
        raise DomainError("omega must be positive")
    k = omega / C
    q2 = (omega**2 - guide.cutoff_omega**2) / C**2
    return _slab(q2, guide.length, k)


def guide_amplitude(omega: float, guide: EvanescentGuide) -> ComplexAmplitude:
    """Transmission through an undersized guide section fed by k = omega/c guides."""
    t, _ = _guide_plane(omega, guide)
    k = omega / C
    regime = "tunneling" if omega < guide.cutoff_omega else "propagating"
    return ComplexAmplitude.of(t * cmath.exp(-1j * k * guide.length), regime)


def _ftir_normal(omega: float, gap: FtirGap) -> tuple[float, float, float, float]:
    n = gap.prism_index
    k_prism = n * omega * math.cos(gap.angle) / C
    q2 = (omega / C) ** 2 * (1 - (n * math.sin(gap.angle)) ** 2)
    if gap.polarization == "s":
        return k_prism, q2, k_prism, 1.0
    return k_prism, q2, k_prism / n**2, 1.0


def _ftir_plane(omega: float, gap: FtirGap) -> tuple[complex, complex]:
    if not omega > 0:
        raise DomainError("omega must be positive")
    _, q2, eta_out, eps_gap = _ftir_normal(omega, gap)
    return _slab(q2, gap.gap, eta_out, eps_gap)


def ftir_amplitude(omega: float, gap: FtirGap) -> ComplexAmplitude:
    """Prism / air gap / prism transmission along the gap normal.

    Below the critical angle the gap field propagates; the result is still
    returned but tagged ``regime='propagating'``.
    """
    t, _ = _ftir_plane(omega, gap)
    k_prism = _ftir_normal(omega, gap)[0]
    regime = "tunneling" if gap.evanescent else "propagating"
    return ComplexAmplitude.of(t * cmath.exp(-1j * k_prism * gap.gap), regime)


# -- model dispatch ----------------------------------------------------------

def plane_amplitudes(model: BarrierModel, omega: float) -> tuple[complex, complex]:
    """(t, r) referenced to the entrance and exit planes of ``model`` at ``omega``.

    For a rectangular barrier omega is E/hbar of the incident particle.
    """
    if isinstance(model, RectangularBarrier):
        return _rect_plane(omega_to_energy(omega), model)
    if isinstance(model, DielectricStack):
        if not omega > 0:
            raise DomainError("omega must be positive")
        return _stack_plane(omega, model)
    if isinstance(model, EvanescentGuide):
        return _guide_plane(omega, model)
    if isinstance(model, FtirGap):
        return _ftir_plane(omega, model)
    raise TypeError(f"not a barrier model: {model!r}")


def amplitude(model: BarrierModel, omega: float) -> ComplexAmplitude:
    if isinstance(model, RectangularBarrier):
        return rect_barrier_amplitude(omega_to_energy(omega), model)
    if isinstance(model, DielectricStack):
        return stack_amplitude(omega, model)
    if isinstance(model, EvanescentGuide):
        return guide_amplitude(omega, model)
    if isinstance(model, FtirGap):
        return ftir_amplitude(omega, model)
    raise TypeError(f"not a barrier model: {model!r}")


def ambient_wavenumber(model: BarrierModel, omega: float) -> float:
    """Normal wavenumber in the medium surrounding the barrier."""
    if isinstance(model, RectangularBarrier):
        return math.sqrt(2 * model.mass * omega / HBAR)
    if isinstance(model, DielectricStack):
        return model.ambient_index * omega / C
    if isinstance(model, EvanescentGuide):
        return omega / C
    if isinstance(model, FtirGap):
        return _ftir_normal(omega, model)[0]
    raise TypeError(f"not a barrier model: {model!r}")


def decay_constant(model: BarrierModel, omega: float) -> float | None:
    """kappa inside the barrier, or None when the barrier field propagates."""
    if isinstance(model, RectangularBarrier):
        q2 = _rect_wavenumbers(omega_to_energy(omega), model)[1]
    elif isinstance(model, EvanescentGuide):
        q2 = (omega**2 - model.cutoff_omega**2) / C**2
    elif isinstance(model, FtirGap):
        q2 = _ftir_normal(omega, model)[1]
    elif isinstance(model, DielectricStack):
        return None
    else:
        raise TypeError(f"not a barrier model: {model!r}")
    return math.sqrt(-q2) if q2 < 0 else None
