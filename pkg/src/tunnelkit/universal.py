"""Universal tunneling-time relations and the reference measurement table.

The empirical relations are tau ~ 1/nu = T for waves and tau ~ h/E for
massive particles, refined to tau_A = T * A with a barrier-dependent factor
A. For a Schroedinger particle at a square barrier A is written in two ways
that do not agree numerically; both are provided:

* :func:`tau_A_sqrt_form` -- hbar / sqrt(E (V0 - E)), the opaque-limit phase
  time of a square barrier;
* :func:`tau_A_ratio_form` -- (h/E) * E / (4 pi^2 (V0 - E)), which is the
  form that reproduces the tabulated ionization value.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources

from .domain import H_EV, HBAR_EV, DomainError

BARRIER_KINDS = ("ftir", "photonic_lattice", "undersized_waveguide", "ionization", "acoustic")

# electron energy and barrier height (eV) used for the ionization row
IONIZATION_ENERGY = 54.39
IONIZATION_BARRIER = 78.98

UNIVERSALITY_THRESHOLD = 1.2


def _positive(name: str, x: float) -> None:
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")


def oscillation_period(nu: float) -> float:
    """T = 1/nu in seconds for a carrier frequency ``nu`` in Hz."""
    _positive("frequency", nu)
    return 1.0 / nu


def massive_period(energy: float) -> float:
    """h/E in seconds for a particle energy in eV."""
    _positive("energy", energy)
    return H_EV / energy


def tau_modified(period_T: float, a_factor: float) -> float:
    _positive("period", period_T)
    _positive("A factor", a_factor)
    return period_T * a_factor


def _check_tunneling(energy: float, v0: float) -> None:
    if not 0 < energy < v0:
        raise DomainError(f"need 0 < E < V0 for tunneling, got E={energy!r}, V0={v0!r}")


def a_factor_schrodinger(energy: float, v0: float) -> float:
    """A = E / (4 pi^2 (V0 - E)) for a square barrier (both in eV)."""
    _check_tunneling(energy, v0)
    return energy / (4 * math.pi**2 * (v0 - energy))


def tau_A_ratio_form(energy: float, v0: float) -> float:
    _check_tunneling(energy, v0)
    return H_EV / (4 * math.pi**2 * (v0 - energy))


def tau_A_sqrt_form(energy: float, v0: float) -> float:
    _check_tunneling(energy, v0)
    return HBAR_EV / math.sqrt(energy * (v0 - energy))


@dataclass(frozen=True)
class TableRecord:
    barrier_kind: str
    reference: str
    tau_measured: float
    period_T: float
    tau_A: float

    def __post_init__(self):
        if self.barrier_kind not in BARRIER_KINDS:
            raise DomainError(f"unknown barrier kind {self.barrier_kind!r}")
        for name in ("tau_measured", "period_T", "tau_A"):
            _positive(name, getattr(self, name))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> TableRecord:
        return cls(**d)


def table_bytes() -> bytes:
    return resources.files("tunnelkit").joinpath("data/table.json").read_bytes()


def builtin_table() -> list[TableRecord]:
    """The eight reference measurements, times in seconds."""
    return [TableRecord.from_dict(d) for d in json.loads(table_bytes())]


@dataclass(frozen=True)
class ComparisonEntry:
    record: TableRecord
    ratio_T: float
    ratio_A: float
    log10_T: float
    log10_A: float
    within_T: bool
    within_A: bool

    def to_dict(self) -> dict:
        return {
            **self.record.to_dict(),
            "ratio_tau_over_T": self.ratio_T,
            "ratio_tau_over_tau_A": self.ratio_A,
            "log10_tau_over_T": self.log10_T,
            "log10_tau_over_tau_A": self.log10_A,
            "within_order_T": self.within_T,
            "within_order_A": self.within_A,
        }


@dataclass(frozen=True)
class ComparisonReport:
    entries: list[ComparisonEntry]
    threshold: float
    universal: bool

    @property
    def verdict(self) -> str:
        return "universal within first order: " + ("PASS" if self.universal else "FAIL")

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "threshold_log10": self.threshold,
            "universal": self.universal,
            "verdict": self.verdict,
        }


def compare(records, threshold: float = UNIVERSALITY_THRESHOLD) -> ComparisonReport:
    """Ratios tau/T and tau/tau_A per record and the universality verdict.

    A record is within order when |log10(ratio)| < ``threshold``; the set is
    universal when every tau/T is.
    """
    records = list(records)
    if not records:
        raise ValueError("compare needs at least one record")
    entries = []
    for rec in records:
        rt = rec.tau_measured / rec.period_T
        ra = rec.tau_measured / rec.tau_A
        lt, la = math.log10(rt), math.log10(ra)
        entries.append(
            ComparisonEntry(rec, rt, ra, lt, la, abs(lt) < threshold, abs(la) < threshold)
        )
    return ComparisonReport(entries, threshold, all(e.within_T for e in entries))
