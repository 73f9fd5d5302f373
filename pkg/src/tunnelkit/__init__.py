"""Barrier traversal times for photonic and electronic tunneling.

Phase times from exact transmission amplitudes, the universal period-based
estimates, and a Crank-Nicolson wave-packet solver to check one against the
other.
"""

from .analytic import (
    ComplexAmplitude,
    TransferMatrix,
    amplitude,
    ftir_amplitude,
    guide_amplitude,
    rect_barrier_amplitude,
    stack_amplitude,
    stack_transfer_matrix,
)
from .domain import (
    ConfigurationError,
    DelayResult,
    DielectricStack,
    DomainError,
    EvanescentGuide,
    FtirGap,
    GaussianPacket,
    Layer,
    NumericalError,
    OpaqueBarrierError,
    QuasiMonochromaticWarning,
    RectangularBarrier,
)
from .phasetime import hartman_curve, phase_series, phase_time, unwrap
from .universal import (
    a_factor_schrodinger,
    builtin_table,
    compare,
    massive_period,
    oscillation_period,
    tau_A_ratio_form,
    tau_A_sqrt_form,
    tau_modified,
)

__version__ = "0.1.0"
