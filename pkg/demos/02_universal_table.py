"""Measured tunneling times against one oscillation period.

For every tabulated experiment tau/T is within a factor of about ten of one,
across twelve orders of magnitude in time. The ionization row uses the
massive-particle period h/E, and the two closed forms for the
barrier-corrected time tau_A are printed side by side because they differ
by a factor of about four.
"""

from tunnelkit.cli import render_table
from tunnelkit.universal import (
    IONIZATION_BARRIER,
    IONIZATION_ENERGY,
    a_factor_schrodinger,
    builtin_table,
    compare,
    massive_period,
)

report = compare(builtin_table())
print(render_table(report))

e, v0 = IONIZATION_ENERGY, IONIZATION_BARRIER
print(f"h/E at {e} eV            = {massive_period(e) * 1e18:.2f} as")
print(f"A = E/(4 pi^2 (V0 - E))  = {a_factor_schrodinger(e, v0):.4f}")

span = max(r.tau_measured for r in builtin_table()) / min(r.tau_measured for r in builtin_table())
print(f"measured times span a factor of {span:.1e}")
