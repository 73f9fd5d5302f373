"""Group delay of a quarter-wave Bragg mirror across its stop band.

Inside the band gap the field is evanescent and the delay at the band
centre saturates as periods are added; outside it the delay oscillates
with the Fabry-Perot fringes of the finite stack.
"""

import math

import numpy as np

from tunnelkit import DielectricStack, phase_series, phase_time
from tunnelkit.domain import C

n_hi, n_lo, lam0 = 2.3, 1.45, 800e-9
omega0 = 2 * math.pi * C / lam0

print("periods  length (um)  delay at centre (fs)  light time n*L/c (fs)")
for periods in (2, 4, 6, 8, 10, 14, 18):
    s = DielectricStack.quarter_wave(n_hi, n_lo, periods, lam0)
    tau = phase_time(s, omega0).value
    optical = sum(l.refractive_index * l.thickness for l in s.layers) / C
    print(f"{periods:7d}  {s.length * 1e6:11.3f}  {tau * 1e15:20.3f}  {optical * 1e15:21.3f}")

# full spectrum of a 10-period mirror
stack = DielectricStack.quarter_wave(n_hi, n_lo, 10, lam0)
omegas = omega0 * np.linspace(0.6, 1.4, 2001)
series = phase_series(stack, omegas)
delay = series.group_delay()

half_gap = 2 / math.pi * math.asin((n_hi - n_lo) / (n_hi + n_lo))
print(f"\nstop band: omega/omega0 in [{1 - half_gap:.3f}, {1 + half_gap:.3f}]")
inside = np.abs(omegas / omega0 - 1) < 0.5 * half_gap
print(f"mean delay inside the gap  {delay[inside].mean() * 1e15:.2f} fs")
print(f"mean delay outside the gap {delay[~inside].mean() * 1e15:.2f} fs")

np.savetxt(
    "bragg_group_delay.csv",
    np.column_stack([omegas / omega0, series.phases, delay]),
    delimiter=",", header="omega_over_omega0,phase_rad,tau_s", comments="", fmt="%.8e",
)
print("wrote bragg_group_delay.csv")
