"""Hartman effect: the phase time of an opaque barrier stops growing with width.

An electron at 5 eV meets a 10 eV barrier. Past kappa*d ~ 3 the traversal
time settles at hbar / sqrt(E (V0 - E)) while the free-flight time over the
same width keeps increasing linearly.
"""

import math

import numpy as np

from tunnelkit import RectangularBarrier, hartman_curve
from tunnelkit.domain import HBAR, HBAR_EV, M_E, energy_to_omega, energy_to_wavenumber

E, V0 = 5.0, 10.0
barrier = RectangularBarrier(V0, 1e-9)
kappa = barrier.kappa(E)
omega = energy_to_omega(E)
v = HBAR * energy_to_wavenumber(E) / M_E

kd = np.linspace(0.25, 12, 48)
curve = hartman_curve(barrier, kd / kappa, omega)

limit = HBAR_EV / math.sqrt(E * (V0 - E))
print(f"opaque limit hbar/sqrt(E(V0-E)) = {limit:.4e} s")
print(f"{'kappa*d':>8} {'d (nm)':>8} {'tau (as)':>10} {'d/v (as)':>10}")
for x, p in zip(kd, curve.points):
    print(f"{x:8.2f} {p.length * 1e9:8.3f} {p.delay.value * 1e18:10.2f} {p.length / v * 1e18:10.2f}")

print(f"\nspread over kappa*d > 5: {curve.saturation:.2e}")

with open("hartman_rect_e5_v10.csv", "w") as fh:
    fh.write("kappa_d,length_m,tau_s,free_flight_s\n")
    for x, p in zip(kd, curve.points):
        fh.write(f"{x:.6e},{p.length:.8e},{p.delay.value:.8e},{p.length / v:.8e}\n")
print("wrote hartman_rect_e5_v10.csv")
