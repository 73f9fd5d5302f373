"""Two photonic barriers: a frustrated-TIR gap and an undersized waveguide.

Both are evanescent regions with the same mathematics as the electron
barrier. The gap delay saturates with gap width in both polarizations, and
the below-cutoff guide section does the same with length. Each saturated
delay is compared with one period of the carrier, 1/nu.
"""

import math

import numpy as np

from tunnelkit import EvanescentGuide, FtirGap, hartman_curve
from tunnelkit.domain import C

# prism gap at 1 um, 55 degrees, n = 1.5 (critical angle 41.8 degrees)
lam = 1e-6
omega = 2 * math.pi * C / lam
gaps = np.linspace(50e-9, 800e-9, 16)
print("gap (nm)   tau_s (fs)   tau_p (fs)")
curves = {pol: hartman_curve(FtirGap(1.5, math.radians(55), 0.0, pol), gaps, omega) for pol in "sp"}
for i, g in enumerate(gaps):
    print(f"{g * 1e9:8.0f}   {curves['s'].taus[i] * 1e15:10.3f}   {curves['p'].taus[i] * 1e15:10.3f}")
print(f"period 1/nu = {lam / C * 1e15:.3f} fs")

# X-band guide: 8.7 GHz carrier, 9.5 GHz cutoff section
f, fc = 8.7e9, 9.5e9
lengths = np.linspace(5e-3, 150e-3, 15)
guide = hartman_curve(EvanescentGuide(fc, 0.0), lengths, 2 * math.pi * f)
print("\nlength (mm)   tau (ps)   free flight L/c (ps)")
for L, tau in zip(lengths, guide.taus):
    print(f"{L * 1e3:11.1f}   {tau * 1e12:8.2f}   {L / C * 1e12:20.2f}")
print(f"period 1/nu = {1 / f * 1e12:.1f} ps")
