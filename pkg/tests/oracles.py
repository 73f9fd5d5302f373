"""Independent reference implementations used only by the tests.

None of these share code with the library: they use textbook constant
values typed in by hand, the forward/backward amplitude basis instead of the
characteristic matrix, and a hand-differentiated phase.
"""

import cmath
import math

import numpy as np

# CODATA 2018 exact / recommended values, typed independently of scipy
HBAR = 1.054571817e-34
H = 6.62607015e-34
E_CHARGE = 1.602176634e-19
M_E = 9.1093837015e-31
C = 299792458.0


def amplitude_basis_t(ks, ds, admittances=None):
    """Plane-referenced (t, r) through layers in the (forward, backward) basis.

    ``ks`` are the complex normal wavenumbers of [ambient, layer_1, ...,
    layer_N, ambient] and ``ds`` the N layer thicknesses. ``admittances``
    defaults to ``ks`` (Schroedinger / s-polarization); for p-polarization
    pass k/eps. Field in layer j: A exp(i k (x - x_j)) + B exp(-i k (x - x_j)).
    """
    ks = [complex(k) for k in ks]
    ys = ks if admittances is None else [complex(y) for y in admittances]

    def dmat(y):
        return np.array([[1, 1], [y, -y]], dtype=complex)

    m = np.eye(2, dtype=complex)
    # entrance interface
    m = np.linalg.solve(dmat(ys[1]), dmat(ys[0])) @ m if len(ds) else m
    for j in range(1, len(ds) + 1):
        phi = np.diag([cmath.exp(1j * ks[j] * ds[j - 1]), cmath.exp(-1j * ks[j] * ds[j - 1])])
        nxt = ys[j + 1]
        m = np.linalg.solve(dmat(nxt), dmat(ys[j]) @ phi) @ m
    r = -m[1, 0] / m[1, 1]
    t = m[0, 0] + m[0, 1] * r
    return complex(t), complex(r)


def rect_t_plane(energy_ev, v0_ev, width, mass=M_E):
    k = math.sqrt(2 * mass * energy_ev * E_CHARGE) / HBAR
    q = cmath.sqrt(2 * mass * (energy_ev - v0_ev) * E_CHARGE) / HBAR
    return amplitude_basis_t([k, q, k], [width])


def rect_phase_time(energy_ev, v0_ev, width, mass=M_E):
    """Closed-form hbar d(phi)/dE below the barrier top.

    With g = (kappa/k - k/kappa)/2 the plane amplitude is
    1/(cosh(kappa d) + i g sinh(kappa d)), so phi = -atan(g tanh(kappa d)).
    """
    e = energy_ev * E_CHARGE
    v = v0_ev * E_CHARGE
    k = math.sqrt(2 * mass * e) / HBAR
    kap = math.sqrt(2 * mass * (v - e)) / HBAR
    dk = mass / (HBAR**2 * k)
    dkap = -mass / (HBAR**2 * kap)
    g = 0.5 * (kap / k - k / kap)
    dg = 0.5 * ((dkap * k - kap * dk) / k**2 - (dk * kap - k * dkap) / kap**2)
    th = math.tanh(kap * width)
    dth = width * dkap / math.cosh(kap * width) ** 2
    dtheta = (dg * th + g * dth) / (1 + (g * th) ** 2)
    return -HBAR * dtheta


def opaque_limit(energy_ev, v0_ev):
    return HBAR / (E_CHARGE * math.sqrt(energy_ev * (v0_ev - energy_ev)))


def stack_t_plane(omega, indices, thicknesses, n0=1.0):
    ks = [n0 * omega / C] + [n * omega / C for n in indices] + [n0 * omega / C]
    return amplitude_basis_t(ks, thicknesses)


def ftir_t_plane(omega, n, angle, gap, pol):
    kp = n * omega * math.cos(angle) / C
    q = cmath.sqrt((omega / C) ** 2 * (1 - (n * math.sin(angle)) ** 2))
    if pol == "s":
        return amplitude_basis_t([kp, q, kp], [gap])
    return amplitude_basis_t([kp, q, kp], [gap], [kp / n**2, q, kp / n**2])


def guide_t_plane(omega, omega_c, length):
    k = omega / C
    q = cmath.sqrt((omega**2 - omega_c**2)) / C
    return amplitude_basis_t([k, q, k], [length])


def numeric_phase_time(t_plane_fn, omega, rel=1e-6):
    """Five-point derivative of the unwrapped phase of an oracle amplitude."""
    h = omega * rel
    ph = np.unwrap([cmath.phase(t_plane_fn(omega + j * h)) for j in (-2, -1, 0, 1, 2)])
    return (-ph[4] + 8 * ph[3] - 8 * ph[1] + ph[0]) / (12 * h)


def free_gaussian_sigma(sigma0, t, mass=M_E):
    """Width of |psi|^2 for a free minimum-uncertainty packet."""
    return sigma0 * math.sqrt(1 + (HBAR * t / (2 * mass * sigma0**2)) ** 2)
