"""ETDRK4 coefficients for diagonal linear operators (Cox-Matthews scheme).

The phi-functions are evaluated by contour averages around each ``z = h L``
(Kassam & Trefethen 2005), which is stable for z near 0.
"""

import numpy as np


class ETDRK4Coefficients:
    def __init__(self, lam, dt, n_contour=32):
        lam = np.asarray(lam, dtype=float)
        z = dt * lam
        roots = np.exp(1j * np.pi * (np.arange(1, n_contour + 1) - 0.5) / n_contour)
        lr = z[..., None] + roots
        ex = np.exp(lr)
        self.dt = dt
        self.e = np.exp(z)
        self.e2 = np.exp(0.5 * z)
        self.q = dt * np.mean((np.exp(lr / 2) - 1) / lr, axis=-1).real
        self.f1 = dt * np.mean((-4 - lr + ex * (4 - 3 * lr + lr**2)) / lr**3, axis=-1).real
        self.f2 = dt * np.mean((2 + lr + ex * (lr - 2)) / lr**3, axis=-1).real
        self.f3 = dt * np.mean((-4 - 3 * lr - lr**2 + ex * (4 - lr)) / lr**3, axis=-1).real

    def step(self, u, nonlinear):
        nu = nonlinear(u)
        a = self.e2 * u + self.q * nu
        na = nonlinear(a)
        b = self.e2 * u + self.q * na
        nb = nonlinear(b)
        c = self.e2 * a + self.q * (2 * nb - nu)
        nc = nonlinear(c)
        return self.e * u + self.f1 * nu + 2 * self.f2 * (na + nb) + self.f3 * nc
