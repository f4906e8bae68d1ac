"""Linearization of the real Ginzburg-Landau equation around A_q.

With the multiplicative ansatz ``A = A_q (1 + V)`` and ``v = (Re V, Im V)``
the linear part has the Fourier symbol

    M(k) = [[-k^2 - 2(1 - q^2), -2 q i k],
            [ 2 q i k,           -k^2   ]],

a Hermitian 2x2 matrix, so both eigenvalues are real and the adjoint
eigenvectors are the eigenvectors themselves up to normalization.

Note: the closed form used here is
``lambda_{1,2} = -k^2 - (1 - q^2) +/- sqrt((1 - q^2)^2 + 4 q^2 k^2)``.  One
printed variant of the eigenvalue formula at q^2 = 1/3 drops the ``-k^2``
term; that variant contradicts ``lambda_1 = -3/4 k^4 + O(k^6)`` and is not
used.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField

Q_ECKHAUS = float(np.sqrt(1.0 / 3.0))
DEFAULT_K0 = 1.0


class InvalidWavenumber(ValueError):
    pass


class NormalizationFailure(ArithmeticError):
    pass


class Stability(enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


def _check_q(q):
    if not abs(q) < 1.0:
        raise InvalidWavenumber(f"|q| must be < 1 (equilibrium amplitude sqrt(1-q^2)), got q={q}")


def linear_matrix(k, q=Q_ECKHAUS):
    """Symbol M(k) of the linearized operator; broadcasts over ``k``.

    Returns an array of shape ``k.shape + (2, 2)``.
    """
    _check_q(q)
    k = np.asarray(k, dtype=float)
    r2 = 1.0 - q * q
    m = np.empty(k.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = -k * k - 2.0 * r2
    m[..., 0, 1] = -2j * q * k
    m[..., 1, 0] = 2j * q * k
    m[..., 1, 1] = -k * k
    return m


def eigenvalues(k, q=Q_ECKHAUS):
    """Closed-form growth rates ``(lambda1, lambda2)`` with lambda1 >= lambda2."""
    _check_q(q)
    k = np.asarray(k, dtype=float)
    r2 = 1.0 - q * q
    root = np.sqrt(r2 * r2 + 4.0 * q * q * k * k)
    lam2 = -k * k - r2 - root  # <= -2 r2 < 0
    # lam1 = det(M) / lam2 avoids the cancellation in base + root near k = 0
    lam1 = (k**4 + 2.0 * r2 * k * k - 4.0 * q * q * k * k) / lam2
    if lam1.ndim == 0:
        return float(lam1), float(lam2)
    return lam1, lam2


def eckhaus_coefficient(q):
    """Coefficient d in ``lambda1 = -d k^2 + O(k^4)``: (1 - 3q^2)/(1 - q^2)."""
    _check_q(q)
    return (1.0 - 3.0 * q * q) / (1.0 - q * q)


def classify_stability(q, kmax=4.0, samples=4001):
    """Scan ``sup_k lambda1(k; q)`` and classify the equilibrium.

    Returns ``(Stability, sup_growth)``; ``sup_growth`` is taken over ``k != 0``.
    """
    _check_q(q)
    k = np.linspace(0.0, kmax, samples)[1:]
    lam1, _ = eigenvalues(k, q)
    sup = float(np.max(lam1))
    if abs(q * q - 1.0 / 3.0) <= 1e-12:
        return Stability.MARGINAL, sup
    if sup < -1e-12 and eckhaus_coefficient(q) > 0:
        return Stability.STABLE, sup
    return Stability.UNSTABLE, sup


def most_unstable_wavenumber(q, kmax=4.0, samples=400001):
    k = np.linspace(0.0, kmax, samples)
    lam1, _ = eigenvalues(k, q)
    j = int(np.argmax(lam1))
    return float(k[j]), float(lam1[j])


def _branch_vectors(k, q):
    """Unnormalized eigenvectors for both branches, shape ``k.shape + (2,)``.

    phi1 has second component 1 and phi2 first component 1.  Both are
    derived from the rows of ``M - lambda I`` that stay regular at k = 0.
    """
    k = np.asarray(k, dtype=float)
    r2 = 1.0 - q * q
    lam1, lam2 = eigenvalues(k, q)
    lam1, lam2 = np.asarray(lam1), np.asarray(lam2)
    # first row of (M - lam1) phi1 = 0 with phi1 = (a, 1)
    denom1 = k * k + 2.0 * r2 + lam1
    # second row of (M - lam2) phi2 = 0 with phi2 = (1, b)
    denom2 = k * k + lam2
    if np.any(denom1 == 0.0) or np.any(denom2 == 0.0):
        raise NormalizationFailure("eigenvector normalization component vanishes")
    a = -2j * q * k / denom1
    b = 2j * q * k / denom2
    phi1 = np.stack([a, np.ones_like(a)], axis=-1)
    phi2 = np.stack([np.ones_like(b), b], axis=-1)
    return phi1, phi2


@dataclass(frozen=True)
class EigenData:
    k: float
    lambda1: float
    lambda2: float
    phi1: np.ndarray
    phi2: np.ndarray
    phi1_star: np.ndarray
    phi2_star: np.ndarray


def eigendata(k, q=Q_ECKHAUS) -> EigenData:
    _check_q(q)
    lam1, lam2 = eigenvalues(k, q)
    phi1, phi2 = _branch_vectors(k, q)
    s1, s2 = adjoint_pair(k, q)
    return EigenData(float(k), float(lam1), float(lam2), phi1, phi2, s1, s2)


def eigenvector_c(k, q=Q_ECKHAUS):
    """Critical-branch eigenvector phi1(k) normalized to second component 1."""
    _check_q(q)
    return _branch_vectors(k, q)[0]


def eigenvector_s(k, q=Q_ECKHAUS):
    """Damped-branch eigenvector phi2(k) normalized to first component 1."""
    _check_q(q)
    return _branch_vectors(k, q)[1]


def adjoint_pair(k, q=Q_ECKHAUS):
    """Adjoint eigenvectors with <phi_i*, phi_j> = delta_ij.

    The inner product is ``<u, v> = conj(u) . v``.  M is Hermitian, so the
    adjoint vectors are ``phi_i / |phi_i|^2``.
    """
    phi1, phi2 = _branch_vectors(k, q)
    n1 = np.sum(np.abs(phi1) ** 2, axis=-1, keepdims=True)
    n2 = np.sum(np.abs(phi2) ** 2, axis=-1, keepdims=True)
    return phi1 / n1, phi2 / n2


def inner(u, v):
    return np.sum(np.conj(u) * v, axis=-1)


def transform_S(k, q=Q_ECKHAUS):
    """Diagonalizing matrix ``S = (phi2 phi1)`` and its inverse."""
    phi1, phi2 = _branch_vectors(k, q)
    s = np.stack([phi2, phi1], axis=-1)
    return s, np.linalg.inv(s)


@dataclass(frozen=True)
class ProjectionSpec:
    """Sharp cutoff: chi(k) = 1 for |k| <= k0/2, else 0."""

    k0: float = DEFAULT_K0

    def __post_init__(self):
        if not self.k0 > 0:
            raise ValueError("k0 must be positive")

    def chi(self, k):
        return (np.abs(np.asarray(k)) <= 0.5 * self.k0).astype(float)


class ModeProjector:
    """Per-mode projections onto the critical and damped branches on a grid.

    Works on coefficient arrays of shape ``(2, n)`` (components v_r, v_i);
    ``amplitude_c`` returns the scalar V_c(k) with v_c = V_c phi1.
    """

    def __init__(self, grid, q=Q_ECKHAUS, spec: ProjectionSpec | None = None):
        _check_q(q)
        self.grid = grid
        self.q = q
        self.spec = spec or ProjectionSpec()
        k = grid.k
        self.chi = self.spec.chi(k)
        self.lam1, self.lam2 = eigenvalues(k, q)
        phi1, phi2 = _branch_vectors(k, q)
        s1, s2 = adjoint_pair(k, q)
        self.phi1, self.phi2 = phi1.T.copy(), phi2.T.copy()  # shape (2, n)
        self.phi1_star, self.phi2_star = s1.T.copy(), s2.T.copy()

    def amplitude_c(self, v):
        return self.chi * np.sum(np.conj(self.phi1_star) * v, axis=0)

    def amplitude_s(self, v):
        """Scalar V_s(k) with v_s = V_s phi2 on |k| <= k0/2 (zero outside)."""
        return self.chi * np.sum(np.conj(self.phi2_star) * v, axis=0)

    def project_c(self, v):
        return self.amplitude_c(v) * self.phi1

    def project_s(self, v):
        return v - self.project_c(v)

    def lift_c(self, amp):
        """Vector field v_c = V_c phi1 from a scalar amplitude."""
        return self.chi * amp * self.phi1

    def solve_ls(self, f):
        """Apply L_s^{-1} on the range of P_s.

        Inside the cutoff only the damped branch is present; outside it
        P_s = I and both branches are inverted (lambda1(k) < 0 for k != 0).
        """
        c2 = np.sum(np.conj(self.phi2_star) * f, axis=0)
        out = (c2 / self.lam2) * self.phi2
        c1 = np.sum(np.conj(self.phi1_star) * f, axis=0)
        outside = self.chi == 0.0
        inv1 = np.zeros_like(self.lam1)
        inv1[outside] = 1.0 / self.lam1[outside]
        return out + (inv1 * c1) * self.phi1

    def apply_symbol(self, v):
        m = linear_matrix(self.grid.k, self.q)
        return np.einsum("kij,jk->ik", m, v)


def project_c(pair, spec: ProjectionSpec | None = None, q=Q_ECKHAUS):
    """P_c on a pair of spectral fields ``(v_r_hat, v_i_hat)``."""
    grid = pair[0].grid
    proj = ModeProjector(grid, q, spec)
    out = proj.project_c(np.stack([pair[0].coeffs, pair[1].coeffs]))
    return SpectralField(grid, out[0]), SpectralField(grid, out[1])


def project_s(pair, spec: ProjectionSpec | None = None, q=Q_ECKHAUS):
    grid = pair[0].grid
    proj = ModeProjector(grid, q, spec)
    out = proj.project_s(np.stack([pair[0].coeffs, pair[1].coeffs]))
    return SpectralField(grid, out[0]), SpectralField(grid, out[1])


def dispersion_table(q, kmax, samples):
    k = np.linspace(-kmax, kmax, samples) if samples > 1 else np.array([0.0])
    lam1, lam2 = eigenvalues(k, q)
    return k, np.atleast_1d(lam1), np.atleast_1d(lam2)


def write_dispersion_csv(path, q, kmax, samples):
    k, lam1, lam2 = dispersion_table(q, kmax, samples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "lambda1", "lambda2"])
        for row in zip(k, lam1, lam2):
            w.writerow([f"{v:.17g}" for v in row])
    return path
