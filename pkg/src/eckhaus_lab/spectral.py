"""Periodic grids and Fourier transforms with the 1/(2*pi) forward convention.

The continuum transform pair is

    u_hat(k) = 1/(2 pi) * int u(x) exp(-i k x) dx,
    u(x)     = int u_hat(k) exp(i k x) dk,

and on a periodic grid of ``n`` points over ``[-L/2, L/2)`` both integrals are
replaced by Riemann sums.  Coefficients are stored in numpy FFT order, i.e.
``k_j = 2 pi j / L`` for ``j = 0, 1, ..., n/2 - 1, -n/2, ..., -1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class SymmetryViolation(ValueError):
    """Spectral coefficients of a supposedly real field are not Hermitian."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of ``n`` points on ``[-length/2, length/2)``."""

    n: int
    length: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 16, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"domain length must be positive, got {self.length}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.length

    @cached_property
    def x(self) -> np.ndarray:
        return _frozen(-0.5 * self.length + self.dx * np.arange(self.n), float)

    @cached_property
    def k(self) -> np.ndarray:
        return _frozen(self.dk * np.fft.fftfreq(self.n, d=1.0 / self.n), float)

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.k

    @property
    def nyquist_index(self) -> int:
        return self.n // 2

    @cached_property
    def _shift(self) -> np.ndarray:
        # phase factor for the grid origin at -L/2
        return _frozen(np.exp(-1j * self.k * self.x[0]), complex)

    def index_of(self, k: float) -> int:
        """Index of the grid wavenumber equal to ``k`` (raises if off-grid)."""
        j = k / self.dk
        if abs(j - round(j)) > 1e-9 or abs(round(j)) >= self.n // 2:
            raise ValueError(f"{k} is not a grid wavenumber")
        return int(round(j)) % self.n

    def dealias_mask(self, rule: str = "1/2") -> np.ndarray:
        """Boolean mask of modes kept by a truncation rule.

        ``"2/3"`` is exact for quadratic products, ``"1/2"`` for cubic ones;
        ``"none"`` keeps everything except the Nyquist mode.
        """
        jmax = self.n // 2
        if rule == "none":
            keep = jmax - 1
        elif rule == "2/3":
            keep = self.n // 3
        elif rule == "1/2":
            keep = self.n // 4
        else:
            raise ValueError(f"unknown dealiasing rule {rule!r}")
        j = np.abs(np.fft.fftfreq(self.n, d=1.0 / self.n))
        return j < keep if rule != "none" else j <= keep


@dataclass(frozen=True)
class RealField:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _frozen(self.values, float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SpectralField:
    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs, complex)
        if c.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __mul__(self, c):
        return SpectralField(self.grid, c * self.coeffs)

    __rmul__ = __mul__

    def __add__(self, other: SpectralField):
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField):
        return SpectralField(self.grid, self.coeffs - other.coeffs)


# array-level transforms; complex input is allowed (no symmetry checks)

def fft_phys(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward transform of samples (last axis) to coefficients."""
    return (grid.dx / (2.0 * np.pi)) * grid._shift * np.fft.fft(u, axis=-1)


def ifft_spec(c: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse of :func:`fft_phys`; returns complex samples."""
    return (grid.n * grid.dk) * np.fft.ifft(c / grid._shift, axis=-1)


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Relative deviation of ``coeffs`` from ``c(-k) = conj(c(k))``."""
    c = np.asarray(coeffs)
    n = c.shape[-1]
    mirrored = np.conj(c[..., (-np.arange(n)) % n])
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return 0.0
    # the Nyquist coefficient pairs with itself, so it must be real
    return float(np.max(np.abs(c - mirrored)) / scale)


def to_spectral(u: RealField) -> SpectralField:
    return SpectralField(u.grid, fft_phys(u.values, u.grid))


def from_spectral(f: SpectralField, tol: float = 1e-10) -> RealField:
    defect = hermitian_defect(f.coeffs)
    if defect > tol:
        raise SymmetryViolation(f"coefficients are not Hermitian (relative defect {defect:.3e})")
    return RealField(f.grid, ifft_spec(f.coeffs, f.grid).real)


def spectral_l1(f: SpectralField | np.ndarray, grid: Grid | None = None) -> float:
    """Riemann sum ``dk * sum |u_hat(k_j)|``.

    Accepts a :class:`SpectralField` or a raw coefficient array plus its grid;
    for stacked arrays (e.g. a pair of fields, shape ``(2, n)``) the pointwise
    modulus is the Euclidean norm over the leading axis.
    """
    if isinstance(f, SpectralField):
        c, grid = f.coeffs, f.grid
    else:
        c = np.asarray(f)
    return float(grid.dk * np.sum(_pointwise_abs(c)))


def spectral_linf(f: SpectralField | np.ndarray) -> float:
    c = f.coeffs if isinstance(f, SpectralField) else np.asarray(f)
    a = _pointwise_abs(c)
    return float(np.max(a)) if a.size else 0.0


def _pointwise_abs(c: np.ndarray) -> np.ndarray:
    if c.ndim == 1:
        return np.abs(c)
    return np.sqrt(np.sum(np.abs(c) ** 2, axis=tuple(range(c.ndim - 1))))


def derivative(f: SpectralField, order: int = 1) -> SpectralField:
    """Spectral derivative; the Nyquist mode is dropped for odd orders."""
    c = (1j * f.grid.k) ** order * f.coeffs
    if order % 2:
        c = c.copy()
        c[f.grid.nyquist_index] = 0.0
    return SpectralField(f.grid, c)


def evaluate_at(coeffs: np.ndarray, grid: Grid, points: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of a field at arbitrary points.

    Direct sum ``dk * sum_j c_j exp(i k_j x)``; the Nyquist term is split
    symmetrically so real fields interpolate to real values.
    """
    c = np.array(coeffs, dtype=complex)
    k = grid.k.copy()
    ny = grid.nyquist_index
    points = np.asarray(points, dtype=float)
    phase = np.exp(1j * np.outer(points, k))
    out = phase @ c
    # replace the one-sided Nyquist term by its cosine average
    out -= phase[:, ny] * c[ny]
    out += c[ny] * np.cos(k[ny] * points)
    return grid.dk * out
