"""Grids, complex fields, quadrature and the dimensional coupling map.

All quantities are in transverse-oscillator units: lengths in
``sqrt(hbar / (m * omega_perp))``, times in ``1 / omega_perp``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import constants


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic 1D grid with FFT-ordered wavenumbers.

    Parameters
    ----------
    n_points : int
        Number of samples, a power of two.
    x_min : float
        Position of the first sample.
    dx : float
        Sample spacing.
    """

    n_points: int
    x_min: float
    dx: float

    def __post_init__(self):
        if isinstance(self.n_points, bool) or int(self.n_points) != self.n_points:
            raise ValueError(f"n_points must be an integer, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "dx", float(self.dx))
        if not _is_power_of_two(self.n_points):
            raise ValueError(f"n_points must be a power of two, got {self.n_points}")
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise ValueError(f"dx must be positive and finite, got {self.dx}")
        if not np.isfinite(self.x_min):
            raise ValueError("x_min must be finite")

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(self.x_min + self.dx * np.arange(self.n_points))

    @cached_property
    def k_values(self) -> np.ndarray:
        return _readonly(2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx))

    @property
    def x_max(self) -> float:
        """Position of the last sample (the periodic image of x_min lies one dx beyond)."""
        return self.x_min + (self.n_points - 1) * self.dx

    @property
    def length(self) -> float:
        return self.n_points * self.dx

    @property
    def k_max(self) -> float:
        return np.pi / self.dx

    def to_dict(self) -> dict:
        return {"n_points": self.n_points, "x_min": self.x_min, "dx": self.dx}


def make_grid(n_points: int, x_min: float, dx: float) -> SpatialGrid:
    """Build a :class:`SpatialGrid`; raises ``ValueError`` on bad sizes."""
    return SpatialGrid(n_points, x_min, dx)


def centered_grid(n_points: int, dx: float, center: float = 0.0) -> SpatialGrid:
    """Grid of ``n_points`` samples whose middle sample sits at ``center``."""
    return SpatialGrid(n_points, center - (n_points // 2) * dx, dx)


@dataclass(frozen=True)
class ComplexField:
    """Complex wavefunction samples on a :class:`SpatialGrid`."""

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"field has shape {values.shape}, grid expects ({self.grid.n_points},)"
            )
        object.__setattr__(self, "values", _readonly(values))

    @property
    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> "ComplexField":
        return ComplexField(self.grid, values)


def integrate(samples, dx: float) -> float:
    """Composite trapezoid estimate of the integral of uniformly spaced samples."""
    samples = np.asarray(samples)
    if samples.ndim != 1 or samples.size < 2:
        raise ValueError("integrate needs a 1D sequence of at least 2 samples")
    return float(np.trapezoid(samples, dx=dx))


def spectral_derivative(values, grid: SpatialGrid, order: int = 1) -> np.ndarray:
    """Spectral derivative of periodic samples; real input gives real output."""
    values = np.asarray(values)
    deriv = np.fft.ifft((1j * grid.k_values) ** order * np.fft.fft(values))
    if np.isrealobj(values):
        return deriv.real
    return deriv


def second_derivative(values, grid: SpatialGrid) -> np.ndarray:
    values = np.asarray(values)
    deriv = np.fft.ifft(-(grid.k_values**2) * np.fft.fft(values))
    if np.isrealobj(values):
        return deriv.real
    return deriv


@dataclass(frozen=True)
class DimensionalInputs:
    """SI inputs of the two-component mixture.

    Attributes
    ----------
    mass : float
        Atomic mass in kg.
    omega_perp : float
        Transverse trap frequency in rad/s.
    g_intra : float
        Intra-component coupling ``g`` in J*m.
    delta_g : float
        Residual coupling ``g_updown + sqrt(g_upup * g_downdown)`` in J*m;
        must be positive for a droplet to exist.
    """

    mass: float
    omega_perp: float
    g_intra: float
    delta_g: float

    def __post_init__(self):
        for name in ("mass", "omega_perp", "g_intra", "delta_g"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")


def dimensionless_couplings(inp: DimensionalInputs, hbar: float = constants.hbar):
    """Map SI couplings to the dimensionless ``(g1, g2)`` of the reduced equation.

    ``g1`` multiplies the attractive ``|psi| psi`` term and ``g2`` the
    repulsive ``|psi|^2 psi`` term.
    """
    m, w = inp.mass, inp.omega_perp
    g2 = 0.5 * inp.delta_g * np.sqrt(m / (w**3 * hbar**3))
    g1 = (m * inp.g_intra**2 / (w * hbar**3)) ** 0.75 / np.pi
    return float(g1), float(g2)
