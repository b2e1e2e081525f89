"""Observables of a wavefunction: moments, probes, Wigner map and Shannon entropy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ComplexField, SpatialGrid, integrate
from .exceptions import WignerRangeError

# density floor below which rho * ln(rho) is taken as zero
_RHO_FLOOR = 1e-300


def norm(psi: ComplexField) -> float:
    """Atom number ``int |psi|^2 dx``."""
    return integrate(psi.density, psi.grid.dx)


def center_of_mass(psi: ComplexField) -> float:
    rho = psi.density
    return integrate(psi.grid.x * rho, psi.grid.dx) / integrate(rho, psi.grid.dx)


def peak_position(psi: ComplexField) -> float:
    """Grid position of the density maximum."""
    return float(psi.grid.x[int(np.argmax(psi.density))])


def density_at(psi: ComplexField, x_probe) -> float | np.ndarray:
    """Density linearly interpolated at ``x_probe``."""
    xp = np.asarray(x_probe, dtype=float)
    grid = psi.grid
    if np.any(xp < grid.x_min) or np.any(xp > grid.x_max):
        raise ValueError(f"probe {x_probe} outside grid [{grid.x_min}, {grid.x_max}]")
    return np.interp(xp, grid.x, psi.density)[()]


def momentum_amplitude(psi: ComplexField, p) -> np.ndarray:
    """``(2 pi)^{-1/2} int psi(x) exp(-i p x) dx`` at arbitrary momenta ``p``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    x = psi.grid.x
    kernel = np.exp(-1j * np.outer(p, x))
    return kernel @ psi.values * psi.grid.dx / np.sqrt(2 * np.pi)


def momentum_density(psi: ComplexField, p) -> np.ndarray:
    return np.abs(momentum_amplitude(psi, p)) ** 2


@dataclass(frozen=True)
class WignerMap:
    """Wigner quasi-probability ``values[i, j] = W(x_values[i], p_values[j])``."""

    grid: SpatialGrid
    x_values: np.ndarray
    p_values: np.ndarray
    values: np.ndarray
    imag_residue: float = 0.0

    def x_marginal(self) -> np.ndarray:
        """``int W dp`` per row (trapezoid over the momentum samples)."""
        return np.trapezoid(self.values, self.p_values, axis=1)

    def p_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, dx=self.grid.dx, axis=0)

    def total(self) -> float:
        return float(np.trapezoid(self.x_marginal(), dx=self.grid.dx))


def _upsample2(values: np.ndarray) -> np.ndarray:
    # band-limited interpolation onto the half-grid; even samples reproduce input
    n = values.size
    F = np.fft.fft(values)
    G = np.zeros(2 * n, dtype=complex)
    h = n // 2
    G[:h] = F[:h]
    G[-h + 1:] = F[-h + 1:]
    G[h] = 0.5 * F[h]
    G[-h] = 0.5 * F[h]
    return 2.0 * np.fft.ifft(G)


def wigner(psi: ComplexField, p_min: float | None = None, p_max: float | None = None,
           n_p: int = 256, x_window: tuple[float, float] | None = None,
           support_tol: float = 1e-12, marginal_tol: float | None = 1e-6,
           chunk: int = 256) -> WignerMap:
    """Wigner function ``W(x, p) = (1/pi) int psi*(x+y) psi(x-y) exp(2 i y p) dy``.

    The correlation is sampled at half-grid offsets ``y = m dx / 2`` using a
    spectrally upsampled field, truncated where ``|psi|`` falls below
    ``support_tol`` times its maximum, and summed against the kernel at the
    requested momenta.  Hermitian symmetry of the correlation in ``y`` makes
    the sum real; the imaginary part of the full complex sum at the densest
    row is reported as ``imag_residue``.

    Parameters
    ----------
    p_min, p_max : float, optional
        Momentum window, default ``[-k_max/2, k_max/2]``.
    n_p : int
        Number of momentum samples.
    x_window : (float, float), optional
        Only rows with ``x`` inside this interval are returned.
    marginal_tol : float or None
        Raise :class:`WignerRangeError` when ``int W dp`` misses ``|psi(x)|^2``
        by more than this (L-infinity); ``None`` disables the check.
    """
    grid = psi.grid
    if n_p < 2:
        raise ValueError("n_p must be at least 2")
    p_min = -grid.k_max / 2 if p_min is None else float(p_min)
    p_max = grid.k_max / 2 if p_max is None else float(p_max)
    if not p_max > p_min:
        raise ValueError("p_max must exceed p_min")
    p = np.linspace(p_min, p_max, n_p)
    x = grid.x
    n = grid.n_points
    h = 0.5 * grid.dx

    rows = np.arange(n)
    if x_window is not None:
        rows = rows[(x >= x_window[0]) & (x <= x_window[1])]
    values = np.zeros((rows.size, n_p))

    amp = np.abs(psi.values)
    inside = np.flatnonzero(amp >= support_tol * amp.max()) if amp.max() > 0 else []
    if len(inside) == 0:
        return WignerMap(grid, x[rows].copy(), p, values, 0.0)
    lo, hi = int(inside[0]), int(inside[-1])
    fine = _upsample2(psi.values)
    m_max = hi - lo
    m = np.arange(1, m_max + 1)
    arg = 2.0 * h * np.outer(m, p)
    cos_k, sin_k = np.cos(arg), np.sin(arg)

    active = np.flatnonzero((rows >= lo) & (rows <= hi))
    for start in range(0, active.size, chunk):
        sel = active[start:start + chunk]
        centre = 2 * rows[sel]
        plus = fine[(centre[:, None] + m[None, :]) % (2 * n)]
        minus = fine[(centre[:, None] - m[None, :]) % (2 * n)]
        corr = np.conj(plus) * minus
        # W = h/pi [c_0 + 2 sum_{m>0} Re(c_m e^{2 i m h p})]
        # real/imag views are strided; BLAS needs contiguous operands
        acc = np.ascontiguousarray(corr.real) @ cos_k - np.ascontiguousarray(corr.imag) @ sin_k
        c0 = np.abs(fine[centre]) ** 2
        values[sel] = (h / np.pi) * (c0[:, None] + 2.0 * acc)

    residue = 0.0
    if active.size:
        i_peak = lo + int(np.argmax(amp[lo:hi + 1]))
        mm = np.arange(-m_max, m_max + 1)
        c = np.conj(fine[(2 * i_peak + mm) % (2 * n)]) * fine[(2 * i_peak - mm) % (2 * n)]
        full = (h / np.pi) * (np.exp(2j * h * np.outer(p, mm)) @ c)
        residue = float(np.max(np.abs(full.imag)))

    wmap = WignerMap(grid, x[rows].copy(), p, values, residue)
    if marginal_tol is not None:
        err = float(np.max(np.abs(wmap.x_marginal() - psi.density[rows])))
        if err > marginal_tol:
            raise WignerRangeError(
                f"x-marginal misses |psi|^2 by {err:.3e} (> {marginal_tol:g}); widen "
                f"[{p_min:g}, {p_max:g}] or raise n_p={n_p}",
                margin=err,
            )
    return wmap


def shannon_entropy(psi: ComplexField, normalize: bool = True,
                    window: tuple[float | None, float | None] | None = None,
                    base: float = np.e) -> float:
    """Position-space Shannon entropy ``-int rho ln(rho) dx``.

    With ``normalize`` the density is divided by its mass so that it is a
    probability density; with a ``window`` only grid points inside
    ``[lo, hi]`` enter (``None`` ends are open) and the mass is the window's.
    """
    rho = psi.density
    x = psi.grid.x
    if window is not None:
        lo, hi = window
        keep = np.ones_like(x, dtype=bool)
        if lo is not None:
            keep &= x >= lo
        if hi is not None:
            keep &= x <= hi
        rho = rho[keep]
        if rho.size < 2:
            raise ValueError(f"entropy window {window} holds fewer than 2 grid points")
    mass = integrate(rho, psi.grid.dx)
    if not mass > 0:
        raise ValueError("entropy of a zero-norm field is undefined")
    if normalize:
        rho = rho / mass
    safe = np.where(rho > _RHO_FLOOR, rho, 1.0)
    s = -integrate(np.where(rho > _RHO_FLOOR, rho * np.log(safe), 0.0), psi.grid.dx)
    return s / np.log(base)


@dataclass(frozen=True)
class EntropySeries:
    times: np.ndarray
    entropy: np.ndarray


def entropy_series(record, **kwargs) -> EntropySeries:
    """Apply :func:`shannon_entropy` to every snapshot of an evolution record."""
    if not record.snapshots:
        raise ValueError("record holds no snapshots; evolve with keep_snapshots=True")
    s = np.array([shannon_entropy(psi, **kwargs) for psi in record.snapshots])
    return EntropySeries(np.asarray(record.times, dtype=float), s)
