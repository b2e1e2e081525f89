"""Closed-form droplet solutions and the atom-number / chemical-potential relation.

The stationary profile solves

    -c U'' - G1 |U| U + G2 |U|^2 U = E U,

with ``c = 1/2`` (``KineticConvention.HALF``) or ``c = 1``
(``KineticConvention.FULL``).  Its solution is

    U(eta) = A / (1 + B cosh(k eta)),
    k = sqrt(-E / c),  A = 3 c k^2 / G1 = -3 mu,  B = sqrt(1 - r),

where ``mu = E / G1``, ``mu0 = -2/9`` and ``r = (mu / mu0) (G2 / G1)`` is the
flat-top ratio.  Dividing the stationary equation by ``2c`` maps it onto the
propagated equation ``i psi_t = -psi_xx / 2 + g2 |psi|^2 psi - g1 |psi| psi``
with ``g = G / (2c)`` and eigenfrequency ``E / (2c)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import potentials as pot
from .core import ComplexField, SpatialGrid, second_derivative
from .exceptions import DomainExitError

MU0 = -2.0 / 9.0


class KineticConvention(str, enum.Enum):
    HALF = "half"
    FULL = "full"

    @property
    def coefficient(self) -> float:
        return 0.5 if self is KineticConvention.HALF else 1.0


@dataclass(frozen=True)
class DropletParams:
    """Chemical potential and couplings of a stationary droplet.

    Build instances with :meth:`from_ratio` or :meth:`from_norm` rather than
    passing ``mu`` directly.
    """

    mu: float
    G1: float = 1.0
    G2: float = 1.0
    kinetic_convention: KineticConvention = KineticConvention.HALF

    def __post_init__(self):
        object.__setattr__(self, "kinetic_convention",
                           KineticConvention(self.kinetic_convention))
        for name in ("mu", "G1", "G2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.G1 > 0 and self.G2 > 0):
            raise ValueError(f"couplings must be positive, got G1={self.G1}, G2={self.G2}")
        if not self.E < 0:
            raise ValueError(f"eigenvalue E = mu * G1 must be negative, got {self.E}")
        r = self.flat_top_ratio
        if not (0.0 < r <= 1.0):
            raise ValueError(
                f"flat-top ratio (mu/mu0)(G2/G1) = {r} outside (0, 1]; "
                "the profile discriminant would be negative"
            )

    @classmethod
    def from_ratio(cls, mu_ratio, G1=1.0, G2=1.0, convention="half") -> "DropletParams":
        """Parameters from ``mu / mu0``."""
        return cls(MU0 * float(mu_ratio), G1, G2, convention)

    @classmethod
    def from_flat_top_ratio(cls, r, G1=1.0, G2=1.0, convention="half") -> "DropletParams":
        return cls.from_ratio(float(r) * G1 / G2, G1, G2, convention)

    @classmethod
    def from_norm(cls, N, G1=1.0, G2=1.0, convention="half") -> "DropletParams":
        """Parameters of the droplet holding ``N`` atoms."""
        convention = KineticConvention(convention)
        scale = _norm_scale(G1, G2, convention)
        r = mu_of_norm(float(N) / scale)
        return cls.from_flat_top_ratio(r, G1, G2, convention)

    @property
    def mu0(self) -> float:
        return MU0

    @property
    def E(self) -> float:
        return self.mu * self.G1

    @property
    def mu_ratio(self) -> float:
        return self.mu / MU0

    @property
    def flat_top_ratio(self) -> float:
        return self.mu_ratio * self.G2 / self.G1

    @property
    def discriminant(self) -> float:
        return 1.0 - self.flat_top_ratio

    @property
    def decay_rate(self) -> float:
        return float(np.sqrt(-self.E / self.kinetic_convention.coefficient))

    @property
    def amplitude(self) -> float:
        c = self.kinetic_convention.coefficient
        return 3.0 * c * self.decay_rate**2 / self.G1

    @property
    def shape_factor(self) -> float:
        return float(np.sqrt(max(self.discriminant, 0.0)))

    @property
    def couplings(self) -> tuple[float, float]:
        """``(g1, g2)`` of the propagated equation."""
        c2 = 2.0 * self.kinetic_convention.coefficient
        return self.G1 / c2, self.G2 / c2

    @property
    def frequency(self) -> float:
        """Rate of the global phase rotation, ``E / (2c)``."""
        return self.E / (2.0 * self.kinetic_convention.coefficient)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu, "mu0": MU0, "mu_ratio": self.mu_ratio,
            "G1": self.G1, "G2": self.G2, "E": self.E,
            "flat_top_ratio": self.flat_top_ratio,
            "kinetic_convention": self.kinetic_convention.value,
        }


def _norm_scale(G1, G2, convention) -> float:
    c = KineticConvention(convention).coefficient
    return float(np.sqrt(2.0 * c) * G1 / G2**1.5)


def droplet_norm(params: DropletParams) -> float:
    """Atom number of the stationary profile, ``N = int U^2 dx``.

    Scaling the stationary equation to unit couplings gives
    ``N = sqrt(2c) * G1 / G2**1.5 * norm_of_mu(r)``.
    """
    r = params.flat_top_ratio
    if r >= 1.0:
        return float("inf")
    scale = _norm_scale(params.G1, params.G2, params.kinetic_convention)
    return scale * norm_of_mu(r)


@dataclass(frozen=True)
class DropletState:
    params: DropletParams
    potential: pot.PotentialSpec = field(default_factory=pot.PotentialSpec.free_space)
    norm: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "norm", droplet_norm(self.params))

    @property
    def couplings(self) -> tuple[float, float]:
        return self.params.couplings


def _profile(params: DropletParams, eta) -> np.ndarray:
    # A / (1 + B cosh(k eta)) rewritten with exp(-k|eta|) so it never overflows
    eta = np.asarray(eta, dtype=float)
    A, B, k = params.amplitude, params.shape_factor, params.decay_rate
    if B == 0.0:
        return np.full_like(eta, A)
    e = np.exp(-k * np.abs(eta))
    return A * 2.0 * e / (2.0 * e + B * (1.0 + e * e))


def stationary_profile(params: DropletParams, grid: SpatialGrid, center=0.0) -> np.ndarray:
    """Real droplet profile ``U(x - center)`` sampled on the grid."""
    return _profile(params, grid.x - center)


def stationary_residual(U, params: DropletParams, grid: SpatialGrid, tail_tol=1e-12) -> float:
    """L-infinity residual of the stationary equation, with a spectral ``U''``.

    Raises ``ValueError`` if ``U`` has not decayed below ``tail_tol`` at the
    grid ends, since periodic wrap-around would then dominate the residual.
    """
    U = np.asarray(U, dtype=float)
    if U.shape != (grid.n_points,):
        raise ValueError("profile does not match the grid")
    if max(abs(U[0]), abs(U[-1])) > tail_tol:
        raise ValueError(
            f"profile tails {max(abs(U[0]), abs(U[-1])):.3e} exceed {tail_tol:g}; "
            "widen the grid"
        )
    c = params.kinetic_convention.coefficient
    absU = np.abs(U)
    res = (-c * second_derivative(U, grid) - params.G1 * absU * U
           + params.G2 * absU**2 * U - params.E * U)
    return float(np.max(np.abs(res)))


def _phase(state: DropletState, x, t: float):
    spec = state.potential
    gd = float(pot.gamma_dot(spec, t))
    return (-gd * x - 0.5 * float(pot.gamma_dot_squared_integral(spec, t))
            - state.params.frequency * t)


def wavefunction_values(state: DropletState, x, t: float) -> np.ndarray:
    """Closed-form traveling droplet evaluated at arbitrary positions ``x``.

    The envelope is the stationary profile at ``eta = x + gamma(t)`` and the
    phase is ``-gamma'(t) x - int_0^t [gamma'(s)^2 / 2 + E / (2c)] ds``.
    """
    x = np.asarray(x, dtype=float)
    eta = x + float(pot.gamma(state.potential, t))
    return _profile(state.params, eta) * np.exp(1j * _phase(state, x, t))


def density_values(state: DropletState, x, t: float) -> np.ndarray:
    """``|psi(x, t)|^2`` of the closed-form solution at arbitrary ``x``."""
    eta = np.asarray(x, dtype=float) + float(pot.gamma(state.potential, t))
    return _profile(state.params, eta) ** 2


def full_wavefunction(state: DropletState, grid: SpatialGrid, t: float = 0.0) -> ComplexField:
    """Closed-form solution sampled on ``grid`` at time ``t``.

    Raises :class:`DomainExitError` when the droplet center is within ten decay
    lengths of either end of the grid.
    """
    center = -float(pot.gamma(state.potential, t))
    margin = 10.0 / state.params.decay_rate
    if center - margin < grid.x_min or center + margin > grid.x_max:
        raise DomainExitError(
            f"droplet center {center:.6g} at t={t:g} is within {margin:.3g} of the "
            f"grid edge [{grid.x_min:.6g}, {grid.x_max:.6g}]",
            time=t, position=center,
        )
    return ComplexField(grid, wavefunction_values(state, grid.x, t))


def norm_of_mu(mu_ratio) -> float:
    """Atom number of the unit-coupling droplet as a function of ``mu / mu0``.

    ``N = 4/3 [ln((1 + s) / sqrt(1 - s^2)) - s]`` with ``s = sqrt(mu / mu0)``;
    the logarithm equals ``artanh(s)``.
    """
    m = float(mu_ratio)
    if not (0.0 < m < 1.0):
        raise ValueError(f"mu_ratio must lie in (0, 1), got {m}")
    return _norm_of_s(np.sqrt(m))


def _norm_of_s(s: float) -> float:
    if s < 1e-3:
        # artanh(s) - s = s^3/3 + s^5/5 + ...; avoids cancellation
        s2 = s * s
        return 4.0 / 3.0 * s * s2 * (1.0 / 3 + s2 / 5 + s2 * s2 / 7 + s2**3 / 9)
    return 4.0 / 3.0 * (np.arctanh(s) - s)


def mu_of_norm(N) -> float:
    """Invert :func:`norm_of_mu`.

    The root is found in ``u = artanh(sqrt(mu / mu0))`` where
    ``N = 4/3 (u - tanh u)`` has a bounded slope, so the round trip stays
    accurate as ``mu / mu0`` approaches 1.
    """
    N = float(N)
    if not (N > 0 and np.isfinite(N)):
        raise ValueError(f"N must be positive and finite, got {N}")

    def f(u):
        return 4.0 / 3.0 * (u - np.tanh(u)) - N if u > 1e-3 else _norm_of_s(np.tanh(u)) - N

    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    u = brentq(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    m = float(np.tanh(u) ** 2)
    if m >= 1.0:
        raise ValueError(f"N={N} needs mu/mu0 closer to 1 than double precision resolves")
    return m


def fitting_grid(params: DropletParams, dx: float | None = None, tol: float = 1e-12,
                 travel: tuple[float, float] = (0.0, 0.0)) -> SpatialGrid:
    """Smallest power-of-two grid holding the droplet with tails below ``tol``.

    ``travel`` widens the grid to ``(lowest, highest)`` center positions the
    droplet will visit.  ``dx`` defaults to a tenth of the decay length.
    """
    k, A, B = params.decay_rate, params.amplitude, params.shape_factor
    if dx is None:
        dx = min(0.1 / k, 0.1)
    # |U| <= A * 2/B * exp(-k |eta|) in the tails
    pref = 2.0 * A / B if B > 0 else A
    half = max(np.log(max(pref, tol) / tol) / k, 10.0 / k) + 2 * dx
    lo, hi = min(travel) - half, max(travel) + half
    n = 1 << int(np.ceil(np.log2((hi - lo) / dx + 1)))
    mid = 0.5 * (lo + hi)
    return SpatialGrid(n, mid - 0.5 * (n - 1) * dx, dx)
