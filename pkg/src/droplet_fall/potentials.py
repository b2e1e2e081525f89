"""Catalog of the traveling-frame shift gamma(t) and the linear potential it induces.

The potential coefficient is ``a(t) = gamma''(t)`` and the droplet's center of
mass sits at ``-gamma(t)``.  The user-facing strength ``a >= 0`` pulls the
droplet toward ``+x``; the sign is applied internally.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import SpatialGrid


class Variant(str, enum.Enum):
    FREE_SPACE = "free"
    CONSTANT = "constant"
    MODULATED = "modulated"


@dataclass(frozen=True)
class PotentialSpec:
    """Description of the linear trap ``V(x, t) = gamma''(t) x``.

    Parameters
    ----------
    variant : Variant or str
        ``"free"``, ``"constant"`` or ``"modulated"``.
    a : float
        Acceleration strength, ``>= 0``.
    alpha : float
        Modulation amplitude (modulated only).
    omega : float
        Drive frequency, ``> 0`` for the modulated variant.
    zero_initial_offset : bool, optional
        Shift gamma by a constant so that ``gamma(0) = 0``.  Defaults to True
        for the modulated variant; it has no effect on the other variants.
    """

    variant: Variant = Variant.FREE_SPACE
    a: float = 0.0
    alpha: float = 0.0
    omega: float = 1.0
    zero_initial_offset: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("a", "alpha", "omega"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.a < 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if self.variant is Variant.MODULATED and not self.omega > 0:
            raise ValueError(f"modulated trap needs omega > 0, got {self.omega}")
        if self.zero_initial_offset is None:
            object.__setattr__(
                self, "zero_initial_offset", self.variant is Variant.MODULATED
            )

    @classmethod
    def free_space(cls) -> "PotentialSpec":
        return cls(Variant.FREE_SPACE)

    @classmethod
    def constant(cls, a: float) -> "PotentialSpec":
        return cls(Variant.CONSTANT, a=a)

    @classmethod
    def modulated(cls, a, alpha, omega, zero_initial_offset=True) -> "PotentialSpec":
        return cls(Variant.MODULATED, a=a, alpha=alpha, omega=omega,
                   zero_initial_offset=zero_initial_offset)

    @property
    def _amp(self) -> float:
        # a * alpha / omega^2, the cosine amplitude of gamma
        return self.a * self.alpha / self.omega**2

    def to_dict(self) -> dict:
        d = {"variant": self.variant.value}
        if self.variant is not Variant.FREE_SPACE:
            d["a"] = self.a
        if self.variant is Variant.MODULATED:
            d.update(alpha=self.alpha, omega=self.omega,
                     zero_initial_offset=bool(self.zero_initial_offset))
        return d


def gamma(spec: PotentialSpec, t):
    """Traveling-frame shift; the droplet center sits at ``-gamma(t)``."""
    t = np.asarray(t, dtype=float)
    if spec.variant is Variant.FREE_SPACE:
        return np.zeros_like(t)[()]
    out = -0.5 * spec.a * t**2
    if spec.variant is Variant.MODULATED:
        out = out + spec._amp * np.cos(spec.omega * t)
        if spec.zero_initial_offset:
            out = out - spec._amp
    return out[()]


def gamma_dot(spec: PotentialSpec, t):
    t = np.asarray(t, dtype=float)
    if spec.variant is Variant.FREE_SPACE:
        return np.zeros_like(t)[()]
    out = -spec.a * t
    if spec.variant is Variant.MODULATED:
        out = out - spec.a * spec.alpha / spec.omega * np.sin(spec.omega * t)
    return out[()]


def gamma_ddot(spec: PotentialSpec, t):
    """Potential coefficient ``a(t)``: ``-a`` or ``-a (1 + alpha cos(omega t))``."""
    t = np.asarray(t, dtype=float)
    if spec.variant is Variant.FREE_SPACE:
        return np.zeros_like(t)[()]
    if spec.variant is Variant.CONSTANT:
        return np.full_like(t, -spec.a)[()]
    return (-spec.a * (1.0 + spec.alpha * np.cos(spec.omega * t)))[()]


def gamma_dot_squared_integral(spec: PotentialSpec, t):
    """Closed form of the integral of ``gamma'(s)**2`` over ``[0, t]``."""
    t = np.asarray(t, dtype=float)
    if spec.variant is Variant.FREE_SPACE:
        return np.zeros_like(t)[()]
    a = spec.a
    out = a**2 * t**3 / 3.0
    if spec.variant is Variant.MODULATED:
        w, al = spec.omega, spec.alpha
        # cross term: 2 a^2 (alpha/w) * int s sin(w s) ds
        cross = np.sin(w * t) / w**2 - t * np.cos(w * t) / w
        # square term: a^2 (alpha/w)^2 * int sin^2(w s) ds
        square = t / 2.0 - np.sin(2.0 * w * t) / (4.0 * w)
        out = out + a**2 * (2.0 * al / w * cross + (al / w) ** 2 * square)
    return out[()]


def potential_values(spec: PotentialSpec, grid: SpatialGrid, t: float) -> np.ndarray:
    """``V(x_j, t) = gamma''(t) * x_j`` on the grid."""
    return float(gamma_ddot(spec, t)) * grid.x


@dataclass(frozen=True)
class TrajectoryPrediction:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray


def predict_trajectory(spec: PotentialSpec, times) -> TrajectoryPrediction:
    """Center-of-mass position ``-gamma(t)`` and velocity ``-gamma'(t)``.

    The trajectory depends only on the trap, never on the droplet's atom
    number or interaction strengths.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be a 1D sequence")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted in ascending order")
    return TrajectoryPrediction(
        times=times,
        positions=-np.atleast_1d(gamma(spec, times)),
        velocities=-np.atleast_1d(gamma_dot(spec, times)),
    )
