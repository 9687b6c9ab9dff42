"""Parameter records and vector fields for the predator-prey model family.

Systems covered: the (damped) harmonic oscillator, classical Lotka-Volterra,
the damped predator-prey system (prey influx ``delta`` plus natural decay
``alpha``), its within-host virus interpretation, and the 3D plant-growth
extension in both shoot-length and reciprocal-length coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

from .errors import DomainError

State = Tuple[float, ...]


@dataclass(frozen=True)
class VectorField:
    """An autonomous vector field on 2D or 3D state space.

    ``eval`` maps a state tuple to the tuple of time derivatives. ``guarded``
    marks biological fields whose exact flow preserves the first
    quadrant/octant; the integrator then rejects states that dip below its
    negativity guard.
    """

    dimension: int
    eval: Callable[[State], State]
    guarded: bool = False
    label: str = ""

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")


@dataclass(frozen=True)
class OscillatorParams:
    """Damped harmonic oscillator: xdot = -a*x - b*y, ydot = x."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("stiffness b must be > 0")
        if self.a < 0:
            raise ValueError("damping a must be >= 0")


@dataclass(frozen=True)
class LotkaVolterraParams:
    """Classical Lotka-Volterra rates; all strictly positive."""

    a: float
    beta: float
    gamma: float
    sigma: float

    def __post_init__(self):
        for name in ("a", "beta", "gamma", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class DampedPPParams:
    """Damped predator-prey rates.

    ``delta`` is the constant prey influx and ``alpha`` the prey natural
    decay; ``delta = 0`` is admitted so the degenerate SIR-like case is
    expressible, but analysis operations that need ``delta > 0`` reject it.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    sigma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


@dataclass(frozen=True)
class VirusParams:
    """Within-host virus dynamics rates.

    ``q`` is the rate of virus-induced killing of susceptible cells on top
    of the infection conversion ``gamma``; the susceptible loss rate per
    encounter is ``gamma + q``.
    """

    delta: float
    alpha: float
    gamma: float
    q: float
    sigma: float

    def __post_init__(self):
        for name in ("alpha", "gamma", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.delta < 0 or self.q < 0:
            raise ValueError("delta and q must be >= 0")


@dataclass(frozen=True)
class ThresholdSpec:
    """Growth activation threshold: zero response at or below ``y_f``."""

    y_f: float
    k: float = 1.0
    shape: str = "ramp"

    def __post_init__(self):
        if self.y_f <= 0 or self.k <= 0:
            raise ValueError("y_f and k must be > 0")
        if self.shape not in ("ramp", "smooth"):
            raise ValueError(f"shape must be 'ramp' or 'smooth', got {self.shape!r}")


@dataclass(frozen=True)
class PlantParams:
    """Plant shoot growth rates: water flow ``v``, hormone production
    ``gamma``, hormone consumption ``sigma``, plus the growth threshold."""

    v: float
    gamma: float
    sigma: float
    threshold: ThresholdSpec = field(default_factory=lambda: ThresholdSpec(y_f=1.0))

    def __post_init__(self):
        for name in ("v", "gamma", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


def threshold_f(spec: ThresholdSpec, y: float) -> float:
    """Growth rate as a function of hormone concentration.

    Continuous, zero at and below ``y_f``, monotone non-decreasing. The ramp
    is linear above the threshold; the smooth shape saturates at ``k``.
    """
    e = y - spec.y_f
    if e <= 0.0:
        return 0.0
    if spec.shape == "ramp":
        return spec.k * e
    return spec.k * e * e / (1.0 + e * e)


def oscillator_field(p: OscillatorParams) -> VectorField:
    a, b = p.a, p.b

    def rhs(s: State) -> State:
        x, y = s[0], s[1]
        return (-a * x - b * y, x)

    return VectorField(dimension=2, eval=rhs, guarded=False, label="oscillator")


def lv_field(p: LotkaVolterraParams) -> VectorField:
    a, be, ga, si = p.a, p.beta, p.gamma, p.sigma

    def rhs(s: State) -> State:
        x, y = s[0], s[1]
        xy = x * y
        return (a * x - be * xy, ga * xy - si * y)

    return VectorField(dimension=2, eval=rhs, guarded=True, label="lotka_volterra")


def damped_pp_field(p: DampedPPParams) -> VectorField:
    al, be, ga, de, si = p.alpha, p.beta, p.gamma, p.delta, p.sigma

    def rhs(s: State) -> State:
        x, y = s[0], s[1]
        xy = x * y
        return (de - al * x - be * xy, ga * xy - si * y)

    return VectorField(dimension=2, eval=rhs, guarded=True, label="damped_pp")


def virus_to_damped(p: VirusParams) -> DampedPPParams:
    """Virus rates as damped predator-prey rates: loss rate beta = gamma + q."""
    return DampedPPParams(
        alpha=p.alpha, beta=p.gamma + p.q, gamma=p.gamma, delta=p.delta, sigma=p.sigma
    )


def plant_field_L(p: PlantParams) -> VectorField:
    """Plant system in shoot-length coordinates (x, y, L).

    The 1/L factor dilutes the nutrient over longer water columns; the shoot
    length L only ever grows, at rate f(y).
    """
    v, ga, si, th = p.v, p.gamma, p.sigma, p.threshold

    def rhs(s: State) -> State:
        x, y, L = s[0], s[1], s[2]
        if L <= 0.0:
            raise DomainError(f"shoot length must be positive, got L={L!r}")
        return ((v - ga * x * y) / L, ga * x * y - si * y, threshold_f(th, y))

    return VectorField(dimension=3, eval=rhs, guarded=True, label="plant_L")


def plant_field_z(p: PlantParams) -> VectorField:
    """Plant system in reciprocal-length coordinates (x, y, z), z = 1/L.

    Unbounded growth of L becomes convergence of z to 0, keeping the state
    bounded; z is non-increasing along every trajectory.
    """
    v, ga, si, th = p.v, p.gamma, p.sigma, p.threshold

    def rhs(s: State) -> State:
        x, y, z = s[0], s[1], s[2]
        if z <= 0.0:
            raise DomainError(f"reciprocal length must be positive, got z={z!r}")
        return (v * z - ga * z * x * y, ga * x * y - si * y, -threshold_f(th, y) * z * z)

    return VectorField(dimension=3, eval=rhs, guarded=True, label="plant_z")
