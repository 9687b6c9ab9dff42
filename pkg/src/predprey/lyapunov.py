"""Analytic Lyapunov functions, oval geometry and outbreak peak bounds.

Three regimes share one machinery:

* Coexistence (gamma*delta > alpha*sigma): V = gamma*x - sigma*ln x
  + beta*y - a*ln y with a = gamma*delta/sigma - alpha; along trajectories
  Vdot = -(gamma^2*delta/(sigma*x)) (x - sigma/gamma)^2 <= 0.
* Extinction (gamma*delta <= alpha*sigma): V = gamma*x - b*ln x + beta*y
  with b = gamma*delta/alpha; Vdot = -(alpha*gamma/x)(x - delta/alpha)^2
  - beta*(sigma - b)*y <= 0.
* Plant (3D, z = 1/L): V_m = gamma*x - sigma*ln x
  + gamma*z*(y - (v/sigma)*ln y + m); the shift m keeps the y-factor of
  Vdot nonnegative over the whole first octant.

Sublevel sets of the 2D functions are ovals: convex-over-each-variable
level curves that trajectories can enter but never leave. The oval tangent
to the line x = delta/alpha yields the peak bound on y(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BelowMinimum,
    DegenerateModel,
    DomainError,
    NotCoexistence,
)
from .integrators import Trajectory
from .models import DampedPPParams, PlantParams, State, VirusParams, threshold_f
from .roots import expand_bracket_left, expand_bracket_right, solve_scalar_bracketed
from . import analysis

COEXISTENCE = analysis.COEXISTENCE
EXTINCTION = analysis.EXTINCTION
PLANT = "Plant"

_ROOT_TOL = 1e-13


@dataclass(frozen=True)
class LyapunovSpec:
    """Coefficients of one regime's Lyapunov function.

    Only the fields of the tagged regime are meaningful: (gamma, sigma,
    beta, a) for coexistence, (gamma, beta, b, sigma) for extinction,
    (gamma, sigma, v, m) for the plant system.
    """

    regime: str
    gamma: float
    beta: float = 0.0
    sigma: float = 0.0
    a: float = 0.0
    b: float = 0.0
    v: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        if self.regime == COEXISTENCE:
            if self.a <= 0:
                raise ValueError("coexistence requires a > 0")
            if min(self.gamma, self.sigma, self.beta) <= 0:
                raise ValueError("rates must be > 0")
        elif self.regime == EXTINCTION:
            if min(self.gamma, self.beta) <= 0 or self.b < 0:
                raise ValueError("rates must be > 0 and b >= 0")
            if self.b > self.sigma * (1 + 1e-12):
                raise ValueError("extinction requires gamma*delta <= alpha*sigma")
        elif self.regime == PLANT:
            if min(self.gamma, self.sigma, self.v) <= 0:
                raise ValueError("rates must be > 0")
            if self.m < plant_required_m(self.v, self.sigma) - 1e-12:
                raise ValueError("shift m too small to certify the first octant")
        else:
            raise ValueError(f"unknown regime {self.regime!r}")


@dataclass(frozen=True)
class OvalLevel:
    """A sublevel set V <= C, anchored at the point whose value defined C."""

    C: float
    spec: LyapunovSpec
    anchor: tuple[float, ...]


@dataclass(frozen=True)
class PeakBoundReport:
    y_bar: float
    C: float
    tangency_point: tuple[float, float]
    equation_residual: float
    limit_value: float


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    worst_increment: float
    t_worst: float | None


def make_spec(p: DampedPPParams) -> LyapunovSpec:
    """Regime-appropriate Lyapunov coefficients for the 2D system."""
    a = analysis.prey_renewal_constant(p)
    if a > 0:
        return LyapunovSpec(
            COEXISTENCE, gamma=p.gamma, sigma=p.sigma, beta=p.beta, a=a
        )
    return LyapunovSpec(
        EXTINCTION,
        gamma=p.gamma,
        beta=p.beta,
        sigma=p.sigma,
        b=p.delta * p.gamma / p.alpha,
    )


def make_plant_spec(p: PlantParams, m: float | None = None) -> LyapunovSpec:
    """Plant-regime coefficients; defaults the shift to plant_min_m(p)."""
    if m is None:
        m = plant_min_m(p)
    return LyapunovSpec(PLANT, gamma=p.gamma, sigma=p.sigma, v=p.v, m=m)


def oval_level(spec: LyapunovSpec, anchor: State) -> OvalLevel:
    return OvalLevel(value(spec, anchor), spec, tuple(anchor))


def value(spec: LyapunovSpec, s: State) -> float:
    """Lyapunov function value at a state of matching dimension."""
    x = s[0]
    if x <= 0:
        raise DomainError(f"V needs x > 0, got x={x!r}")
    if spec.regime == COEXISTENCE:
        y = s[1]
        if y <= 0:
            raise DomainError(f"coexistence V needs y > 0, got y={y!r}")
        return (
            spec.gamma * x
            - spec.sigma * math.log(x)
            + spec.beta * y
            - spec.a * math.log(y)
        )
    if spec.regime == EXTINCTION:
        return spec.gamma * x - spec.b * math.log(x) + spec.beta * s[1]
    y, z = s[1], s[2]
    if y <= 0:
        raise DomainError(f"plant V needs y > 0, got y={y!r}")
    if z < 0:
        raise DomainError(f"plant V needs z >= 0, got z={z!r}")
    g = y - (spec.v / spec.sigma) * math.log(y) + spec.m
    return spec.gamma * x - spec.sigma * math.log(x) + spec.gamma * z * g


def grad(spec: LyapunovSpec, s: State) -> tuple[float, ...]:
    """Gradient of the Lyapunov function (for dot-product cross-checks)."""
    x = s[0]
    if x <= 0:
        raise DomainError(f"grad needs x > 0, got x={x!r}")
    if spec.regime == COEXISTENCE:
        y = s[1]
        if y <= 0:
            raise DomainError(f"coexistence grad needs y > 0, got y={y!r}")
        return (spec.gamma - spec.sigma / x, spec.beta - spec.a / y)
    if spec.regime == EXTINCTION:
        return (spec.gamma - spec.b / x, spec.beta)
    y, z = s[1], s[2]
    if y <= 0:
        raise DomainError(f"plant grad needs y > 0, got y={y!r}")
    vs = spec.v / spec.sigma
    return (
        spec.gamma - spec.sigma / x,
        spec.gamma * z * (1.0 - vs / y),
        spec.gamma * (y - vs * math.log(y) + spec.m),
    )


def vdot(spec: LyapunovSpec, p, s: State) -> float:
    """Analytic time derivative of V along trajectories of the model ``p``."""
    x = s[0]
    if x <= 0:
        raise DomainError(f"vdot needs x > 0, got x={x!r}")
    if spec.regime == COEXISTENCE:
        d = x - spec.sigma / spec.gamma
        return -(spec.gamma**2 * p.delta / (spec.sigma * x)) * d * d
    if spec.regime == EXTINCTION:
        d = x - p.delta / p.alpha
        lin = p.sigma - (p.delta / p.alpha) * p.gamma
        return -(p.alpha * p.gamma / x) * d * d - p.beta * lin * s[1]
    y, z = s[1], s[2]
    if y <= 0:
        raise DomainError(f"plant vdot needs y > 0, got y={y!r}")
    vs = spec.v / spec.sigma
    d = x - spec.sigma / spec.gamma
    quad = -(spec.gamma**2 * spec.v * z / (spec.sigma * x)) * d * d
    fy = threshold_f(p.threshold, y)
    return quad - spec.gamma * fy * (y - vs * math.log(y) + spec.m) * z * z


def monotonicity_check(
    traj: Trajectory, spec: LyapunovSpec, p, slack: float | None = None
) -> MonotonicityReport:
    """Verify V never increases between consecutive samples (up to slack).

    The exact flow gives strict monotonicity; the integrator introduces
    bounded local error, so the default slack is 10x the absolute tolerance
    per sample pair.
    """
    if slack is None:
        slack = 10.0 * traj.config.abs_tol
    worst = 0.0
    t_worst = None
    prev = value(spec, traj.states[0])
    for i in range(1, len(traj.states)):
        cur = value(spec, traj.states[i])
        inc = cur - prev
        if inc > worst:
            worst = inc
            t_worst = traj.times[i]
        prev = cur
    return MonotonicityReport(worst <= slack, worst, t_worst)


def _y_part_min(spec: LyapunovSpec) -> float:
    """Minimum over y > 0 of beta*y - a*ln y, attained at y = a/beta."""
    ab = spec.a / spec.beta
    return spec.a * (1.0 - math.log(ab))


def oval_y_roots(spec: LyapunovSpec, x: float, C: float) -> tuple[float, float]:
    """The two y values where the coexistence oval V = C meets abscissa x.

    beta*y - a*ln y is strictly convex with minimum at y = a/beta, so the
    level r = C - (gamma*x - sigma*ln x) is met at exactly two points once
    it exceeds the minimum; at equality the double root a/beta is returned.
    """
    if spec.regime != COEXISTENCE:
        raise ValueError("oval geometry is defined for the coexistence regime")
    if x <= 0:
        raise DomainError(f"oval_y_roots needs x > 0, got x={x!r}")
    r = C - (spec.gamma * x - spec.sigma * math.log(x))
    m = _y_part_min(spec)
    scale = max(1.0, abs(m), abs(r))
    if r < m - 1e-12 * scale:
        raise BelowMinimum(
            f"level r={r!r} below the y-section minimum {m!r}: the oval "
            f"does not reach x={x!r}"
        )
    ab = spec.a / spec.beta
    if r <= m + 1e-12 * scale:
        return ab, ab

    def g(y: float) -> float:
        return spec.beta * y - spec.a * math.log(y) - r

    def dg(y: float) -> float:
        return spec.beta - spec.a / y

    lo_bracket = expand_bracket_left(g, ab)
    y_low = solve_scalar_bracketed(g, lo_bracket, tol=_ROOT_TOL, df=dg)
    hi_bracket = expand_bracket_right(g, ab)
    y_high = solve_scalar_bracketed(g, hi_bracket, tol=_ROOT_TOL, df=dg)
    return y_low, y_high


def peak_bound(p: DampedPPParams) -> PeakBoundReport:
    """Upper bound on y(t) from the oval tangent to the line x = delta/alpha.

    The tangent oval's level is C = V(delta/alpha, a/beta); the bound is the
    larger root of V(sigma/gamma, y) = C. The equivalent equation in
    R = gamma*delta/(alpha*sigma),

        y - (alpha/beta)(R-1) ln y
            = (sigma/beta)(R - 1 - ln R)
              + (alpha/beta)(R-1)(1 - ln((alpha/beta)(R-1))),

    is evaluated at the root and its residual reported as a cross-check;
    the direct form is primary because it avoids cancellation near R = 1.
    """
    R = analysis.reproductive_ratio(p)
    if R <= 1.0:
        raise NotCoexistence(f"peak bound requires R > 1, got R={R!r}")
    spec = make_spec(p)
    tangency = (p.delta / p.alpha, spec.a / p.beta)
    C = value(spec, tangency)
    _, y_bar = oval_y_roots(spec, p.sigma / p.gamma, C)

    ab = (p.alpha / p.beta) * (R - 1.0)
    lhs = y_bar - ab * math.log(y_bar)
    rhs = (p.sigma / p.beta) * (R - 1.0 - math.log(R)) + ab * (1.0 - math.log(ab))
    return PeakBoundReport(
        y_bar=y_bar,
        C=C,
        tangency_point=tangency,
        equation_residual=abs(lhs - rhs),
        limit_value=_limit_peak(p.delta, p.alpha, p.sigma),
    )


def peak_bound_limit(p: VirusParams) -> float:
    """Large-infection-rate limit of the outbreak peak bound.

    As gamma grows (q fixed), the peak equation tends to
    y - (delta/sigma) ln y = delta/alpha + (delta/sigma)(1 - ln(delta/sigma)),
    whose larger root stays finite: outbreaks are bounded no matter how
    infectious the virus.
    """
    if p.delta <= 0:
        raise DegenerateModel("the limiting peak equation requires delta > 0")
    return _limit_peak(p.delta, p.alpha, p.sigma)


def _limit_peak(delta: float, alpha: float, sigma: float) -> float:
    ds = delta / sigma
    rhs = delta / alpha + ds * (1.0 - math.log(ds))

    def g(y: float) -> float:
        return y - ds * math.log(y) - rhs

    def dg(y: float) -> float:
        return 1.0 - ds / y

    bracket = expand_bracket_right(g, ds)
    return solve_scalar_bracketed(g, bracket, tol=_ROOT_TOL, df=dg)


def plant_required_m(v: float, sigma: float) -> float:
    """Smallest admissible shift for the plant Lyapunov function."""
    ratio = v / sigma
    if ratio <= 1.0:
        return 0.0
    return abs(ratio * (1.0 - math.log(ratio)))


def plant_min_m(p: PlantParams, margin: float = 1e-6) -> float:
    """A safe shift m: with it, y - (v/sigma) ln y + m >= margin for y > 0.

    The lower envelope y - (v/sigma) ln y has global minimum
    (v/sigma)(1 - ln(v/sigma)); shifting by that magnitude plus a margin
    keeps the certificate factor positive everywhere.
    """
    ratio = p.v / p.sigma
    g_min = ratio * (1.0 - math.log(ratio))
    return abs(g_min) + margin
