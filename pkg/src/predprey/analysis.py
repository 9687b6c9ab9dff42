"""Closed-form equilibria, regime classification and convergence diagnostics.

The damped predator-prey system has two equilibria: the predator-free point
(delta/alpha, 0) and the interior point (sigma/gamma, a/beta) with
a = gamma*delta/sigma - alpha. The basic reproductive ratio
R = gamma*delta/(alpha*sigma) is the bifurcation parameter: the equilibria
exchange stability at R = 1 (transcritical bifurcation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateModel, DomainError
from .integrators import Trajectory
from .models import (
    DampedPPParams,
    LotkaVolterraParams,
    OscillatorParams,
    State,
    damped_pp_field,
)

COEXISTENCE = "Coexistence"
EXTINCTION = "Extinction"
CRITICAL = "Critical"

# R counts as exactly critical within this window; the bifurcation itself
# is a single parameter value.
R_CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class EquilibriumReport:
    boundary: tuple[float, float]
    interior: tuple[float, float]
    a: float
    interior_in_quadrant: bool


@dataclass(frozen=True)
class RegimeClassification:
    R: float
    regime: str  # Coexistence | Extinction | Critical
    attractor: tuple[float, float]


@dataclass(frozen=True)
class ConvergenceReport:
    target: tuple[float, ...]
    achieved: bool
    t_enter: float | None
    max_distance_after: float | None


def prey_renewal_constant(p: DampedPPParams) -> float:
    """The effective prey growth rate a = gamma*delta/sigma - alpha."""
    return p.gamma * p.delta / p.sigma - p.alpha


def equilibria(p: DampedPPParams) -> EquilibriumReport:
    """Both equilibria of the damped predator-prey system.

    The interior point is reported even when it lies outside the first
    quadrant (a < 0); ``interior_in_quadrant`` flags which case holds.
    Raises DegenerateModel when delta = 0 (no prey influx: the boundary
    equilibrium family collapses and these formulas do not apply).
    """
    if p.delta == 0:
        raise DegenerateModel("equilibria formulas require delta > 0")
    a = prey_renewal_constant(p)
    boundary = (p.delta / p.alpha, 0.0)
    interior = (p.sigma / p.gamma, a / p.beta)
    report = EquilibriumReport(boundary, interior, a, a > 0)
    _check_residual(p, report)
    return report


def _check_residual(p: DampedPPParams, rep: EquilibriumReport):
    field = damped_pp_field(p)
    scale = max(1.0, p.alpha, p.beta, p.gamma, p.delta, p.sigma)
    for point in (rep.boundary, rep.interior):
        fx, fy = field.eval(point)
        if max(abs(fx), abs(fy)) > 1e-12 * scale:
            raise AssertionError(
                f"equilibrium residual {max(abs(fx), abs(fy))!r} at {point!r}"
            )


def reproductive_ratio(p: DampedPPParams) -> float:
    return p.gamma * p.delta / (p.alpha * p.sigma)


def classify(p: DampedPPParams) -> RegimeClassification:
    """Regime at the transcritical bifurcation in R = gamma*delta/(alpha*sigma).

    Coexistence (R > 1) attracts to the interior equilibrium, extinction
    (R < 1) to the predator-free one; at R = 1 the two coincide.
    """
    R = reproductive_ratio(p)
    boundary = (p.delta / p.alpha, 0.0)
    if abs(R - 1.0) <= R_CRITICAL_TOL:
        return RegimeClassification(R, CRITICAL, boundary)
    if R > 1.0:
        a = prey_renewal_constant(p)
        return RegimeClassification(R, COEXISTENCE, (p.sigma / p.gamma, a / p.beta))
    return RegimeClassification(R, EXTINCTION, boundary)


def lv_first_integral(p: LotkaVolterraParams, s: State) -> float:
    """Conserved quantity gamma*x - sigma*ln x + beta*y - a*ln y."""
    x, y = s[0], s[1]
    if x <= 0 or y <= 0:
        raise DomainError(f"first integral needs x, y > 0, got ({x!r}, {y!r})")
    return p.gamma * x - p.sigma * math.log(x) + p.beta * y - p.a * math.log(y)


def oscillator_energy(p: OscillatorParams, s: State) -> float:
    """Total energy x^2 + b*y^2; conserved when undamped, decaying when a > 0."""
    x, y = s[0], s[1]
    return x * x + p.b * y * y


def convergence_check(
    traj: Trajectory,
    target: tuple[float, ...],
    tol: float,
    tail_fraction: float = 0.1,
) -> ConvergenceReport:
    """Tail-window convergence test toward ``target``.

    ``achieved`` is true iff every sample in the final ``tail_fraction`` of
    samples lies within ``tol`` of the target (a finite proxy for the
    omega-limit set being {target}). ``t_enter`` is the time the trajectory
    last entered the tol-ball and stayed; ``max_distance_after`` the largest
    distance seen from then on.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    n = len(traj.times)
    dists = [_dist(s, target) for s in traj.states]

    tail_start = min(n - 1, n - max(1, int(math.ceil(tail_fraction * n))))
    achieved = all(d <= tol for d in dists[tail_start:])

    last_outside = None
    for i in range(n - 1, -1, -1):
        if dists[i] > tol:
            last_outside = i
            break
    if last_outside == n - 1:
        return ConvergenceReport(tuple(target), False, None, None)
    enter_idx = 0 if last_outside is None else last_outside + 1
    t_enter = traj.times[enter_idx]
    max_after = max(dists[enter_idx:])
    return ConvergenceReport(tuple(target), achieved, t_enter, max_after)


def _dist(s: State, target: tuple[float, ...]) -> float:
    return math.sqrt(sum((s[j] - target[j]) ** 2 for j in range(len(target))))
