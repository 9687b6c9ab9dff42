"""Adaptive explicit Runge-Kutta integration for 2D/3D autonomous fields.

The stepper is the Dormand-Prince 5(4) embedded pair with proportional step
control. States are plain float tuples: at dimension 2 or 3 this beats array
machinery by a wide margin and keeps the right-hand sides trivial to write.

Design notes:

* Sampling is at a fixed cadence, plus at events and at the final time;
  interior samples are produced by re-integrating (a single fifth-order
  step) from the accepted step's base point, not by dense output.
* Events are localized by sign-change bisection on the indicator, with the
  state at each trial time produced by the same re-integration.
* Biological fields are guarded, never clamped: the exact flow preserves
  the first quadrant/octant, so an excursion below ``-quadrant_guard_epsilon``
  means the tolerances are misconfigured and the run is aborted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, GuardViolation, StepFailure
from .models import State, VectorField

__all__ = [
    "IntegratorConfig",
    "EventSpec",
    "EventRecord",
    "Trajectory",
    "integrate",
]

# Dormand-Prince 5(4) tableau. The seventh stage is evaluated at the fifth
# order solution (FSAL), so its weights row equals _B5[:6].
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# _B5 minus the embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_EPS = math.ulp(1.0)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    initial_step: float | None = None
    max_rejections: int = 50
    quadrant_guard_epsilon: float = 1e-12

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step <= 0:
            raise ValueError("rel_tol, abs_tol and max_step must be > 0")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be > 0 when given")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")
        if self.quadrant_guard_epsilon < 0:
            raise ValueError("quadrant_guard_epsilon must be >= 0")


@dataclass(frozen=True)
class EventSpec:
    """Zero crossing of ``indicator`` along the trajectory.

    ``direction`` is one of ``rising`` (indicator passes from negative to
    nonnegative), ``falling`` (positive to nonpositive) or ``any``.
    """

    indicator: Callable[[State], float]
    direction: str = "any"
    terminal: bool = False
    label: str = "event"

    def __post_init__(self):
        if self.direction not in ("rising", "falling", "any"):
            raise ValueError(f"bad event direction {self.direction!r}")

    def crossed(self, g0: float, g1: float) -> bool:
        rising = g0 < 0.0 <= g1
        falling = g0 > 0.0 >= g1
        if self.direction == "rising":
            return rising
        if self.direction == "falling":
            return falling
        return rising or falling


@dataclass(frozen=True)
class EventRecord:
    t: float
    label: str
    state: State


@dataclass
class Trajectory:
    """Sampled solution of one integration run.

    Immutable by convention after construction; sample times are strictly
    increasing and every event time lies inside the sampled range.
    """

    times: list[float]
    states: list[State]
    events: list[EventRecord]
    config: IntegratorConfig
    terminated_by: str  # horizon | terminal_event | guard_violation | step_failure

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if not self.times:
            raise ValueError("trajectory must contain at least one sample")
        for i in range(len(self.times) - 1):
            if self.times[i + 1] <= self.times[i]:
                raise ValueError("sample times must be strictly increasing")
        lo, hi = self.times[0], self.times[-1]
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        for ev in self.events:
            if not (lo - slack <= ev.t <= hi + slack):
                raise ValueError(f"event at t={ev.t!r} outside sampled range")

    @property
    def samples(self) -> list[tuple[float, State]]:
        return list(zip(self.times, self.states))

    @property
    def t_first(self) -> float:
        return self.times[0]

    @property
    def t_last(self) -> float:
        return self.times[-1]

    @property
    def final_state(self) -> State:
        return self.states[-1]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Times as shape (n,), states as shape (n, dim)."""
        return np.asarray(self.times), np.asarray(self.states)


def _rms(v: Sequence[float]) -> float:
    return math.sqrt(sum(x * x for x in v) / len(v))


def _attempt(f, y, h, k1, dim):
    """One trial step: returns (y_new, error_norm_scale_free, k_stages).

    The error is returned unscaled (per component); tolerance weighting is
    done by the caller. Raises DomainError if a stage leaves the field's
    domain.
    """
    k = [k1]
    for i in range(1, 7):
        ai = _A[i]
        yi = list(y)
        for m in range(i):
            c = ai[m] * h
            if c != 0.0:
                km = k[m]
                for j in range(dim):
                    yi[j] += c * km[j]
        if i == 6:
            y_new = tuple(yi)
        k.append(f(tuple(yi)))
    err = tuple(
        h * sum(_E[m] * k[m][j] for m in range(7) if _E[m] != 0.0) for j in range(dim)
    )
    return y_new, err, k


def _sub_state(f, y, k1, dt, dim) -> State:
    """Fifth-order solution a partial step ``dt`` past the step's base point."""
    k = [k1]
    for i in range(1, 6):
        ai = _A[i]
        yi = list(y)
        for m in range(i):
            c = ai[m] * dt
            if c != 0.0:
                km = k[m]
                for j in range(dim):
                    yi[j] += c * km[j]
        k.append(f(tuple(yi)))
    out = list(y)
    for m in range(6):
        c = _B5[m] * dt
        if c != 0.0:
            km = k[m]
            for j in range(dim):
                out[j] += c * km[j]
    return tuple(out)


def _initial_step(f, y0, f0, cfg: IntegratorConfig, span: float, dim: int) -> float:
    """Hairer-style starting step heuristic."""
    scale = [cfg.abs_tol + cfg.rel_tol * abs(v) for v in y0]
    d0 = _rms([y0[j] / scale[j] for j in range(dim)])
    d1 = _rms([f0[j] / scale[j] for j in range(dim)])
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        y1 = tuple(y0[j] + h0 * f0[j] for j in range(dim))
        f1 = f(y1)
        d2 = _rms([(f1[j] - f0[j]) / scale[j] for j in range(dim)]) / h0
    except DomainError:
        d2 = d1
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step, span)


def integrate(
    field: VectorField,
    init: Sequence[float],
    t_span: tuple[float, float],
    config: IntegratorConfig | None = None,
    events: Sequence[EventSpec] = (),
    sample_every: float | None = None,
) -> Trajectory:
    """Integrate ``field`` over ``t_span`` from ``init``.

    Samples are emitted at multiples of ``sample_every`` past the start
    (default: span/1000), at every detected event, and at the final time.
    Raises GuardViolation if a guarded field's state dips below the
    negativity guard, StepFailure if step control cannot advance; both
    carry the partial trajectory on their ``trajectory`` attribute.
    """
    cfg = config if config is not None else IntegratorConfig()
    t0, t_end = float(t_span[0]), float(t_span[1])
    if not t_end > t0:
        raise ValueError("t_span must be increasing")
    span = t_end - t0
    dt_sample = span / 1000.0 if sample_every is None else float(sample_every)
    if dt_sample <= 0:
        raise ValueError("sample_every must be > 0")

    y = tuple(float(v) for v in init)
    dim = field.dimension
    if len(y) != dim:
        raise ValueError(f"init has length {len(y)}, field dimension is {dim}")
    f = field.eval
    guard = -cfg.quadrant_guard_epsilon if field.guarded else None

    times: list[float] = [t0]
    states: list[State] = [y]
    ev_records: list[EventRecord] = []
    time_slack = 1e-12 * max(1.0, span)

    def make_traj(reason: str) -> Trajectory:
        return Trajectory(times, states, ev_records, cfg, reason)

    def check_guard(t: float, s: State):
        if guard is not None:
            for j, v in enumerate(s):
                if v < guard:
                    raise GuardViolation(
                        f"state coordinate {j} = {v!r} fell below the guard "
                        f"at t={t!r} (exact flow preserves positivity; "
                        f"tighten tolerances)",
                        trajectory=make_traj("guard_violation"),
                    )

    def emit(t: float, s: State):
        if t - times[-1] > time_slack:
            times.append(t)
            states.append(s)
            check_guard(t, s)

    check_guard(t0, y)
    k1 = f(y)  # initial DomainError propagates: init must be admissible

    h = cfg.initial_step or _initial_step(f, y, k1, cfg, span, dim)
    h = min(h, cfg.max_step, span)

    g_prev = [spec.indicator(y) for spec in events]
    next_sample = 1  # sample index: t0 + next_sample * dt_sample
    t = t0

    while t < t_end - time_slack:
        h = min(h, cfg.max_step, t_end - t)
        if h < 16 * _EPS * max(abs(t), 1.0):
            raise StepFailure(
                f"step size underflow at t={t!r}", trajectory=make_traj("step_failure")
            )

        rejections = 0
        while True:
            bad = False
            try:
                y_new, err, k = _attempt(f, y, h, k1, dim)
            except DomainError:
                bad = True
            if not bad:
                norm = 0.0
                for j in range(dim):
                    sc = cfg.abs_tol + cfg.rel_tol * max(abs(y[j]), abs(y_new[j]))
                    norm += (err[j] / sc) ** 2
                norm = math.sqrt(norm / dim)
                bad = not math.isfinite(norm)
            if not bad and norm <= 1.0:
                break
            rejections += 1
            if rejections > cfg.max_rejections:
                raise StepFailure(
                    f"more than {cfg.max_rejections} consecutive step rejections "
                    f"at t={t!r}",
                    trajectory=make_traj("step_failure"),
                )
            if bad:
                h *= 0.5
            else:
                h *= max(_MIN_FACTOR, _SAFETY * norm ** -0.2)
            if h < 16 * _EPS * max(abs(t), 1.0):
                raise StepFailure(
                    f"step size underflow at t={t!r}",
                    trajectory=make_traj("step_failure"),
                )
        just_rejected = rejections > 0
        t_new = t + h

        # earliest event crossing inside (t, t_new], if any
        hit: tuple[float, State, EventSpec] | None = None
        for idx, spec in enumerate(events):
            g1 = spec.indicator(y_new)
            if spec.crossed(g_prev[idx], g1):
                te, se = _refine_event(f, t, y, k1, h, y_new, spec, g_prev[idx], dim)
                if hit is None or te < hit[0]:
                    hit = (te, se, spec)
            g_prev[idx] = g1

        # cadence samples up to the event (exclusive) or step end (inclusive)
        while True:
            ts = t0 + next_sample * dt_sample
            if hit is not None:
                if ts >= hit[0] - time_slack:
                    break
            elif ts > t_new + time_slack:
                break
            if hit is None and abs(ts - t_new) <= time_slack:
                ps = y_new
            else:
                ps = _sub_state(f, y, k1, ts - t, dim)
            emit(ts, ps)
            next_sample += 1

        if hit is not None:
            # restart integration at the event so no accepted step straddles
            # it: right-hand sides may be non-smooth across an event surface
            # (e.g. a growth threshold), and restarting keeps fifth-order
            # accuracy on both sides.
            te, se, spec = hit
            emit(te, se)
            ev_records.append(EventRecord(te, spec.label, se))
            if spec.terminal:
                return make_traj("terminal_event")
            check_guard(te, se)
            t, y = te, se
            k1 = f(y)
            for idx, sp in enumerate(events):
                g_prev[idx] = sp.indicator(y)
            continue

        check_guard(t_new, y_new)
        t, y, k1 = t_new, y_new, k[6]

        if norm == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * norm ** -0.2))
        if just_rejected:
            factor = min(1.0, factor)
        h *= factor

    emit(t_end, y)
    return make_traj("horizon")


def _refine_event(f, t, y, k1, h, y_new, spec: EventSpec, g0: float, dim):
    """Bisect the indicator's sign change inside the accepted step."""
    lo, g_lo = 0.0, g0
    hi, s_hi = h, y_new
    for _ in range(80):
        if hi - lo <= 4 * _EPS * max(abs(t + hi), 1.0):
            break
        mid = 0.5 * (lo + hi)
        s_mid = _sub_state(f, y, k1, mid, dim)
        g_mid = spec.indicator(s_mid)
        if spec.crossed(g_lo, g_mid):
            hi, s_hi = mid, s_mid
        else:
            lo, g_lo = mid, g_mid
    return t + hi, s_hi
