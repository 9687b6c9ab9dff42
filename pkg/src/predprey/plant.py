"""Plant shoot growth: simulation, spurt detection and the stop certificate.

Growth happens in spurts: while the hormone concentration y exceeds the
threshold y_f the shoot lengthens, diluting the nutrient until y falls
back. A quiet period is not proof that growth is over (the system may idle
below threshold for a long time and resume), so stopping is declared only
by the certificate

    V_m(x, y, z) <= V_m(sigma/gamma, y_f, z),

i.e. the state has entered the sublevel oval that touches the threshold
line at its top tip. V_m never increases and, inside that oval, y stays
at or below y_f, so z (and the shoot length L = 1/z) can never change
again: growth cannot resume.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, NotStopped
from .integrators import EventSpec, IntegratorConfig, Trajectory, integrate
from .lyapunov import LyapunovSpec, make_plant_spec, plant_min_m, value
from .models import PlantParams, State, plant_field_z

EVENT_RISE = "y_f_rising"
EVENT_FALL = "y_f_falling"


@dataclass(frozen=True)
class CertificateSpec:
    m: float
    spec: LyapunovSpec
    y_f: float


@dataclass(frozen=True)
class PlantReport:
    stopped: bool
    t_star: float | None
    L_star: float | None
    t_certificate: float | None
    growth_spurts: list[tuple[float, float]]


def make_certificate(p: PlantParams, m: float | None = None) -> CertificateSpec:
    if m is None:
        m = plant_min_m(p)
    return CertificateSpec(m=m, spec=make_plant_spec(p, m), y_f=p.threshold.y_f)


def certificate_holds(c: CertificateSpec, s: State) -> bool:
    """True once the state is inside the threshold-tangent oval at its z.

    The oval through (sigma/gamma, y_f) confines y below y_f only when
    y_f lies at or above v/sigma (the y-section's minimum); below that the
    sublevel set pokes past the threshold and certifies nothing, so the
    test reports False for every state.
    """
    x, y, z = s[0], s[1], s[2]
    if x <= 0 or y <= 0 or z <= 0:
        raise DomainError(f"certificate needs x, y, z > 0, got {s!r}")
    if c.y_f < c.spec.v / c.spec.sigma:
        return False
    ref = (c.spec.sigma / c.spec.gamma, c.y_f, z)
    return value(c.spec, s) <= value(c.spec, ref)


def simulate_plant(
    p: PlantParams,
    init: tuple[float, float, float],
    horizon: float,
    config: IntegratorConfig | None = None,
    sample_every: float | None = None,
    m: float | None = None,
) -> tuple[Trajectory, PlantReport]:
    """Integrate the reciprocal-length form from (x0, y0, L0) and report.

    Events mark every crossing of the hormone threshold in both directions;
    growth spurts are assembled from the crossing pairs. The trajectory
    state is (x, y, z); the shoot length is L = 1/z.
    """
    x0, y0, L0 = init
    if min(x0, y0, L0) <= 0:
        raise ValueError(f"initial x, y, L must be > 0, got {init!r}")
    y_f = p.threshold.y_f
    events = [
        EventSpec(lambda s: s[1] - y_f, "rising", False, EVENT_RISE),
        EventSpec(lambda s: s[1] - y_f, "falling", False, EVENT_FALL),
    ]
    traj = integrate(
        plant_field_z(p),
        (x0, y0, 1.0 / L0),
        (0.0, horizon),
        config=config,
        events=events,
        sample_every=sample_every,
    )

    cert = make_certificate(p, m)
    t_certificate = None
    for t, s in zip(traj.times, traj.states):
        if certificate_holds(cert, s):
            t_certificate = t
            break

    spurts = growth_spurts(traj, y_f)
    if t_certificate is None:
        report = PlantReport(False, None, None, None, spurts)
    else:
        t_star, L_star = detect_stop(traj, y_f, cert)
        report = PlantReport(True, t_star, L_star, t_certificate, spurts)
    return traj, report


def growth_spurts(traj: Trajectory, y_f: float) -> list[tuple[float, float]]:
    """Maximal intervals with y above the threshold, from crossing events."""
    spurts: list[tuple[float, float]] = []
    start = traj.t_first if traj.states[0][1] > y_f else None
    for ev in traj.events:
        if ev.label == EVENT_RISE and start is None:
            start = ev.t
        elif ev.label == EVENT_FALL and start is not None:
            spurts.append((start, ev.t))
            start = None
    if start is not None:
        spurts.append((start, traj.t_last))
    return spurts


def detect_stop(
    traj: Trajectory, y_f: float, certificate: CertificateSpec
) -> tuple[float, float]:
    """Stopping time and final length of a simulated plant run.

    The stopping time is the last falling crossing of the threshold (the
    trajectory start if growth never began); the run counts as stopped only
    if the certificate held at some sample. Raises NotStopped otherwise:
    growth may still resume after the horizon.
    """
    held = any(certificate_holds(certificate, s) for s in traj.states)
    if not held:
        raise NotStopped(
            "certificate never held by the horizon; growth may resume"
        )
    t_star = traj.t_first
    last_rise = None
    for ev in traj.events:
        if ev.label == EVENT_FALL:
            t_star = ev.t
        elif ev.label == EVENT_RISE:
            last_rise = ev.t
    if last_rise is not None and last_rise > t_star:
        raise NotStopped("threshold re-crossed after the last falling crossing")
    L_star = 1.0 / traj.final_state[2]
    return t_star, L_star
