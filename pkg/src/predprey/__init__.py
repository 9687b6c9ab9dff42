"""Damped predator-prey toolkit.

Simulation and analysis for the family built around

    dx/dt = delta - alpha*x - beta*x*y
    dy/dt = gamma*x*y - sigma*y

and its relatives: the classical Lotka-Volterra system, the (damped)
harmonic oscillator, within-host virus dynamics, and the 3D plant-growth
extension. Lyapunov functions are constructed analytically per regime and
used to certify convergence, bound outbreak peaks, and detect when plant
growth has provably stopped.
"""

from .analysis import (
    COEXISTENCE,
    CRITICAL,
    EXTINCTION,
    ConvergenceReport,
    EquilibriumReport,
    RegimeClassification,
    classify,
    convergence_check,
    equilibria,
    lv_first_integral,
    oscillator_energy,
    prey_renewal_constant,
    reproductive_ratio,
)
from .errors import (
    BelowMinimum,
    ConfigError,
    DegenerateModel,
    DomainError,
    GuardViolation,
    NoSignChange,
    NotCoexistence,
    NotStopped,
    PredPreyError,
    StepFailure,
)
from .integrators import (
    EventRecord,
    EventSpec,
    IntegratorConfig,
    Trajectory,
    integrate,
)
from .lyapunov import (
    PLANT,
    LyapunovSpec,
    MonotonicityReport,
    OvalLevel,
    PeakBoundReport,
    grad,
    make_plant_spec,
    make_spec,
    monotonicity_check,
    oval_level,
    oval_y_roots,
    peak_bound,
    peak_bound_limit,
    plant_min_m,
    plant_required_m,
    value,
    vdot,
)
from .models import (
    DampedPPParams,
    LotkaVolterraParams,
    OscillatorParams,
    PlantParams,
    ThresholdSpec,
    VectorField,
    VirusParams,
    damped_pp_field,
    lv_field,
    oscillator_field,
    plant_field_L,
    plant_field_z,
    threshold_f,
    virus_to_damped,
)
from .plant import (
    CertificateSpec,
    PlantReport,
    certificate_holds,
    detect_stop,
    growth_spurts,
    make_certificate,
    simulate_plant,
)
from .roots import solve_scalar_bracketed

__version__ = "0.1.0"
