"""rindler-lab: desk-scale numerics for the 1/c^2-corrected mechanics of
composite systems in accelerated versus free-fall frames.

The package covers coordinate kinematics of uniformly accelerated observers,
the composite-system Hamiltonian with its position/internal-energy coupling,
symplectic dynamics and equilibria under a supporting potential, the photon
redshift experiment between stationary clocks, and the interferometric
visibility of a clock in a vertical superposition.
"""

__version__ = "0.1.0"

from .dynamics import (
    EquilibriumResult,
    Trajectory,
    drift_under_internal_change,
    find_equilibrium,
    hamilton_rhs,
    hamiltonian_value,
    integrate,
    midrange_position,
    step_schedule,
    time_average_position,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DifferentiationError,
    DomainError,
    EvaluationError,
    NumericsError,
    PreconditionError,
    RindlerLabError,
)
from .forms import (
    ConstantInternal,
    HarmonicInternal,
    HarmonicSupport,
    LinearPotential,
    MomentumSquaredPotential,
    PowerLawPotential,
)
from .frames import (
    SI_EARTH_GRAVITY,
    SI_LIGHT_SPEED,
    FourVector,
    FrameSpec,
    MinkowskiEvent,
    RindlerEvent,
    effective_acceleration,
    minkowski_inner,
    minkowski_to_rindler,
    observer_four_velocity,
    proper_time_rate,
    rindler_to_minkowski,
    shift_rindler,
)
from .hamiltonian import (
    ExpansionReport,
    HamiltonianSpec,
    PhaseState,
    PotentialSpec,
    check_expansion_consistency,
    clock_rest_hamiltonian,
    constant_volume_residual,
    external_potential,
    internal_hamiltonian,
    minkowski_cm_hamiltonian,
    potential_split_residual,
    rindler_hamiltonian_bracket,
    split_external_potential,
    taylor_potential_coefficients,
    total_hamiltonian_expanded,
)
from .redshift import (
    RedshiftResult,
    clock_comparison_rate,
    measured_energy,
    photon_four_momentum,
    run_redshift_experiment,
)
from .visibility import (
    FrameDependenceReport,
    InterferometerConfig,
    InternalSpectrum,
    branch_phase,
    frame_dependence_report,
    visibility,
    visibility_oracle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
