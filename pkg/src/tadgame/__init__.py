"""Active target-defense engagement game with a fast Defender.

An Attacker missile pursues a Target aircraft while a faster Defender
missile, fired in the Target's support, tries to intercept the Attacker
first.  The package solves the resulting zero-sum engagement analytically
(dominance-circle geometry plus a complex sextic for the optimal
interception point), numerically (an adjoint-based two-point boundary-value
problem solved by backward shooting) and by closed-loop simulation against
optimal or conventional guidance laws.
"""

from .errors import (
    GeometryError,
    NumericalError,
    RootingError,
    ScenarioError,
    ShootingError,
    SingularityError,
    TadError,
)
from .geometry import (
    AdFrame,
    ApolloniusCircle,
    Scenario,
    TargetRegion,
    at_circle,
    build_frame,
    classify_target,
    critical_alpha,
    da_circle,
    wrap_angle,
)
from .sextic import (
    CandidateAngles,
    GameGeometry,
    SexticCoefficients,
    build_geometry,
    build_sextic,
    candidate_angles,
    find_roots,
    stationarity_residual,
)
from .solver import (
    AgentHeadings,
    CandidateEvaluation,
    InterceptionSolution,
    brute_force_phi,
    cost_inside,
    cost_outside,
    headings_from_aimpoint,
    solve,
)
from .tpbvp import (
    Costate,
    HeadingTriple,
    ReducedState,
    TpbvpSolution,
    costate_dynamics,
    hamiltonian,
    optimal_headings,
    reduced_dynamics,
    solve_tpbvp,
    terminal_lambda_r,
)
from .simulator import (
    AttackerCaptures,
    DefenderIntercepts,
    FixedHeading,
    OptimalGame,
    Outcome,
    PolicySet,
    ProportionalNavigation,
    PurePursuit,
    Timeout,
    Trajectory,
    pn_heading_rate,
    pure_pursuit_heading,
    reduce_state,
    run,
)

__version__ = "0.1.0"
