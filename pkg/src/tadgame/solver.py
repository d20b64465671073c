"""Optimal interception point, cost, and headings for one engagement.

The regime decides the optimization sense.  A Target outside the
Defender/Attacker dominance circle survives regardless of speed; the
Attacker then picks the interception point ``I`` on the circle minimizing
the terminal Target separation

    J_out(phi) = dist(I, T) + alpha * dist(A, I)

(the Target flees ``I`` along the ray through its own position while the
Attacker closes).  A Target starting inside must run for the boundary, and
the point is chosen by the Target to maximize the escape margin

    J_in(phi) = alpha * dist(A, I) - dist(I, T)

which is positive exactly when the Target clears the circle before the
Attacker arrives.  Both costs share one stationarity condition, so the same
sextic supplies candidate angles for either regime; the grid search in
``brute_force_phi`` provides an independent fallback and test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GeometryError, RootingError, SingularityError
from .geometry import (
    Scenario,
    TargetRegion,
    build_frame,
    classify_target,
    critical_alpha,
    da_circle,
    wrap_angle,
)
from .sextic import (
    CandidateAngles,
    GameGeometry,
    build_geometry,
    build_sextic,
    candidate_angles,
    find_roots,
    stationarity_residual,
)

__all__ = [
    "AgentHeadings",
    "CandidateEvaluation",
    "InterceptionSolution",
    "cost_outside",
    "cost_inside",
    "brute_force_phi",
    "headings_from_aimpoint",
    "solve",
]

# A candidate whose stationarity residual exceeds this is not trusted and
# triggers the grid fallback.
RESIDUAL_FALLBACK_TOL = 1e-4

# Candidates whose costs agree within this are tie-broken by angle.
COST_TIE_TOL = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class AgentHeadings(NamedTuple):
    """World-frame heading angles (radians) for the three agents."""

    target: float
    attacker: float
    defender: float


@dataclass(frozen=True)
class CandidateEvaluation:
    """One sextic root evaluated in the regime cost."""

    angle: float
    cost: float
    residual: float
    root_modulus: float


@dataclass(frozen=True)
class InterceptionSolution:
    """Full solution of one engagement.

    ``cost`` is the terminal Target/Attacker separation in the outside
    regime and the signed escape margin in the inside regime (negative when
    the Target cannot clear the circle in time).  ``t_f`` is in units of
    length over Attacker speed, and equals dist(A, I).
    """

    phi_star: float
    intercept_frame: tuple[float, float]
    intercept_world: tuple[float, float]
    cost: float
    regime: TargetRegion
    critical_alpha: float
    escape_infeasible: bool
    headings: AgentHeadings
    target_terminal: tuple[float, float]
    t_f: float
    candidates: tuple[CandidateEvaluation, ...]
    used_grid_fallback: bool


def cost_outside(geom: GameGeometry, phi):
    """Terminal separation when the Target starts outside the circle.

    Accepts a scalar or an array of angles.  Algebraically identical to
    dist(I, T) + alpha * dist(A, I) at I(phi) by the law of cosines.
    """
    r, m, n = geom.radius, geom.center_to_attacker, geom.center_to_target
    lam = geom.target_polar_angle
    phi = np.asarray(phi, dtype=float)
    value = (np.sqrt(r * r + n * n - 2.0 * n * r * np.cos(phi - lam))
             + geom.alpha * np.sqrt(r * r + m * m - 2.0 * m * r * np.cos(phi)))
    return float(value) if value.ndim == 0 else value


def cost_inside(geom: GameGeometry, phi):
    """Signed escape margin when the Target starts inside the circle."""
    r, m, n = geom.radius, geom.center_to_attacker, geom.center_to_target
    lam = geom.target_polar_angle
    phi = np.asarray(phi, dtype=float)
    value = (geom.alpha * np.sqrt(r * r + m * m - 2.0 * m * r * np.cos(phi))
             - np.sqrt(r * r + n * n - 2.0 * n * r * np.cos(phi - lam)))
    return float(value) if value.ndim == 0 else value


def _regime_cost(geom: GameGeometry, regime: TargetRegion):
    return cost_inside if regime is TargetRegion.INSIDE else cost_outside


def _golden_min(f, a: float, b: float, tol: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def brute_force_phi(geom: GameGeometry, regime: TargetRegion, n_grid: int = 4096) -> float:
    """Extremize the regime cost over a uniform angle grid, then refine.

    Independent of the sextic: a plain scan over ``n_grid`` angles followed
    by one golden-section refinement of the winning grid cell down to an
    interval of 1e-10 rad.  Used as the test oracle and the fallback path.
    """
    if n_grid < 1000:
        raise ValueError(f"grid oracle needs n_grid >= 1000, got {n_grid}")
    cost = _regime_cost(geom, regime)
    sign = -1.0 if regime is TargetRegion.INSIDE else 1.0
    grid = np.linspace(-math.pi, math.pi, n_grid, endpoint=False)
    values = sign * cost(geom, grid)
    k = int(np.argmin(values))
    step = 2.0 * math.pi / n_grid
    refined = _golden_min(lambda p: sign * cost(geom, p),
                          grid[k] - step, grid[k] + step, 1e-10)
    return wrap_angle(refined)


def headings_from_aimpoint(scenario: Scenario, intercept_world, regime: TargetRegion) -> AgentHeadings:
    """World headings when all agents commit to the aim point ``I``.

    Attacker and Defender both steer straight at ``I``.  The Target flees
    along the ray from ``I`` through itself when outside, and steers at
    ``I`` when inside (it must reach the boundary point first).
    """
    ix, iy = float(intercept_world[0]), float(intercept_world[1])
    tx, ty = scenario.target_pos
    ax, ay = scenario.attacker_pos
    dx, dy = scenario.defender_pos
    if math.hypot(ix - ax, iy - ay) == 0.0 or math.hypot(ix - dx, iy - dy) == 0.0 \
            or math.hypot(ix - tx, iy - ty) == 0.0:
        raise GeometryError("aim point coincides with an agent: heading undefined")
    attacker = math.atan2(iy - ay, ix - ax)
    defender = math.atan2(iy - dy, ix - dx)
    if regime is TargetRegion.INSIDE:
        target = math.atan2(iy - ty, ix - tx)
    else:
        target = math.atan2(ty - iy, tx - ix)
    return AgentHeadings(target=target, attacker=attacker, defender=defender)


def solve(scenario: Scenario) -> InterceptionSolution:
    """Solve the engagement from the scenario's initial conditions.

    Classifies the Target (boundary counts as outside), extracts candidate
    angles from the sextic, evaluates the regime cost at each, and falls
    back to the grid search whenever rooting fails or the selected
    candidate's stationarity residual is not small.
    """
    frame = build_frame(scenario)
    x_a = frame.half_separation
    t_frame = frame.to_frame(scenario.target_pos)
    circle = da_circle(x_a, scenario.gamma)
    region = classify_target(t_frame, circle)
    regime = TargetRegion.INSIDE if region is TargetRegion.INSIDE else TargetRegion.OUTSIDE

    geom = build_geometry(t_frame, x_a, scenario.alpha, scenario.gamma)
    alpha_bar = critical_alpha(t_frame, x_a, scenario.gamma)
    cost = _regime_cost(geom, regime)
    pick = max if regime is TargetRegion.INSIDE else min

    cands: CandidateAngles | None = None
    used_fallback = False
    try:
        cands = candidate_angles(geom, find_roots(build_sextic(geom)))
    except RootingError:
        used_fallback = True

    phi_star = math.nan
    if cands is not None and cands.angles:
        costs = [cost(geom, ang) for ang in cands.angles]
        best_cost = pick(costs)
        tol = COST_TIE_TOL * max(1.0, abs(best_cost))
        tied = [i for i, c in enumerate(costs) if abs(c - best_cost) <= tol]
        lam = geom.target_polar_angle
        i_best = min(tied, key=lambda i: abs(wrap_angle(cands.angles[i] - lam)))
        phi_star = cands.angles[i_best]
        if not math.isfinite(cands.residuals[i_best]) \
                or abs(cands.residuals[i_best]) > RESIDUAL_FALLBACK_TOL:
            used_fallback = True

    if used_fallback:
        phi_star = brute_force_phi(geom, regime)

    j_star = cost(geom, phi_star)
    intercept_frame = (geom.center_x - geom.radius * math.cos(phi_star),
                       geom.radius * math.sin(phi_star))
    world = frame.to_world(intercept_frame)
    intercept_world = (float(world[0]), float(world[1]))

    headings = headings_from_aimpoint(scenario, intercept_world, regime)
    t_f = math.hypot(intercept_frame[0] - x_a, intercept_frame[1])
    tx, ty = scenario.target_pos
    target_terminal = (tx + scenario.alpha * t_f * math.cos(headings.target),
                       ty + scenario.alpha * t_f * math.sin(headings.target))

    evaluations = []
    if cands is not None:
        for z in cands.roots:
            ang = wrap_angle(math.atan2(z.imag, z.real))
            try:
                res = stationarity_residual(geom, ang)
            except SingularityError:
                res = math.inf
            evaluations.append(CandidateEvaluation(
                angle=ang, cost=cost(geom, ang), residual=res, root_modulus=abs(z)))

    escape_infeasible = regime is TargetRegion.INSIDE and j_star <= 0.0
    return InterceptionSolution(
        phi_star=phi_star,
        intercept_frame=intercept_frame,
        intercept_world=intercept_world,
        cost=j_star,
        regime=regime,
        critical_alpha=alpha_bar,
        escape_infeasible=escape_infeasible,
        headings=headings,
        target_terminal=target_terminal,
        t_f=t_f,
        candidates=tuple(evaluations),
        used_grid_fallback=used_fallback,
    )
