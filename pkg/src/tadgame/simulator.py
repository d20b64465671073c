"""Closed-loop engagement simulation in the world frame.

Integrates the three agents' simple-motion kinematics under pluggable
guidance policies and detects first capture.  Speeds are normalized by the
Attacker's: the Target moves at ``alpha`` and the Defender at
``beta = 1/gamma``, so time carries units of length over Attacker speed.

Policies:

* ``OptimalGame`` replays the analytic saddle-point strategy from the
  current positions (re-solved every ``resolve_stride`` steps); between
  re-solves agents keep steering at the cached aim point.
* ``ProportionalNavigation`` commands a heading rate proportional to the
  line-of-sight rate toward the pursued agent (the Attacker pursues the
  Target, the Defender pursues the Attacker).
* ``PurePursuit`` points straight at the pursued agent.
* ``FixedHeading`` holds a constant course.

The default integrator is explicit Euler with a heading-then-position
update, which keeps every per-step displacement exactly speed * dt; an RK4
variant re-evaluates position-feedback policies at the stage points.
Capture times are interpolated linearly within the bracketing step, and the
Defender wins simultaneous crossings: the game's premise is interception of
the Attacker before it reaches the Target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import GeometryError, NumericalError, ScenarioError, TadError
from .geometry import Scenario, TargetRegion, wrap_angle
from .tpbvp import ReducedState
from . import solver

__all__ = [
    "OptimalGame",
    "ProportionalNavigation",
    "PurePursuit",
    "FixedHeading",
    "PolicySet",
    "Trajectory",
    "DefenderIntercepts",
    "AttackerCaptures",
    "Timeout",
    "Outcome",
    "run",
    "pn_heading_rate",
    "pure_pursuit_heading",
    "reduce_state",
]


@dataclass(frozen=True)
class OptimalGame:
    """Re-solve the game from current positions and steer accordingly."""


@dataclass(frozen=True)
class ProportionalNavigation:
    nav_constant: float = 3.0

    def __post_init__(self):
        if not self.nav_constant > 0.0:
            raise ScenarioError("nav_constant", f"must be positive, got {self.nav_constant}")


@dataclass(frozen=True)
class PurePursuit:
    """Point straight at the pursued agent's current position."""


@dataclass(frozen=True)
class FixedHeading:
    angle: float


GuidancePolicy = Union[OptimalGame, ProportionalNavigation, PurePursuit, FixedHeading]


@dataclass(frozen=True)
class PolicySet:
    """Per-agent guidance assignment; everything optimal by default."""

    target: GuidancePolicy = OptimalGame()
    attacker: GuidancePolicy = OptimalGame()
    defender: GuidancePolicy = OptimalGame()

    def __post_init__(self):
        if isinstance(self.target, (ProportionalNavigation, PurePursuit)):
            raise ScenarioError("policies.target",
                                "the Target is not pursuing anyone; use optimal or fixed heading")
        for name in ("target", "attacker", "defender"):
            if not isinstance(getattr(self, name),
                              (OptimalGame, ProportionalNavigation, PurePursuit, FixedHeading)):
                raise ScenarioError(f"policies.{name}", f"unknown policy {getattr(self, name)!r}")

    @property
    def any_optimal(self) -> bool:
        return any(isinstance(p, OptimalGame) for p in (self.target, self.attacker, self.defender))


@dataclass(frozen=True)
class Trajectory:
    """Sampled run history.

    Row ``i`` of ``headings`` holds the world headings commanded at sample
    ``i`` (the ones that advance the state to sample ``i+1``; the last row
    repeats the final command).  ``aim`` is the re-solved interception point
    for optimal play, NaN on rows where no optimal agent was steering.
    """

    times: np.ndarray
    target: np.ndarray
    attacker: np.ndarray
    defender: np.ndarray
    headings: np.ndarray
    R: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    aim: np.ndarray
    dt: float


@dataclass(frozen=True)
class DefenderIntercepts:
    t_f: float
    R_final: float
    intercept_point: tuple[float, float]


@dataclass(frozen=True)
class AttackerCaptures:
    t: float


@dataclass(frozen=True)
class Timeout:
    t_max: float


Outcome = Union[DefenderIntercepts, AttackerCaptures, Timeout]


def pure_pursuit_heading(pursuer_pos, target_pos) -> float:
    """Bearing from pursuer to its quarry."""
    dx = target_pos[0] - pursuer_pos[0]
    dy = target_pos[1] - pursuer_pos[1]
    if dx == 0.0 and dy == 0.0:
        raise GeometryError("pursuer and quarry coincide: capture already occurred")
    return math.atan2(dy, dx)


def pn_heading_rate(pursuer_pos, pursuer_velocity, target_pos, target_velocity,
                    nav_constant: float) -> float:
    """Commanded heading rate: navigation constant times the LOS rate.

    The line-of-sight rate follows in closed form from the relative state,
    sigma_dot = (r x v) / |r|^2 with r the relative position and v the
    relative velocity.
    """
    rx = target_pos[0] - pursuer_pos[0]
    ry = target_pos[1] - pursuer_pos[1]
    sep2 = rx * rx + ry * ry
    if sep2 == 0.0:
        raise GeometryError("zero separation: capture already occurred")
    vx = target_velocity[0] - pursuer_velocity[0]
    vy = target_velocity[1] - pursuer_velocity[1]
    return nav_constant * (rx * vy - ry * vx) / sep2


def reduce_state(target_pos, attacker_pos, defender_pos) -> ReducedState:
    """Map one world-frame sample to the reduced coordinates."""
    big = math.hypot(target_pos[0] - attacker_pos[0], target_pos[1] - attacker_pos[1])
    small = math.hypot(defender_pos[0] - attacker_pos[0], defender_pos[1] - attacker_pos[1])
    if big == 0.0 or small == 0.0:
        raise GeometryError("coincident agents: reduced state undefined")
    los = math.atan2(target_pos[1] - attacker_pos[1], target_pos[0] - attacker_pos[0])
    theta = wrap_angle(
        math.atan2(defender_pos[1] - attacker_pos[1], defender_pos[0] - attacker_pos[0]) - los)
    return ReducedState(R=big, r=small, theta=theta, los_angle=los)


class _Engine:
    """Mutable state of one run; one instance per call to ``run``."""

    def __init__(self, scenario: Scenario, policies: PolicySet, resolve_stride: int):
        self.scenario = scenario
        self.policies = policies
        self.stride = resolve_stride
        self.pos = {
            "target": np.array(scenario.target_pos, dtype=float),
            "attacker": np.array(scenario.attacker_pos, dtype=float),
            "defender": np.array(scenario.defender_pos, dtype=float),
        }
        self.speed = {"target": scenario.alpha, "attacker": 1.0, "defender": scenario.beta}
        self.aim: tuple[float, float] | None = None
        self.regime: TargetRegion | None = None
        self.heading = {}
        self._init_headings()

    def _resolve(self, step: int):
        try:
            sol = solver.solve(Scenario(
                target_pos=tuple(self.pos["target"]),
                attacker_pos=tuple(self.pos["attacker"]),
                defender_pos=tuple(self.pos["defender"]),
                alpha=self.scenario.alpha,
                gamma=self.scenario.gamma,
                capture_radius_defender=self.scenario.capture_radius_defender,
                capture_radius_attacker=self.scenario.capture_radius_attacker,
            ))
        except TadError as exc:
            raise NumericalError(
                f"optimal-play re-solve failed at step {step}: {exc}") from exc
        self.aim = sol.intercept_world
        self.regime = sol.regime

    def _point_at_aim(self, agent: str) -> float:
        """Steer an optimal agent relative to the cached aim point."""
        ix, iy = self.aim
        px, py = self.pos[agent]
        if agent == "target":
            if math.hypot(ix - px, iy - py) < 1e-12 * (1.0 + abs(ix) + abs(iy)):
                return self.heading["target"]  # passing through the aim point
            if self.regime is TargetRegion.INSIDE:
                return math.atan2(iy - py, ix - px)
            return math.atan2(py - iy, px - ix)
        return math.atan2(iy - py, ix - px)

    def _init_headings(self):
        if self.policies.any_optimal:
            self._resolve(step=0)
        quarry = {"attacker": "target", "defender": "attacker"}
        for agent in ("target", "attacker", "defender"):
            policy = getattr(self.policies, agent)
            if isinstance(policy, FixedHeading):
                self.heading[agent] = wrap_angle(policy.angle)
            elif isinstance(policy, (PurePursuit, ProportionalNavigation)):
                # PN starts on the pure-pursuit bearing; its heading is a
                # state integrated from there.
                self.heading[agent] = pure_pursuit_heading(
                    self.pos[agent], self.pos[quarry[agent]])
            else:
                self.heading[agent] = 0.0  # placeholder until pointing below
        for agent in ("target", "attacker", "defender"):
            if isinstance(getattr(self.policies, agent), OptimalGame):
                self.heading[agent] = self._point_at_aim(agent)

    def velocity(self, agent: str) -> tuple[float, float]:
        v = self.speed[agent]
        h = self.heading[agent]
        return (v * math.cos(h), v * math.sin(h))

    def command(self, step: int, dt: float):
        """Update heading state from the current snapshot."""
        if self.policies.any_optimal and step % self.stride == 0 and step > 0:
            self._resolve(step)
        velocities = {a: self.velocity(a) for a in self.pos}
        quarry = {"attacker": "target", "defender": "attacker"}
        new = {}
        for agent in ("target", "attacker", "defender"):
            policy = getattr(self.policies, agent)
            if isinstance(policy, FixedHeading):
                new[agent] = self.heading[agent]
            elif isinstance(policy, OptimalGame):
                new[agent] = self._point_at_aim(agent)
            elif isinstance(policy, PurePursuit):
                new[agent] = pure_pursuit_heading(self.pos[agent], self.pos[quarry[agent]])
            else:
                rate = pn_heading_rate(self.pos[agent], velocities[agent],
                                       self.pos[quarry[agent]], velocities[quarry[agent]],
                                       policy.nav_constant)
                new[agent] = wrap_angle(self.heading[agent] + rate * dt)
        self.heading = new

    def advance_euler(self, dt: float):
        for agent in self.pos:
            vx, vy = self.velocity(agent)
            self.pos[agent] = self.pos[agent] + np.array([vx * dt, vy * dt])

    def advance_rk4(self, dt: float):
        """RK4 on positions; position-feedback policies are re-evaluated at
        the stage points, PN and fixed headings are held over the step."""
        quarry = {"attacker": "target", "defender": "attacker"}

        def derivs(positions):
            out = {}
            for agent in positions:
                policy = getattr(self.policies, agent)
                if isinstance(policy, PurePursuit):
                    h = pure_pursuit_heading(positions[agent], positions[quarry[agent]])
                elif isinstance(policy, OptimalGame):
                    saved, self.pos = self.pos, positions
                    try:
                        h = self._point_at_aim(agent)
                    finally:
                        self.pos = saved
                else:
                    h = self.heading[agent]
                v = self.speed[agent]
                out[agent] = np.array([v * math.cos(h), v * math.sin(h)])
            return out

        y0 = self.pos
        k1 = derivs(y0)
        k2 = derivs({a: y0[a] + 0.5 * dt * k1[a] for a in y0})
        k3 = derivs({a: y0[a] + 0.5 * dt * k2[a] for a in y0})
        k4 = derivs({a: y0[a] + dt * k3[a] for a in y0})
        self.pos = {a: y0[a] + dt / 6.0 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]) for a in y0}


def run(scenario: Scenario, policies: PolicySet | None = None, dt: float = 1e-3,
        t_max: float = 50.0, resolve_stride: int = 1,
        integrator: str = "euler") -> tuple[Trajectory, Outcome]:
    """Simulate the engagement until capture or ``t_max``.

    Returns the sampled trajectory and the first-crossing outcome, with the
    crossing instant interpolated linearly inside the bracketing step.
    """
    if not dt > 0.0:
        raise ScenarioError("dt", f"must be positive, got {dt}")
    if not t_max > 0.0:
        raise ScenarioError("t_max", f"must be positive, got {t_max}")
    if resolve_stride < 1:
        raise ScenarioError("resolve_stride", f"must be >= 1, got {resolve_stride}")
    if integrator not in ("euler", "rk4"):
        raise ScenarioError("integrator", f"must be 'euler' or 'rk4', got {integrator!r}")
    policies = policies or PolicySet()

    engine = _Engine(scenario, policies, resolve_stride)
    rc_d = scenario.capture_radius_defender
    rc_a = scenario.capture_radius_attacker

    times, rows_t, rows_a, rows_d, rows_h, rows_big, rows_small, rows_theta, rows_aim = (
        [], [], [], [], [], [], [], [], [])

    def record(t):
        times.append(t)
        rows_t.append(engine.pos["target"].copy())
        rows_a.append(engine.pos["attacker"].copy())
        rows_d.append(engine.pos["defender"].copy())
        rows_h.append((engine.heading["target"], engine.heading["attacker"],
                       engine.heading["defender"]))
        state = reduce_state(engine.pos["target"], engine.pos["attacker"], engine.pos["defender"])
        rows_big.append(state.R)
        rows_small.append(state.r)
        rows_theta.append(state.theta)
        rows_aim.append(engine.aim if engine.aim is not None else (math.nan, math.nan))
        return state

    def finish(outcome):
        return Trajectory(
            times=np.array(times), target=np.array(rows_t), attacker=np.array(rows_a),
            defender=np.array(rows_d), headings=np.array(rows_h), R=np.array(rows_big),
            r=np.array(rows_small), theta=np.array(rows_theta), aim=np.array(rows_aim),
            dt=dt,
        ), outcome

    state = record(0.0)
    if state.r <= rc_d:
        return finish(DefenderIntercepts(t_f=0.0, R_final=state.R,
                                         intercept_point=tuple(engine.pos["attacker"])))
    if state.R <= rc_a:
        return finish(AttackerCaptures(t=0.0))

    n_steps = int(math.floor(t_max / dt + 1e-9))  # never step past t_max
    prev = state
    for step in range(n_steps):
        engine.command(step, dt)
        rows_h[-1] = (engine.heading["target"], engine.heading["attacker"],
                      engine.heading["defender"])
        attacker_before = engine.pos["attacker"].copy()
        if integrator == "euler":
            engine.advance_euler(dt)
        else:
            engine.advance_rk4(dt)
        t = (step + 1) * dt
        state = record(t)

        cross_d = math.inf
        cross_a = math.inf
        if prev.r > rc_d >= state.r:
            cross_d = (prev.r - rc_d) / (prev.r - state.r)
        if prev.R > rc_a >= state.R:
            cross_a = (prev.R - rc_a) / (prev.R - state.R)
        # Defender wins simultaneous crossings; fractions within 1e-9 are
        # indistinguishable from float noise and count as simultaneous.
        if cross_d <= 1.0 and cross_d <= cross_a + 1e-9:
            frac = cross_d
            t_x = t - dt + frac * dt
            big_x = prev.R + frac * (state.R - prev.R)
            point = attacker_before + frac * (engine.pos["attacker"] - attacker_before)
            return finish(DefenderIntercepts(t_f=t_x, R_final=big_x,
                                             intercept_point=(float(point[0]), float(point[1]))))
        if cross_a <= 1.0:
            return finish(AttackerCaptures(t=t - dt + cross_a * dt))
        prev = state

    return finish(Timeout(t_max=t_max))
