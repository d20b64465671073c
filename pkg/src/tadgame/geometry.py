"""Dominance geometry for the three-agent engagement.

A Target aircraft (speed ``V_T``), an Attacker missile (``V_A``) and a
Defender missile (``V_D``) move with simple motion in the plane.  Two speed
ratios parametrize everything:

    alpha = V_T / V_A   (Target slower than the Attacker, 0 < alpha < 1)
    gamma = V_A / V_D   (Defender faster than the Attacker, 0 < gamma < 1)

All constructions here live in a rotating frame anchored on the
Attacker/Defender pair: the x axis runs from the Defender through the
Attacker, the origin is their midpoint, so the Attacker sits at ``(x_A, 0)``
and the Defender at ``(-x_A, 0)`` with ``x_A`` half their separation.

In that frame the set of points the Defender reaches no later than the
Attacker is bounded by an Apollonius circle with focus ratio gamma, centered
on the x axis at

    a   = (1 + gamma^2) / (1 - gamma^2) * x_A
    r_A = 2 * gamma / (1 - gamma^2) * x_A

Every interception of the Attacker by the Defender happens on that circle.
A second Apollonius circle built on the Attacker/Target pair with ratio
alpha bounds where the Target can outrun the Attacker; its tangency with the
first circle yields the critical speed ratio ``critical_alpha`` below which
a Target starting inside the Defender/Attacker circle cannot be saved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ScenarioError

__all__ = [
    "Scenario",
    "AdFrame",
    "ApolloniusCircle",
    "TargetRegion",
    "build_frame",
    "da_circle",
    "at_circle",
    "critical_alpha",
    "classify_target",
    "wrap_angle",
]


def wrap_angle(angle: float) -> float:
    """Map an angle to the interval (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped

# gamma -> 1 blows up a and r_A; refuse anything this close to the
# equal-speed regime instead of returning enormous circles.
GAMMA_MAX = 1.0 - 1e-6

# Relative tolerance deciding "on the circle" in classify_target.
BOUNDARY_RTOL = 1e-9


def _point(name: str, value) -> tuple[float, float]:
    try:
        x, y = float(value[0]), float(value[1])
    except (TypeError, ValueError, IndexError):
        raise ScenarioError(name, f"expected a 2-D point, got {value!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ScenarioError(name, f"coordinates must be finite, got ({x}, {y})")
    return (x, y)


@dataclass(frozen=True)
class Scenario:
    """World-frame initial conditions of one engagement.

    Positions are in arbitrary length units; speeds are normalized by the
    Attacker's, so the Target moves at ``alpha`` and the Defender at
    ``beta = 1/gamma``.  Capture radii: the Defender intercepts the Attacker
    at separation ``capture_radius_defender``; the Attacker captures the
    Target at ``capture_radius_attacker`` (0 means point capture).
    """

    target_pos: tuple[float, float]
    attacker_pos: tuple[float, float]
    defender_pos: tuple[float, float]
    alpha: float
    gamma: float
    capture_radius_defender: float = 1e-2
    capture_radius_attacker: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "target_pos", _point("target", self.target_pos))
        object.__setattr__(self, "attacker_pos", _point("attacker", self.attacker_pos))
        object.__setattr__(self, "defender_pos", _point("defender", self.defender_pos))
        for name in ("alpha", "gamma"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ScenarioError(name, f"must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not 0.0 < self.alpha < 1.0:
            raise ScenarioError("alpha", f"speed ratio V_T/V_A must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.gamma < GAMMA_MAX:
            raise ScenarioError(
                "gamma",
                f"speed ratio V_A/V_D must lie in (0, {GAMMA_MAX}) for a fast Defender, got {self.gamma}",
            )
        for name in ("capture_radius_defender", "capture_radius_attacker"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v < 0.0:
                raise ScenarioError(name, f"must be finite and non-negative, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.attacker_pos == self.defender_pos:
            raise ScenarioError("defender", "Attacker and Defender positions coincide")

    @property
    def beta(self) -> float:
        """Defender/Attacker speed ratio ``V_D/V_A = 1/gamma`` (> 1)."""
        return 1.0 / self.gamma


@dataclass(frozen=True)
class AdFrame:
    """Rotating frame anchored on the Attacker/Defender pair.

    ``x_axis`` points from the Defender toward the Attacker, so the Attacker
    maps to ``(half_separation, 0)`` and the Defender to
    ``(-half_separation, 0)``.  The frame is right-handed.
    """

    origin: tuple[float, float]
    x_axis: tuple[float, float]
    half_separation: float

    @property
    def y_axis(self) -> tuple[float, float]:
        return (-self.x_axis[1], self.x_axis[0])

    def to_frame(self, world_point) -> np.ndarray:
        dx = world_point[0] - self.origin[0]
        dy = world_point[1] - self.origin[1]
        ex, ey = self.x_axis
        return np.array([dx * ex + dy * ey, -dx * ey + dy * ex])

    def to_world(self, frame_point) -> np.ndarray:
        ex, ey = self.x_axis
        fx, fy = frame_point[0], frame_point[1]
        return np.array([self.origin[0] + fx * ex - fy * ey,
                         self.origin[1] + fx * ey + fy * ex])


class TargetRegion(enum.Enum):
    """Position of the Target relative to the Defender/Attacker circle."""

    INSIDE = "inside"
    OUTSIDE = "outside"
    ON_BOUNDARY = "on_boundary"


@dataclass(frozen=True)
class ApolloniusCircle:
    """Constant-distance-ratio locus between two agents, in frame coords.

    ``kind`` is ``"DA"`` for the Defender/Attacker circle (ratio gamma) or
    ``"AT"`` for the Attacker/Target circle (ratio alpha).
    """

    center: tuple[float, float]
    radius: float
    kind: str = field(default="DA")

    def __post_init__(self):
        if not self.radius > 0.0:
            raise GeometryError(f"Apollonius circle radius must be positive, got {self.radius}")

    def boundary_point(self, angle: float) -> tuple[float, float]:
        """Point of the circle at polar angle ``angle`` about its center."""
        return (self.center[0] + self.radius * math.cos(angle),
                self.center[1] + self.radius * math.sin(angle))


def build_frame(scenario: Scenario) -> AdFrame:
    """Attach the rotating frame to the scenario's Attacker and Defender."""
    ax, ay = scenario.attacker_pos
    dx, dy = scenario.defender_pos
    sep = math.hypot(ax - dx, ay - dy)
    if sep == 0.0:
        raise GeometryError("cannot build a frame on coincident Attacker and Defender")
    return AdFrame(
        origin=((ax + dx) / 2.0, (ay + dy) / 2.0),
        x_axis=((ax - dx) / sep, (ay - dy) / sep),
        half_separation=sep / 2.0,
    )


def da_circle(x_a: float, gamma: float) -> ApolloniusCircle:
    """Defender/Attacker dominance circle for half-separation ``x_a``.

    Center ``(a, 0)`` and radius ``r_A`` follow from the ratio definition
    dist(A, P) / dist(D, P) = gamma on the boundary:

        a   = (1 + gamma^2) / (1 - gamma^2) * x_a
        r_A = 2 * gamma / (1 - gamma^2) * x_a
    """
    if not x_a > 0.0:
        raise GeometryError(f"half-separation must be positive, got {x_a}")
    if not 0.0 < gamma < GAMMA_MAX:
        raise GeometryError(
            f"Defender/Attacker circle needs a fast Defender (0 < gamma < {GAMMA_MAX}), got {gamma}"
        )
    one_minus = 1.0 - gamma * gamma
    a = (1.0 + gamma * gamma) / one_minus * x_a
    r_a = 2.0 * gamma / one_minus * x_a
    return ApolloniusCircle(center=(a, 0.0), radius=r_a, kind="DA")


def at_circle(target, x_a: float, alpha: float) -> ApolloniusCircle:
    """Attacker/Target dominance circle (frame coordinates).

    Boundary points P satisfy dist(T, P) / dist(A, P) = alpha.  With
    ``d = dist(A, T)`` the circle has

        x_O = (x_T - alpha^2 * x_a) / (1 - alpha^2)
        y_O = y_T / (1 - alpha^2)
        r_O = alpha * d / (1 - alpha^2)

    and its center is collinear with A and T, beyond T as seen from A.
    """
    if not 0.0 < alpha < 1.0:
        raise GeometryError(f"Attacker/Target circle needs 0 < alpha < 1, got {alpha}")
    x_t, y_t = float(target[0]), float(target[1])
    d = math.hypot(x_a - x_t, y_t)
    if d == 0.0:
        raise GeometryError("Target coincides with the Attacker: zero-diameter circle")
    one_minus = 1.0 - alpha * alpha
    return ApolloniusCircle(
        center=((x_t - alpha * alpha * x_a) / one_minus, y_t / one_minus),
        radius=alpha * d / one_minus,
        kind="AT",
    )


def critical_alpha(target, x_a: float, gamma: float) -> float:
    """Minimum Target/Attacker speed ratio for which the Target can be saved.

    For a Target inside the Defender/Attacker circle this is the ratio at
    which the two Apollonius circles become internally tangent:

        (gamma * dist(D, T) - dist(A, T)) / (2 * gamma * x_a)

    with A = (x_a, 0) and D = (-x_a, 0) in frame coordinates.  A Target
    outside the circle needs no minimum speed, so negative formula values
    are clamped to 0.
    """
    if not x_a > 0.0:
        raise GeometryError(f"half-separation must be positive, got {x_a}")
    if not 0.0 < gamma < 1.0:
        raise GeometryError(f"critical speed ratio needs 0 < gamma < 1, got {gamma}")
    x_t, y_t = float(target[0]), float(target[1])
    value = (gamma * math.hypot(x_a + x_t, y_t) - math.hypot(x_a - x_t, y_t)) / (2.0 * gamma * x_a)
    return max(value, 0.0)


def classify_target(target, circle: ApolloniusCircle) -> TargetRegion:
    """Locate the Target relative to a dominance circle.

    Points within ``BOUNDARY_RTOL * radius`` of the boundary are reported as
    ON_BOUNDARY; otherwise the comparison is strict.
    """
    dist = math.hypot(target[0] - circle.center[0], target[1] - circle.center[1])
    if abs(dist - circle.radius) <= BOUNDARY_RTOL * circle.radius:
        return TargetRegion.ON_BOUNDARY
    return TargetRegion.INSIDE if dist < circle.radius else TargetRegion.OUTSIDE
