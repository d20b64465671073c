"""Stationary interception angles via a complex sextic.

Every candidate interception point lies on the Defender/Attacker dominance
circle and is parametrized by the polar angle ``phi`` about the circle
center, measured from the ray pointing at the Attacker (positive toward +y):

    I(phi) = (a - r*cos(phi), r*sin(phi))

with ``a`` the center abscissa and ``r`` the circle radius.  Writing

    m = distance from circle center to the Attacker
    n = distance from circle center to the Target
    lam = polar angle of the Target about the center (same convention)

the engagement cost depends on ``phi`` only through the two chord lengths

    dist(I, T)^2 = r^2 + n^2 - 2*n*r*cos(phi - lam)
    dist(A, I)^2 = r^2 + m^2 - 2*m*r*cos(phi)

and its stationary angles satisfy

    n^2 sin^2(phi - lam) / dist(I,T)^2 = alpha^2 m^2 sin^2(phi) / dist(A,I)^2.

Substituting z = e^{i phi} turns that condition into a degree-6 polynomial
in z with complex coefficients.  Its six roots, reduced to their arguments,
are the candidate angles; evaluating the regime cost at each one picks the
optimum.  Roots off the unit circle come in (z, 1/conj(z)) pairs sharing one
argument and carry a nonzero stationarity residual, which is recorded, never
filtered.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import GeometryError, RootingError, SingularityError
from .geometry import da_circle

__all__ = [
    "GameGeometry",
    "SexticCoefficients",
    "CandidateAngles",
    "build_geometry",
    "build_sextic",
    "find_roots",
    "candidate_angles",
    "stationarity_residual",
]

# Two deduplicated candidate angles are considered the same stationary point
# below this separation (radians).
ANGLE_DEDUP_TOL = 1e-9

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GameGeometry:
    """Reduced parameters feeding the sextic and the cost functions.

    All lengths are in frame units; ``target_polar_angle`` follows the
    module-level angle convention.
    """

    center_x: float            # abscissa a of the dominance-circle center
    radius: float              # dominance-circle radius
    center_to_attacker: float  # m = a - x_A
    center_to_target: float    # n = dist(center, Target)
    target_polar_angle: float  # lam
    alpha: float


@dataclass(frozen=True)
class SexticCoefficients:
    """Coefficients ``c[k]`` of ``e^{i k phi}`` for k = 0..6.

    Stored normalized by the squared circle radius, which makes them
    dimensionless; the root set is unaffected by the overall scale.
    """

    c: tuple[complex, complex, complex, complex, complex, complex, complex]


@dataclass(frozen=True)
class CandidateAngles:
    """Deduplicated stationary-angle candidates plus raw root diagnostics.

    ``angles``, ``residuals`` and ``moduli`` are aligned; ``roots`` keeps
    every root returned by the polynomial solver (with multiplicity).
    """

    angles: tuple[float, ...]
    residuals: tuple[float, ...]
    moduli: tuple[float, ...]
    roots: tuple[complex, ...]


def build_geometry(target, x_a: float, alpha: float, gamma: float) -> GameGeometry:
    """Reduce frame-coordinate inputs to the quantities the sextic needs."""
    circle = da_circle(x_a, gamma)
    a = circle.center[0]
    x_t, y_t = float(target[0]), float(target[1])
    n = math.hypot(a - x_t, y_t)
    if n <= 1e-12 * circle.radius:
        raise GeometryError("Target sits at the dominance-circle center: polar angle undefined")
    return GameGeometry(
        center_x=a,
        radius=circle.radius,
        center_to_attacker=a - x_a,
        center_to_target=n,
        target_polar_angle=math.atan2(y_t, a - x_t),
        alpha=alpha,
    )


def build_sextic(geom: GameGeometry) -> SexticCoefficients:
    """Assemble the degree-6 polynomial whose roots are stationary angles.

    With l = e^{i lam} the coefficients of e^{i k phi}, k = 6..0, read:

        c6 = n r / l * (1 - n / (alpha^2 m l))
        c5 = (n / (alpha m l))^2 (r^2 + m^2) - r^2 - n^2
        c4 = n r * (n (2 l^2 - 1) / (alpha^2 m l^2) + l - 2/l)
        c3 = 2 (r^2 + n^2 - (n / (alpha m))^2 (r^2 + m^2))
        c2 = n r * (n (2 - l^2) / (alpha^2 m) - 2 l + 1/l)
        c1 = (n l / (alpha m))^2 (r^2 + m^2) - r^2 - n^2
        c0 = n r l * (1 - n l / (alpha^2 m))
    """
    r = geom.radius
    m = geom.center_to_attacker
    n = geom.center_to_target
    alpha = geom.alpha
    if alpha <= 0.0:
        raise GeometryError(f"sextic needs alpha > 0, got {alpha}")
    if m <= 0.0 or n <= 0.0:
        raise GeometryError(f"sextic needs positive center distances, got m={m}, n={n}")
    l = cmath.exp(1j * geom.target_polar_angle)
    a2m = alpha * alpha * m
    nr = n * r
    s2 = r * r + m * m
    t2 = r * r + n * n
    k = n / (alpha * m)

    c6 = nr / l * (1.0 - n / (a2m * l))
    c5 = (k / l) ** 2 * s2 - t2
    c4 = nr * (n * (2.0 * l * l - 1.0) / (a2m * l * l) + l - 2.0 / l)
    c3 = 2.0 * (t2 - k * k * s2)
    c2 = nr * (n * (2.0 - l * l) / a2m - 2.0 * l + 1.0 / l)
    c1 = (k * l) ** 2 * s2 - t2
    c0 = nr * l * (1.0 - n * l / a2m)

    inv = 1.0 / (r * r)
    return SexticCoefficients(c=(c0 * inv, c1 * inv, c2 * inv, c3 * inv,
                                 c4 * inv, c5 * inv, c6 * inv))


def _horner(coeffs_desc, z):
    acc = 0.0 + 0.0j
    for c in coeffs_desc:
        acc = acc * z + c
    return acc


_EPS = 2.220446049250313e-16


def _horner_with_floor(coeffs_desc, z):
    """Polynomial value plus a running bound on its evaluation noise.

    Near a multiple root the value sinks into that noise long before the
    iteration steps fall below any fixed tolerance; the bound tells us when
    a root estimate cannot be improved further.
    """
    mag = abs(z)
    acc = 0.0 + 0.0j
    weight = 0.0
    for c in coeffs_desc:
        acc = acc * z + c
        weight = weight * mag + abs(c)
    return acc, 8.0 * len(coeffs_desc) * _EPS * weight


def find_roots(coeffs, tol: float = 1e-12, max_iter: int = 500) -> list[complex]:
    """All roots of the polynomial, by simultaneous Aberth iteration.

    Accepts a ``SexticCoefficients`` or any ascending coefficient sequence.
    Leading coefficients that are negligible against the largest one are
    deflated away first, so the iteration always runs at the true degree.

    Raises ``RootingError`` if the iteration does not converge or a returned
    root has residual above ``1e-9 * max|c|``.
    """
    asc = list(coeffs.c) if isinstance(coeffs, SexticCoefficients) else [complex(v) for v in coeffs]
    cmax = max(abs(v) for v in asc)
    if cmax == 0.0:
        raise GeometryError("all polynomial coefficients vanish")
    desc = [v / cmax for v in reversed(asc)]
    while len(desc) > 1 and abs(desc[0]) <= 1e-14:
        desc.pop(0)
    n = len(desc) - 1
    if n == 0:
        return []
    if n == 1:
        return [-desc[1] / desc[0]]

    deriv = [desc[i] * (n - i) for i in range(n)]
    # Start just off the unit circle, where this problem's roots cluster;
    # the phase offset breaks any conjugate symmetry of the root set.
    z = [1.15 * cmath.exp(2j * math.pi * (k + 0.35) / n) for k in range(n)]

    converged = False
    for _ in range(max_iter):
        delta_max = 0.0
        active = False
        for i in range(n):
            zi = z[i]
            p, floor = _horner_with_floor(desc, zi)
            if abs(p) <= floor:
                continue  # at the attainable accuracy for this root
            active = True
            dp = _horner(deriv, zi)
            if dp == 0.0:
                zi += 1e-8 * (1.0 + abs(zi))
                p = _horner(desc, zi)
                dp = _horner(deriv, zi)
            w = p / dp
            s = 0.0 + 0.0j
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff == 0.0:
                        diff = 1e-14
                    s += 1.0 / diff
            denom = 1.0 - w * s
            step = w if denom == 0.0 else w / denom
            z[i] = zi - step
            delta_max = max(delta_max, abs(step) / (1.0 + abs(z[i])))
        if not active or delta_max < tol:
            converged = True
            break
    if not converged:
        raise RootingError(f"Aberth iteration did not reach tol={tol} in {max_iter} sweeps")
    worst = max(abs(_horner(desc, zi)) for zi in z)
    if worst > 1e-9:
        raise RootingError(f"root residual {worst:.2e} exceeds 1e-9 after convergence")
    return z


def candidate_angles(geom: GameGeometry, roots) -> CandidateAngles:
    """Convert roots to angle candidates, deduplicating repeated arguments.

    Every root contributes its argument regardless of modulus: genuine
    stationary angles sit on the unit circle, while off-circle reflection
    pairs collapse to one angle and are exposed by a large residual.
    """
    entries = []
    for z in roots:
        ang = math.atan2(z.imag, z.real)
        if ang <= -math.pi:
            ang = math.pi
        entries.append((ang, abs(z)))
    entries.sort()

    kept: list[tuple[float, float]] = []
    for ang, mod in entries:
        if kept and ang - kept[-1][0] < ANGLE_DEDUP_TOL:
            continue
        kept.append((ang, mod))
    # the interval endpoints -pi and pi are the same direction
    if len(kept) > 1 and (kept[0][0] + _TWO_PI) - kept[-1][0] < ANGLE_DEDUP_TOL:
        kept.pop()

    angles = tuple(a for a, _ in kept)
    moduli = tuple(m for _, m in kept)
    residuals = []
    for ang in angles:
        try:
            residuals.append(stationarity_residual(geom, ang))
        except SingularityError:
            residuals.append(math.inf)
    return CandidateAngles(angles=angles, residuals=tuple(residuals),
                           moduli=moduli, roots=tuple(roots))


def stationarity_residual(geom: GameGeometry, phi: float) -> float:
    """Dimensionless defect of the shared stationarity condition at ``phi``.

        F(phi) = n^2 sin^2(phi - lam) / dist(I,T)^2
               - alpha^2 m^2 sin^2(phi) / dist(A,I)^2

    F vanishes exactly at the stationary angles of both regime costs (their
    derivatives differ only in a relative sign, which squaring removes), and
    it changes sign across each simple stationary angle.
    """
    r = geom.radius
    m = geom.center_to_attacker
    n = geom.center_to_target
    lam = geom.target_polar_angle
    q_t = r * r + n * n - 2.0 * n * r * math.cos(phi - lam)
    q_a = r * r + m * m - 2.0 * m * r * math.cos(phi)
    scale = (r + n) ** 2 + (r + m) ** 2
    if q_t <= 1e-28 * scale or q_a <= 1e-28 * scale:
        raise SingularityError(
            "interception point coincides with the Target or the Attacker at this angle"
        )
    st = n * math.sin(phi - lam)
    sa = geom.alpha * m * math.sin(phi)
    return st * st / q_t - sa * sa / q_a
