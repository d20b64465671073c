"""Pontryagin formulation of the engagement and its shooting solver.

The three-agent engagement reduces to three states: the Attacker/Target
range ``R``, the Attacker/Defender range ``r``, and the angle ``theta``
between the two rays at the Attacker.  Headings are expressed relative to
those rays: ``phi`` for the Target (from the ray A->T), ``chi`` for the
Attacker (from the ray A->D, so ``chi = theta`` points it at the Target)
and ``psi`` for the Defender (from the ray D->A).  With speeds normalized
by the Attacker's (Target ``alpha``, Defender ``beta = 1/gamma``):

    dR/dt     = alpha cos(phi) - cos(theta - chi)
    dr/dt     = -cos(chi) - beta cos(psi)
    dtheta/dt = (-alpha sin(phi) + sin(theta - chi)) / R
              + (-beta sin(psi) + sin(chi)) / r

The Target/Defender team maximizes the terminal range ``R(t_f)`` subject to
capture ``r(t_f) = r_c`` at free final time, the Attacker minimizes it.
The adjoint variables (lam_R, lam_r, lam_theta) obey the negative gradient
of the Hamiltonian, the saddle-point headings follow in closed form from
the first-order conditions, and transversality pins the whole terminal
manifold: lam_R and lam_theta vanish, while lam_r solves a quadratic forced
by H(t_f) = 0.  That reduces the boundary-value problem to three unknowns,
(R(t_f), theta(t_f), t_f), which a damped Newton iteration shoots backward
to match the initial ranges and angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ShootingError, SingularityError
from .geometry import Scenario, wrap_angle

__all__ = [
    "ReducedState",
    "Costate",
    "HeadingTriple",
    "TpbvpSolution",
    "optimal_headings",
    "reduced_dynamics",
    "costate_dynamics",
    "hamiltonian",
    "terminal_lambda_r",
    "solve_tpbvp",
]

# Smallest admissible magnitude for the heading-feedback denominators.
SINGULAR_TOL = 1e-14

# Capture radius substituted when a scenario requests exact point capture,
# which backward shooting cannot start from.
POINT_CAPTURE_RC = 1e-2


@dataclass(frozen=True)
class ReducedState:
    """Ranges and included angle of the engagement; ``los_angle`` is the
    world-frame direction of the ray A->T, kept only for de-reduction."""

    R: float
    r: float
    theta: float
    los_angle: float = 0.0

    def __post_init__(self):
        if not (self.R > 0.0 and self.r > 0.0):
            raise GeometryError(f"ranges must be positive, got R={self.R}, r={self.r}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class Costate:
    lam_R: float
    lam_r: float
    lam_theta: float


@dataclass(frozen=True)
class HeadingTriple:
    """Relative headings with their exact sine/cosine pairs.

    ``chi_s`` and ``chi_c`` are the unnormalized components of the
    Attacker's first-order condition (diagnostics; NaN when the triple was
    built from raw angles rather than the feedback law).
    """

    phi: float
    psi: float
    chi: float
    sin_phi: float
    cos_phi: float
    sin_psi: float
    cos_psi: float
    sin_chi: float
    cos_chi: float
    chi_s: float = math.nan
    chi_c: float = math.nan

    @classmethod
    def from_angles(cls, phi: float, psi: float, chi: float) -> "HeadingTriple":
        return cls(phi=phi, psi=psi, chi=chi,
                   sin_phi=math.sin(phi), cos_phi=math.cos(phi),
                   sin_psi=math.sin(psi), cos_psi=math.cos(psi),
                   sin_chi=math.sin(chi), cos_chi=math.cos(chi))


def _feedback(R, r, theta, lam_R, lam_r, lam_theta):
    """Saddle-point heading sines/cosines from the first-order conditions."""
    den_psi = math.hypot(lam_r, lam_theta / r)
    den_phi = math.hypot(1.0 - lam_R, lam_theta / R)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    chi_s = (1.0 - lam_R) * sin_t - lam_theta / R * cos_t + lam_theta / r
    chi_c = (1.0 - lam_R) * cos_t + lam_theta / R * sin_t - lam_r
    den_chi = math.hypot(chi_s, chi_c)
    if den_psi < SINGULAR_TOL or den_phi < SINGULAR_TOL or den_chi < SINGULAR_TOL:
        raise SingularityError(
            "singular arc: a heading-feedback denominator vanished "
            f"(psi {den_psi:.2e}, phi {den_phi:.2e}, chi {den_chi:.2e})"
        )
    return (lam_theta / (R * den_phi), (1.0 - lam_R) / den_phi,
            lam_theta / (r * den_psi), lam_r / den_psi,
            chi_s / den_chi, chi_c / den_chi,
            chi_s, chi_c)


def optimal_headings(state: ReducedState, costate: Costate,
                     alpha: float, beta: float) -> HeadingTriple:
    """Closed-form saddle-point headings at one (state, costate) point.

    The Target and Defender branches minimize the Hamiltonian in phi and
    psi, the Attacker branch maximizes it in chi; the second-order signs
    hold automatically on these branches.  ``alpha`` and ``beta`` do not
    enter the closed forms but are kept for signature symmetry with the
    dynamics evaluators.
    """
    del alpha, beta
    sp, cp, ss, cs, sc, cc, chi_s, chi_c = _feedback(
        state.R, state.r, state.theta,
        costate.lam_R, costate.lam_r, costate.lam_theta)
    return HeadingTriple(
        phi=math.atan2(sp, cp), psi=math.atan2(ss, cs), chi=math.atan2(sc, cc),
        sin_phi=sp, cos_phi=cp, sin_psi=ss, cos_psi=cs, sin_chi=sc, cos_chi=cc,
        chi_s=chi_s, chi_c=chi_c)


def _relative_trig(theta: float, h: HeadingTriple):
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    sin_tc = sin_t * h.cos_chi - cos_t * h.sin_chi
    cos_tc = cos_t * h.cos_chi + sin_t * h.sin_chi
    return sin_tc, cos_tc


def reduced_dynamics(state: ReducedState, headings: HeadingTriple,
                     alpha: float, beta: float) -> tuple[float, float, float]:
    """Time derivatives (dR, dr, dtheta) under the given headings."""
    sin_tc, cos_tc = _relative_trig(state.theta, headings)
    d_big = alpha * headings.cos_phi - cos_tc
    d_small = -headings.cos_chi - beta * headings.cos_psi
    d_theta = ((-alpha * headings.sin_phi + sin_tc) / state.R
               + (-beta * headings.sin_psi + headings.sin_chi) / state.r)
    return (d_big, d_small, d_theta)


def costate_dynamics(state: ReducedState, costate: Costate, headings: HeadingTriple,
                     alpha: float, beta: float) -> tuple[float, float, float]:
    """Adjoint derivatives; equal to minus the state gradient of the
    Hamiltonian at the same point."""
    sin_tc, cos_tc = _relative_trig(state.theta, headings)
    d_lam_big = costate.lam_theta / (state.R * state.R) * (sin_tc - alpha * headings.sin_phi)
    d_lam_small = costate.lam_theta / (state.r * state.r) * (headings.sin_chi - beta * headings.sin_psi)
    d_lam_theta = (1.0 - costate.lam_R) * sin_tc - costate.lam_theta / state.R * cos_tc
    return (d_lam_big, d_lam_small, d_lam_theta)


def hamiltonian(state: ReducedState, costate: Costate, headings: HeadingTriple,
                alpha: float, beta: float) -> float:
    """Hamiltonian of the reduced game (zero along optimal trajectories)."""
    sin_tc, cos_tc = _relative_trig(state.theta, headings)
    return (cos_tc - alpha * headings.cos_phi
            + (alpha * headings.cos_phi - cos_tc) * costate.lam_R
            - (headings.cos_chi + beta * headings.cos_psi) * costate.lam_r
            + ((-alpha * headings.sin_phi + sin_tc) / state.R
               + (-beta * headings.sin_psi + headings.sin_chi) / state.r) * costate.lam_theta)


def terminal_lambda_r(theta_f: float, alpha: float, beta: float) -> float:
    """Terminal value of lam_r from the free-final-time condition.

    H(t_f) = 0 with lam_R(t_f) = lam_theta(t_f) = 0 forces

        (beta^2 - 1) lam_r^2 + 2 (alpha beta + cos theta_f) lam_r
        + alpha^2 - 1 = 0.

    Of the two roots only the positive one satisfies the unsquared
    condition under the feedback headings; it also gives dr/dt < 0 at
    capture (Defender closing), so it is returned.
    """
    if not beta > 1.0:
        raise GeometryError(f"terminal condition needs beta > 1, got {beta}")
    quad_a = beta * beta - 1.0
    quad_b = 2.0 * (alpha * beta + math.cos(theta_f))
    quad_c = alpha * alpha - 1.0
    disc = quad_b * quad_b - 4.0 * quad_a * quad_c
    if disc < 0.0:
        raise ShootingError(f"no terminal adjoint for theta_f={theta_f}: negative discriminant")
    return (-quad_b + math.sqrt(disc)) / (2.0 * quad_a)


@dataclass(frozen=True)
class TpbvpSolution:
    """Converged shooting solution on a uniform time grid.

    ``states`` columns are (R, r, theta), ``costates`` are
    (lam_R, lam_r, lam_theta), ``world`` columns are
    (x_T, y_T, x_A, y_A, x_D, y_D) from the forward reconstruction.
    """

    times: np.ndarray
    states: np.ndarray
    costates: np.ndarray
    world: np.ndarray
    t_f: float
    terminal_R: float
    capture_radius: float
    intercept_world: tuple[float, float]
    converged: bool
    newton_iterations: int
    residual_norm: float


class _Diverged(Exception):
    pass


def _rhs(y, alpha, beta):
    R, r, theta, lam_R, lam_r, lam_theta = y
    if not (R > 0.0 and r > 0.0):
        raise _Diverged
    sp, cp, ss, cs, sc, cc, _, _ = _feedback(R, r, theta, lam_R, lam_r, lam_theta)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    sin_tc = sin_t * cc - cos_t * sc
    cos_tc = cos_t * cc + sin_t * sc
    return (alpha * cp - cos_tc,
            -cc - beta * cs,
            (-alpha * sp + sin_tc) / R + (-beta * ss + sc) / r,
            lam_theta / (R * R) * (sin_tc - alpha * sp),
            lam_theta / (r * r) * (sc - beta * ss),
            (1.0 - lam_R) * sin_tc - lam_theta / R * cos_tc)


def _rk4_step(rhs, y, h, alpha, beta):
    k1 = rhs(y, alpha, beta)
    k2 = rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k1)), alpha, beta)
    k3 = rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k2)), alpha, beta)
    k4 = rhs(tuple(a + h * b for a, b in zip(y, k3)), alpha, beta)
    return tuple(a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def _substeps(range_now: float, h_abs: float, beta: float) -> int:
    """Sub-step count keeping the relative change of the A-D range per
    sub-step below ~10%; near capture the right side varies on the scale of
    the range itself and a coarse step there wrecks the conserved
    Hamiltonian."""
    closing = (1.0 + beta) * h_abs
    return min(128, max(1, math.ceil(closing / (0.1 * range_now))))


def _rk4_back(y_f, t_f, alpha, beta, n_steps, store=False):
    """Integrate the coupled system from t_f down to 0 on a uniform grid,
    refining internally while the A-D range is comparable to the step."""
    h = -t_f / n_steps
    y = y_f
    rows = [y] if store else None
    for _ in range(n_steps):
        m = _substeps(y[1], abs(h), beta)
        sub = h / m
        for _ in range(m):
            y = _rk4_step(_rhs, y, sub, alpha, beta)
        if store:
            rows.append(y)
    return (y, rows) if store else y


def _initial_reduced(scenario: Scenario):
    tx, ty = scenario.target_pos
    ax, ay = scenario.attacker_pos
    dx, dy = scenario.defender_pos
    big = math.hypot(tx - ax, ty - ay)
    small = math.hypot(dx - ax, dy - ay)
    if big == 0.0:
        raise GeometryError("Target coincides with the Attacker")
    los = math.atan2(ty - ay, tx - ax)
    theta = wrap_angle(math.atan2(dy - ay, dx - ax) - los)
    return big, small, theta, los


def _seed_from_solution(scenario: Scenario, sol, big_0: float):
    """(R_f, theta_f, t_f) guess from an analytic solution: at capture the
    Attacker sits at the aim point, the Target at its straight-line terminal
    position, and the Defender arrives along the ray from its start."""
    ix, iy = sol.intercept_world
    dx, dy = scenario.defender_pos
    tpx, tpy = sol.target_terminal
    if math.hypot(dx - ix, dy - iy) == 0.0 or math.hypot(tpx - ix, tpy - iy) == 0.0:
        return None
    theta_f = wrap_angle(math.atan2(dy - iy, dx - ix) - math.atan2(tpy - iy, tpx - ix))
    big_f = max(abs(sol.cost), 1e-3 * big_0)
    return (big_f, theta_f, sol.t_f)


def solve_tpbvp(scenario: Scenario, seed=None, n_steps: int = 2000,
                max_newton: int = 40) -> TpbvpSolution:
    """Shoot the boundary-value problem backward from the terminal manifold.

    Unknowns are (R(t_f), theta(t_f), t_f); the remaining terminal values
    are fixed by transversality (``r = r_c``, ``lam_R = lam_theta = 0``,
    ``lam_r`` from ``terminal_lambda_r``).  Newton iterates on the mismatch
    of (R, r, theta) at t = 0 with a forward-difference Jacobian and step
    halving, and stops when the residual norm drops below
    ``1e-8 * max(R_0, r_0, 1)``.

    ``seed`` may be an ``InterceptionSolution`` or an explicit
    ``(R_f, theta_f, t_f)`` triple; by default the analytic solver provides
    the warm start, with a crude closing-geometry estimate as last resort.
    """
    alpha, beta = scenario.alpha, scenario.beta
    r_c = scenario.capture_radius_defender
    if r_c <= 0.0:
        r_c = POINT_CAPTURE_RC
    big_0, small_0, theta_0, _ = _initial_reduced(scenario)
    if small_0 <= r_c:
        raise GeometryError(
            f"initial Attacker/Defender range {small_0} is already inside the capture radius {r_c}")

    guess = None
    if seed is not None and not hasattr(seed, "intercept_world"):
        guess = (float(seed[0]), float(seed[1]), float(seed[2]))
    else:
        sol = seed
        if sol is None:
            from . import solver  # deferred: solver does not depend on this module

            try:
                sol = solver.solve(scenario)
            except Exception:
                sol = None
        if sol is not None:
            guess = _seed_from_solution(scenario, sol, big_0)
    if guess is None:
        t_guess = small_0 / (1.0 + beta)
        guess = (max(big_0 + (alpha - 1.0) * t_guess, 0.3 * big_0), theta_0, t_guess)

    tol = 1e-8 * max(big_0, small_0, 1.0)

    def residual(u):
        big_f, theta_f, t_f = u
        if t_f <= 0.0 or big_f <= 0.0:
            return None
        try:
            y_f = (big_f, r_c, theta_f, 0.0, terminal_lambda_r(theta_f, alpha, beta), 0.0)
            y_0 = _rk4_back(y_f, t_f, alpha, beta, n_steps)
        except (_Diverged, SingularityError, ShootingError, ZeroDivisionError, OverflowError):
            return None
        if not all(math.isfinite(v) for v in y_0):
            return None
        return np.array([y_0[0] - big_0, y_0[1] - small_0, wrap_angle(y_0[2] - theta_0)])

    u = np.array(guess, dtype=float)
    res = residual(u)
    if res is None:
        raise ShootingError("seed guess diverged before the first Newton step", best_iterate=tuple(u))
    iterations = 0
    norm = float(np.linalg.norm(res))
    while norm >= tol:
        if iterations >= max_newton:
            raise ShootingError(
                f"shooting did not converge in {max_newton} Newton steps (residual {norm:.3e})",
                best_iterate=tuple(u), residual_norm=norm)
        jac = np.empty((3, 3))
        for j in range(3):
            step = 1e-7 * max(abs(u[j]), 1.0)
            bumped = u.copy()
            bumped[j] += step
            res_j = residual(bumped)
            if res_j is None:
                bumped[j] = u[j] - step
                res_j = residual(bumped)
                if res_j is None:
                    raise ShootingError("Jacobian column evaluation diverged",
                                        best_iterate=tuple(u), residual_norm=norm)
                jac[:, j] = (res - res_j) / step
            else:
                jac[:, j] = (res_j - res) / step
        try:
            direction = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            raise ShootingError("singular shooting Jacobian",
                                best_iterate=tuple(u), residual_norm=norm) from None
        damping = 1.0
        best = None
        for _ in range(8):
            trial = u + damping * direction
            res_t = residual(trial)
            if res_t is not None:
                norm_t = float(np.linalg.norm(res_t))
                if best is None or norm_t < best[0]:
                    best = (norm_t, trial, res_t)
                if norm_t < norm:
                    break
            damping *= 0.5
        if best is None:
            raise ShootingError("all damped Newton steps diverged",
                                best_iterate=tuple(u), residual_norm=norm)
        norm, u, res = best
        iterations += 1

    big_f, theta_f, t_f = u
    y_f = (big_f, r_c, theta_f, 0.0, terminal_lambda_r(theta_f, alpha, beta), 0.0)
    _, rows = _rk4_back(y_f, t_f, alpha, beta, n_steps, store=True)
    grid = np.array(rows[::-1])
    times = np.linspace(0.0, t_f, n_steps + 1)
    world = _reconstruct_world(scenario, grid[0, 3:], t_f, n_steps)
    intercept = (float(world[-1, 2]), float(world[-1, 3]))
    return TpbvpSolution(
        times=times,
        states=grid[:, :3],
        costates=grid[:, 3:],
        world=world,
        t_f=float(t_f),
        terminal_R=float(big_f),
        capture_radius=r_c,
        intercept_world=intercept,
        converged=True,
        newton_iterations=iterations,
        residual_norm=norm,
    )


def _world_rhs(w, alpha, beta):
    x_t, y_t, x_a, y_a, x_d, y_d, lam_R, lam_r, lam_theta = w
    big = math.hypot(x_t - x_a, y_t - y_a)
    small = math.hypot(x_d - x_a, y_d - y_a)
    if not (big > 0.0 and small > 0.0):
        raise _Diverged
    los = math.atan2(y_t - y_a, x_t - x_a)
    theta = wrap_angle(math.atan2(y_d - y_a, x_d - x_a) - los)
    sp, cp, ss, cs, sc, cc, _, _ = _feedback(big, small, theta, lam_R, lam_r, lam_theta)
    phi = math.atan2(sp, cp)
    psi = math.atan2(ss, cs)
    chi = math.atan2(sc, cc)
    head_t = phi + los
    head_a = los + theta - chi
    head_d = psi + theta + los - math.pi
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    sin_tc = sin_t * cc - cos_t * sc
    cos_tc = cos_t * cc + sin_t * sc
    return (alpha * math.cos(head_t), alpha * math.sin(head_t),
            math.cos(head_a), math.sin(head_a),
            beta * math.cos(head_d), beta * math.sin(head_d),
            lam_theta / (big * big) * (sin_tc - alpha * sp),
            lam_theta / (small * small) * (sc - beta * ss),
            (1.0 - lam_R) * sin_tc - lam_theta / big * cos_tc)


def _reconstruct_world(scenario: Scenario, costate_0, t_f: float, n_steps: int) -> np.ndarray:
    """Forward RK4 pass in world coordinates using the converged adjoints."""
    alpha, beta = scenario.alpha, scenario.beta
    w = (scenario.target_pos[0], scenario.target_pos[1],
         scenario.attacker_pos[0], scenario.attacker_pos[1],
         scenario.defender_pos[0], scenario.defender_pos[1],
         float(costate_0[0]), float(costate_0[1]), float(costate_0[2]))
    h = t_f / n_steps
    rows = [w]
    for _ in range(n_steps):
        range_now = math.hypot(w[4] - w[2], w[5] - w[3])
        m = _substeps(range_now, h, beta)
        sub = h / m
        for _ in range(m):
            w = _rk4_step(_world_rhs, w, sub, alpha, beta)
        rows.append(w)
    return np.array(rows)[:, :6]
