"""Shared fixtures' helpers: scenario generators and finite-difference oracles."""

from __future__ import annotations

import math

import numpy as np

from tadgame import (
    Costate,
    HeadingTriple,
    ReducedState,
    Scenario,
    build_frame,
    build_geometry,
    da_circle,
    hamiltonian,
)

# Initial conditions of the three worked engagements used throughout.
EX1 = dict(target_pos=(0.5, 4.0), attacker_pos=(4.0, 0.0), defender_pos=(-4.0, 0.0),
           alpha=0.25, gamma=0.8)
EX2 = dict(target_pos=(3.1, 2.7), attacker_pos=(6.0, 0.0), defender_pos=(-6.0, 0.0),
           alpha=0.5, gamma=0.93)
EX3 = dict(target_pos=(3.0, 7.5), attacker_pos=(10.0, 0.0), defender_pos=(-10.0, 0.0),
           alpha=0.6, gamma=0.85)

# Published optima for the three engagements (4 significant decimals).
EX1_PHI = 0.2186
EX1_INTERCEPT = (0.8676, 3.8555)
EX1_ANGLES = (-2.9596, -2.8573, 0.0001, 0.0001, 0.2254, 0.2186)
EX2_PHI = 0.0429
EX2_INTERCEPT = (0.293, 3.539)
EX2_ANGLES = (-3.0752, -3.1189, -0.0014, -0.0014, 0.0277, 0.0429)
EX2_CRITICAL_ALPHA = 0.436
EX3_COST = 5.373
EX3_PN_FINAL_RANGE = 5.609


def scenario(example: dict, **overrides) -> Scenario:
    return Scenario(**{**example, **overrides})


def geometry_of(s: Scenario):
    frame = build_frame(s)
    target = frame.to_frame(s.target_pos)
    return build_geometry(target, frame.half_separation, s.alpha, s.gamma)


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Well-posed random engagement; avoids the measure-zero degeneracies."""
    alpha = rng.uniform(0.1, 0.9)
    gamma = rng.uniform(0.2, 0.95)
    while True:
        attacker = rng.uniform(-10.0, 10.0, 2)
        defender = rng.uniform(-10.0, 10.0, 2)
        if np.hypot(*(attacker - defender)) > 0.5:
            break
    x_a = np.hypot(*(attacker - defender)) / 2.0
    circle = da_circle(x_a, gamma)
    while True:
        target = rng.uniform(-40.0, 40.0, 2)
        s = Scenario(target_pos=tuple(target), attacker_pos=tuple(attacker),
                     defender_pos=tuple(defender), alpha=alpha, gamma=gamma)
        t_frame = build_frame(s).to_frame(s.target_pos)
        off_center = math.hypot(t_frame[0] - circle.center[0], t_frame[1])
        if off_center > 1e-3 * circle.radius and math.hypot(*(target - attacker)) > 1e-3:
            return s


def random_reduced_point(rng: np.random.Generator):
    """A (state, costate) draw with nonsingular feedback denominators."""
    while True:
        state = ReducedState(R=rng.uniform(0.5, 20.0), r=rng.uniform(0.5, 20.0),
                             theta=rng.uniform(-math.pi, math.pi))
        costate = Costate(lam_R=rng.uniform(-2.0, 2.0), lam_r=rng.uniform(-2.0, 2.0),
                          lam_theta=rng.uniform(-2.0, 2.0))
        den_psi = math.hypot(costate.lam_r, costate.lam_theta / state.r)
        den_phi = math.hypot(1.0 - costate.lam_R, costate.lam_theta / state.R)
        if den_psi > 1e-3 and den_phi > 1e-3:
            return state, costate


def hamiltonian_of_angles(state, costate, alpha, beta):
    """H as a plain function of the three heading angles, for differencing."""

    def f(phi, psi, chi):
        return hamiltonian(state, costate, HeadingTriple.from_angles(phi, psi, chi),
                           alpha, beta)

    return f


def central_diff(f, x: float, h: float = 1e-6) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def second_diff(f, x: float, h: float = 1e-4) -> float:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
