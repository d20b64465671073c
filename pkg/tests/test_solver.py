import math

import numpy as np
import pytest

from tadgame import (
    GameGeometry,
    GeometryError,
    Scenario,
    brute_force_phi,
    cost_inside,
    cost_outside,
    critical_alpha,
    headings_from_aimpoint,
    solve,
)
from tadgame.geometry import TargetRegion, build_frame

import helpers


def frame_points(geom: GameGeometry):
    """Attacker and Target positions implied by the reduced geometry."""
    a, r = geom.center_x, geom.radius
    lam, n = geom.target_polar_angle, geom.center_to_target
    attacker = (a - geom.center_to_attacker, 0.0)
    target = (a - n * math.cos(lam), n * math.sin(lam))
    return attacker, target


def point_on_circle(geom: GameGeometry, phi: float):
    return (geom.center_x - geom.radius * math.cos(phi), geom.radius * math.sin(phi))


class TestCosts:
    def test_outside_matches_coordinate_form(self):
        rng = np.random.default_rng(83)
        for _ in range(200):
            geom = helpers.geometry_of(helpers.random_scenario(rng))
            attacker, target = frame_points(geom)
            phi = rng.uniform(-math.pi, math.pi)
            point = point_on_circle(geom, phi)
            direct = (math.hypot(point[0] - target[0], point[1] - target[1])
                      + geom.alpha * math.hypot(attacker[0] - point[0], point[1]))
            assert cost_outside(geom, phi) == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_inside_matches_coordinate_form(self):
        rng = np.random.default_rng(89)
        for _ in range(200):
            geom = helpers.geometry_of(helpers.random_scenario(rng))
            attacker, target = frame_points(geom)
            phi = rng.uniform(-math.pi, math.pi)
            point = point_on_circle(geom, phi)
            direct = (geom.alpha * math.hypot(attacker[0] - point[0], point[1])
                      - math.hypot(point[0] - target[0], point[1] - target[1]))
            assert cost_inside(geom, phi) == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_example1_cost_at_published_optimum(self, ex1):
        # terminal separation from the published interception point
        geom = helpers.geometry_of(ex1)
        expected = (math.hypot(0.8676 - 0.5, 3.8555 - 4.0)
                    + 0.25 * math.hypot(4.0 - 0.8676, 3.8555))
        assert cost_outside(geom, helpers.EX1_PHI) == pytest.approx(expected, abs=1e-3)

    def test_example2_cost_at_published_optimum(self, ex2):
        geom = helpers.geometry_of(ex2)
        expected = (0.5 * math.hypot(6.0 - 0.293, 3.539)
                    - math.hypot(0.293 - 3.1, 3.539 - 2.7))
        assert cost_inside(geom, helpers.EX2_PHI) == pytest.approx(expected, abs=1e-3)

    def test_target_on_circle_first_leg_collapses(self):
        geom = GameGeometry(center_x=10.0, radius=6.0, center_to_attacker=4.0,
                            center_to_target=6.0, target_polar_angle=0.5, alpha=0.3)
        attacker, _ = frame_points(geom)
        point = point_on_circle(geom, 0.5)
        expected = 0.3 * math.hypot(attacker[0] - point[0], point[1])
        assert cost_outside(geom, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_inside_far_side_is_deeply_negative(self, ex2):
        geom = helpers.geometry_of(ex2)
        far = geom.target_polar_angle + math.pi
        assert cost_inside(geom, far) < -0.5 * (1.0 - geom.alpha) * geom.radius

    def test_tangent_speed_ratio_gives_zero_margin(self, ex2):
        # at the critical ratio the best the Target can do is break even
        frame = build_frame(ex2)
        target = frame.to_frame(ex2.target_pos)
        alpha_bar = critical_alpha(target, frame.half_separation, ex2.gamma)
        geom = helpers.geometry_of(helpers.scenario(helpers.EX2, alpha=alpha_bar))
        grid = np.linspace(-math.pi, math.pi, 400_000, endpoint=False)
        assert np.max(cost_inside(geom, grid)) == pytest.approx(0.0, abs=1e-6)

    def test_vectorized_evaluation(self, ex1):
        geom = helpers.geometry_of(ex1)
        phis = np.linspace(-1.0, 1.0, 7)
        values = cost_outside(geom, phis)
        assert values.shape == (7,)
        for phi, value in zip(phis, values):
            assert cost_outside(geom, float(phi)) == pytest.approx(value, rel=1e-15)


class TestBruteForce:
    def test_rejects_tiny_grids(self, ex1):
        with pytest.raises(ValueError):
            brute_force_phi(helpers.geometry_of(ex1), TargetRegion.OUTSIDE, 999)

    def test_agrees_with_published_optima(self, ex1, ex2):
        assert brute_force_phi(helpers.geometry_of(ex1), TargetRegion.OUTSIDE, 1_000_000) == \
            pytest.approx(helpers.EX1_PHI, abs=1e-4)
        assert brute_force_phi(helpers.geometry_of(ex2), TargetRegion.INSIDE, 1_000_000) == \
            pytest.approx(helpers.EX2_PHI, abs=1e-4)


class TestSolve:
    def test_example1(self, ex1):
        sol = solve(ex1)
        assert sol.regime is TargetRegion.OUTSIDE
        assert sol.phi_star == pytest.approx(helpers.EX1_PHI, abs=5e-4)
        assert sol.intercept_world[0] == pytest.approx(helpers.EX1_INTERCEPT[0], abs=1e-3)
        assert sol.intercept_world[1] == pytest.approx(helpers.EX1_INTERCEPT[1], abs=1e-3)
        assert not sol.escape_infeasible
        assert not sol.used_grid_fallback
        assert sol.critical_alpha == 0.0

    def test_example2(self, ex2):
        sol = solve(ex2)
        assert sol.regime is TargetRegion.INSIDE
        assert sol.phi_star == pytest.approx(helpers.EX2_PHI, abs=5e-4)
        assert sol.intercept_world[0] == pytest.approx(helpers.EX2_INTERCEPT[0], abs=2e-3)
        assert sol.intercept_world[1] == pytest.approx(helpers.EX2_INTERCEPT[1], abs=2e-3)
        assert sol.critical_alpha == pytest.approx(helpers.EX2_CRITICAL_ALPHA, abs=1e-3)
        assert not sol.escape_infeasible

    def test_example3_cost(self, ex3):
        assert solve(ex3).cost == pytest.approx(helpers.EX3_COST, abs=1e-2)

    def test_solution_internal_consistency(self, ex1, ex2, ex3):
        for scenario in (ex1, ex2, ex3):
            sol = solve(scenario)
            geom = helpers.geometry_of(scenario)
            on_circle = math.hypot(sol.intercept_frame[0] - geom.center_x,
                                   sol.intercept_frame[1])
            assert abs(on_circle - geom.radius) < 1e-9 * geom.radius
            ax, ay = scenario.attacker_pos
            assert sol.t_f == pytest.approx(
                math.hypot(sol.intercept_world[0] - ax, sol.intercept_world[1] - ay),
                rel=1e-9)
            if sol.regime is TargetRegion.OUTSIDE:
                assert sol.cost > 0
                terminal_gap = math.hypot(sol.target_terminal[0] - sol.intercept_world[0],
                                          sol.target_terminal[1] - sol.intercept_world[1])
                assert terminal_gap == pytest.approx(sol.cost, rel=1e-12)
            else:
                terminal_gap = math.hypot(sol.target_terminal[0] - sol.intercept_world[0],
                                          sol.target_terminal[1] - sol.intercept_world[1])
                assert terminal_gap == pytest.approx(abs(sol.cost), rel=1e-9)

    def test_six_candidates_reported(self, ex1):
        sol = solve(ex1)
        assert len(sol.candidates) == 6
        best = min(c.cost for c in sol.candidates)
        assert sol.cost == pytest.approx(best, rel=1e-12)

    def test_boundary_target_treated_as_outside(self):
        base = helpers.scenario(helpers.EX1)
        frame = build_frame(base)
        geom = helpers.geometry_of(base)
        boundary = (geom.center_x - geom.radius, 0.0)
        world = frame.to_world(boundary)
        sol = solve(helpers.scenario(helpers.EX1, target_pos=tuple(world)))
        assert sol.regime is TargetRegion.OUTSIDE

    def test_infeasible_inside_still_returns_a_solution(self):
        slow = helpers.scenario(helpers.EX2, alpha=0.3)  # below the 0.436 threshold
        sol = solve(slow)
        assert sol.regime is TargetRegion.INSIDE
        assert sol.escape_infeasible
        assert sol.cost <= 0.0

    def test_escape_flag_flips_with_alpha(self, ex2):
        frame = build_frame(ex2)
        target = frame.to_frame(ex2.target_pos)
        alpha_bar = critical_alpha(target, frame.half_separation, ex2.gamma)
        for offset in np.linspace(-0.05, 0.05, 21):
            if abs(offset) < 1e-6:
                continue
            sol = solve(helpers.scenario(helpers.EX2, alpha=alpha_bar + offset))
            assert (sol.cost > 0.0) == (offset > 0.0)
            assert sol.escape_infeasible == (offset < 0.0)

    def test_axial_symmetric_scenario_is_deterministic(self):
        s = helpers.scenario(helpers.EX2, target_pos=(3.5, 0.0))
        first = solve(s)
        again = solve(s)
        assert first.phi_star == again.phi_star
        geom = helpers.geometry_of(s)
        oracle = brute_force_phi(geom, first.regime, 500_000)
        assert abs(first.phi_star) == pytest.approx(abs(oracle), abs=1e-4)

    def test_saddle_consistency(self, ex1, ex2):
        geom1 = helpers.geometry_of(ex1)
        phi1 = solve(ex1).phi_star
        for delta in (-1e-3, 1e-3):
            assert cost_outside(geom1, phi1 + delta) > cost_outside(geom1, phi1)
        geom2 = helpers.geometry_of(ex2)
        phi2 = solve(ex2).phi_star
        for delta in (-1e-3, 1e-3):
            assert cost_inside(geom2, phi2 + delta) < cost_inside(geom2, phi2)

    def test_oracle_equivalence_random_scenarios(self):
        rng = np.random.default_rng(97)
        for _ in range(100):
            scenario = helpers.random_scenario(rng)
            sol = solve(scenario)
            geom = helpers.geometry_of(scenario)
            oracle = brute_force_phi(geom, sol.regime, 200_000)
            scale = geom.center_to_target + geom.center_to_attacker
            assert abs(sol.phi_star - oracle) < 1e-4
            cost = cost_inside if sol.regime is TargetRegion.INSIDE else cost_outside
            assert abs(sol.cost - cost(geom, oracle)) < 1e-6 * scale

    def test_frame_covariance(self, ex1, ex2):
        rng = np.random.default_rng(101)
        for base in (ex1, ex2):
            reference = solve(base)
            for _ in range(10):
                rot = rng.uniform(-math.pi, math.pi)
                shift = rng.uniform(-20, 20, 2)
                c, s = math.cos(rot), math.sin(rot)

                def move(p):
                    return (c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1])

                moved = Scenario(
                    target_pos=move(base.target_pos), attacker_pos=move(base.attacker_pos),
                    defender_pos=move(base.defender_pos), alpha=base.alpha, gamma=base.gamma,
                    capture_radius_defender=base.capture_radius_defender)
                sol = solve(moved)
                assert sol.phi_star == pytest.approx(reference.phi_star, abs=1e-9)
                assert sol.cost == pytest.approx(reference.cost, rel=1e-9)
                np.testing.assert_allclose(sol.intercept_frame, reference.intercept_frame,
                                           atol=1e-8)
                np.testing.assert_allclose(sol.intercept_world,
                                           move(reference.intercept_world), atol=1e-8)


class TestHeadings:
    def test_outside_flee_direction_from_published_points(self, ex1):
        headings = headings_from_aimpoint(ex1, (0.8676, 3.8555), TargetRegion.OUTSIDE)
        assert headings.target == pytest.approx(math.atan2(4 - 3.8555, 0.5 - 0.8676), rel=1e-12)
        assert headings.target == pytest.approx(2.767, abs=1e-3)
        assert headings.attacker == pytest.approx(math.atan2(3.8555, 0.8676 - 4.0), rel=1e-12)
        assert headings.defender == pytest.approx(math.atan2(3.8555, 0.8676 + 4.0), rel=1e-12)

    def test_inside_aim_direction_from_published_points(self, ex2):
        headings = headings_from_aimpoint(ex2, (0.293, 3.539), TargetRegion.INSIDE)
        assert headings.target == pytest.approx(math.atan2(3.539 - 2.7, 0.293 - 3.1), rel=1e-12)
        assert headings.target == pytest.approx(2.851, abs=1e-3)

    def test_mirror_symmetry(self, ex1):
        mirrored = helpers.scenario(helpers.EX1, target_pos=(0.5, -4.0))
        up = solve(helpers.scenario(helpers.EX1))
        down = solve(mirrored)
        assert down.phi_star == pytest.approx(-up.phi_star, abs=1e-9)
        for mine, theirs in zip(down.headings, up.headings):
            assert mine == pytest.approx(-theirs, abs=1e-9)

    def test_aim_point_on_agent_rejected(self, ex1):
        with pytest.raises(GeometryError):
            headings_from_aimpoint(ex1, ex1.target_pos, TargetRegion.OUTSIDE)
        with pytest.raises(GeometryError):
            headings_from_aimpoint(ex1, ex1.attacker_pos, TargetRegion.OUTSIDE)
