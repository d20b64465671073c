"""Command-line front end: ``tad`` solve / simulate / critical-alpha / sweep / roots.

Scenario files are TOML.  Top-level keys give the initial conditions; an
optional ``[simulation]`` table configures closed-loop runs and an optional
``[output]`` table provides default output paths:

    target = [0.5, 4.0]
    attacker = [4.0, 0.0]
    defender = [-4.0, 0.0]
    alpha = 0.25
    gamma = 0.8
    capture_radius_defender = 0.01   # optional
    capture_radius_attacker = 0.0    # optional

    [simulation]                     # optional
    dt = 1e-3
    t_max = 30.0
    resolve_stride = 1
    pn_constant = 3.0
    integrator = "euler"
    [simulation.policies]            # "optimal" | "pn" | "pure_pursuit"
    attacker = "pn"                  # or { kind = "fixed", angle = 1.0 }
                                     # or { kind = "pn", nav_constant = 4.0 }

Unknown keys are rejected by name.  Results are JSON with a stable key
order (trajectories are CSV); floats serialize via their shortest
round-trip representation, so identical inputs give byte-identical outputs.
Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, simulator, solver
from .errors import NumericalError, ScenarioError, SingularityError, TadError
from .geometry import (
    Scenario,
    build_frame,
    classify_target,
    critical_alpha,
    da_circle,
)
from .sextic import build_geometry, build_sextic, find_roots, stationarity_residual
from .simulator import (
    AttackerCaptures,
    DefenderIntercepts,
    FixedHeading,
    OptimalGame,
    PolicySet,
    ProportionalNavigation,
    PurePursuit,
    pure_pursuit_heading,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_TOP_KEYS = {"target", "attacker", "defender", "alpha", "gamma",
             "capture_radius_defender", "capture_radius_attacker",
             "simulation", "output"}
_REQUIRED_KEYS = {"target", "attacker", "defender", "alpha", "gamma"}
_SIM_KEYS = {"dt", "t_max", "resolve_stride", "pn_constant", "integrator", "policies"}
_POLICY_KEYS = {"target", "attacker", "defender"}
_OUTPUT_KEYS = {"solution", "trajectory", "outcome"}

SWEEP_PARAMS = ("alpha", "gamma", "target_x", "target_y")


@dataclass(frozen=True)
class SimulationConfig:
    dt: float = 1e-3
    t_max: float = 50.0
    resolve_stride: int = 1
    pn_constant: float = 3.0
    integrator: str = "euler"
    policies: PolicySet = field(default_factory=PolicySet)


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    simulation: SimulationConfig
    output: dict[str, str]


def _require_number(path: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(path, f"must be finite, got {value}")
    return float(value)


def _reject_unknown(table: dict, allowed: set, prefix: str = ""):
    for key in table:
        if key not in allowed:
            raise ScenarioError(f"{prefix}{key}", "unknown key")


def _parse_policy(path: str, value, pn_constant: float):
    if isinstance(value, str):
        table = {"optimal": OptimalGame(),
                 "pure_pursuit": PurePursuit(),
                 "pn": ProportionalNavigation(pn_constant)}
        if value not in table:
            raise ScenarioError(path, f"unknown policy {value!r} "
                                      f"(expected optimal, pn, pure_pursuit, or a table)")
        return table[value]
    if isinstance(value, dict):
        kind = value.get("kind")
        if kind == "fixed":
            _reject_unknown(value, {"kind", "angle"}, prefix=path + ".")
            if "angle" not in value:
                raise ScenarioError(path + ".angle", "fixed heading needs an angle")
            return FixedHeading(_require_number(path + ".angle", value["angle"]))
        if kind == "pn":
            _reject_unknown(value, {"kind", "nav_constant"}, prefix=path + ".")
            return ProportionalNavigation(
                _require_number(path + ".nav_constant", value.get("nav_constant", pn_constant)))
        raise ScenarioError(path + ".kind", f"unknown policy kind {kind!r}")
    raise ScenarioError(path, f"expected a policy name or table, got {value!r}")


def load_scenario_file(path) -> ScenarioFile:
    """Parse and validate one scenario document."""
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioError("file", f"not valid TOML: {exc}") from exc

    _reject_unknown(doc, _TOP_KEYS)
    for key in sorted(_REQUIRED_KEYS):
        if key not in doc:
            raise ScenarioError(key, "missing required key")

    kwargs = {}
    for name, key in (("target_pos", "target"), ("attacker_pos", "attacker"),
                      ("defender_pos", "defender")):
        value = doc[key]
        if not isinstance(value, list) or len(value) != 2:
            raise ScenarioError(key, f"expected [x, y], got {value!r}")
        kwargs[name] = (_require_number(f"{key}[0]", value[0]),
                        _require_number(f"{key}[1]", value[1]))
    kwargs["alpha"] = _require_number("alpha", doc["alpha"])
    kwargs["gamma"] = _require_number("gamma", doc["gamma"])
    if "capture_radius_defender" in doc:
        kwargs["capture_radius_defender"] = _require_number(
            "capture_radius_defender", doc["capture_radius_defender"])
    if "capture_radius_attacker" in doc:
        kwargs["capture_radius_attacker"] = _require_number(
            "capture_radius_attacker", doc["capture_radius_attacker"])
    scenario = Scenario(**kwargs)

    sim_table = doc.get("simulation", {})
    if not isinstance(sim_table, dict):
        raise ScenarioError("simulation", "expected a table")
    _reject_unknown(sim_table, _SIM_KEYS, prefix="simulation.")
    pn_constant = _require_number("simulation.pn_constant", sim_table.get("pn_constant", 3.0))
    sim_kwargs = {"pn_constant": pn_constant}
    if "dt" in sim_table:
        sim_kwargs["dt"] = _require_number("simulation.dt", sim_table["dt"])
    if "t_max" in sim_table:
        sim_kwargs["t_max"] = _require_number("simulation.t_max", sim_table["t_max"])
    if "resolve_stride" in sim_table:
        stride = sim_table["resolve_stride"]
        if isinstance(stride, bool) or not isinstance(stride, int):
            raise ScenarioError("simulation.resolve_stride", f"expected an integer, got {stride!r}")
        sim_kwargs["resolve_stride"] = stride
    if "integrator" in sim_table:
        integrator = sim_table["integrator"]
        if integrator not in ("euler", "rk4"):
            raise ScenarioError("simulation.integrator",
                                f"expected 'euler' or 'rk4', got {integrator!r}")
        sim_kwargs["integrator"] = integrator
    policy_table = sim_table.get("policies", {})
    if not isinstance(policy_table, dict):
        raise ScenarioError("simulation.policies", "expected a table")
    _reject_unknown(policy_table, _POLICY_KEYS, prefix="simulation.policies.")
    sim_kwargs["policies"] = PolicySet(**{
        agent: _parse_policy(f"simulation.policies.{agent}", value, pn_constant)
        for agent, value in policy_table.items()
    })

    out_table = doc.get("output", {})
    if not isinstance(out_table, dict):
        raise ScenarioError("output", "expected a table")
    _reject_unknown(out_table, _OUTPUT_KEYS, prefix="output.")
    for key, value in out_table.items():
        if not isinstance(value, str):
            raise ScenarioError(f"output.{key}", f"expected a path string, got {value!r}")

    return ScenarioFile(scenario=scenario, simulation=SimulationConfig(**sim_kwargs),
                        output=dict(out_table))


def _scenario_echo(s: Scenario) -> dict:
    return {
        "target": list(s.target_pos),
        "attacker": list(s.attacker_pos),
        "defender": list(s.defender_pos),
        "alpha": s.alpha,
        "gamma": s.gamma,
        "beta": s.beta,
        "capture_radius_defender": s.capture_radius_defender,
        "capture_radius_attacker": s.capture_radius_attacker,
    }


def _meta(command: str) -> dict:
    return {"tool": "tad", "version": __version__, "command": command, "deterministic": True}


def solution_record(scenario: Scenario, sol: solver.InterceptionSolution,
                    command: str = "solve") -> dict:
    semantics = ("escape_margin" if sol.regime.value == "inside" else "terminal_separation")
    candidates = sorted(sol.candidates, key=lambda c: (c.angle, c.root_modulus))
    return {
        **_meta(command),
        "scenario": _scenario_echo(scenario),
        "regime": sol.regime.value,
        "phi_star": sol.phi_star,
        "intercept_frame": list(sol.intercept_frame),
        "intercept_world": list(sol.intercept_world),
        "J_star": sol.cost,
        "J_star_semantics": semantics,
        "critical_alpha": sol.critical_alpha,
        "escape_infeasible": sol.escape_infeasible,
        "target_terminal": list(sol.target_terminal),
        "headings": {"target": sol.headings.target,
                     "attacker": sol.headings.attacker,
                     "defender": sol.headings.defender},
        "t_f": sol.t_f,
        "candidates": [{"angle": c.angle, "cost": c.cost, "residual": c.residual,
                        "root_modulus": c.root_modulus} for c in candidates],
        "used_grid_fallback": sol.used_grid_fallback,
    }


def _dump_json(record) -> str:
    return json.dumps(record, indent=2, allow_nan=True) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_solve(args) -> int:
    doc = load_scenario_file(args.scenario)
    sol = solver.solve(doc.scenario)
    record = solution_record(doc.scenario, sol)
    _emit(_dump_json(record), args.out or doc.output.get("solution"))
    return EXIT_OK


def cmd_critical_alpha(args) -> int:
    doc = load_scenario_file(args.scenario)
    scenario = doc.scenario
    frame = build_frame(scenario)
    target = frame.to_frame(scenario.target_pos)
    circle = da_circle(frame.half_separation, scenario.gamma)
    alpha_bar = critical_alpha(target, frame.half_separation, scenario.gamma)
    record = {
        **_meta("critical-alpha"),
        "scenario": _scenario_echo(scenario),
        "critical_alpha": alpha_bar,
        "target_region": classify_target(target, circle).value,
        "escape_feasible": scenario.alpha > alpha_bar,
    }
    _emit(_dump_json(record), None)
    return EXIT_OK


def cmd_roots(args) -> int:
    doc = load_scenario_file(args.scenario)
    scenario = doc.scenario
    frame = build_frame(scenario)
    target = frame.to_frame(scenario.target_pos)
    geom = build_geometry(target, frame.half_separation, scenario.alpha, scenario.gamma)
    roots = find_roots(build_sextic(geom))

    def residual_at(angle):
        try:
            return stationarity_residual(geom, angle)
        except SingularityError:
            return math.inf

    rows = [{
        "re": z.real,
        "im": z.imag,
        "angle": math.atan2(z.imag, z.real),
        "modulus": abs(z),
        "residual": residual_at(math.atan2(z.imag, z.real)),
    } for z in roots]
    rows.sort(key=lambda row: (row["angle"], row["modulus"]))
    record = {
        **_meta("roots"),
        "scenario": _scenario_echo(scenario),
        "geometry": {
            "center_x": geom.center_x,
            "radius": geom.radius,
            "center_to_attacker": geom.center_to_attacker,
            "center_to_target": geom.center_to_target,
            "target_polar_angle": geom.target_polar_angle,
        },
        "roots": rows,
    }
    _emit(_dump_json(record), None)
    return EXIT_OK


def _outcome_record(outcome, sim: SimulationConfig, scenario: Scenario) -> dict:
    record = _meta("simulate")
    if isinstance(outcome, DefenderIntercepts):
        record.update(outcome="defender_intercepts", t_f=outcome.t_f,
                      R_final=outcome.R_final,
                      intercept_point=list(outcome.intercept_point))
    elif isinstance(outcome, AttackerCaptures):
        record.update(outcome="attacker_captures", t=outcome.t)
    else:
        record.update(outcome="timeout", t_max=outcome.t_max)
    meta = {"dt": sim.dt, "t_max": sim.t_max, "resolve_stride": sim.resolve_stride,
            "integrator": sim.integrator,
            "policies": {a: _policy_name(getattr(sim.policies, a))
                         for a in ("target", "attacker", "defender")}}
    if isinstance(sim.policies.attacker, ProportionalNavigation):
        meta["attacker_initial_heading"] = pure_pursuit_heading(
            scenario.attacker_pos, scenario.target_pos)
    record["simulation"] = meta
    return record


def _policy_name(policy) -> str:
    if isinstance(policy, OptimalGame):
        return "optimal"
    if isinstance(policy, ProportionalNavigation):
        return f"pn({policy.nav_constant})"
    if isinstance(policy, PurePursuit):
        return "pure_pursuit"
    return f"fixed({policy.angle})"


def trajectory_csv(traj) -> str:
    lines = ["t,x_T,y_T,x_A,y_A,x_D,y_D,R,r,theta"]
    for i in range(len(traj.times)):
        lines.append(",".join(repr(float(v)) for v in (
            traj.times[i],
            traj.target[i, 0], traj.target[i, 1],
            traj.attacker[i, 0], traj.attacker[i, 1],
            traj.defender[i, 0], traj.defender[i, 1],
            traj.R[i], traj.r[i], traj.theta[i],
        )))
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    doc = load_scenario_file(args.scenario)
    sim = doc.simulation
    traj, outcome = simulator.run(
        doc.scenario, sim.policies, dt=sim.dt, t_max=sim.t_max,
        resolve_stride=sim.resolve_stride, integrator=sim.integrator)

    if args.out_dir:
        out_dir = Path(args.out_dir)
        traj_path, outcome_path = out_dir / "trajectory.csv", out_dir / "outcome.json"
    else:
        default_dir = Path(Path(args.scenario).stem + "_out")
        traj_path = Path(doc.output.get("trajectory", default_dir / "trajectory.csv"))
        outcome_path = Path(doc.output.get("outcome", default_dir / "outcome.json"))
    record = _outcome_record(outcome, sim, doc.scenario)
    text = _dump_json(record)
    Path(traj_path).parent.mkdir(parents=True, exist_ok=True)
    Path(traj_path).write_text(trajectory_csv(traj), encoding="utf-8")
    Path(outcome_path).parent.mkdir(parents=True, exist_ok=True)
    Path(outcome_path).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def _sweep_scenario(base: Scenario, param: str, value: float) -> Scenario:
    kwargs = dict(
        target_pos=base.target_pos, attacker_pos=base.attacker_pos,
        defender_pos=base.defender_pos, alpha=base.alpha, gamma=base.gamma,
        capture_radius_defender=base.capture_radius_defender,
        capture_radius_attacker=base.capture_radius_attacker)
    if param == "alpha":
        kwargs["alpha"] = value
    elif param == "gamma":
        kwargs["gamma"] = value
    elif param == "target_x":
        kwargs["target_pos"] = (value, base.target_pos[1])
    else:
        kwargs["target_pos"] = (base.target_pos[0], value)
    return Scenario(**kwargs)


SWEEP_HEADER = ("index,param,value,regime,phi_star,J_star,J_star_semantics,"
                "critical_alpha,escape_infeasible,intercept_frame_x,intercept_frame_y,"
                "intercept_world_x,intercept_world_y,t_f")


def cmd_sweep(args) -> int:
    doc = load_scenario_file(args.scenario)
    if args.param not in SWEEP_PARAMS:
        raise ScenarioError("param", f"expected one of {SWEEP_PARAMS}, got {args.param!r}")
    if args.steps < 1:
        raise ScenarioError("steps", f"must be >= 1, got {args.steps}")
    if args.steps == 1:
        values = [args.start]
    else:
        step = (args.stop - args.start) / (args.steps - 1)
        values = [args.start + i * step for i in range(args.steps)]

    lines = [SWEEP_HEADER]
    for index, value in enumerate(values):
        scenario = _sweep_scenario(doc.scenario, args.param, value)
        sol = solver.solve(scenario)
        semantics = "escape_margin" if sol.regime.value == "inside" else "terminal_separation"
        lines.append(",".join([
            str(index), args.param, repr(float(value)), sol.regime.value,
            repr(sol.phi_star), repr(sol.cost), semantics,
            repr(sol.critical_alpha), str(sol.escape_infeasible).lower(),
            repr(sol.intercept_frame[0]), repr(sol.intercept_frame[1]),
            repr(sol.intercept_world[0]), repr(sol.intercept_world[1]),
            repr(sol.t_f),
        ]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tad",
        description="Active target-defense engagement game: solve, simulate, sweep.")
    parser.add_argument("--version", action="version", version=f"tad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal interception point and headings")
    p.add_argument("scenario")
    p.add_argument("-o", "--out", default=None, help="also write the JSON record here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="closed-loop run with the configured policies")
    p.add_argument("scenario")
    p.add_argument("-d", "--out-dir", default=None, help="directory for trajectory.csv and outcome.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("critical-alpha", help="minimum Target speed ratio for survival")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_critical_alpha)

    p = sub.add_parser("sweep", help="re-solve along a one-parameter grid")
    p.add_argument("scenario")
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("roots", help="all six stationary-angle candidates")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_roots)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"tad: scenario file not found: {exc.filename}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, SingularityError) as exc:
        print(f"tad: numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TadError as exc:
        print(f"tad: invalid input for {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
