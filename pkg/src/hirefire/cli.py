"""Command-line front-end.

Every command resolves a :class:`RunConfig` from defaults, an optional JSON
file (``--config``) and command-line flags, in increasing precedence.  Reports
carry the resolved configuration under ``"config"``, and a report file is
itself accepted by ``--config``, so any run can be repeated from its output.

Exit codes: 0 when every enabled check passes, 1 when a check fails (the
report is still written), 2 on usage or validation errors.

Config file schema::

    {
      "game": {"mu0": 1.4, "mu1": 1.7, "sigma": 1.0, "p": 0.5, "r": 0.05,
               "c0": 1.2, "c1": 1.5},
      "extension": {"kind": "none"}            # or firing_cost {epsilon},
                                               # type_uncertainty {p1, q}, interview {q}
      "sim": {"dt": 0.001, "horizon": 200.0, "seed": 42, "scheme": "euler",
              "paths": 100000},
      "output": {"out": "results", "format": "json"}
    }

Every key is optional.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import equilibrium as eqm
from . import filtering, oracle, verification
from ._io import csv_text, dumps, fmt, write_atomic
from .exceptions import (ConfigViolation, NoConvergence, RegimeMismatch, SingularSystem,
                         ValidationError)
from .model import PARAM_NAMES, GameParams, derived_quantities

DEFAULT_GAME = {"mu0": 1.4, "mu1": 1.7, "sigma": 1.0, "p": 0.5, "r": 0.05, "c0": 1.2, "c1": 1.5}
EXTENSIONS = {"none": (), "firing_cost": ("epsilon",), "type_uncertainty": ("p1", "q"),
              "interview": ("q",)}
BATTERY_PATHS = {"standard": 100_000, "quick": 2_000}


@dataclass
class RunConfig:
    game: dict = field(default_factory=lambda: dict(DEFAULT_GAME))
    extension: dict = field(default_factory=lambda: {"kind": "none"})
    dt: float = 1e-3
    horizon: float = 200.0
    seed: int | None = None
    scheme: str = "euler"
    paths: int | None = None
    out: str | None = None
    format: str = "json"
    # execution detail only: results do not depend on it, so it is not reported
    shards: int = 1

    def params(self) -> GameParams:
        return GameParams(**{k: float(self.game[k]) for k in PARAM_NAMES})

    def sim(self, seed_required=False) -> filtering.SimConfig:
        if self.seed is None and seed_required:
            raise ConfigViolation("this command needs a seed (--seed or sim.seed in the config)")
        return filtering.SimConfig(dt=self.dt, horizon=self.horizon, seed=self.seed or 0,
                                   scheme=self.scheme)

    def to_dict(self):
        return {
            "game": dict(self.game),
            "extension": dict(self.extension),
            "sim": {"dt": self.dt, "horizon": self.horizon, "seed": self.seed,
                    "scheme": self.scheme, "paths": self.paths},
            "output": {"out": self.out, "format": self.format},
        }

    def validate(self):
        unknown = set(self.game) - set(PARAM_NAMES)
        if unknown:
            raise ConfigViolation(f"unknown game parameters: {sorted(unknown)}")
        kind = self.extension.get("kind", "none")
        if kind not in EXTENSIONS:
            raise ConfigViolation(f"unknown extension {kind!r}; choose from {sorted(EXTENSIONS)}")
        missing = [k for k in EXTENSIONS[kind] if self.extension.get(k) is None]
        if missing:
            raise ConfigViolation(f"extension {kind} needs {missing}")
        self.extension = {"kind": kind, **{k: float(self.extension[k]) for k in EXTENSIONS[kind]}}
        if self.format not in ("json", "csv"):
            raise ConfigViolation(f"format must be json or csv, got {self.format!r}")
        if self.paths is not None and self.paths < 1:
            raise ConfigViolation(f"paths must be >= 1, got {self.paths}")
        if self.shards < 1:
            raise ConfigViolation(f"shards must be >= 1, got {self.shards}")
        self.params()
        return self


def _load_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigViolation(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigViolation(f"config {path} must hold a JSON object")
    # a report file carries its configuration under "config"
    return data.get("config", data)


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        data = _load_file(args.config)
        unknown = set(data) - {"game", "extension", "sim", "output"}
        if unknown:
            raise ConfigViolation(f"unknown config sections: {sorted(unknown)}")
        cfg.game.update(data.get("game") or {})
        if data.get("extension"):
            cfg.extension = dict(data["extension"])
        for key, value in (data.get("sim") or {}).items():
            if key not in ("dt", "horizon", "seed", "scheme", "paths"):
                raise ConfigViolation(f"unknown sim key {key!r}")
            setattr(cfg, key, value)
        for key, value in (data.get("output") or {}).items():
            if key not in ("out", "format"):
                raise ConfigViolation(f"unknown output key {key!r}")
            setattr(cfg, key, value)
    for name in PARAM_NAMES:
        if getattr(args, name, None) is not None:
            cfg.game[name] = getattr(args, name)
    for name in ("dt", "horizon", "seed", "scheme", "paths", "out", "format", "shards"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    _apply_extension_flags(cfg, args)
    return cfg.validate()


def _apply_extension_flags(cfg, args):
    given = {k: getattr(args, k, None) for k in ("epsilon", "p1", "q")}
    kind = getattr(args, "extension", None)
    if kind is None:
        if given["p1"] is not None:
            kind = "type_uncertainty"
        elif given["q"] is not None:
            kind = cfg.extension.get("kind") if cfg.extension.get("kind") == "type_uncertainty" \
                else "interview"
        elif given["epsilon"] is not None:
            kind = "firing_cost" if given["epsilon"] > 0 else "none"
        else:
            return
    ext = dict(cfg.extension) if cfg.extension.get("kind") == kind else {}
    ext.update({k: v for k, v in given.items() if v is not None and k in EXTENSIONS[kind]})
    ext["kind"] = kind
    cfg.extension = ext


# -- commands ---------------------------------------------------------------


def _equilibrium(cfg: RunConfig):
    params = cfg.params()
    ext = cfg.extension
    kind = ext["kind"]
    if kind == "firing_cost":
        return eqm.firing_cost_pbe(params, eqm.FiringCostParams(ext["epsilon"]))
    if kind == "type_uncertainty":
        return eqm.type_uncertainty_pbe(params, eqm.TypeUncertaintyParams(ext["p1"], ext["q"]))
    if kind == "interview":
        return eqm.interview_pbe(params, eqm.InterviewParams(ext["q"]))
    return eqm.assemble_pbe(params)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key in sorted(obj):
            yield from _flatten(obj[key], f"{prefix}{key}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _kv_csv(report):
    rows = []
    for key, value in _flatten(report):
        if value is None:
            value = ""
        elif isinstance(value, bool):
            value = str(value).lower()
        elif not isinstance(value, str):
            value = fmt(value)
        rows.append((key, value))
    return csv_text(["key", "value"], rows)


def cmd_equilibrium(cfg: RunConfig, args):
    eq = _equilibrium(cfg)
    params = cfg.params()
    diag = eqm.describe(params)
    if cfg.extension["kind"] == "firing_cost":
        d = derived_quantities(params)
        diag["b_eps"] = eqm.firing_cost_threshold(params, d, eqm.FiringCostParams(
            cfg.extension["epsilon"]))
    report = {"command": "equilibrium", "config": cfg.to_dict(), **eq.to_dict(),
              "diagnostics": diag}
    return report, {}, True


def cmd_value_grid(cfg: RunConfig, args):
    if args.n_points < 2:
        raise ConfigViolation(f"n-points must be >= 2, got {args.n_points}")
    params = cfg.params()
    d = derived_quantities(params)
    pi = np.linspace(0.0, 1.0, args.n_points)
    if cfg.extension["kind"] == "firing_cost":
        fc = eqm.FiringCostParams(cfg.extension["epsilon"])
        b = eqm.firing_cost_threshold(params, d, fc)
        v = eqm.employer_value_firing(pi, params, d, fc)
    else:
        b = eqm.stopping_threshold(params, d)
        v = eqm.employer_value(pi, params, d, b)
    u = eqm.employee_value_weak(pi, params, d, b)
    table = csv_text(["pi", "V", "U"], zip(pi, v, u))
    report = {"command": "value-grid", "config": cfg.to_dict(), "threshold": b,
              "pi": pi.tolist(), "V": v.tolist(), "U": u.tolist()}
    return report, {"value_grid.csv": table}, True


def cmd_simulate(cfg: RunConfig, args):
    params = cfg.params()
    sim = cfg.sim(seed_required=True)
    measure = filtering.Measure(args.measure)
    n = cfg.paths or 1
    files, rows = {}, []
    for i in range(n):
        if args.observations:
            if measure is filtering.Measure.EMPLOYER:
                raise ConfigViolation("--observations needs --measure given_weak or given_strong")
            mu = params.mu0 if measure is filtering.Measure.GIVEN_WEAK else params.mu1
            obs = filtering.simulate_observation_path(mu, sim, params, path_index=i)
            path = filtering.filter_from_observations(obs, args.pi0, params)
        else:
            path = filtering.simulate_filter_path(args.pi0, sim, measure, params, path_index=i)
        hit = filtering.first_passage(path, args.threshold) if args.threshold is not None else None
        rows.append({"index": i, "final_pi": float(path.pi[-1]), "hit_time": hit,
                     "clamp_count": path.clamp_count})
        if cfg.out:
            buf = io.StringIO()
            filtering.write_path_csv(path, buf)
            files[f"path_{i:05d}.csv"] = buf.getvalue()
    report = {"command": "simulate", "config": cfg.to_dict(), "measure": measure.value,
              "pi0": args.pi0, "threshold": args.threshold, "observations": args.observations,
              "paths": rows}
    return report, files, True


def _benchmark_only(cfg, what):
    if cfg.extension["kind"] != "none":
        raise ConfigViolation(f"{what} covers the benchmark game only; drop the extension")


def cmd_verify(cfg: RunConfig, args):
    _benchmark_only(cfg, "the verification battery")
    params = cfg.params()
    sim = cfg.sim(seed_required=True)
    n = cfg.paths or BATTERY_PATHS[args.battery]
    report = verification.run_battery(params, sim, n_paths=n, shards=cfg.shards)
    report = {"command": "verify", "battery": args.battery, "config": cfg.to_dict(),
              "n_paths": n, **report}
    return report, {}, report["pass"]


def cmd_oracle(cfg: RunConfig, args):
    params = cfg.params()
    d = derived_quantities(params)
    eps = cfg.extension.get("epsilon", 0.0) if cfg.extension["kind"] == "firing_cost" else 0.0
    grid_cfg = oracle.GridConfig(n_points=args.n_points, relaxation=args.relaxation,
                                 lo=args.lo, hi=args.hi)
    b = eqm.stopping_threshold(params, d)
    if args.problem == "employer":
        sol = oracle.solve_employer_vi(params, -eps, grid_cfg)
        if eps > 0:
            fc = eqm.FiringCostParams(eps)
            b = eqm.firing_cost_threshold(params, d, fc)
            exact = eqm.employer_value_firing(sol.pi_grid, params, d, fc)
        else:
            exact = eqm.employer_value(sol.pi_grid, params, d, b)
    else:
        sol = oracle.solve_employee_bvp(params, b, grid_cfg)
        exact = eqm.employee_value_weak(sol.pi_grid, params, d, b)
    window = (sol.pi_grid >= b + 0.01) & (sol.pi_grid <= 0.99)
    gap = float(np.max(np.abs(sol.values - exact)[window])) if window.any() else 0.0
    h = float(sol.pi_grid[1] - sol.pi_grid[0])
    checks = {"closed_form_gap": gap, "closed_form_gap_ok": gap <= 1e-3}
    if args.problem == "employer":
        berr = abs(sol.boundary_estimate - b)
        checks.update(boundary_error=berr, boundary_ok=berr <= 5e-3,
                      complementarity=float(oracle.complementarity_residual(sol, params).max()))
    passed = all(v for k, v in checks.items() if k.endswith("_ok"))
    report = {"command": "oracle", "problem": args.problem, "config": cfg.to_dict(),
              "grid": {"n_points": grid_cfg.n_points, "lo": grid_cfg.lo, "hi": grid_cfg.hi,
                       "relaxation": grid_cfg.relaxation, "h": h},
              "obstacle": sol.obstacle, "boundary_estimate": sol.boundary_estimate,
              "closed_form_boundary": b, "iterations": sol.iterations, "checks": checks,
              "pass": passed}
    return report, {f"oracle_{args.problem}.csv": sol.to_csv()}, passed


def _parse_grid(text):
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigViolation(f"cannot parse grid {text!r}") from exc


def cmd_sweep(cfg: RunConfig, args):
    _benchmark_only(cfg, "the deviation sweep")
    params = cfg.params()
    sim = cfg.sim(seed_required=True)
    n = cfg.paths or BATTERY_PATHS["standard"]
    grid = _parse_grid(args.grid)
    if args.kind == "employer":
        rep = verification.employer_deviation_sweep(params, sim, grid, n, args.pi_start,
                                                     shards=cfg.shards)
    else:
        rep = verification.employee_deviation_sweep(params, sim, grid, args.kind, n,
                                                    shards=cfg.shards)
    report = {"command": "sweep", "config": cfg.to_dict(), **rep.to_dict()}
    return report, {f"sweep_{args.kind}.csv": rep.to_csv()}, rep.passed


COMMANDS = {"equilibrium": cmd_equilibrium, "value-grid": cmd_value_grid,
            "simulate": cmd_simulate, "verify": cmd_verify, "oracle": cmd_oracle,
            "sweep": cmd_sweep}


# -- parser -----------------------------------------------------------------


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _common(p):
    p.add_argument("--config", help="JSON config (or a previous report)")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--scheme", choices=["euler", "exact"])
    p.add_argument("--shards", type=int, help="split Monte Carlo batches (results unchanged)")
    p.add_argument("--out", help="directory for report files")
    p.add_argument("--format", choices=["json", "csv"])
    g = p.add_argument_group("game parameters")
    for name in PARAM_NAMES:
        g.add_argument(f"--{name}", type=float)
    e = p.add_argument_group("extensions")
    e.add_argument("--extension", choices=sorted(EXTENSIONS))
    e.add_argument("--epsilon", type=float, help="firing cost (implies firing_cost if > 0)")
    e.add_argument("--p1", type=float, help="P(strong belief) (implies type_uncertainty)")
    e.add_argument("--q", type=float, help="signal precision or interview pass rate")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hirefire",
        description="Equilibria, simulation and numerical checks for the hire/fire signaling game.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="closed-form equilibrium report")
    _common(p)

    p = sub.add_parser("value-grid", help="V and U on a uniform belief grid (CSV pi,V,U)")
    _common(p)
    p.add_argument("--n-points", type=int, default=1001)

    p = sub.add_parser("simulate", help="belief paths")
    _common(p)
    p.add_argument("--measure", choices=[m.value for m in filtering.Measure], default="employer")
    p.add_argument("--pi0", type=float, required=True)
    p.add_argument("--threshold", type=float, help="report first passage to this level")
    p.add_argument("--observations", action="store_true",
                   help="simulate revenue and filter it exactly (adds an x column)")

    p = sub.add_parser("verify", help="Monte Carlo equilibrium checks")
    _common(p)
    p.add_argument("--battery", choices=sorted(BATTERY_PATHS), default="standard")

    p = sub.add_parser("oracle", help="finite-difference solution of V or U")
    _common(p)
    p.add_argument("--problem", choices=["employer", "employee"], default="employer")
    p.add_argument("--n-points", type=int, default=4000)
    p.add_argument("--relaxation", type=float, default=1.9)
    p.add_argument("--lo", type=float, default=1e-4)
    p.add_argument("--hi", type=float, default=1.0 - 1e-4)

    p = sub.add_parser("sweep", help="deviation sweep on common random numbers")
    _common(p)
    p.add_argument("--kind", choices=["employer", "weak", "strong"], default="employer")
    p.add_argument("--grid", help="comma-separated thresholds or claim probabilities")
    p.add_argument("--pi-start", type=float)
    return parser


def _emit(cfg, command, report, tables):
    stem = command.replace("-", "_")
    if cfg.format == "csv":
        main = tables.get(next(iter(tables))) if tables else _kv_csv(report)
        name = next(iter(tables)) if tables else f"{stem}.csv"
    else:
        main, name = dumps(report), f"{stem}.json"
    if cfg.out:
        out = Path(cfg.out)
        write_atomic(out / name, main)
        for fname, text in tables.items():
            if fname != name:
                write_atomic(out / fname, text)
        if cfg.format == "csv":
            write_atomic(out / f"{stem}.json", dumps(report))
    sys.stdout.write(main)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        report, tables, passed = COMMANDS[args.command](cfg, args)
        _emit(cfg, args.command, report, tables)
    except (ValidationError, RegimeMismatch) as exc:
        print(f"hirefire: error: {exc}", file=sys.stderr)
        return 2
    except (NoConvergence, SingularSystem) as exc:
        print(f"hirefire: numerical failure: {exc}", file=sys.stderr)
        return 1
    if not passed:
        print(f"hirefire: {args.command}: check failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
