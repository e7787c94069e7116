"""Command-line front end: ``robustsweep {mu-sweep,fixed-point,reproduce,fidelity}``.

Exit status is 0 on success, 1 when a numeric verdict fails and 2 on usage
or configuration errors.
"""
import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDelta
from .lti import frequency_grid
from .models import (QubitParams, SmdParams, fidelity_analytic, fidelity_simulate,
                     max_fidelity, transfer_time)
from .reproduce import (FAMILIES, SCENARIOS, TARGETS, fixed_point_rows, run_target,
                        scenario_pair, sweep_rows)

__all__ = ["RunConfig", "ConfigError", "GridSpec", "main", "parse_args", "format_csv",
           "format_json", "execute"]

COMMANDS = ("mu-sweep", "fixed-point", "reproduce", "fidelity")
FORMULATIONS = ("both", "unperturbed", "perturbed")
SMD_KEYS = tuple(f.name for f in dataclasses.fields(SmdParams))
QUBIT_KEYS = ("Delta", "J", "gamma")
DEFAULT_GRIDS = {
    "mu-sweep": "0.01:100:400:log",
    "fixed-point": "0.001:10:200:log",
    "reproduce": "0.01:100:400:log",
    "fidelity": "0:20:201:lin",
}
DEFAULT_SCENARIO = {"mu-sweep": "smd-k1", "fixed-point": "qubit-gamma", "fidelity": "qubit"}
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name, message, line=None):
        self.field = field_name
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"config field '{field_name}'{where}: {message}")


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n: int
    log: bool = True

    @classmethod
    def parse(cls, text, field_name="grid"):
        parts = str(text).split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(field_name, f"expected lo:hi:n[:log|lin], got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(field_name, f"non-numeric bounds in {text!r}") from None
        scale = parts[3] if len(parts) == 4 else "log"
        if scale not in ("log", "lin"):
            raise ConfigError(field_name, f"spacing must be 'log' or 'lin', got {scale!r}")
        if n < 1 or hi <= lo:
            raise ConfigError(field_name, "need n >= 1 and hi > lo")
        if scale == "log" and lo <= 0:
            raise ConfigError(field_name, "log spacing needs lo > 0")
        if lo < 0:
            raise ConfigError(field_name, "lo must be nonnegative")
        return cls(lo, hi, n, scale == "log")

    def __str__(self):
        return f"{self.lo:.12g}:{self.hi:.12g}:{self.n}:{'log' if self.log else 'lin'}"

    def points(self):
        return np.geomspace(self.lo, self.hi, self.n) if self.log else np.linspace(
            self.lo, self.hi, self.n)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to repeat a run. Defaults are the benchmark parameters."""

    command: str
    scenario: str = None
    target: str = None
    params: dict = field(default_factory=dict)
    formulation: str = "both"
    grid: str = None
    mode: str = "mixed"
    tol: float = 1e-10
    seed: int = 0
    format: str = "csv"
    out: str = None
    epsilon_damp: float = 0.0
    sweep: str = "time"

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["params"] = dict(sorted(self.params.items()))
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        for key in d:
            if key not in known:
                raise ConfigError(key, "unknown field")
        if "command" not in d:
            raise ConfigError("command", "missing")
        return cls(**d).validated()

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", exc.msg, exc.lineno) from None
        if not isinstance(d, dict):
            raise ConfigError("<file>", "top level must be an object")
        try:
            return cls.from_dict(d)
        except ConfigError as exc:
            if exc.line is not None:
                raise
            key = exc.field.split(".")[-1]
            line = next((i for i, ln in enumerate(text.splitlines(), 1) if f'"{key}"' in ln), None)
            raise ConfigError(exc.field, str(exc).split(": ", 1)[1], line) from None

    def validated(self):
        """Return a normalized copy with defaults filled, or raise :class:`ConfigError`."""
        c = self.command
        if c not in COMMANDS:
            raise ConfigError("command", f"must be one of {COMMANDS}")
        updates = {}
        scenario, target = self.scenario, self.target
        if c == "reproduce":
            if target not in TARGETS + ("all",):
                raise ConfigError("target", f"must be one of {TARGETS + ('all',)}")
        else:
            scenario = scenario or DEFAULT_SCENARIO[c]
            allowed = {"mu-sweep": SCENARIOS, "fixed-point": tuple(FAMILIES),
                       "fidelity": ("qubit",)}[c]
            if scenario not in allowed:
                raise ConfigError("scenario", f"{scenario!r} not in {allowed}")
        updates["scenario"] = scenario
        if self.formulation not in FORMULATIONS:
            raise ConfigError("formulation", f"must be one of {FORMULATIONS}")
        if self.mode not in ("mixed", "complex"):
            raise ConfigError("mode", "must be 'mixed' or 'complex'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", "must be 'csv' or 'json'")
        if self.sweep not in ("time", "detuning"):
            raise ConfigError("sweep", "must be 'time' or 'detuning'")
        try:
            tol = float(self.tol)
            eps = float(self.epsilon_damp)
            seed = int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError("tol/seed/epsilon_damp", str(exc)) from None
        if not tol > 0:
            raise ConfigError("tol", "must be positive")
        if eps < 0:
            raise ConfigError("epsilon_damp", "must be nonnegative")
        if seed < 0:
            raise ConfigError("seed", "must be nonnegative")
        grid_text = self.grid or DEFAULT_GRIDS[c]
        if c == "fidelity" and self.sweep == "detuning" and self.grid is None:
            grid_text = "0:4:81:lin"
        grid = GridSpec.parse(grid_text)
        params = _check_params(c, scenario, self.params)
        updates.update(tol=tol, epsilon_damp=eps, seed=seed, grid=str(grid), params=params)
        return dataclasses.replace(self, **updates)


def _check_params(command, scenario, params):
    if not isinstance(params, dict):
        raise ConfigError("params", "must be a mapping")
    keys = QUBIT_KEYS if (scenario or "").startswith("qubit") else SMD_KEYS
    if command == "reproduce":
        if params:
            raise ConfigError("params", "reproduce targets use the embedded parameters")
        return {}
    out = {}
    for k, v in params.items():
        if k not in keys:
            raise ConfigError(f"params.{k}", f"unknown for scenario {scenario!r}; use {keys}")
        try:
            out[k] = float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"params.{k}", f"not a number: {v!r}") from None
    try:
        (QubitParams if keys == QUBIT_KEYS else SmdParams)(**out)
    except (ValueError, InvalidDelta) as exc:
        raise ConfigError("params", str(exc)) from None
    return dict(sorted(out.items()))


# --------------------------------------------------------------------------
# output


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".12g")) if math.isfinite(x) else str(x)
    return x


def format_csv(rows, summary):
    buf = io.StringIO()
    header = []
    for r in rows:
        header += [k for k in r if k not in header]
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r.get(k, "")) for k in header])
    for k, v in summary.items():
        buf.write(f"# {k}={_fmt(v) if not isinstance(v, dict) else json.dumps(_jsonable(v))}\n")
    return buf.getvalue()


def format_json(config, rows, summary):
    doc = {"config": _jsonable(config.to_dict()), "rows": _jsonable(rows),
           "summary": _jsonable(summary)}
    return json.dumps(doc, indent=2) + "\n"


# --------------------------------------------------------------------------
# commands


def _freq_grid(cfg, A):
    g = GridSpec.parse(cfg.grid)
    return frequency_grid(g.lo, g.hi, g.n, log=g.log, A=A)


def cmd_mu_sweep(cfg):
    A, _, _ = scenario_pair(cfg.scenario, cfg.params, cfg.epsilon_damp)
    grid = _freq_grid(cfg, A)
    rows, summary, skipped = sweep_rows(cfg.scenario, grid, cfg.params, cfg.formulation,
                                        cfg.mode, cfg.seed, cfg.epsilon_damp)
    summary["skipped"] = len(skipped)
    return rows, summary, skipped, EXIT_OK


def cmd_fixed_point(cfg):
    g = GridSpec.parse(cfg.grid)
    mags = g.points()
    mags = mags[mags > 0]
    deltas = np.concatenate([-mags[::-1], mags])
    rows, summary = fixed_point_rows(FAMILIES[cfg.scenario], cfg.params, deltas, cfg.tol,
                                     cfg.formulation)
    return rows, summary, [], EXIT_OK if summary["converged"] else EXIT_FAIL


def cmd_fidelity(cfg):
    q = QubitParams(**cfg.params)
    g = GridSpec.parse(cfg.grid)
    pts = g.points()
    if cfg.sweep == "detuning":
        rows = []
        for d in pts:
            qd = QubitParams(Delta=float(d), J=q.J, gamma=0.0)
            rows.append({"Delta": float(d), "F_max": max_fidelity(qd),
                         "t_f": transfer_time(qd)})
        return rows, {"J": q.J}, [], EXIT_OK
    fa = fidelity_analytic(pts, q)
    fs = fidelity_simulate(pts, q)
    diff = np.abs(fa - fs)
    rows = [{"t": float(t), "F_analytic": float(a), "F_simulated": float(s), "abs_diff": float(e)}
            for t, a, s, e in zip(pts, fa, fs, diff)]
    summary = {"max_abs_diff": float(diff.max()), "transfer_time": transfer_time(q)}
    return rows, summary, [], EXIT_OK if diff.max() < 1e-8 else EXIT_FAIL


def cmd_reproduce(cfg):
    targets = ("table1", "table2", "scalars") if cfg.target == "all" else (cfg.target,)
    rows, summary, skipped, ok = [], {}, [], True
    grid = None
    if cfg.grid != str(GridSpec.parse(DEFAULT_GRIDS["reproduce"])):
        g = GridSpec.parse(cfg.grid)
        grid = frequency_grid(g.lo, g.hi, g.n, log=g.log)
    for t in targets:
        rep = run_target(t, seed=cfg.seed, mode=cfg.mode, grid=grid)
        rows += [{"target": t, **r} for r in rep.rows]
        summary[t] = {"verdict": {None: "data", True: "pass", False: "fail"}[rep.passed],
                      **rep.summary}
        skipped += rep.skipped
        ok &= rep.passed is not False
    return rows, summary, skipped, EXIT_OK if ok else EXIT_FAIL


COMMAND_FUNCS = {"mu-sweep": cmd_mu_sweep, "fixed-point": cmd_fixed_point,
                 "reproduce": cmd_reproduce, "fidelity": cmd_fidelity}


def execute(cfg):
    """Run a validated config; returns ``(text, skipped, exit_code)``."""
    rows, summary, skipped, code = COMMAND_FUNCS[cfg.command](cfg)
    text = format_csv(rows, summary) if cfg.format == "csv" else format_json(cfg, rows, summary)
    return text, skipped, code


# --------------------------------------------------------------------------
# argument parsing


def _common(p):
    p.add_argument("--config", help="JSON RunConfig; explicit flags override its fields")
    p.add_argument("--scenario")
    p.add_argument("--formulation", choices=FORMULATIONS)
    p.add_argument("--param", action="append", metavar="KEY=VALUE", default=None,
                   help="model parameter override (repeatable)")
    p.add_argument("--grid", metavar="LO:HI:N[:log|lin]")
    p.add_argument("--mode", choices=("mixed", "complex"))
    p.add_argument("--out", help="output path; stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon-damp", type=float, dest="epsilon_damp", metavar="EPS")


def build_parser():
    parser = argparse.ArgumentParser(prog="robustsweep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("mu-sweep", help="mu bounds over frequency for a scenario")
    _common(p)
    p = sub.add_parser("fixed-point", help="norm curves and fixed-point margins for a qubit family")
    _common(p)
    p = sub.add_parser("reproduce", help="compare against embedded reference values")
    p.add_argument("target", choices=TARGETS + ("all",))
    _common(p)
    p = sub.add_parser("fidelity", help="transfer fidelity trajectory or detuning sweep")
    _common(p)
    p.add_argument("--sweep", choices=("time", "detuning"))
    return parser


def _parse_params(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError("param", f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_args(argv=None):
    """Parse ``argv`` into a validated :class:`RunConfig`."""
    ns = build_parser().parse_args(argv)
    base = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                base = RunConfig.from_json(fh.read()).to_dict()
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
        if base["command"] != ns.command:
            raise ConfigError("command", f"config is for {base['command']!r}")
    base["command"] = ns.command
    for name in ("scenario", "target", "formulation", "grid", "mode", "out", "format", "tol",
                 "seed", "epsilon_damp", "sweep"):
        val = getattr(ns, name, None)
        if val is not None:
            base[name] = val
    if ns.param:
        base["params"] = {**base.get("params", {}), **_parse_params(ns.param)}
    return RunConfig.from_dict(base)


def main(argv=None):
    try:
        cfg = parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, skipped, code = execute(cfg)
    except (ValueError, InvalidDelta) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        for tag, w, msg in skipped:
            print(f"skipped {tag} omega={w:.12g}: {msg}", file=sys.stderr)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if skipped:
            with open(cfg.out + ".skipped.log", "w", encoding="utf-8", newline="\n") as fh:
                for tag, w, msg in skipped:
                    fh.write(f"{tag} omega={w:.12g}: {msg}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
