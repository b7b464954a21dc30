"""``dconn``: run holonomy computations and property suites from a JSON scenario.

Exit codes: 0 success, 1 domain error or disagreement, 2 invalid config.
"""

from __future__ import annotations

import argparse
import datetime
import json
import random
import sys
from dataclasses import dataclass, field

from .bundle import BasePatch, DTypeRegion, as_point
from .connection import (DiscreteConnection, from_expressions, from_potential_expressions,
                         omega_mu, region_from_expression)
from .errors import ConnectionValidationError, DomainError, NotALoopError
from .expr import ExprSyntaxError
from .group import GroupDescriptor
from .suites import SUITES, run_suite
from .transport import DiscretePath, LoopSampler, log_safe_step, verify_phase_theorems

SCHEMA_VERSION = 1
EXIT_OK, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2
SUMMARY_LINES = 20


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SamplerSpec:
    count: int
    seed: int
    max_step: float | str = 1.0
    min_steps: int = 2
    max_steps: int = 10
    base_point: tuple | None = None


@dataclass
class Scenario:
    group: GroupDescriptor
    patch: BasePatch
    connection: DiscreteConnection
    loops: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    cases: int = 1000
    seed: int | None = None
    triple: tuple | None = None
    output: str | None = None


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _int(value, what: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{what} must be an integer")
    return value


def _point(p, dim: int, what: str) -> tuple:
    try:
        m = as_point(p)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: {p!r} is not a base point") from None
    _require(len(m) == dim, f"{what}: {p!r} has dimension {len(m)}, base has dimension {dim}")
    return m


def _build_connection(spec: dict, group: GroupDescriptor, patch: BasePatch | None,
                      base_given: bool) -> tuple[DiscreteConnection, BasePatch]:
    _require(isinstance(spec, dict), "connection must be an object")
    kinds = [k for k in ("builtin", "custom", "exact") if k in spec]
    _require(len(kinds) == 1, "connection needs exactly one of builtin, custom, exact")
    kind = kinds[0]
    if kind == "builtin":
        _require(spec["builtin"] == "omega_mu", f"unknown builtin connection {spec['builtin']!r}")
        mu = spec.get("mu", 2)
        _require(isinstance(mu, (int, float)) and not isinstance(mu, bool) and mu >= 1,
                 "omega_mu needs a real mu >= 1")
        _require(group.kind == "torus" and group.k == 1, "omega_mu lives on the circle group")
        _require("domain" not in spec, "omega_mu has a fixed domain")
        A = omega_mu(mu, group.tolerance)
        if base_given:
            _require(patch.dim == 1 and patch.box[0][0] >= 0,
                     "omega_mu needs a 1-dimensional base inside (0, inf)")
            A = DiscreteConnection(patch, A.group, A.local_form, A.domain, A.name, A.spec)
        return A, A.patch

    _require(patch is not None, f"a {kind} connection needs a base patch")
    domain = None
    if "domain" in spec:
        _require(isinstance(spec["domain"], str), "connection.domain must be an expression string")
        domain = DTypeRegion(region_from_expression(spec["domain"], patch.dim))
    body = spec[kind]
    key = "A_s" if kind == "custom" else "alpha0"
    _require(isinstance(body, dict) and isinstance(body.get(key), list)
             and all(isinstance(e, str) for e in body[key]),
             f"connection.{kind}.{key} must be a list of expression strings")
    if kind == "custom":
        A = from_expressions(body[key], group, patch, domain)
    else:
        A = from_potential_expressions(body[key], group, patch, domain)
    if domain is not None:
        A.spec["domain"] = spec["domain"]
    return A, patch


def _sampler(data: dict, seed: int | None, dim: int) -> SamplerSpec:
    _require(isinstance(data, dict), "sampler must be an object")
    count = _int(data.get("count"), "sampler.count")
    _require(count >= 0, "sampler.count must be nonnegative")
    s = seed if seed is not None else data.get("seed")
    _require(s is not None, "a seed is mandatory when a loop sampler is used")
    max_step = data.get("max_step", 1.0)
    _require(max_step == "auto" or (isinstance(max_step, (int, float)) and max_step > 0),
             "sampler.max_step must be positive or \"auto\"")
    min_steps = _int(data.get("min_steps", 2), "sampler.min_steps")
    max_steps = _int(data.get("max_steps", 10), "sampler.max_steps")
    _require(1 <= min_steps <= max_steps, "need 1 <= min_steps <= max_steps")
    bp = data.get("base_point")
    return SamplerSpec(count, _int(s, "seed"), max_step, min_steps, max_steps,
                       None if bp is None else _point(bp, dim, "sampler.base_point"))


def load_scenario(data: dict, seed_override: int | None = None) -> Scenario:
    """Validate a parsed config; raises :class:`ConfigError` on bad input."""
    _require(isinstance(data, dict), "config must be a JSON object")
    try:
        group = GroupDescriptor.from_json(data.get("group", {"kind": "circle"}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"group: {exc}") from None
    patch = None
    if "base" in data:
        try:
            patch = BasePatch.from_json(data["base"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"base: {exc}") from None
    _require("connection" in data, "config needs a connection")
    try:
        A, patch = _build_connection(data["connection"], group, patch, "base" in data)
    except (ExprSyntaxError, ConnectionValidationError) as exc:
        raise ConfigError(f"connection: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"connection: {exc}") from None

    seed = seed_override if seed_override is not None else data.get("seed")
    if seed is not None:
        _int(seed, "seed")
    sc = Scenario(group, patch, A, seed=seed)

    loops = data.get("loops", [])
    _require(isinstance(loops, list), "loops must be a list")
    for i, entry in enumerate(loops):
        if isinstance(entry, dict):
            sc.loops.append(_sampler(entry, seed, patch.dim))
        else:
            _require(isinstance(entry, list) and entry, f"loops[{i}] must be a nonempty list")
            sc.loops.append(tuple(_point(p, patch.dim, f"loops[{i}]") for p in entry))
    if "sampler" in data:
        sc.loops.append(_sampler(data["sampler"], seed, patch.dim))

    checks = data.get("checks", [])
    _require(isinstance(checks, list) and all(isinstance(c, str) for c in checks),
             "checks must be a list of suite names")
    sc.checks = list(checks)
    sc.cases = _int(data.get("cases", 1000), "cases")
    if "triple" in data:
        t = data["triple"]
        _require(isinstance(t, list) and len(t) == 3, "triple must have three base points")
        sc.triple = tuple(_point(p, patch.dim, "triple") for p in t)
    out = data.get("output")
    _require(out is None or isinstance(out, str), "output must be a path")
    sc.output = out
    return sc


def _sampled_loops(A: DiscreteConnection, spec: SamplerSpec) -> list[DiscretePath]:
    rng = random.Random(spec.seed)
    base = spec.base_point
    step = spec.max_step
    radius = None
    if step == "auto":
        if base is None:
            base = A.patch.sample(rng)
        step = log_safe_step(A, base, seed=spec.seed)
        radius = step / 2
    sampler = LoopSampler(A.patch, base, float(step), radius, spec.min_steps, spec.max_steps)
    return [sampler(rng) for _ in range(spec.count)]


def all_loops(sc: Scenario) -> list:
    """Explicit and sampled loops in config order."""
    out = []
    for entry in sc.loops:
        if isinstance(entry, SamplerSpec):
            out.extend(_sampled_loops(sc.connection, entry))
        else:
            out.append(entry)
    return out


def _header(command: str, sc: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "group": sc.group.to_json(),
        "base": sc.patch.to_json(),
        "connection": sc.connection.to_json(),
        "seed": sc.seed,
    }


def cmd_holonomy(sc: Scenario) -> tuple[dict, int]:
    A = sc.connection
    reports = []
    code = EXIT_OK
    for index, loop in enumerate(all_loops(sc)):
        path = loop if isinstance(loop, DiscretePath) else DiscretePath(loop)
        try:
            entry = verify_phase_theorems(A, path).to_json()
            if not entry["agreement"]:
                code = max(code, EXIT_DOMAIN)
        except (DomainError, NotALoopError) as exc:
            entry = {"loop": path.to_json(), "error": f"{type(exc).__name__}: {exc}",
                     "agreement": False}
            code = max(code, EXIT_DOMAIN)
        reports.append({"index": index, **entry})
    out = _header("holonomy", sc)
    out["reports"] = reports
    out["all_agree"] = code == EXIT_OK
    return out, code


def cmd_verify(sc: Scenario, suites: list[str] | None = None) -> tuple[dict, int]:
    names = suites or sc.checks
    _require(bool(names), "no suites selected (use checks in the config or --suite)")
    unknown = [n for n in names if n not in SUITES]
    _require(not unknown, f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(sorted(SUITES))}")
    seed = 0 if sc.seed is None else sc.seed
    results = []
    for name in names:
        try:
            results.append(dict(run_suite(name, sc.connection, sc.cases, seed)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    out = _header("verify", sc)
    out["cases"] = sc.cases
    out["suites"] = results
    out["ok"] = all(r["failures"] == 0 for r in results)
    return out, EXIT_OK if out["ok"] else EXIT_DOMAIN


def cmd_curvature(sc: Scenario, triple=None) -> tuple[dict, int]:
    t = triple if triple is not None else sc.triple
    _require(t is not None, "no triple given (use --triple or triple in the config)")
    t = tuple(_point(p, sc.patch.dim, "triple") for p in t)
    A = sc.connection
    value = A.curvature_local(*t)  # DomainError propagates to exit 1
    log_value = None
    if A.in_w2_tilde(*t):
        log_value = A.log_curvature_local(*t).to_json()
    out = _header("curvature", sc)
    out["triple"] = [list(m) for m in t]
    out["value"] = value.to_json()
    out["log"] = log_value
    return out, EXIT_OK


def _parse_triple(text: str):
    try:
        data = json.loads(text if text.lstrip().startswith("[") else f"[{text}]")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--triple: {exc}") from None
    _require(isinstance(data, list) and len(data) == 3, "--triple needs three base points")
    return data


def _summary(report: dict) -> str:
    cmd = report["command"]
    if cmd == "holonomy":
        lines = [f"{len(report['reports'])} loop(s), all agree: {report['all_agree']}"]
        for r in report["reports"][:SUMMARY_LINES]:
            if "error" in r:
                lines.append(f"  #{r['index']}: {r['error']}")
                continue
            direct = r["methods"]["direct"]["value"]
            ok = sum(m["status"] == "ok" for m in r["methods"].values())
            lines.append(f"  #{r['index']}: phase {direct}, {ok} method(s) ok, "
                         f"max deviation {r['max_deviation']:.3g}")
        if len(report["reports"]) > SUMMARY_LINES:
            lines.append(f"  ... {len(report['reports']) - SUMMARY_LINES} more")
        return "\n".join(lines)
    if cmd == "verify":
        return "\n".join(f"{s['name']}: {s['cases']} cases, {s['failures']} failures, "
                         f"max deviation {s['max_deviation']:.3g}" for s in report["suites"])
    return f"B_s{tuple(tuple(m) for m in report['triple'])} = {report['value']}, log = {report['log']}"


def dumps(report: dict, pretty: bool = False) -> str:
    return json.dumps(report, indent=2 if pretty else None, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dconn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="scenario JSON file")
    common.add_argument("--seed", type=int, help="overrides every seed in the config")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true",
                     help="indented JSON plus a summary on stderr")
    common.set_defaults(pretty=False)
    common.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    sub.add_parser("holonomy", parents=[common], help="holonomy phases of the scenario loops")
    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("--suite", action="append", metavar="NAME", help="suite to run (repeatable)")
    v.add_argument("--cases", type=int, help="cases per suite (overrides config)")
    c = sub.add_parser("curvature", parents=[common], help="local curvature at a base triple")
    c.add_argument("--triple", help='e.g. "0.5,1.5,2.0" or "[[0,1],[1,1],[1,0]]"')
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        sc = load_scenario(data, args.seed)
        if args.command == "holonomy":
            report, code = cmd_holonomy(sc)
        elif args.command == "verify":
            if args.cases is not None:
                sc.cases = args.cases
            report, code = cmd_verify(sc, args.suite)
        else:
            triple = _parse_triple(args.triple) if args.triple else None
            report, code = cmd_curvature(sc, triple)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    text = dumps(report, args.pretty)
    target = args.output or sc.output
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.pretty:
        print(_summary(report), file=sys.stderr)
    return code


def run() -> None:
    sys.exit(main())
