"""Command-line front end.

Exit codes: 0 success, 1 certification or property failure, 2 input error,
3 size cap exceeded.  ``GNCG_OUTPUT_DIR`` overrides the directory that
relative ``--output`` paths are written to.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from gncg import dynamics, equilibria, families, game, optima
from gncg.errors import CapExceededError, GNCGError, ParseError
from gncg.hostgraph import HostGraph, as_weight, check_metric
from gncg.serialize import (
    bundle_to_json,
    dumps,
    error_to_json,
    host_from_json,
    host_to_json,
    loads,
    profile_from_json,
    to_jsonable,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
OUTPUT_DIR_ENV = "GNCG_OUTPUT_DIR"
SUBCOMMANDS = ("validate", "cost", "best-response", "certify", "optimum", "dynamics", "family", "poa")
POA_COLUMNS = ("family", "params", "alpha", "cost_NE", "cost_OPT", "ratio", "bound", "bound_satisfied")


@dataclass
class RunConfig:
    subcommand: str
    alpha: Fraction | float = Fraction(1)
    br_cap: int = equilibria.DEFAULT_BR_CAP
    opt_cap: int = optima.DEFAULT_OPT_CAP
    seed: int | None = None
    scheduler: str = "round-robin"
    mode: str = "exact"
    eps: float = 1e-9
    fmt: str = "json"
    output: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ParseError(f"unknown subcommand {self.subcommand!r}", "subcommand")
        if not self.alpha > 0:
            raise ParseError("alpha must be positive", "alpha")
        if self.br_cap < 2 or self.opt_cap < 2:
            raise ParseError("caps must be at least 2", "cap")
        if self.mode == "float" and not self.eps > 0:
            raise ParseError("eps must be positive in float mode", "eps")


class PropertyFailure(Exception):
    """Raised inside dispatch to request exit code 1 while still emitting a report."""

    def __init__(self, report):
        super().__init__("property failure")
        self.report = report


# -- formatting ---------------------------------------------------------------


def format_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(float(x), ".12g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def emit_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    """RFC 4180 CSV with a header row; rationals as ``p/q``, floats to 12 significant digits."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else list(POA_COLUMNS)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


# -- helpers ------------------------------------------------------------------


def _floatify(host: HostGraph, eps: float) -> HostGraph:
    weights = tuple(tuple(float(w) for w in row) for row in host.weights)
    return replace(host, weights=weights, eps=eps)


def _host(config: RunConfig, doc) -> HostGraph:
    if doc is None:
        raise ParseError("this subcommand needs --instance", "instance")
    host = host_from_json(doc.get("instance", doc) if isinstance(doc, dict) else doc)
    if config.mode == "float" and host.exact:
        host = _floatify(host, config.eps)
    return host


def _profile(config: RunConfig, doc, host: HostGraph, required: bool = True):
    raw = config.options.get("profile")
    if raw is None and isinstance(doc, dict):
        raw = doc.get("profile")
    if raw is None:
        if required:
            raise ParseError("no strategy profile given", "profile")
        return game.StrategyProfile.empty(host.n)
    profile = profile_from_json(raw, host.n)
    profile.validate(host.n)
    return profile


def _alpha(config: RunConfig, host: HostGraph | None = None):
    if host is not None and not host.exact:
        return float(config.alpha)
    return config.alpha


def _parse_grid(text: str) -> list:
    """``a,b,c`` or ``start:stop:step`` (inclusive) of exact weights."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParseError(f"bad grid {text!r}", "grid")
        return dynamics.frange(*(as_weight(p) for p in parts))
    return [as_weight(p) for p in text.split(",") if p.strip()]


# -- subcommands --------------------------------------------------------------


def _validate(config, doc):
    host = _host(config, doc)
    violations = check_metric(host)
    return {
        "valid": True,
        "n": host.n,
        "kind": host.kind,
        "exact": host.exact,
        "metric": not violations,
        "violations": [{"u": v.u, "x": v.x, "v": v.v, "slack": v.slack} for v in violations[:50]],
    }


def _cost(config, doc):
    host = _host(config, doc)
    profile = _profile(config, doc, host)
    alpha = _alpha(config, host)
    agents = game.agent_costs(host, profile, alpha)
    return {
        "alpha": alpha,
        "agents": [{"agent": u, "edge_cost": c.edge_cost, "distance_cost": c.distance_cost, "total": c.total} for u, c in enumerate(agents)],
        "social_cost": game.social_cost(host, profile, alpha),
        "double_owned": [list(e) for e in profile.double_owned()],
    }


def _best_response(config, doc):
    host = _host(config, doc)
    profile = _profile(config, doc, host, required=False)
    alpha = _alpha(config, host)
    u = int(config.options.get("agent", 0))
    if not 0 <= u < host.n:
        raise ParseError(f"agent {u} out of range", "agent")
    current = game.agent_cost(host, profile, u, alpha).total
    if config.options.get("greedy"):
        strategy = equilibria.greedy_stable_response(host, profile, u, alpha)
        cost = game.agent_cost(host, profile.with_strategy(u, strategy), u, alpha).total
        method = "greedy"
    else:
        strategy, cost = equilibria.best_response_exact(host, profile, u, alpha, config.br_cap)
        method = "exact"
    return {"agent": u, "method": method, "strategy": sorted(strategy), "cost": cost, "current_cost": current}


def _certify(config, doc):
    host = _host(config, doc)
    profile = _profile(config, doc, host)
    alpha = _alpha(config, host)
    rep = equilibria.certify(host, profile, alpha, config.options.get("level", "NE"), config.br_cap)
    out = {"alpha": alpha, "stable": rep.stable, **to_jsonable(rep)}
    if not rep.stable:
        raise PropertyFailure(out)
    return out


def _optimum(config, doc):
    host = _host(config, doc)
    alpha = _alpha(config, host)
    method = config.options.get("method", "exact")
    spanner = config.options.get("spanner")
    if spanner is not None:
        k = math.inf if str(spanner).lower() == "inf" else as_weight(spanner)
        es = optima.min_weight_spanner(host, k, config.opt_cap)
        out = {"method": "spanner", "stretch_bound": k, "edge_set": es.to_dict()}
        if config.options.get("orient"):
            prof = optima.spanner_ne_ownership(host, es, alpha)
            out["ne_profile"] = None if prof is None else prof.to_lists()
            if prof is None:
                raise PropertyFailure(out)
        return out
    if method == "exact":
        es, _ = optima.optimum_exact(host, alpha, config.opt_cap)
    elif method == "one-two":
        es = optima.optimum_one_two(host, alpha)
    elif method == "tree":
        es = optima.optimum_tree(host, alpha)
    else:
        raise ParseError(f"unknown optimum method {method!r}", "method")
    return {"method": method, "edge_set": es.to_dict(), "stretch": game.stretch(host, es.network(host))}


def _dynamics(config, doc):
    host = _host(config, doc)
    alpha = _alpha(config, host)
    grid = config.options.get("cycle_search")
    if grid:
        certs = dynamics.cycle_search(
            host,
            _parse_grid(grid),
            max_len=int(config.options.get("max_len", 8)),
            restarts=int(config.options.get("restarts", 10)),
            seed=config.seed or 0,
        )
        return {"cycles": [c.to_dict() for c in certs], "found": len(certs)}
    init = _profile(config, doc, host, required=False)
    trace = dynamics.run(
        host,
        alpha,
        init,
        rule=config.options.get("rule", "exact-BR"),
        scheduler=config.scheduler,
        max_steps=int(config.options.get("max_steps", 1000)),
        seed=config.seed,
        cap=config.br_cap,
    )
    out = trace.to_dict()
    if trace.cycle is not None:
        out["cycle_verified"] = dynamics.verify_cycle(host, alpha, trace.cycle).accepted
    return out


def _bundle(name: str, params: dict):
    p = dict(params)
    a = p.get("alpha", 1)
    if name == "tree-star":
        return families.tree_star_family(int(p["n"]), a)
    if name == "geometric-path":
        return families.geometric_path_family(int(p["n"]), a)
    if name == "four-node":
        return families.four_node_family(a)
    if name == "rd-one-norm":
        return families.rd_one_norm_family(int(p["d"]), a)
    if name == "one-two-lb":
        return families.one_two_lb_family(int(p["N"]), a)
    if name == "general-triangle":
        return families.general_triangle(a)
    if name in ("set-cover-tree", "set-cover-points"):
        kwargs = {k: p[k] for k in ("L", "eps", "beta") if k in p}
        if name == "set-cover-points" and "p" in p:
            kwargs["p"] = int(p["p"])
        gen = families.set_cover_tree_instance if name == "set-cover-tree" else families.set_cover_points_instance
        return gen(p["universe"], p["sets"], **kwargs)
    if name == "vertex-cover":
        return families.vertex_cover_instance([tuple(e) for e in p["edges"]], p["cover"])
    raise ParseError(f"unknown family {name!r}", "family")


FAMILY_NAMES = (
    "tree-star",
    "geometric-path",
    "four-node",
    "rd-one-norm",
    "one-two-lb",
    "general-triangle",
    "set-cover-tree",
    "set-cover-points",
    "vertex-cover",
    "brc-points",
)


def _family(config, doc):
    name = config.options.get("family")
    params = dict(config.options.get("params") or {})
    if name == "brc-points":
        return {"name": name, "instance": host_to_json(families.brc_points())}
    if "alpha" not in params:
        params["alpha"] = config.alpha
    return bundle_to_json(_bundle(name, params))


def _poa_bound(name: str, alpha: Fraction) -> Fraction:
    if name == "general-triangle":
        return ((alpha + 2) / 2) ** 2
    if name == "one-two-lb" and alpha < 1:
        return 3 / (alpha + 2)
    return (alpha + 2) / 2


def poa_rows(name: str, grid: dict[str, list], alphas: Sequence, exact_opt: bool = False, opt_cap: int = optima.DEFAULT_OPT_CAP) -> list[dict]:
    """One row per (parameter combination, alpha), sorted deterministically."""
    keys = sorted(grid)
    combos = [{}]
    for k in keys:
        combos = [{**c, k: v} for c in combos for v in grid[k]]
    rows = []
    for params in combos:
        for a in alphas:
            a = Fraction(a)
            b = _bundle(name, {**params, "alpha": a})
            c_ne = game.social_cost(b.host, b.profiles["NE"], a)
            if exact_opt:
                _, c_opt = optima.optimum_exact(b.host, a, opt_cap)
            else:
                c_opt = game.social_cost(b.host, b.profiles["OPT"], a)
            ratio = c_ne / c_opt
            bound = _poa_bound(name, a)
            rows.append(
                {
                    "family": name,
                    "params": ";".join(f"{k}={params[k]}" for k in keys),
                    "alpha": a,
                    "cost_NE": c_ne,
                    "cost_OPT": c_opt,
                    "ratio": ratio,
                    "bound": bound,
                    "bound_satisfied": ratio <= bound,
                }
            )
    rows.sort(key=lambda r: (r["params"], r["alpha"]))
    return rows


def _poa(config, doc):
    name = config.options.get("family")
    if name not in FAMILY_NAMES[:6]:
        raise ParseError(f"poa needs a lower-bound family, got {name!r}", "family")
    grid = {k: v for k, v in (config.options.get("grid") or {}).items() if v}
    alphas = config.options.get("alphas") or [config.alpha]
    rows = poa_rows(name, grid, alphas, bool(config.options.get("exact_opt")), config.opt_cap)
    if not all(r["bound_satisfied"] for r in rows):
        raise PropertyFailure(rows)
    return rows


_HANDLERS = {
    "validate": _validate,
    "cost": _cost,
    "best-response": _best_response,
    "certify": _certify,
    "optimum": _optimum,
    "dynamics": _dynamics,
    "family": _family,
    "poa": _poa,
}


def dispatch(config: RunConfig, doc: Any = None):
    """Run one subcommand; returns the report (a dict, or a list of rows for ``poa``)."""
    return _HANDLERS[config.subcommand](config, doc)


# -- argument parsing ---------------------------------------------------------


def _weight_arg(text: str):
    try:
        return as_weight(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance JSON file ('-' for stdin)")
    common.add_argument("--profile", help="strategy profile JSON file (overrides the instance's 'profile')")
    common.add_argument("--alpha", type=_weight_arg, default=Fraction(1))
    common.add_argument("--cap", type=int, default=equilibria.DEFAULT_BR_CAP, help="size cap for exact best responses")
    common.add_argument("--opt-cap", type=int, default=optima.DEFAULT_OPT_CAP, help="size cap for exhaustive optima")
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--eps", type=float, default=1e-9)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--error-json", action="store_true", help="print errors as JSON on stderr")

    parser = argparse.ArgumentParser(prog="gncg", description="Network creation games on weighted host graphs.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("validate", parents=[common], help="check a host graph")
    sub.add_parser("cost", parents=[common], help="agent and social cost of a profile")
    p = sub.add_parser("best-response", parents=[common], help="best response of one agent")
    p.add_argument("--agent", type=int, default=0)
    p.add_argument("--greedy", action="store_true", help="greedy single-move response instead of exact")
    p = sub.add_parser("certify", parents=[common], help="AE/GE/NE certification")
    p.add_argument("--level", choices=("AE", "GE", "NE"), default="NE")
    p = sub.add_parser("optimum", parents=[common], help="social optimum or min-weight spanner")
    p.add_argument("--method", choices=("exact", "one-two", "tree"), default="exact")
    p.add_argument("--spanner", help="stretch bound k (or 'inf') for a minimum-weight k-spanner")
    p.add_argument("--orient", action="store_true", help="also search a NE ownership of the spanner")
    p = sub.add_parser("dynamics", parents=[common], help="improving-move dynamics and cycle search")
    p.add_argument("--rule", choices=dynamics.RULES, default="exact-BR")
    p.add_argument("--scheduler", choices=dynamics.SCHEDULERS, default="round-robin")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--cycle-search", metavar="GRID", help="alpha grid 'a,b,c' or 'start:stop:step'")
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--restarts", type=int, default=10)
    for name in ("family", "poa"):
        p = sub.add_parser(name, parents=[common], help="generate a family instance" if name == "family" else "PoA sweep over a family")
        p.add_argument("family", nargs="?", choices=FAMILY_NAMES)
        p.add_argument("--family", dest="family_opt", choices=FAMILY_NAMES, help="same as the positional family name")
        p.add_argument("--n", type=_int_list)
        p.add_argument("--d", type=_int_list)
        p.add_argument("--N", type=_int_list)
        p.add_argument("--params", help="extra generator parameters as a JSON object")
        if name == "poa":
            p.add_argument("--alphas", help="alpha grid 'a,b,c' or 'start:stop:step'")
            p.add_argument("--exact-opt", action="store_true", help="use the exhaustive optimum instead of the family's OPT")
    return parser


def _config(args) -> RunConfig:
    opts: dict[str, Any] = {}
    if args.subcommand in ("family", "poa"):
        if getattr(args, "family_opt", None):
            if args.family and args.family != args.family_opt:
                raise ParseError("conflicting family names", "family")
            args.family = args.family_opt
        if not args.family:
            raise ParseError("a family name is required", "family")
    for name in ("agent", "greedy", "level", "method", "spanner", "orient", "rule", "max_steps", "cycle_search", "max_len", "restarts", "family", "exact_opt"):
        if getattr(args, name, None) is not None:
            opts[name] = getattr(args, name)
    if args.profile:
        opts["profile"] = loads(_read(args.profile))
    if args.subcommand in ("family", "poa"):
        params = json.loads(args.params) if args.params else {}
        grid = {k: getattr(args, k) for k in ("n", "d", "N") if getattr(args, k)}
        if args.subcommand == "family":
            params.update({k: v[0] for k, v in grid.items()})
        opts["params"] = params
        opts["grid"] = grid
        if getattr(args, "alphas", None):
            opts["alphas"] = _parse_grid(args.alphas)
    return RunConfig(
        subcommand=args.subcommand,
        alpha=args.alpha,
        br_cap=args.cap,
        opt_cap=args.opt_cap,
        seed=args.seed,
        scheduler=getattr(args, "scheduler", "round-robin"),
        mode=args.mode,
        eps=args.eps,
        fmt=args.fmt,
        output=args.output,
        options=opts,
    )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", "path") from None


def _render(config: RunConfig, report) -> str:
    if config.fmt == "csv":
        rows = report if isinstance(report, list) else [report]
        columns = list(POA_COLUMNS) if config.subcommand == "poa" else None
        flat = [{k: (json.dumps(to_jsonable(v), sort_keys=True) if isinstance(v, (dict, list)) else v) for k, v in r.items()} for r in rows]
        return emit_csv(flat, columns)
    return dumps(report) + "\n"


def _write(config: RunConfig, text: str) -> None:
    if not config.output:
        sys.stdout.write(text)
        return
    path = Path(config.output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code = EXIT_OK
    try:
        config = _config(args)
        doc = loads(_read(args.instance)) if args.instance else None
        try:
            report = dispatch(config, doc)
        except PropertyFailure as exc:
            report, code = exc.report, EXIT_FAIL
        _write(config, _render(config, report))
    except CapExceededError as exc:
        return _fail(args, exc, EXIT_CAP)
    except (GNCGError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(args, exc, EXIT_INPUT)
    return code


def _fail(args, exc: BaseException, code: int) -> int:
    if getattr(args, "error_json", False):
        sys.stderr.write(json.dumps(error_to_json(exc), sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"gncg: error: {exc}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
