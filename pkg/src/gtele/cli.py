"""Command-line front end.

Subcommands::

    gtele teleport --resource tmss:1 --input coherent
    gtele check --resource 0.5,0.5,0,0
    gtele sweep 0 3 61 --out fidelity.csv
    gtele mc --resource tmss:1 --input coherent --samples 1000000 --seed 42

Resources are ``a,b,c1,c2`` or one of ``tmss:R``, ``mirror-tmss:R``,
``epr``, ``mirror``, ``point``. Options may also come from a ``key=value``
file given with ``--config``; command-line flags win.

Exit codes: 0 success, 2 bad arguments, 3 engine error (reported as JSON on
stdout), 4 unwritable output file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import engine, montecarlo, realizability
from .engine import Variant
from .errors import TeleportError
from .gaussian import GaussianState, PhasePoint, ResourceParams
from .realizability import NamedResource, ResourceKind

EXIT_USAGE = 2
EXIT_ENGINE = 3
EXIT_IO = 4
MIN_MC_SAMPLES = 10_000


class UsageError(Exception):
    pass


@dataclass
class ScenarioConfig:
    input: GaussianState
    resource: ResourceParams | NamedResource
    variant: Variant = Variant.STANDARD
    mc: montecarlo.McConfig | None = None


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what}: expected {n} finite numbers, got {text!r}")
    return vals


def parse_resource(text: str) -> ResourceParams | NamedResource:
    text = text.strip()
    name, _, arg = text.partition(":")
    try:
        kind = ResourceKind(name)
    except ValueError:
        try:
            return ResourceParams(*_floats(text, 4, "resource"))
        except ValueError as err:
            raise UsageError(f"resource: {err}") from None
    if kind in realizability.LIMIT_KINDS:
        if arg:
            raise UsageError(f"resource {name} takes no parameter")
        return realizability.make(kind)
    if not arg:
        raise UsageError(f"resource {name} needs a squeezing parameter, e.g. {name}:1")
    (r,) = _floats(arg, 1, "squeezing")
    try:
        return realizability.make(kind, r)
    except (ValueError, TeleportError) as err:
        raise UsageError(str(err)) from None


def parse_input(name: str | None, mean: str | None, cov: str | None) -> GaussianState:
    """Coherent vacuum unless overridden by an explicit mean and/or covariance."""
    if name is not None and name != "coherent":
        raise UsageError(f"input: only 'coherent' is a named input, got {name!r}")
    mu = _floats(mean, 2, "input-mean") if mean is not None else [0.0, 0.0]
    sigma = 0.5 * np.eye(2)
    if cov is not None:
        vqq, vqp, vpp = _floats(cov, 3, "input-cov")
        sigma = [[vqq, vqp], [vqp, vpp]]
    try:
        return GaussianState(mu, sigma)
    except ValueError as err:
        raise UsageError(f"input: {err}") from None


def read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as err:
        raise UsageError(f"config: {err}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line {num}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merged(args: argparse.Namespace, keys: tuple[str, ...]) -> dict:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg) - set(keys)
    if unknown:
        raise UsageError(f"config: unknown keys {sorted(unknown)}")
    merged = dict(cfg)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


_SCENARIO_KEYS = ("resource", "input", "input_mean", "input_cov", "variant", "beta", "samples", "seed", "streams")


def scenario_from(args: argparse.Namespace, with_mc: bool = False) -> tuple[ScenarioConfig, dict]:
    opts = _merged(args, _SCENARIO_KEYS)
    if "resource" not in opts:
        raise UsageError("a resource is required (--resource)")
    resource = parse_resource(str(opts["resource"]))
    inp = parse_input(opts.get("input"), opts.get("input_mean"), opts.get("input_cov"))
    try:
        variant = Variant(str(opts.get("variant", "standard")))
    except ValueError:
        raise UsageError(f"variant must be standard or classical, got {opts['variant']!r}") from None
    mc = None
    if with_mc:
        try:
            samples = int(opts.get("samples", 1_000_000))
            seed = int(opts.get("seed", os.environ.get("GT_SEED", 0)))
            streams = int(opts.get("streams", 1))
        except ValueError as err:
            raise UsageError(str(err)) from None
        if samples < MIN_MC_SAMPLES:
            raise UsageError(f"samples must be at least {MIN_MC_SAMPLES}")
        try:
            mc = montecarlo.McConfig(seed, samples, streams)
        except ValueError as err:
            raise UsageError(str(err)) from None
    return ScenarioConfig(inp, resource, variant, mc), opts


def _num(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _state(s: GaussianState) -> dict:
    return {"mean": s.mean.tolist(), "cov": s.cov.tolist()}


def _resource_dict(resource) -> dict:
    if isinstance(resource, NamedResource):
        out = {"kind": resource.kind.value, "r": resource.r}
        p = resource.params
    else:
        out = {"kind": "params"}
        p = resource
    if isinstance(p, ResourceParams):
        out.update(a=p.a, b=p.b, c1=p.c1, c2=p.c2)
    return out


def check_report(resource) -> dict:
    rep = realizability.check(resource).as_dict()
    for k in ("single_mode_2", "single_mode_3", "sum_product", "diff_product"):
        rep[k] = _num(rep[k])
    return {"resource": _resource_dict(resource), **rep}


def teleport_report(cfg: ScenarioConfig, beta: PhasePoint | None = None) -> dict:
    nq, np_ = engine.added_noise(cfg.resource, cfg.variant)
    avg = engine.averaged_output(cfg.input, cfg.resource, cfg.variant)
    out = {
        "resource": _resource_dict(cfg.resource),
        "realizability": check_report(cfg.resource),
        "noise_q": _num(nq),
        "noise_p": _num(np_),
        "averaged_output": _state(avg),
        "fidelity": engine.fidelity(cfg.input, avg),
        "perfect": engine.is_perfect(cfg.resource, cfg.variant),
        "ensemble_perfect": engine.ensemble_perfect(cfg.resource, cfg.variant),
        "variant": cfg.variant.value,
        "physically_measurable": cfg.variant.physically_measurable,
    }
    if beta is not None:
        cond = engine.conditional_output(cfg.input, cfg.resource, beta, cfg.variant)
        out["beta"] = [beta.q, beta.p]
        out["conditional_output"] = _state(cond)
    return out


def mc_report(cfg: ScenarioConfig) -> dict:
    est = montecarlo.run_protocol(cfg.input, cfg.resource, cfg.variant, cfg.mc)
    avg = engine.averaged_output(cfg.input, cfg.resource, cfg.variant)
    f_ref = engine.fidelity(cfg.input, avg)
    ref = np.array([*avg.mean, avg.cov[0, 0], avg.cov[0, 1], avg.cov[1, 1], f_ref])
    labels = montecarlo.SE_LABELS
    return {
        "resource": _resource_dict(cfg.resource),
        "variant": cfg.variant.value,
        "seed": cfg.mc.seed,
        "samples": cfg.mc.samples,
        "streams": cfg.mc.streams,
        "empirical": {"mean": est.mean.tolist(), "cov": est.cov.tolist()},
        "fidelity_estimate": est.fidelity_estimate,
        "standard_errors": dict(zip(labels, map(_num, est.standard_errors))),
        "analytic": {**_state(avg), "fidelity": f_ref},
        "z_scores": dict(zip(labels, map(_num, est.z_scores(ref)))),
        "single_shot_delta": est.single_shot_delta,
    }


def sweep_rows(r_min: float, r_max: float, steps: int) -> list[tuple[float, float, float]]:
    """Coherent-input fidelities along the TMSS and mirrored-TMSS families."""
    coherent = GaussianState.coherent()
    rows = []
    for r in np.linspace(r_min, r_max, steps):
        r = float(r)
        f = [
            engine.fidelity(coherent, engine.averaged_output(coherent, realizability.make(kind, r)))
            for kind in (ResourceKind.TMSS, ResourceKind.MIRROR_TMSS)
        ]
        rows.append((r, *f))
    return rows


def format_csv(rows) -> str:
    lines = ["r,f_tmss,f_mirror"]
    lines += [",".join(f"{v:.12g}" for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, allow_nan=False) + "\n")


def cmd_teleport(args) -> int:
    cfg, opts = scenario_from(args)
    beta = PhasePoint(*_floats(str(opts["beta"]), 2, "beta")) if "beta" in opts else None
    _emit(teleport_report(cfg, beta))
    return 0


def cmd_check(args) -> int:
    if args.resource is None:
        raise UsageError("a resource is required (--resource)")
    _emit(check_report(parse_resource(args.resource)))
    return 0


def cmd_sweep(args) -> int:
    if not (0 <= args.r_min < args.r_max) or args.steps < 2:
        raise UsageError("need 0 <= r_min < r_max and steps >= 2")
    text = format_csv(sweep_rows(args.r_min, args.r_max, args.steps))
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return 0
    try:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        print(f"gtele: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_IO
    return 0


def cmd_mc(args) -> int:
    cfg, _ = scenario_from(args, with_mc=True)
    _emit(mc_report(cfg))
    return 0


def _scenario_flags(p: argparse.ArgumentParser, mc: bool = False) -> None:
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--resource", help="a,b,c1,c2 | tmss:R | mirror-tmss:R | epr | mirror | point")
    p.add_argument("--input", help="'coherent' (mean 0, cov diag(1/2, 1/2))")
    p.add_argument("--input-mean", dest="input_mean", metavar="Q,P")
    p.add_argument("--input-cov", dest="input_cov", metavar="VQQ,VQP,VPP")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    if mc:
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int, help="defaults to $GT_SEED, else 0")
        p.add_argument("--streams", type=int)
    else:
        p.add_argument("--beta", metavar="QB,PB", help="also report the single-shot output for this record")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtele", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("teleport", help="analytic protocol report (JSON)")
    _scenario_flags(p)
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("check", help="realizability report (JSON)")
    p.add_argument("--resource", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="coherent-state fidelity vs squeezing (CSV)")
    p.add_argument("r_min", type=float)
    p.add_argument("r_max", type=float)
    p.add_argument("steps", type=int)
    p.add_argument("--out", help="output path, default stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc", help="Monte Carlo validation against the analytic engine (JSON)")
    _scenario_flags(p, mc=True)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"gtele {args.command}: {err}", file=sys.stderr)
        return EXIT_USAGE
    except TeleportError as err:
        name = type(err).__name__
        print(f"gtele {args.command}: {name}: {err}", file=sys.stderr)
        _emit({"error": name, "message": str(err)})
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
