"""Command-line front end.

Exit codes: 0 success, 2 invalid input (the message names the field),
3 numerical-health warning under --strict or a failed --verify.
"""

import argparse
from dataclasses import replace
import datetime
import json
import sys
import time
import warnings

from . import __version__
from .bounds import (
    OptimizerConfig,
    degraded_capacity,
    lower_bound,
    recompute_value,
    upper_bound,
)
from .errors import ModelError, NumericalHealthWarning, ParameterError, UsageError
from .extensions import discussion_upper_bound, separate_keys_rate, side_info_capacity
from .gaussian import discussion_curve, gaussian_capacity, model_from_json, tradeoff_curve
from .io import (
    degraded_from_json,
    dumps_report,
    load_json,
    problem_from_json,
    side_info_from_json,
    witness_from_json,
    write_text,
)
from .simlab import derive_params, run_experiment

COMMANDS = ("bounds", "degraded", "gaussian", "tradeoff", "discussion", "sideinfo", "simulate")
VERIFY_TOL = 1e-9


class VerifyError(Exception):
    pass


def _optimizer_config(args):
    cfg = OptimizerConfig(seed=args.seed if args.seed is not None else 0)
    kw = {}
    if args.grid_step is not None:
        kw["grid_step"] = args.grid_step
    if args.starts is not None:
        kw["starts"] = args.starts
    if getattr(args, "general", False):
        kw["general"] = True
    return replace(cfg, **kw) if kw else cfg


def _verify(results, problem):
    for res in results:
        again = recompute_value(res.kind, problem, res.witness)
        if abs(again - res.value) > VERIFY_TOL:
            raise VerifyError(
                f"{res.kind}: reported {res.value!r} but witness gives {again!r}"
            )


def _gaussian_points(args):
    if args.grid_step is None:
        return 1001
    return int(round(1 / args.grid_step)) + 1


def cmd_bounds(args, doc):
    problem = problem_from_json(doc)
    cfg = _optimizer_config(args)
    lo, up = lower_bound(problem, cfg), upper_bound(problem, cfg)
    if args.verify:
        _verify([lo, up], problem)
    report = {"lower_bound": lo.to_json(), "upper_bound": up.to_json(),
              "config": cfg.__dict__}
    return report, f"lower={lo.value:.6f} upper={up.value:.6f} bits/channel use"


def cmd_degraded(args, doc):
    problem = degraded_from_json(doc)
    res = degraded_capacity(problem, _optimizer_config(args))
    if args.verify:
        _verify([res], problem)
    return {"degraded_capacity": res.to_json()}, f"capacity={res.value:.6f} bits/channel use"


def cmd_sideinfo(args, doc):
    problem = side_info_from_json(doc)
    res = side_info_capacity(problem, _optimizer_config(args))
    if args.verify:
        _verify([res], problem)
    return {"side_info_capacity": res.to_json()}, f"capacity={res.value:.6f} bits/channel use"


def cmd_gaussian(args, doc):
    model = model_from_json(doc)
    grid = 64 if args.grid_step is None else max(1, int(round(1 / args.grid_step)))
    res = gaussian_capacity(model, grid=grid)
    powers = ", ".join(f"{p:.4f}" for p in res.allocation.powers)
    return {"gaussian_capacity": res.to_json()}, (
        f"capacity={res.value:.6f} bits/channel use at powers ({powers})")


def cmd_tradeoff(args, doc):
    table = tradeoff_curve(model_from_json(doc), _gaussian_points(args))
    best = table.column("R_key").max()
    return table.to_csv(), f"max R_key={best:.6f} bits/channel use over {len(table.rows)} splits"


def cmd_discussion(args, doc):
    if isinstance(doc, dict) and "power" in doc:
        table = discussion_curve(model_from_json(doc), _gaussian_points(args))
        const = table.column("R_src_const")[0]
        return table.to_csv(), f"source line={const:.6f} bits/symbol"
    problem = problem_from_json(doc)
    bound = discussion_upper_bound(problem)
    sep = separate_keys_rate(problem)
    report = {
        "discussion_upper_bound": bound,
        "separate_keys_rate": sep.value,
        "channel_term": sep.channel_term,
        "source_term": sep.source_term,
        "p_x": list(sep.p_x),
        "tight": sep.tight,
    }
    return report, f"upper={bound:.6f} separate={sep.value:.6f} bits/channel use"


def cmd_simulate(args, doc):
    if not isinstance(doc, dict):
        raise ModelError("simulation config must be an object", "config")
    for key in ("problem", "witness"):
        if key not in doc:
            raise ModelError(f"{key} is missing", key)
    try:
        problem = problem_from_json(doc["problem"])
    except ModelError as exc:
        raise ModelError(str(exc), f"problem.{exc.field}" if exc.field else "problem") from None
    witness = witness_from_json(doc["witness"])
    for key in ("n", "delta"):
        if key not in doc:
            raise ModelError(f"{key} is missing", key)
    try:
        n = int(doc["n"])
        delta = float(doc["delta"])
        eps = float(doc.get("eps", 0.1))
        trials = int(args.trials if args.trials is not None else doc.get("trials", 1000))
    except (TypeError, ValueError) as exc:
        raise ModelError(f"bad simulation parameter: {exc}", "config") from None
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    params = derive_params(problem, witness, n, delta, eps, doc.get("beta"))
    rep = run_experiment(problem, witness, params, trials, seed,
                         exhaustive=bool(doc.get("exhaustive", False)),
                         redraw_codebook=bool(doc.get("redraw_codebook", True)))
    lo, hi = rep.ci("key_error")
    return rep.to_json(), (
        f"key error rate={rep.key_error_rate:.4f} (95% CI {lo:.4f}-{hi:.4f}) over {trials} trials")


HANDLERS = {
    "bounds": cmd_bounds,
    "degraded": cmd_degraded,
    "gaussian": cmd_gaussian,
    "tradeoff": cmd_tradeoff,
    "discussion": cmd_discussion,
    "sideinfo": cmd_sideinfo,
    "simulate": cmd_simulate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="skcap", description="Secret-key rate bounds, capacities "
                                "and coding-scheme simulation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "bounds": "lower and upper bounds for a discrete instance",
        "degraded": "capacity of a reversely degraded product channel",
        "gaussian": "capacity of a Gaussian parallel model",
        "tradeoff": "CSV of R_eq, R_src and R_key over power splits",
        "discussion": "public-discussion bound (discrete) or curve CSV (Gaussian)",
        "sideinfo": "capacity with eavesdropper side information",
        "simulate": "Monte Carlo run of the coding scheme",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--input", "-i", required=True, help="model or config JSON")
        sp.add_argument("--output", "-o", help="report destination (JSON or CSV)")
        sp.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
        sp.add_argument("--trials", type=int, default=None, help="simulation trials")
        sp.add_argument("--strict", action="store_true",
                        help="exit 3 on numerical-health warnings")
        sp.add_argument("--verify", action="store_true",
                        help="recompute bound values from their witnesses")
        sp.add_argument("--grid-step", type=float, default=None, help="initial grid step")
        sp.add_argument("--starts", type=int, default=None, help="optimizer multi-starts")
        if name == "bounds":
            sp.add_argument("--general", action="store_true",
                            help="also search general auxiliaries b -> a -> x")
    return p


def _meta(args, argv, wall):
    return {
        "command": args.command,
        "argv": list(argv),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "wall_time_s": wall,
        "version": __version__,
    }


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.grid_step is not None and not 0 < args.grid_step <= 1:
            raise UsageError("--grid-step must be in (0, 1]")
        if args.starts is not None and args.starts < 1:
            raise UsageError("--starts must be >= 1")
        if args.trials is not None and args.trials < 0:
            raise UsageError("--trials must be >= 0")
        doc = load_json(args.input)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NumericalHealthWarning)
            result, summary = HANDLERS[args.command](args, doc)
    except ModelError as exc:
        field = f" [field: {exc.field}]" if exc.field else ""
        print(f"error: {exc}{field}", file=sys.stderr)
        return 2
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerifyError as exc:
        print(f"verify failed: {exc}", file=sys.stderr)
        return 3
    health = [w for w in caught if issubclass(w.category, NumericalHealthWarning)]
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if health and args.strict:
        return 3
    wall = time.perf_counter() - start
    if args.output:
        text = result if isinstance(result, str) else dumps_report(args.command, result)
        write_text(args.output, text)
        write_text(args.output + ".meta.json",
                   json.dumps(_meta(args, argv, wall), sort_keys=True, indent=2) + "\n")
    print(f"{args.command}: {summary} ({wall:.2f} s)")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
