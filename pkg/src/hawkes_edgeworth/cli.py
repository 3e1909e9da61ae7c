"""Command-line front end.

Exit codes: 0 success, 1 usage or input-format error, 2 numerical failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from ._io import dumps_json
from .edgeworth import EdgeworthCoefficients
from .errors import FormatError, NumericalError
from .experiment import (
    ExperimentConfig,
    default_workers,
    density_curves,
    estimate_from_simulation,
    run,
    write_density_csvs,
)
from .mle import fit
from .sim import Theta, read_events, simulate, write_events

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("hawkes_edgeworth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_config_file(path):
    """Parse a TOML (or ``.json``) experiment config into a mapping."""
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(exc.msg, path, exc.lineno, exc.colno) from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        raise FormatError(str(exc), path, line, col) from None


def _merge(args, base):
    """Apply command-line flags on top of a config mapping."""
    cfg = dict(base)
    theta = dict(cfg.get("theta0", {}))
    for key in ("mu", "alpha", "beta"):
        if getattr(args, key, None) is not None:
            theta[key] = getattr(args, key)
    if theta:
        cfg["theta0"] = theta
    for flag, key in (("t", "t_horizon"), ("mc", "mc_coeff"), ("reps", "n_rep_mle"),
                      ("seed", "master_seed"), ("grid", "grid_points"), ("workers", "workers"),
                      ("out", "output_dir")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = value
    cfg.setdefault("workers", default_workers())
    return cfg


def _experiment_config(args):
    base = load_config_file(args.config) if args.config else {}
    try:
        return ExperimentConfig.from_mapping(_merge(args, base))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _check_output_dir(path):
    path = Path(path)
    if path.exists() and not path.is_dir():
        raise UsageError(f"output path exists and is not a directory: {path}")
    parent = path if path.exists() else path.parent
    while not parent.exists():
        parent = parent.parent
    if not parent.is_dir():
        raise UsageError(f"cannot create output directory under {parent}")


def _check_output_file(path):
    path = Path(path)
    if path.is_dir():
        raise UsageError(f"output path is a directory: {path}")
    _check_output_dir(path.parent)


def cmd_simulate(args):
    try:
        theta = Theta(args.mu, args.alpha, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_output_file(args.out)
    try:
        events = simulate(theta, args.t, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_events(args.out, events, theta=theta, seed=args.seed)
    log.info("wrote %d events to %s", len(events), args.out)
    return 0


def cmd_fit(args):
    path = Path(args.events)
    if not path.is_file():
        raise UsageError(f"events file not found: {path}")
    events, _ = read_events(path, horizon=args.t)
    init = None
    if None not in (args.mu, args.alpha, args.beta):
        init = Theta(args.mu, args.alpha, args.beta)
    result = fit(events, init)
    text = dumps_json(result.to_dict())
    if args.out:
        _check_output_file(args.out)
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0 if result.converged else 2


def cmd_coeffs(args):
    cfg = _experiment_config(args)
    out = Path(args.out) if args.out else Path("coeffs.json")
    _check_output_file(out)
    coeffs = estimate_from_simulation(cfg.theta0, cfg.t_horizon, cfg.mc_coeff, cfg.master_seed, cfg.workers)
    out.parent.mkdir(parents=True, exist_ok=True)
    coeffs.save(out)
    log.info("wrote %s", out)
    return 0


def cmd_density(args):
    path = Path(args.coeffs)
    if not path.is_file():
        raise UsageError(f"coefficients file not found: {path}")
    if args.grid is not None and args.grid < 16:
        raise UsageError("--grid must be at least 16")
    _check_output_dir(args.out)
    coeffs = EdgeworthCoefficients.load(path)
    write_density_csvs(density_curves(coeffs, args.grid or 512), args.out)
    return 0


def cmd_experiment(args):
    cfg = _experiment_config(args)
    if cfg.output_dir is None:
        raise UsageError("experiment needs --out or output_dir in the config")
    _check_output_dir(cfg.output_dir)
    result = run(cfg)
    sys.stdout.write(dumps_json(result.diagnostics))
    return 0


def _add_theta(p, required):
    p.add_argument("--mu", type=float, required=required)
    p.add_argument("--alpha", type=float, required=required)
    p.add_argument("--beta", type=float, required=required)


def _add_experiment_flags(p):
    _add_theta(p, required=False)
    p.add_argument("--t", type=float, help="observation horizon T")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--mc", type=int, help="paths for coefficient estimation")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--config", help="TOML or JSON config file; flags override it")


def build_parser():
    parser = _Parser(prog="hawkes-edgeworth", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate one path, write events CSV")
    _add_theta(p, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="events.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit the MLE to an events CSV, print JSON")
    p.add_argument("events")
    p.add_argument("--t", type=float, help="horizon (default: from the sidecar JSON)")
    _add_theta(p, required=False)
    p.add_argument("--out", help="also write the JSON here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("coeffs", help="Monte-Carlo coefficient estimation")
    _add_experiment_flags(p)
    p.add_argument("--out", help="output JSON (default coeffs.json)")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("density", help="evaluate marginal densities from coeffs.json")
    p.add_argument("coeffs")
    p.add_argument("--grid", type=int)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("experiment", help="full pipeline")
    _add_experiment_flags(p)
    p.add_argument("--reps", type=int, help="MLE replications")
    p.add_argument("--grid", type=int, help="density grid points")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
