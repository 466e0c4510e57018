"""Command-line interface.

Every subcommand reads JSON/CSV and writes JSON/CSV under ``--out-dir``.
Options can also come from a JSON file given with ``--config``; flags
on the command line win.  Exit codes: 0 success, 2 input error,
3 numerical failure, 4 partial study failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .ego import ImpliedStats, SurveySchema, census, implied_stats, read_survey, write_survey
from .errors import ErgmError, InputError, NumericalError
from .fit import FitConfig, fit_mean_value
from .network import AttributeTable, read_attributes, read_edgelist, write_attributes, write_edgelist
from .sampler import SamplerConfig, gibbs_sample
from .study import StudyConfig, run_invariance_demo, run_scaling_study
from .synth import SynthSpec, synth_population
from .terms import global_stats, load_model

log = logging.getLogger("ergmsize")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 2, 3, 4


def _out(args, name):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
    log.info("wrote %s", path)


def _model_and_attrs(args):
    model, decl = load_model(args.model)
    attrs = None
    if getattr(args, "attrs", None):
        attrs = read_attributes(args.attrs, decl["categorical"], decl["levels"] or None)
    return model, attrs


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_simulate(args):
    model, attrs = _model_and_attrs(args)
    if args.theta is not None:
        model = model.with_theta(args.theta)
    n = attrs.n if attrs is not None else args.n
    if n is None:
        raise InputError("give --attrs or --n")
    cfg = SamplerConfig(args.burn_in, args.interval, args.n_samples, args.seed, args.initial)
    net0 = read_edgelist(args.start, n) if args.start else None
    nets = gibbs_sample(net0, attrs, model, cfg, n=n)
    rows = []
    for k, net in enumerate(nets):
        write_edgelist(net, _out(args, f"network_{k:04d}.csv"))
        rows.append(global_stats(net, attrs or AttributeTable(n), model))
    np.savetxt(_out(args, "stats.csv"), np.array(rows), delimiter=",", header=",".join(model.names),
               comments="")
    return EXIT_OK


def cmd_stats(args):
    model, attrs = _model_and_attrs(args)
    n = attrs.n if attrs is not None else None
    net = read_edgelist(args.edges, n)
    g = global_stats(net, attrs or AttributeTable(net.n), model)
    _dump({"n": net.n, "names": model.names, "stats": g.tolist()}, _out(args, "stats.json"))
    return EXIT_OK


def cmd_ego_stats(args):
    model, _ = load_model(args.model)
    sample, report = read_survey(args.survey, SurveySchema.load(args.schema))
    s = implied_stats(sample, model)
    _dump({**s.to_dict(), "ingestion": report}, _out(args, "implied_stats.json"))
    return EXIT_OK


def cmd_fit(args):
    model, attrs = _model_and_attrs(args)
    if args.targets:
        with open(args.targets) as fh:
            targets = ImpliedStats.from_dict(json.load(fh))
    elif args.edges:
        targets = read_edgelist(args.edges, attrs.n if attrs is not None else None)
    else:
        raise InputError("give --targets or --edges")
    cfg = FitConfig(method=args.method, max_iterations=args.max_iterations, tol=args.tol, seed=args.seed)
    res = fit_mean_value(targets, attrs, model, cfg)
    _dump(res.to_dict(), _out(args, "fit.json"))
    return EXIT_OK if res.converged else EXIT_NUMERICAL


def cmd_scaling_study(args):
    cfg = StudyConfig(sizes=args.sizes, replicates=args.replicates, model=args.model or "nhsls",
                      survey=args.survey, schema=args.schema,
                      synth=SynthSpec.load(args.synth).to_dict() if args.synth else None,
                      synth_n=args.synth_n, fit=args.fit or {}, seed=args.seed, threads=args.threads,
                      out_dir=args.out_dir)
    report = run_scaling_study(cfg)
    sys.stdout.write(report.table())
    return EXIT_PARTIAL if report.warnings else EXIT_OK


def cmd_invariance_demo(args):
    rep = run_invariance_demo(args.theta, args.sizes, offset=args.offset, n_networks=args.n_networks,
                              seed=args.seed)
    _dump(rep, _out(args, "invariance.json"))
    for r in rep["rows"]:
        print(f"n={r['size']}: density {r['density']:.5f} ({r['density_se']:.5f})  "
              f"mean degree {r['mean_degree']:.4f} ({r['mean_degree_se']:.4f})")
    return EXIT_OK


def cmd_synth_pop(args):
    spec = SynthSpec.load(args.spec) if args.spec else SynthSpec()
    net, attrs = synth_population(spec, args.n, seed=args.seed)
    write_edgelist(net, _out(args, "edges.csv"))
    write_attributes(attrs, _out(args, "attributes.csv"))
    sample = census(net, attrs)
    write_survey(sample, _out(args, "survey.csv"))
    sample.schema.save(_out(args, "schema.json"))
    print(f"{net.n} actors, {net.n_edges} ties, mean degree {2 * net.n_edges / net.n:.3f}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _floats(s):
    return [float(x) for x in s.split(",")]


def _ints(s):
    return [int(x) for x in s.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--out-dir", default=None)
    common.add_argument("--config", help="JSON file of option defaults")
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="ergmsize", description="ERGMs with a network-size offset")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="Gibbs-sample networks")
    s.add_argument("--model")
    s.add_argument("--attrs")
    s.add_argument("--n", type=int)
    s.add_argument("--theta", type=_floats, help="comma-separated, overrides the model file")
    s.add_argument("--n-samples", type=int)
    s.add_argument("--burn-in", type=int)
    s.add_argument("--interval", type=int)
    s.add_argument("--initial", choices=["empty", "bernoulli"])
    s.add_argument("--start", help="starting edge list")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("stats", parents=[common], help="model statistics of a network")
    s.add_argument("--model")
    s.add_argument("--edges")
    s.add_argument("--attrs")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("ego-stats", parents=[common], help="statistics implied by a survey")
    s.add_argument("--model")
    s.add_argument("--survey")
    s.add_argument("--schema")
    s.set_defaults(func=cmd_ego_stats)

    s = sub.add_parser("fit", parents=[common], help="fit a model to a network or implied statistics")
    s.add_argument("--model")
    s.add_argument("--edges")
    s.add_argument("--attrs")
    s.add_argument("--targets", help="implied-statistics JSON")
    s.add_argument("--method", choices=["auto", "logistic_dyad_independent", "stochastic_approximation"])
    s.add_argument("--max-iterations", type=int)
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("scaling-study", parents=[common], help="fit bootstrap resamples across sizes")
    s.add_argument("--sizes", type=_ints)
    s.add_argument("--replicates", type=int)
    s.add_argument("--model", help="model file, or 'nhsls' / 'edges'")
    s.add_argument("--survey")
    s.add_argument("--schema")
    s.add_argument("--synth", help="synthetic population spec JSON")
    s.add_argument("--synth-n", type=int)
    s.set_defaults(func=cmd_scaling_study, fit=None)

    s = sub.add_parser("invariance-demo", parents=[common], help="density vs mean degree across sizes")
    s.add_argument("--theta", type=float)
    s.add_argument("--sizes", type=_ints)
    s.add_argument("--offset", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--n-networks", type=int)
    s.set_defaults(func=cmd_invariance_demo)

    s = sub.add_parser("synth-pop", parents=[common], help="generate a synthetic population")
    s.add_argument("--spec")
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_synth_pop)
    return p


DEFAULTS = {
    "seed": 0, "threads": 1, "out_dir": ".", "verbose": False,
    "n_samples": 1, "initial": "empty", "method": "auto", "max_iterations": 1000, "tol": 3.0,
    "sizes": None, "replicates": 10, "synth_n": 2000, "n_networks": 100, "offset": True, "n": None,
}
SUBCOMMAND_DEFAULTS = {
    "scaling-study": {"sizes": [300, 600, 1200]},
    "invariance-demo": {"sizes": [100, 1000], "theta": float(np.log(2))},
    "synth-pop": {"n": 2000},
}
REQUIRED = {
    "simulate": ["model"], "stats": ["model", "edges"], "ego-stats": ["model", "survey", "schema"],
    "fit": ["model"],
}


def resolve_args(args):
    """Fill unset options from the config file, then from built-in defaults."""
    conf = {}
    if args.config:
        try:
            with open(args.config) as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise InputError(f"config {args.config}: {err}") from None
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
    defaults = {**DEFAULTS, **SUBCOMMAND_DEFAULTS.get(args.command, {})}
    for key, val in vars(args).items():
        if val is None:
            setattr(args, key, conf.get(key, defaults.get(key)))
    for key in conf:
        if not hasattr(args, key):
            setattr(args, key, conf[key])
    for key in REQUIRED.get(args.command, []):
        if getattr(args, key) is None:
            raise InputError(f"--{key.replace('_', '-')} is required")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve_args(args)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ErgmError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
