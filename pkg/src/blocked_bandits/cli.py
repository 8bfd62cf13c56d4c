"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .design import get_good_subset
from .harness import (
    OUTPUT_DIR_ENV,
    ConfigError,
    ExperimentConfig,
    lasso_error_scaling,
    preset_config,
    preset_configs,
    run_experiment,
)
from .model import Instance

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

logger = logging.getLogger("blocked_bandits")


def _print_summary(summary):
    for policy, stats in summary["policies"].items():
        print(f"{policy:>20s}  final regret {stats['final_mean']:10.4f} "
              f"+/- {stats['final_se']:.4f} (se, n={stats['n_seeds']})")
    if "output_dir" in summary:
        print(f"outputs in {summary['output_dir']}")


def cmd_run(args):
    cfg = ExperimentConfig.load(args.config)
    _print_summary(run_experiment(cfg, output_dir=args.out, workers=args.workers))


def cmd_preset(args):
    if args.name == "list":
        print("\n".join(preset_configs()))
        return
    cfg = preset_config(args.name)
    text = cfg.to_json() + "\n"
    if args.write is not None:
        Path(args.write).parent.mkdir(parents=True, exist_ok=True)
        Path(args.write).write_text(text)
    elif not args.run:
        sys.stdout.write(text)
    if args.run:
        _print_summary(run_experiment(cfg, output_dir=args.out, workers=args.workers))


def cmd_design(args):
    try:
        instance = Instance.load(args.instance)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError([("instance", f"cannot load {args.instance}: {exc}")]) from exc
    if not 1 <= args.u_hat <= instance.n_arms:
        raise ConfigError([("--u-hat", f"must lie in [1, M={instance.n_arms}]")])
    design = get_good_subset(instance.arm_set, args.u_hat, args.repeats, args.search,
                             args.seed, relaxation_kwargs={"max_iters": args.max_iters})
    doc = design.to_dict()
    doc["size"] = design.size
    print(json.dumps(doc))


def cmd_lasso_bench(args):
    if len(args.n) < 2 or any(n < 1 for n in args.n):
        raise ConfigError([("--n", "need at least two positive sample sizes")])
    if not 1 <= args.k <= args.d:
        raise ConfigError([("--k", f"must lie in [1, d={args.d}]")])
    res = lasso_error_scaling(args.d, args.k, args.beta, args.sigma, tuple(args.n), args.seeds,
                              args.seed)
    print(json.dumps(res, indent=2))


def build_parser():
    p = argparse.ArgumentParser(prog="blocked-bandits",
                                description="Blocked sparse linear bandit simulator.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV}/<name>)")
    r.add_argument("--workers", type=int, default=None, help="parallel seeds (default: cores)")
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="print, write or run a named preset ('list' to list)")
    pr.add_argument("name")
    pr.add_argument("--write", metavar="PATH", help="write the config JSON to PATH")
    pr.add_argument("--run", action="store_true", help="run the preset")
    pr.add_argument("--out")
    pr.add_argument("--workers", type=int, default=None)
    pr.set_defaults(func=cmd_preset)

    d = sub.add_parser("design", help="select an exploration subset for an instance file")
    d.add_argument("instance")
    d.add_argument("--u-hat", type=int, required=True)
    d.add_argument("--repeats", type=int, default=1)
    d.add_argument("--search", action="store_true", help="also run exhaustive subset search")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--max-iters", type=int, default=500)
    d.set_defaults(func=cmd_design)

    lb = sub.add_parser("lasso-bench", help="Lasso l1 error against sample size")
    lb.add_argument("--d", type=int, default=200)
    lb.add_argument("--k", type=int, default=5)
    lb.add_argument("--beta", type=float, default=0.0)
    lb.add_argument("--sigma", type=float, default=0.5)
    lb.add_argument("--n", type=int, nargs="+", default=[200, 800, 3200])
    lb.add_argument("--seeds", type=int, default=50)
    lb.add_argument("--seed", type=int, default=0)
    lb.set_defaults(func=cmd_lasso_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        logger.debug("runtime error", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
