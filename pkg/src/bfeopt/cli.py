"""Command-line interface.

Subcommands:
  optimize  run one optimizer/problem configuration and write a trace CSV
  compare   run a list of configurations (JSON file) and print a comparison
  summary   summarize an existing trace file against a loss threshold

Exit codes: 0 success, 2 configuration error, 3 optimizer failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .core import NonFiniteEvaluation, NonTermination
from .harness import (
    OPTIMIZERS,
    PROBLEMS,
    ConfigError,
    RunConfig,
    compare_runs,
    read_trace,
    run_experiment,
    summarize,
)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="bfe")
    p.add_argument("--problem", choices=PROBLEMS, default="linreg")
    p.add_argument("--eta0", type=float, default=0.001)
    p.add_argument("--epsilon", type=float, default=0.001,
                   help="error limit ratio scaling loss magnitudes")
    p.add_argument("--epsilon-v-policy", default="mean_scaled",
                   choices=["mean_scaled", "min_scaled", "constant",
                            "epoch_decay"])
    p.add_argument("--commit-policy", default="half_step",
                   choices=["half_step", "full_step"])
    p.add_argument("--reset-policy", default="double_prev_eta",
                   choices=["prev_eta", "double_prev_eta"])
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--angle-threshold-deg", type=float, default=1.0)
    p.add_argument("--threshold-mode", default="absolute",
                   choices=["absolute", "relative"])
    p.add_argument("--zoom-out-exit", default="halve_commit_trial",
                   choices=["halve_commit_trial", "quarter_fresh_step"])
    p.add_argument("--pre-halve", action="store_true")
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--max-inner", type=int, default=60)
    p.add_argument("--lim-zero", type=float, default=0.001)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--w0", type=float, default=5.0)
    p.add_argument("--b0", type=float, default=9.0)
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--n-samples", type=int, default=10000)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--curvatures", default="1.0",
                   help="comma-separated curvatures for the quadratic problem")
    p.add_argument("--theta0", default=None,
                   help="comma-separated initial parameters")
    p.add_argument("--loss-threshold", type=float, default=None)
    p.add_argument("--out", default=None, help="trace CSV output path")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    theta0 = None
    if args.theta0 is not None:
        theta0 = tuple(float(v) for v in args.theta0.split(","))
    return RunConfig(
        optimizer=args.optimizer, problem=args.problem,
        batch_size=args.batch_size, seed=args.seed, max_steps=args.max_steps,
        eta0=args.eta0, eps_ratio=args.epsilon,
        eps_val_policy=args.epsilon_v_policy,
        commit_policy=args.commit_policy, reset_policy=args.reset_policy,
        base=args.base, lim_zero=args.lim_zero, max_inner=args.max_inner,
        angle_threshold_deg=args.angle_threshold_deg,
        threshold_mode=args.threshold_mode, zoom_out_exit=args.zoom_out_exit,
        pre_halve=args.pre_halve, beta=args.beta, alpha=args.alpha,
        w0=args.w0, b0=args.b0, noise_std=args.noise_std,
        n_samples=args.n_samples, normalize=args.normalize,
        curvatures=tuple(float(v) for v in args.curvatures.split(",")),
        theta0=theta0, loss_threshold=args.loss_threshold,
        output_path=args.out)


def _config_from_dict(d: dict) -> RunConfig:
    fields = {k.replace("-", "_"): v for k, v in d.items()}
    for src, dst in (("epsilon", "eps_ratio"), ("out", "output_path"),
                     ("epsilon_v_policy", "eps_val_policy")):
        if src in fields:
            fields[dst] = fields.pop(src)
    for key in ("curvatures", "theta0"):
        if key in fields and fields[key] is not None:
            fields[key] = tuple(fields[key])
    try:
        return RunConfig(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _print_summary(summary) -> None:
    steps = summary.steps_to_threshold
    print(f"steps_to_threshold={steps if steps is not None else 'none'}")
    print(f"mean_inner_loops={summary.mean_inner_loops:.6g}")
    hist = ",".join(f"{k}:{v}" for k, v in
                    sorted(summary.inner_loop_histogram.items()))
    print(f"inner_loop_histogram={hist}")
    print(f"final_loss={summary.final_loss:.17g}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bfeopt")
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="run one configuration")
    _add_run_flags(p_opt)

    p_cmp = sub.add_parser("compare", help="run and compare configurations")
    p_cmp.add_argument("--configs", required=True,
                       help="JSON file holding a list of run configs")
    p_cmp.add_argument("--loss-threshold", type=float, required=True)
    p_cmp.add_argument("--out", default=None, help="comparison CSV path")

    p_sum = sub.add_parser("summary", help="summarize an existing trace")
    p_sum.add_argument("--trace", required=True)
    p_sum.add_argument("--loss-threshold", type=float, required=True)

    args = parser.parse_args(argv)

    try:
        if args.command == "optimize":
            cfg = _config_from_args(args)
            _, summary = run_experiment(cfg)
            _print_summary(summary)
        elif args.command == "compare":
            with open(args.configs) as f:
                cfgs = [_config_from_dict(d) for d in json.load(f)]
            _, table = compare_runs(cfgs, args.loss_threshold)
            if args.out:
                with open(args.out, "w") as f:
                    f.write(table)
            print(table, end="")
        else:
            _, trace = read_trace(args.trace)
            _print_summary(summarize(trace, args.loss_threshold))
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NonFiniteEvaluation, NonTermination) as exc:
        print(f"optimizer failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
