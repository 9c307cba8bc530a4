"""Command-line entry point: ``hetcache <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import analysis
from .experiments import (
    DEFAULT_FILE_SIZE,
    DEFAULT_RANDOM_MAX_F,
    DEFAULT_TRIALS,
    EXAMPLE1,
    PRESETS,
    exp_profile,
    parse_grid,
    run_preset,
    run_simulation,
    run_sweep,
    sweep_csv,
    verify_exhaustive,
)
from .grouping import worst_case_demand
from .model import ConfigError, Demand, SystemConfig, as_fraction, validate_config


def _capacities(args) -> tuple:
    if getattr(args, "config", None):
        return SystemConfig.from_text(Path(args.config).read_text()).mu
    if args.mu and args.exp:
        raise ConfigError(["give either --mu or --exp, not both"])
    if args.mu:
        return tuple(as_fraction(m) for m in args.mu.split(","))
    if args.exp:
        K, M, alpha = args.exp.split(",")
        return exp_profile(int(K), M, alpha)
    raise ConfigError(["one of --mu, --exp or --config is required"])


def _config(args, file_size_bits: int | None) -> SystemConfig:
    """Instance from --config or --N/--mu/--exp; an explicit --F overrides the file."""
    if getattr(args, "config", None):
        cfg = SystemConfig.from_text(Path(args.config).read_text())
        return validate_config(cfg if file_size_bits is None else cfg.with_file_size(file_size_bits))
    file_size_bits = DEFAULT_FILE_SIZE if file_size_bits is None else file_size_bits
    if args.N is None:
        raise ConfigError(["--N is required"])
    mu = _capacities(args)
    if args.K is not None and args.K != len(mu):
        raise ConfigError([f"--K={args.K} but {len(mu)} capacities given"])
    return validate_config(SystemConfig(args.N, file_size_bits, len(mu), mu))


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_rate(args) -> int:
    cfg = _config(args, None)
    alpha = M = None
    if args.exp:
        _, M, alpha = args.exp.split(",")
    report = analysis.rate_report(cfg.mu, cfg.N, alpha=alpha, M=M)
    _emit(analysis.CSV_HEADER + "\n" + report.csv_row() + "\n", args.output)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args, args.F)
    demand = worst_case_demand(cfg) if args.demand == "worst" else Demand.parse(args.demand)
    report = run_simulation(cfg, demand, args.trials, args.seed, args.random_max_F)
    for t in report.trials:
        rnd = "" if t.random_rate is None else f" random={float(t.random_rate):.6f}"
        print(f"seed={t.seed} coded={float(t.coded_rate):.6f}{rnd} chosen={t.chosen} decoded={t.decoded}")
        if not t.decoded:
            print(t.detail, file=sys.stderr)
    print(report.summary())
    return 0 if report.all_decoded else 1


def _sweep(args, axis: str) -> int:
    if args.preset:
        rows = run_preset(args.preset)
    else:
        if args.grid is None or args.N is None or args.K is None or args.fixed is None:
            raise ConfigError(["custom sweeps need --N, --K, --grid and the fixed parameter"])
        rows = run_sweep(args.N, args.K, axis, as_fraction(args.fixed), parse_grid(args.grid))
    _emit(sweep_csv(rows), args.output)
    bad = [r for r in rows if r.cut_set > r.r_c or r.r_c > r.r_b]
    return 1 if bad else 0


def cmd_example1(args) -> int:
    cfg = EXAMPLE1.with_file_size(args.F)
    t0 = time.perf_counter()
    report = analysis.rate_report(cfg.mu, cfg.N)
    demand = worst_case_demand(cfg)
    enum = analysis.expected_rate_enumeration(cfg, demand)
    print(f"mu={','.join(str(m) for m in cfg.mu)} N={cfg.N} worst-case demand={demand}")
    print(f"r_c={report.r_c} ({float(report.r_c):.4f})  r_b={report.r_b} ({float(report.r_b):.4f})")
    print(f"delta_r1={report.delta_r1} delta_r2={report.delta_r2} cut_set={report.cut_set}")
    print(f"reduction={float(1 - report.r_c / report.r_b):.2%}  enumeration={enum}")
    print(f"closed forms in {time.perf_counter() - t0:.3f}s")
    sim = run_simulation(cfg, demand, args.trials, args.seed, args.random_max_F)
    print(sim.summary())
    ok = enum == report.r_c and sim.all_decoded
    return 0 if ok else 1


def cmd_verify(args) -> int:
    if args.exhaustive:
        seeds = range(args.seed, args.seed + args.seeds)
        result = verify_exhaustive(seeds, args.max_K, args.max_N, args.F or 1024)
        for line in result.failures:
            print(line)
        print(f"ok={str(result.ok).lower()} instances={result.instances} failures={len(result.failures)}")
        return 0 if result.ok else 1
    cfg = _config(args, args.F if args.F or args.config else 1024)
    demand = worst_case_demand(cfg) if args.demand == "worst" else Demand.parse(args.demand)
    report = run_simulation(cfg, demand, 1, args.seed, args.random_max_F)
    trial = report.trials[0]
    print(f"ok={str(trial.decoded).lower()} rate={float(trial.rate):.6f} users_failed={0 if trial.decoded else 1}")
    if not trial.decoded:
        print(trial.detail, file=sys.stderr)
    return 0 if trial.decoded else 1


def _instance_args(p, with_file_size: bool = True) -> None:
    p.add_argument("--N", type=int, help="number of files")
    p.add_argument("--K", type=int, help="number of users (checked against the capacity vector)")
    p.add_argument("--mu", help="comma-separated capacities, e.g. 1/8,1/4,1/2,1")
    p.add_argument("--exp", help="exponential profile K,M,alpha")
    p.add_argument("--config", help="key/value config file (N=, F=, K=, mu=)")
    if with_file_size:
        p.add_argument("--F", type=int, default=None, help="file size in bits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetcache", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="closed-form rates as one CSV row")
    _instance_args(p, with_file_size=False)
    p.add_argument("--output")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("simulate", help="bit-level Monte Carlo with decoding")
    _instance_args(p)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--demand", default="worst", help="comma-separated file indices or 'worst'")
    p.add_argument("--random-max-F", dest="random_max_F", type=int, default=DEFAULT_RANDOM_MAX_F)
    p.set_defaults(func=cmd_simulate)

    for name, axis, fixed in (("sweep-M", "M", "alpha"), ("sweep-alpha", "alpha", "M")):
        p = sub.add_parser(name, help=f"closed-form sweep over {axis}")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--grid", help="a:b:step")
        p.add_argument("--N", type=int)
        p.add_argument("--K", type=int)
        p.add_argument(f"--{fixed}", dest="fixed")
        p.add_argument("--output")
        p.set_defaults(func=lambda a, axis=axis: _sweep(a, axis))

    p = sub.add_parser("example1", help="N=2, K=4, mu=(1/8,1/4,1/2,1)")
    p.add_argument("--F", type=int, default=DEFAULT_FILE_SIZE)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-max-F", dest="random_max_F", type=int, default=DEFAULT_RANDOM_MAX_F)
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("verify", help="zero-error decoding checks")
    _instance_args(p)
    p.add_argument("--exhaustive", action="store_true", help="all demands on the K<=5, N<=3 grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--max-K", dest="max_K", type=int, default=5)
    p.add_argument("--max-N", dest="max_N", type=int, default=3)
    p.add_argument("--demand", default="worst")
    p.add_argument("--random-max-F", dest="random_max_F", type=int, default=DEFAULT_RANDOM_MAX_F)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
