"""Command-line entry point: ``hidd {run,bench,complexity,validate}``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from typing import Sequence

from . import bench as bench_mod
from .checks import run_all
from .complexity import complexity_table, write_csv
from .errors import BadRange, GainCountMismatch, GainUnavailable, HIDDError, NonPositiveError, UnsupportedOrder
from .methods import Method, simulate
from .params import as_params
from .signals import NAMED, SignalSpec, env_seed, gen_signal, kind_from, signal_from_mapping

USAGE_ERRORS = (NonPositiveError, GainCountMismatch, UnsupportedOrder, GainUnavailable, BadRange)
METHODS = [m.value for m in Method]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load_json(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _signal(args, cfg) -> SignalSpec:
    base = signal_from_mapping(cfg)
    kind = kind_from(args.signal) if args.signal is not None else base.kind
    noise = args.noise if args.noise is not None else base.noise_amplitude
    seed = env_seed(args.seed) if args.seed is not None else base.seed
    return SignalSpec(kind=kind, noise_amplitude=noise, seed=seed)


def cmd_run(args) -> int:
    cfg = _load_json(args.config)
    n = args.n if args.n is not None else int(cfg.get("n", 3))
    tau = args.tau if args.tau is not None else float(cfg.get("tau", 1e-3))
    L = args.L if args.L is not None else float(cfg.get("L", 10.0))
    lam = args.gains if args.gains is not None else cfg.get("lambda")
    params = as_params(n, L, tau, lam)
    seconds = args.seconds if args.seconds is not None else float(cfg.get("seconds", 10.0))
    steps = round(seconds / tau)
    if steps < 1:
        raise UsageError(f"argument --seconds: {seconds!r} is shorter than one sample")
    samples = gen_signal(_signal(args, cfg), tau, steps)
    _, traces = simulate(params, samples.tolist(), Method(args.method))
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "t", "f", "b_k", "case", "r0"] + [f"z{i}" for i in range(n + 1)])
        for tr in traces:
            w.writerow([tr.k, repr(tr.k * tau), repr(tr.f), repr(tr.b_k), tr.case.value, repr(tr.r0)]
                       + [repr(v) for v in tr.z])
    return 0


def cmd_bench(args) -> int:
    cfg = _load_json(args.config)
    over = {}
    if args.n is not None:
        over["n_values"] = args.n
    if args.tau is not None:
        over["tau"] = args.tau
    if args.horizons is not None:
        over["horizons"] = args.horizons
    if args.methods is not None:
        over["methods"] = args.methods
    if args.repetitions is not None:
        over["repetitions"] = args.repetitions
    if args.L is not None:
        over["L"] = args.L
    config = bench_mod.config_from_mapping({**cfg, **over})
    report = bench_mod.run_bench(config, _signal(args, cfg))
    with _output(args.out) as fh:
        report.write_csv(fh)
    if args.json is not None:
        with _output(args.json) as fh:
            fh.write(report.to_json() + "\n")
    return 0


def cmd_complexity(args) -> int:
    try:
        table = complexity_table(args.n_from, args.n_to)
    except BadRange as exc:
        raise UsageError(f"argument --from/--to: {exc}") from None
    with _output(args.out) as fh:
        write_csv(table, fh)
    return 0


def cmd_validate(args) -> int:
    results = run_all(args.seed)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hidd", description="Implicit homogeneous differentiator toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def signal_opts(sp):
        sp.add_argument("--signal", choices=sorted(NAMED), help="test signal (default: sin t + 0.5 cos 2t)")
        sp.add_argument("--noise", type=float, help="uniform noise amplitude")
        sp.add_argument("--seed", type=int, help="noise seed (HIDD_SEED overrides)")
        sp.add_argument("--config", help="JSON config file")

    r = sub.add_parser("run", help="simulate one configuration and write a per-step trace CSV")
    r.add_argument("--n", type=int, help="differentiator order (default 3)")
    r.add_argument("--tau", type=float, help="sampling period in s (default 0.001)")
    r.add_argument("--L", type=float, help="Lipschitz constant (default 10)")
    r.add_argument("--gains", type=_floats, help="lambda_0..lambda_n, comma separated")
    r.add_argument("--seconds", type=float, help="simulated duration (default 10)")
    r.add_argument("--method", choices=METHODS, default="half-horner")
    r.add_argument("--out", help="output CSV (default stdout)")
    signal_opts(r)
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="time the methods and write a benchmark CSV")
    b.add_argument("--n", type=int, nargs="+", help="orders (default 3 7 10)")
    b.add_argument("--tau", type=float)
    b.add_argument("--horizons", type=float, nargs="+", help="simulated seconds per cell")
    b.add_argument("--methods", choices=METHODS, nargs="+")
    b.add_argument("--repetitions", type=int)
    b.add_argument("--L", type=float)
    b.add_argument("--out", help="CSV output (default stdout)")
    b.add_argument("--json", help="also write the full report as JSON")
    signal_opts(b)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("complexity", help="write the closed-form T(n) table as CSV")
    c.add_argument("--from", dest="n_from", type=int, default=2)
    c.add_argument("--to", dest="n_to", type=int, default=30)
    c.add_argument("--out")
    c.set_defaults(func=cmd_complexity)

    v = sub.add_parser("validate", help="run the built-in oracle checks")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)
    return p


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"hidd: error: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"hidd: error: {exc}", file=sys.stderr)
        return 2
    except (HIDDError, OSError, ValueError) as exc:
        print(f"hidd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
