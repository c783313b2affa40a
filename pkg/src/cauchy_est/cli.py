"""Command-line front end.

Subcommands: ``sample``, ``estimate``, ``mle``, ``kl``, ``rate``,
``simulate-mse``, ``simulate-tail``.  Complex-valued flags use the literal
grammar ``a+bi`` (both parts mandatory, no whitespace).  Randomized
subcommands require ``--seed``; the environment variable ``CAUCHY_EST_SEED``
is accepted as a fallback.  Exit codes: 0 success, 1 usage or domain error,
2 partial simulation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ._literals import format_complex_literal, parse_complex_literal
from .errors import CauchyEstError, DomainError
from .estimators import (
    Generator,
    one_step_detailed,
    qam_estimate,
    qam_estimate_median_adjusted,
)
from .geometry import (
    DiskPoint,
    HalfPlanePoint,
    bahadur_rate,
    bahadur_rate_circular,
    kl_circular,
    kl_halfplane,
    mobius_to_disk,
    real_from_circle_angle,
)
from .mle import MleResult, SolverConfig, mle
from .sampling import SampleBatch, SeedSpec, sample_cauchy, sample_circular
from .simulation import (
    mse_scenarios_from_json,
    rows_to_csv,
    rows_to_json,
    run_table,
    run_tail,
    tail_results_to_csv,
    tail_results_to_json,
    tail_scenarios_from_json,
)

SEED_ENV = "CAUCHY_EST_SEED"


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on its own; route everything through CliError -> exit 1
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise CliError(message)


def _complex_flag(text: str) -> complex:
    try:
        return parse_complex_literal(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _halfplane_flag(text: str) -> HalfPlanePoint:
    z = _complex_flag(text)
    try:
        return HalfPlanePoint(z.real, z.imag)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _disk_flag(text: str) -> DiskPoint:
    z = _complex_flag(text)
    try:
        return DiskPoint(z.real, z.imag)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _generator_flag(text: str) -> Generator:
    try:
        return Generator.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bool_flag(text: str) -> bool:
    t = text.strip().lower()
    if t in {"true", "1", "yes"}:
        return True
    if t in {"false", "0", "no"}:
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    raise CliError(f"--seed is required (or set {SEED_ENV})")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_values(path: str) -> list[float]:
    if path == "-":
        raw = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    values = []
    for line in raw.splitlines():
        line = line.strip().replace("−", "-")
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise CliError(f"not a number in input: {line!r}") from None
    if not values:
        raise CliError("input holds no sample values")
    return values


def _json_out(payload: dict, path: str | None) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _build_parser() -> _Parser:
    p = _Parser(prog="cauchy-est", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("sample", help="draw a reproducible sample batch as CSV")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--theta", type=_halfplane_flag)
    sp.add_argument("--circular", action="store_true")
    sp.add_argument("--w", type=_disk_flag)
    sp.add_argument("--alpha", type=_halfplane_flag, default=HalfPlanePoint(0.0, 1.0))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--out", default="-")

    ep = sub.add_parser("estimate", help="closed-form + one-step estimate from a CSV")
    ep.add_argument("--input", default="-")
    ep.add_argument("--generator", type=_generator_flag, required=True)
    ep.add_argument(
        "--median-adjust", type=_bool_flag, nargs="?", const=True, default=False
    )
    ep.add_argument("--circular", action="store_true")
    ep.add_argument("--alpha", type=_halfplane_flag, default=HalfPlanePoint(0.0, 1.0))
    ep.add_argument("--out", default="-")

    mp = sub.add_parser("mle", help="maximum-likelihood estimate from a CSV")
    mp.add_argument("--input", default="-")
    mp.add_argument("--score-tol", type=float, default=1e-12)
    mp.add_argument("--step-tol", type=float, default=1e-14)
    mp.add_argument("--max-iters", type=int, default=200)
    mp.add_argument("--out", default="-")

    kp = sub.add_parser("kl", help="closed-form Kullback-Leibler divergence")
    kp.add_argument("--from", dest="from_", type=_complex_flag, required=True)
    kp.add_argument("--to", type=_complex_flag, required=True)
    kp.add_argument("--circular", action="store_true")
    kp.add_argument("--out", default="-")

    rp = sub.add_parser("rate", help="Bahadur tail-decay rate")
    rp.add_argument("--eps", type=float, required=True)
    rp.add_argument("--theta", type=_halfplane_flag)
    rp.add_argument("--circular", action="store_true")
    rp.add_argument("--w", type=_disk_flag)
    rp.add_argument("--out", default="-")

    for name, helptext in (
        ("simulate-mse", "normalized-MSE table from a scenario file"),
        ("simulate-tail", "tail-probability probes from a scenario file"),
    ):
        xp = sub.add_parser(name, help=helptext)
        xp.add_argument("--scenarios", required=True)
        xp.add_argument("--seed", type=int)
        xp.add_argument("--replications", type=int, default=100_000)
        xp.add_argument(
            "--full",
            action="store_true",
            help="use 10^6 replications where the scenario does not say",
        )
        xp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        xp.add_argument("--out-csv")
        xp.add_argument("--out-json")

    return p


def _cmd_sample(args) -> int:
    seed = SeedSpec(_resolve_seed(args), args.stream)
    if args.circular:
        if args.w is None:
            raise CliError("--circular sampling needs --w")
        batch = sample_circular(args.n, args.w, seed, args.alpha)
        header = (
            f"# circular w={format_complex_literal(args.w.as_complex)} "
            f"alpha={format_complex_literal(args.alpha.as_complex)} "
            f"n={args.n} base_seed={seed.base_seed} stream={seed.stream_index}"
        )
        values = batch.angles
    else:
        if args.theta is None:
            raise CliError("sampling needs --theta (or --circular with --w)")
        batch = sample_cauchy(args.n, args.theta, seed)
        header = (
            f"# theta={format_complex_literal(args.theta.as_complex)} "
            f"n={args.n} base_seed={seed.base_seed} stream={seed.stream_index}"
        )
        values = batch.values
    lines = [header] + [repr(float(v)) for v in values]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_estimate(args) -> int:
    raw = _read_values(args.input)
    if args.circular:
        values = real_from_circle_angle(raw, args.alpha)
    else:
        values = raw
    batch = SampleBatch.coerce(values)
    outcome = (
        qam_estimate_median_adjusted(args.generator, batch)
        if args.median_adjust
        else qam_estimate(args.generator, batch)
    )
    if outcome.is_degenerate:
        raise CliError(
            f"degenerate initializer: generator {args.generator} gave "
            f"Im = {outcome.raw.imag!r}"
        )
    step = one_step_detailed(batch, outcome.value)
    payload = {
        "y": _pair(outcome.raw),
        "z": _pair(step.point.as_complex),
        "diagnostics": {
            "boundary_hit": outcome.boundary_hit,
            "mean_magnitude": outcome.mean_magnitude,
            "halvings": step.halvings,
        },
    }
    if args.circular:
        w = mobius_to_disk(step.point, args.alpha)
        payload["w"] = _pair(w.as_complex)
    _json_out(payload, args.out)
    return 0


def _cmd_mle(args) -> int:
    values = _read_values(args.input)
    cfg = SolverConfig(
        score_tol=args.score_tol, step_tol=args.step_tol, max_iters=args.max_iters
    )
    result: MleResult = mle(values, cfg)
    _json_out(
        {
            "theta": _pair(result.theta_hat.as_complex),
            "iterations": result.iterations,
            "score_norm": result.final_score_norm,
            "converged": result.converged,
        },
        args.out,
    )
    return 0


def _cmd_kl(args) -> int:
    if args.circular:
        value = kl_circular(
            DiskPoint(args.from_.real, args.from_.imag),
            DiskPoint(args.to.real, args.to.imag),
        )
    else:
        value = kl_halfplane(
            HalfPlanePoint(args.from_.real, args.from_.imag),
            HalfPlanePoint(args.to.real, args.to.imag),
        )
    _json_out({"kl": value}, args.out)
    return 0


def _cmd_rate(args) -> int:
    if args.circular:
        if args.w is None:
            raise CliError("--circular rate needs --w")
        value = bahadur_rate_circular(args.eps, args.w)
    else:
        if args.theta is None:
            raise CliError("rate needs --theta (or --circular with --w)")
        value = bahadur_rate(args.eps, args.theta)
    _json_out({"b": value}, args.out)
    return 0


def _read_scenarios(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _cmd_simulate_mse(args) -> int:
    default_r = 1_000_000 if args.full else args.replications
    scenarios = mse_scenarios_from_json(
        _read_scenarios(args.scenarios),
        default_replications=default_r,
        default_base_seed=_resolve_seed(args),
    )
    rows = run_table(scenarios, workers=args.workers)
    csv_text = rows_to_csv(rows)
    json_text = rows_to_json(rows)
    if args.out_csv:
        _write_text(args.out_csv, csv_text)
    if args.out_json:
        _write_text(args.out_json, json_text)
    if not args.out_csv and not args.out_json:
        sys.stdout.write(csv_text)
    return 2 if any(r.error is not None for r in rows) else 0


def _cmd_simulate_tail(args) -> int:
    default_r = 1_000_000 if args.full else args.replications
    scenarios = tail_scenarios_from_json(
        _read_scenarios(args.scenarios),
        default_replications=default_r,
        default_base_seed=_resolve_seed(args),
    )
    failed = False
    results = []
    for sc in scenarios:
        try:
            results.append(run_tail(sc, workers=args.workers))
        except CauchyEstError as exc:
            print(f"cauchy-est: tail cell failed: {exc}", file=sys.stderr)
            failed = True
    csv_text = tail_results_to_csv(results)
    json_text = tail_results_to_json(results)
    if args.out_csv:
        _write_text(args.out_csv, csv_text)
    if args.out_json:
        _write_text(args.out_json, json_text)
    if not args.out_csv and not args.out_json:
        sys.stdout.write(csv_text)
    return 2 if failed else 0


_COMMANDS = {
    "sample": _cmd_sample,
    "estimate": _cmd_estimate,
    "mle": _cmd_mle,
    "kl": _cmd_kl,
    "rate": _cmd_rate,
    "simulate-mse": _cmd_simulate_mse,
    "simulate-tail": _cmd_simulate_tail,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"cauchy-est: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"cauchy-est: {exc}", file=sys.stderr)
        return 1
    except CauchyEstError as exc:
        print(f"cauchy-est: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
