"""Command-line front end: SNR sweeps, crossover search, simulation, ad-hoc MI.

    cocktail-bpsk sweep --ratio 0.7 --snr-min 0 --snr-max 1 --step 0.01 --out fig1.csv
    cocktail-bpsk crossover --ratio 0.7 --snr-hi 1 --tol 1e-4
    cocktail-bpsk simulate --ratio 0.7 --snr 0.3 --symbols 1000000 --seed 42 --mode genie
    cocktail-bpsk mi --points 1.7,0.3,-0.3,-1.7 --sigma2 1

Any subcommand accepts ``--config FILE`` holding ``key = value`` lines whose
keys are that subcommand's flag names; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .link_sim import SimConfig, simulate
from .mi_core import (
    DEFAULT_QUADRATURE,
    Constellation,
    NoiseSpec,
    QuadratureConfig,
    QuadratureConvergenceError,
    mi_discrete_awgn,
)
from .scheme import adr_at_snr, normalized_point, rail_noise

CSV_HEADER = (
    "snr,capacity,adr_paper_total,adr_layer1,adr_layer2,"
    "mi_exact_layer1,mi_exact_total,gap_paper,gap_exact"
)
_N_VALUE_COLUMNS = CSV_HEADER.count(",")


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    ratio: float = 0.7
    snr_min: float = 0.0
    snr_max: float = 1.0
    step: float = 0.01
    quadrature: QuadratureConfig = field(default=DEFAULT_QUADRATURE)
    output_path: str = "-"

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ValueError(f"ratio must lie in (0, 1), got {self.ratio!r}")
        if not self.snr_min >= 0:
            raise ValueError(f"snr_min must be >= 0, got {self.snr_min!r}")
        if not self.snr_max > self.snr_min:
            raise ValueError("snr_max must exceed snr_min")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step!r}")

    def grid(self) -> list[float]:
        # snr_max is included when it lands on the grid up to rounding
        k_max = math.floor((self.snr_max - self.snr_min) / self.step + 1e-9)
        return [self.snr_min + k * self.step for k in range(k_max + 1)]


@dataclass(frozen=True)
class CrossoverResult:
    snr_cross: float
    bracket_lo: float
    bracket_hi: float
    iterations: int


def _fmt(v: float) -> str:
    s = f"{v:.9g}"
    return "0" if s == "-0" else s


def _sweep_row(args: tuple[float, float, QuadratureConfig]) -> tuple[str, str | None]:
    ratio, snr, q = args
    try:
        r = adr_at_snr(ratio, snr, q)
    except QuadratureConvergenceError as exc:
        return ",".join([_fmt(snr)] + ["nan"] * _N_VALUE_COLUMNS), f"snr={_fmt(snr)}: {exc}"
    values = (
        snr,
        r.capacity_bits,
        r.total_bits,
        r.layer1_bits,
        r.layer2_bits,
        r.exact_layer1_bits,
        r.exact_total_bits,
        r.gap_paper,
        r.gap_exact,
    )
    return ",".join(_fmt(v) for v in values), None


def sweep(spec: SweepSpec, workers: int = 1) -> tuple[list[str], list[str]]:
    """CSV lines (header first) in ascending SNR, plus per-row error messages."""
    jobs = [(spec.ratio, g, spec.quadrature) for g in spec.grid()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_row, jobs, chunksize=4))
    else:
        results = [_sweep_row(j) for j in jobs]
    lines = [CSV_HEADER] + [row for row, _ in results]
    errors = [err for _, err in results if err is not None]
    return lines, errors


def write_sweep(spec: SweepSpec, workers: int = 1) -> list[str]:
    lines, errors = sweep(spec, workers)
    text = "\n".join(lines) + "\n"
    if spec.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(spec.output_path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
    return errors


def find_crossover(
    ratio: float,
    snr_hi: float = 1.0,
    tol: float = 1e-4,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CrossoverResult:
    """Bisect for the SNR where the layered ADR drops back to capacity.

    The upper end must already show a non-positive gap. The positive side is
    found by halving down from snr_hi/2.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if not snr_hi > 0:
        raise ValueError(f"snr_hi must be positive, got {snr_hi!r}")

    def gap(g: float) -> float:
        return adr_at_snr(ratio, g, q).gap_paper

    hi = snr_hi
    if gap(hi) > 0:
        raise BracketError(
            f"gap is still positive at snr_hi={snr_hi:g}; retry with a larger --snr-hi"
        )
    lo = hi / 2
    while gap(lo) <= 0:
        hi = lo
        lo /= 2
        if lo < snr_hi * 1e-9:
            raise BracketError(f"no positive gap found in (0, {snr_hi:g}]")

    iterations = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return CrossoverResult(0.5 * (lo + hi), lo, hi, iterations)


def _checked(conv, test, what):
    def parse(text):
        try:
            v = conv(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not test(v):
            raise argparse.ArgumentTypeError(f"{text!r} is out of range: {what}")
        return v

    return parse


_ratio = _checked(float, lambda v: 0 < v < 1, "need 0 < ratio < 1")
_nonneg = _checked(float, lambda v: v >= 0 and math.isfinite(v), "need a finite value >= 0")
_positive = _checked(float, lambda v: v > 0 and math.isfinite(v), "need a finite value > 0")
_count = _checked(int, lambda v: v >= 1, "need an integer >= 1")
_seed = _checked(int, lambda v: 0 <= v < 2 ** 64, "need a 64-bit unsigned integer")


def _points(text: str) -> tuple[float, ...]:
    try:
        pts = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid point list {text!r}") from None
    if not pts or not all(math.isfinite(p) for p in pts):
        raise argparse.ArgumentTypeError("need at least one finite point")
    return pts


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocktail-bpsk", description="Cocktail BPSK rate and link toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file; command-line flags override it")
        p.add_argument("--abs-tol", type=_positive, default=DEFAULT_QUADRATURE.abs_tol,
                       help="quadrature tolerance in bits")

    p = sub.add_parser("sweep", help="rate curves over a linear SNR grid (CSV)")
    p.add_argument("--ratio", type=_ratio, default=0.7, help="beta/alpha")
    p.add_argument("--snr-min", type=_nonneg, default=0.0)
    p.add_argument("--snr-max", type=_positive, default=1.0)
    p.add_argument("--step", type=_positive, default=0.01)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--workers", type=_count, default=1)
    common(p)

    p = sub.add_parser("crossover", help="SNR where the layered ADR meets capacity")
    p.add_argument("--ratio", type=_ratio, default=0.7)
    p.add_argument("--snr-hi", type=_positive, default=1.0)
    p.add_argument("--tol", type=_positive, default=1e-4)
    p.add_argument("--out", default="-")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo two-step detection")
    p.add_argument("--ratio", type=_ratio, default=0.7)
    p.add_argument("--snr", type=_positive, required=True)
    p.add_argument("--symbols", type=_count, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mode", choices=("genie", "dd"), default="genie")
    p.add_argument("--workers", type=_count, default=1)
    p.add_argument("--out", default="-")
    common(p)

    p = sub.add_parser("mi", help="mutual information of an equiprobable real constellation")
    p.add_argument("--points", type=_points, required=True, help="comma-separated reals")
    p.add_argument("--sigma2", type=_positive, required=True)
    p.add_argument("--out", default="-")
    common(p)
    return parser


def _config_tokens(parser: argparse.ArgumentParser, command: str, path: str) -> list[str]:
    sub = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    ).choices[command]
    flags = {
        opt[2:]: opt
        for action in sub._actions
        for opt in action.option_strings
        if opt.startswith("--") and opt not in ("--help", "--config")
    }
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[config]\n" + fh.read(), source=path)
    except (OSError, configparser.Error) as exc:
        sub.error(f"argument --config: cannot read {path!r}: {exc}")
    tokens = []
    for key, value in cp.items("config"):
        flag = flags.get(key.replace("_", "-"))
        if flag is None:
            sub.error(f"argument --config: unknown key {key!r} in {path}")
        tokens += [flag, value]
    return tokens


def _parse(argv: list[str]) -> argparse.Namespace:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # config values go first so explicit flags (last occurrence) win
        tokens = _config_tokens(parser, args.command, args.config)
        args = parser.parse_args([argv[0]] + tokens + argv[1:])
    if args.command == "sweep" and not args.snr_max > args.snr_min:
        parser.error("argument --snr-max: must exceed --snr-min")
    return args


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


def run_cli(argv: list[str]) -> int:
    try:
        args = _parse(list(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    q = QuadratureConfig(abs_tol=args.abs_tol)
    try:
        if args.command == "sweep":
            spec = SweepSpec(args.ratio, args.snr_min, args.snr_max, args.step, q, args.out)
            errors = write_sweep(spec, args.workers)
            for err in errors:
                print(f"error: quadrature failed at {err}", file=sys.stderr)
            return 1 if errors else 0

        if args.command == "crossover":
            r = find_crossover(args.ratio, args.snr_hi, args.tol, q)
            _emit(
                f"snr_cross = {r.snr_cross:.9g}\n"
                f"bracket_lo = {r.bracket_lo:.9g}\n"
                f"bracket_hi = {r.bracket_hi:.9g}\n"
                f"iterations = {r.iterations}\n",
                args.out,
            )
            return 0

        if args.command == "simulate":
            params, noise = normalized_point(args.ratio, args.snr)
            cfg = SimConfig(args.symbols, args.seed, args.mode, args.workers)
            report = simulate(params, rail_noise(noise), cfg)
            _emit(report.format(), args.out)
            return 0

        if args.command == "mi":
            res = mi_discrete_awgn(
                Constellation.equiprobable(args.points), NoiseSpec(args.sigma2), q
            )
            _emit(
                f"mi_bits = {res.value_bits:.9g}\n"
                f"est_error_bits = {res.est_error_bits:.3g}\n"
                f"evaluations = {res.evaluations}\n",
                args.out,
            )
            return 0
    except (QuadratureConvergenceError, BracketError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command!r}")


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
