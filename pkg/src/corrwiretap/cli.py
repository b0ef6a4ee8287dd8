"""Command-line front end.

Subcommands::

    capacity   average secrecy capacity at one operating point
    outage     secrecy outage probability at one operating point
    sweep      capacity (or outage, with --rate) over an SNR x rho grid, as CSV
    compare    closed form vs quadrature vs Monte-Carlo over a grid, as CSV
    simulate   raw Monte-Carlo estimates at one operating point
    pdf        tabulate the joint PDF (Bessel and series forms) as CSV

Exit codes: 0 ok, 2 invalid input, 3 series non-convergence or other
numerical failure, 4 I/O failure.

Any subcommand accepts ``--config FILE`` with ``key = value`` lines whose keys
are long option names (``snr-db-start = 0``, ``rho = 0, 0.3, 0.6``).  Flags on
the command line take precedence over the file, which takes precedence over
defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .channel import ChannelParams, SnrPair, db_to_linear, joint_pdf_bessel, joint_pdf_series
from .closedform import SeriesControl, average_secrecy_capacity, outage_probability
from .errors import ConvergenceFailure, DomainError, NumericalInconsistency, QuadratureNonconvergence
from .montecarlo import estimate_capacity, estimate_outage, new_seed
from .oracle import capacity_by_quadrature, outage_by_quadrature

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

LN2 = math.log(2.0)

SWEEP_HEADER = ["snr_db", "rho", "cs_nats", "cs_units_requested", "terms_used"]
SWEEP_OUTAGE_HEADER = ["snr_db", "rho", "rate_nats", "pout", "terms_used"]
COMPARE_HEADER = [
    "snr_db", "rho", "cs_closed", "cs_quadrature", "cs_mc", "mc_stderr", "abs_diff_closed_quad", "z_score_mc",
]
COMPARE_OUTAGE_HEADER = [
    "snr_db", "rho", "rate_nats", "pout_closed", "pout_quadrature", "pout_mc", "mc_stderr",
    "abs_diff_closed_quad", "z_score_mc",
]


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits: round-trips any double."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# argument parsing


def _add_point_args(p):
    p.add_argument("--snr-db", type=float, help="mean SNR in dB applied to both channels")
    p.add_argument("--lambda1", type=float, help="mean SNR of the main channel (linear)")
    p.add_argument("--lambda2", type=float, help="mean SNR of the eavesdropper channel (linear)")
    p.add_argument("--rho", type=float, default=0.0, help="power correlation, 0 <= rho <= 0.99")


def _add_series_args(p):
    p.add_argument("--tol", type=float, default=SeriesControl.rel_tol, help="relative truncation tolerance")
    p.add_argument("--kmax", type=int, default=SeriesControl.k_max, help="hard cap on the series index")
    p.add_argument("--passes", type=int, default=SeriesControl.consecutive_passes,
                   help="consecutive small terms required to stop")


def _add_grid_args(p):
    p.add_argument("--snr-db-start", type=float, default=0.0)
    p.add_argument("--snr-db-stop", type=float, default=30.0)
    p.add_argument("--snr-db-step", type=float, default=5.0)
    p.add_argument("--rho", type=float, nargs="*", default=[0.0, 0.3, 0.6, 0.9], help="list of correlations")
    p.add_argument("--lambda2", type=float, help="fix the eavesdropper mean SNR (linear) instead of tracking the sweep")
    p.add_argument("--rate", type=float, help="target secrecy rate in nats; switches to outage")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV output path (stdout if omitted)")


def _add_mc_args(p, default_samples):
    p.add_argument("--mc-samples", type=int, default=default_samples)
    p.add_argument("--seed", type=int, help="64-bit RNG seed; generated and printed if omitted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrwiretap",
        description="Secrecy capacity and outage of correlated Rayleigh wiretap channels.",
    )
    parser.add_argument("--config", help="key = value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="average secrecy capacity")
    _add_point_args(p)
    _add_series_args(p)
    p.add_argument("--units", choices=["nats", "bits"], default="nats")

    p = sub.add_parser("outage", help="secrecy outage probability")
    _add_point_args(p)
    _add_series_args(p)
    p.add_argument("--rate", type=float, required=True, help="target secrecy rate in nats")

    p = sub.add_parser("sweep", help="capacity/outage over an SNR x rho grid")
    _add_grid_args(p)
    _add_series_args(p)
    p.add_argument("--units", choices=["nats", "bits"], default="nats")

    p = sub.add_parser("compare", help="closed form vs quadrature vs Monte-Carlo")
    _add_grid_args(p)
    _add_series_args(p)
    _add_mc_args(p, 100_000)

    p = sub.add_parser("simulate", help="Monte-Carlo estimates at one point")
    _add_point_args(p)
    _add_mc_args(p, 1_000_000)
    p.add_argument("--rate", type=float, help="also estimate the outage at this rate (nats)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--units", choices=["nats", "bits"], default="nats")

    p = sub.add_parser("pdf", help="tabulate the joint PDF")
    _add_point_args(p)
    _add_series_args(p)
    p.add_argument("--alpha-max", type=float, help="default 5 * lambda1")
    p.add_argument("--beta-max", type=float, help="default 5 * lambda2")
    p.add_argument("--points", type=int, default=41, help="grid points per axis")
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    return parser


def read_config(path: str) -> list[str]:
    """Turn a key = value file into argv tokens."""
    tokens = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            flag = "--" + key.lstrip("-").replace("_", "-")
            tokens.append(flag)
            tokens.extend(v for v in value.replace(",", " ").split())
    return tokens


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # an unreadable file surfaces as OSError, exit 4
        cfg = read_config(args.config)
        # global options, then the subcommand, then file tokens, then the original subcommand flags
        i = argv.index(args.command)
        args = parser.parse_args(list(argv[:i + 1]) + cfg + list(argv[i + 1:]))
    return args


def _point_params(args) -> ChannelParams:
    l1 = l2 = None
    if args.snr_db is not None:
        l1 = l2 = db_to_linear(args.snr_db)
    if args.lambda1 is not None:
        l1 = args.lambda1
    if args.lambda2 is not None:
        l2 = args.lambda2
    if l1 is None or l2 is None:
        raise UsageError("give --snr-db, or both --lambda1 and --lambda2")
    return ChannelParams(l1, l2, args.rho)


def _series_control(args) -> SeriesControl:
    return SeriesControl(rel_tol=args.tol, consecutive_passes=args.passes, k_max=args.kmax)


def snr_grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0.0:
        raise UsageError(f"--snr-db-step must be > 0, got {step}")
    if stop < start:
        raise UsageError("--snr-db-stop must be >= --snr-db-start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _grid(args):
    if not args.rho:
        raise UsageError("rho list is empty")
    for r in args.rho:
        if not 0.0 <= r <= 0.99:
            raise UsageError(f"rho values must lie in [0, 0.99], got {r}")
    if args.rate is not None and not args.rate >= 0.0:
        raise UsageError(f"--rate must be >= 0, got {args.rate}")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    snrs = snr_grid(args.snr_db_start, args.snr_db_stop, args.snr_db_step)
    return [(s, r) for s in snrs for r in args.rho]


def _grid_params(snr_db, rho, lambda2):
    l1 = db_to_linear(snr_db)
    return ChannelParams(l1, l1 if lambda2 is None else lambda2, rho)


def _map(fn, items, workers):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def _write_csv(path, header, rows, stdout):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if path is None:
        stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _check_writable(path):
    if path is None:
        return
    with open(path, "a"):
        pass


# ---------------------------------------------------------------------------
# subcommands


def cmd_capacity(args, out, err):
    p = _point_params(args)
    res = average_secrecy_capacity(p, _series_control(args))
    value = res.value / LN2 if args.units == "bits" else res.value
    print(fmt(value), file=out)
    print(
        f"units={args.units} terms_used={res.terms_used} last_term_ratio={res.last_term_ratio:.3e} "
        f"fk_method={res.diag.method_used.value}",
        file=err,
    )


def cmd_outage(args, out, err):
    p = _point_params(args)
    res = outage_probability(p, args.rate, _series_control(args))
    print(fmt(res.value), file=out)
    print(
        f"terms_used={res.terms_used} last_term_ratio={res.last_term_ratio:.3e} y={res.y:.6g} mu={res.mu:.6g}",
        file=err,
    )


def _sweep_row(task):
    snr_db, rho, lambda2, rate, ctrl, units = task
    p = _grid_params(snr_db, rho, lambda2)
    if rate is None:
        res = average_secrecy_capacity(p, ctrl)
        shown = res.value / LN2 if units == "bits" else res.value
        return (snr_db, rho, res.value, shown, res.terms_used)
    res = outage_probability(p, rate, ctrl)
    return (snr_db, rho, rate, res.value, res.terms_used)


def cmd_sweep(args, out, err):
    grid = _grid(args)
    ctrl = _series_control(args)
    _check_writable(args.out)
    tasks = [(s, r, args.lambda2, args.rate, ctrl, args.units) for s, r in grid]
    rows = _map(_sweep_row, tasks, args.workers)
    header = SWEEP_HEADER if args.rate is None else SWEEP_OUTAGE_HEADER
    _write_csv(args.out, header, rows, out)
    print(f"rows={len(rows)}", file=err)


def row_seed(seed: int, index: int) -> int:
    """64-bit seed of grid row ``index`` under master ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def _compare_row(task):
    index, snr_db, rho, lambda2, rate, ctrl, n, seed = task
    p = _grid_params(snr_db, rho, lambda2)
    rs = row_seed(seed, index)
    if rate is None:
        closed = average_secrecy_capacity(p, ctrl).value
        quad = capacity_by_quadrature(p).value
        mc = estimate_capacity(p, n, rs)
    else:
        closed = outage_probability(p, rate, ctrl).value
        quad = outage_by_quadrature(p, rate).value
        mc = estimate_outage(p, rate, n, rs)
    diff = mc.mean - closed
    if mc.std_error > 0.0:
        z = diff / mc.std_error
    else:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    head = (snr_db, rho) if rate is None else (snr_db, rho, rate)
    return head + (closed, quad, mc.mean, mc.std_error, abs(closed - quad), z)


def cmd_compare(args, out, err):
    grid = _grid(args)
    if args.mc_samples < 10_000:
        raise UsageError("--mc-samples must be >= 10000 for compare")
    ctrl = _series_control(args)
    # with the CSV on stdout the seed goes to stderr, which also carries the row summary
    seed = _resolve_seed(args, out if args.out is not None else None)
    _check_writable(args.out)
    tasks = [(i, s, r, args.lambda2, args.rate, ctrl, args.mc_samples, seed) for i, (s, r) in enumerate(grid)]
    rows = _map(_compare_row, tasks, args.workers)
    header = COMPARE_HEADER if args.rate is None else COMPARE_OUTAGE_HEADER
    _write_csv(args.out, header, rows, out)
    print(f"rows={len(rows)} seed={seed} workers={args.workers}", file=err)


def _resolve_seed(args, announce):
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        return args.seed
    seed = new_seed()
    if announce is not None:
        print(f"seed={seed}", file=announce)
    return seed


def cmd_simulate(args, out, err):
    p = _point_params(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    seed = _resolve_seed(args, None)
    est = estimate_capacity(p, args.mc_samples, seed, args.workers)
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    print(f"capacity_{args.units} {fmt(est.mean * scale)} stderr {fmt(est.std_error * scale)}", file=out)
    if args.rate is not None:
        o = estimate_outage(p, args.rate, args.mc_samples, seed, args.workers)
        print(f"outage {fmt(o.mean)} stderr {fmt(o.std_error)}", file=out)
    print(f"n={est.n_samples} seed={seed} workers={args.workers}", file=out)


def cmd_pdf(args, out, err):
    p = _point_params(args)
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    ctrl = _series_control(args)
    amax = args.alpha_max if args.alpha_max is not None else 5.0 * p.lambda1
    bmax = args.beta_max if args.beta_max is not None else 5.0 * p.lambda2
    if not (amax > 0 and bmax > 0):
        raise UsageError("--alpha-max and --beta-max must be > 0")
    _check_writable(args.out)
    rows = []
    for a in np.linspace(0.0, amax, args.points):
        for b in np.linspace(0.0, bmax, args.points):
            s = SnrPair(a, b)
            rows.append((a, b, joint_pdf_bessel(p, s), joint_pdf_series(p, s, ctrl)))
    _write_csv(args.out, ["alpha", "beta", "pdf_bessel", "pdf_series"], rows, out)


COMMANDS = {
    "capacity": cmd_capacity,
    "outage": cmd_outage,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "pdf": cmd_pdf,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args, out, err)
    except SystemExit as exc:
        # argparse reports bad usage with status 2
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=err)
        if exc.partial is not None:
            print(f"partial={fmt(exc.partial)} terms_used={exc.terms_used}", file=err)
        return EXIT_CONVERGENCE
    except (NumericalInconsistency, QuadratureNonconvergence) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
