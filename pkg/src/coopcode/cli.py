"""Command-line batch driver.

Four subcommands cover the full experiment surface:

  construct   build a relay coefficient matrix and print/serialize it
  analyze     closed-form outage bounds over an SNR sweep (CSV)
  simulate    Monte Carlo outage sweeps for any scheme mix (CSV)
  dmt         diversity-multiplexing tradeoff curves on an r grid (CSV)

Conventions: SNR is given in dB and converted internally to linear
rho = 10**(dB/10).  Rates can be given per packet (--r0) or as the
system rate (--rate); the two are related by r0 = rate*(N+M)/N.  A flat
``key=value`` config file can seed any flag; explicit flags win.  All
CSV output is deterministic for a fixed configuration, including across
--workers settings.  Errors exit with status 2 and a message naming the
violated bound.
"""

import argparse
import math
import sys

import numpy as np

from . import analytic, netcode, simkernel
from .gf import MAX_ELL, field_new
from .netcode import FieldTooSmallError

SCHEME_CHOICES = ("dncc", "rncc", "selection", "ncc", "cc")
KIND_CHOICES = ("vandermonde", "cauchy", "random")
FMT = "{:.10g}"


def _die(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_config(path: str) -> dict:
    """Flat key=value lines; blank lines and # comments ignored."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> argparse.Namespace:
    """Parse argv with defaults overridden by --config entries (flags win).

    Config values are installed as defaults on the chosen subcommand's
    parser, so anything given explicitly on the command line still takes
    precedence.
    """
    pre, _ = parser.parse_known_args(argv)
    if getattr(pre, "config", None):
        subs = next(
            a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
        )
        sub = subs.choices[pre.command]
        known = {a.dest: a for a in sub._actions}
        for key, val in _read_config(pre.config).items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            act = known[key]
            parsed = act.type(val) if act.type else val
            if act.choices and parsed not in act.choices:
                raise ValueError(
                    f"config key {key!r}: {val!r} not one of {', '.join(map(str, act.choices))}"
                )
            sub.set_defaults(**{key: parsed})
    return parser.parse_args(argv)


def _field_for(q: int | None, n: int, m: int):
    """GF(q) for the run; defaults to the smallest field that admits every
    construction for (N, M), i.e. 2**ell >= N+M+1."""
    if q is None:
        q = 1 << max(1, math.ceil(math.log2(n + m + 1)))
    ell = q.bit_length() - 1
    if q != 1 << ell or not 1 <= ell <= MAX_ELL:
        raise ValueError(f"q must be a power of two with 2 <= q <= 2**{MAX_ELL}, got {q}")
    return field_new(ell)


def _build_code(kind: str, n: int, m: int, field, seed: int):
    if kind == "cauchy":
        return netcode.build_cauchy(n, m, field)
    if kind == "vandermonde":
        return netcode.build_vandermonde(n, m, field)
    return netcode.build_random(n, m, field, seed)


def _snr_grid_db(args) -> list:
    start, stop, step = args.snr_start_db, args.snr_stop_db, args.snr_step_db
    if stop is None:
        stop = start
    if step <= 0:
        raise ValueError("snr-step-db must be positive")
    if stop < start:
        raise ValueError("snr-stop-db must be >= snr-start-db")
    grid = []
    i = 0
    while (db := start + i * step) <= stop + 1e-9:
        grid.append(db)
        i += 1
    return grid


def _rate_r0(args, n: int, m: int) -> float:
    if args.r0 is not None and args.rate is not None:
        raise ValueError("give either --r0 or --rate, not both")
    if args.rate is not None:
        return args.rate * (n + m) / n
    return args.r0 if args.r0 is not None else 1.0


def _schemes(args) -> list:
    names = [s.strip() for s in args.scheme.split(",") if s.strip()]
    if not names:
        raise ValueError("scheme list is empty")
    for s in names:
        if s not in SCHEME_CHOICES:
            raise ValueError(f"unknown scheme {s!r}; choose from {', '.join(SCHEME_CHOICES)}")
    return names


# -- subcommands ----------------------------------------------------------------


def cmd_construct(args) -> int:
    field = _field_for(args.q, args.n, args.m)
    code = _build_code(args.kind, args.n, args.m, field, args.seed)
    _emit(netcode.dump_code(code), args.out)
    return 0


def cmd_analyze(args) -> int:
    n, m = args.n, args.m
    r0 = _rate_r0(args, n, m)
    schemes = _schemes(args)
    for s in schemes:
        if s not in ("dncc", "rncc"):
            raise ValueError(f"analyze covers the coded schemes dncc/rncc, not {s!r}")
    grid_db = _snr_grid_db(args)

    gamma = args.gamma
    lams = [args.lam] * n if args.lam is not None else None
    if (args.traffic == "multicast" and gamma is None) or (
        args.traffic == "unicast" and lams is None
    ):
        field = _field_for(args.q, n, m)
        code = _build_code(args.kind, n, m, field, args.seed)
        if args.traffic == "multicast":
            gamma = code.matrix.gamma_rank(n)
        else:
            lams = []
            for j in range(n):
                lam = code.matrix.lambda_rank(j)
                if lam is None:
                    raise ValueError(
                        f"constructed matrix cannot deliver packet {j}: "
                        "unit vector outside the row space"
                    )
                lams.append(lam)

    lines = ["snr_db,scheme,traffic,p0,p_low,p_up,p_system_low,p_system_up"]
    for db in grid_db:
        rho = 10.0 ** (db / 10.0)
        lp = analytic.LinkParams.from_rate_r0(
            beta=args.beta, rho=rho, rate_r0=r0, n_sources=n, n_relays=m
        )
        if args.traffic == "multicast":
            b = analytic.outage_bounds_multicast(lp, gamma)
            lows, ups = [b.lower] * n, [b.upper] * n
        else:
            per = [analytic.outage_bounds_unicast(lp, lam) for lam in lams]
            lows = [b.lower for b in per]
            ups = [b.upper for b in per]
        row = [
            FMT.format(db),
            "",  # scheme, filled below
            args.traffic,
            FMT.format(analytic.p0(lp)),
            FMT.format(sum(lows) / n),
            FMT.format(sum(ups) / n),
            FMT.format(analytic.system_outage(lows)),
            FMT.format(analytic.system_outage(ups)),
        ]
        for s in schemes:
            row[1] = s
            lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _scenario_for(scheme: str, args, grid_rho, r0: float):
    n, m = args.n, args.m
    code = None
    field = None
    if scheme in ("dncc", "selection"):
        field = _field_for(args.q, n, m)
        code = _build_code(args.kind, n, m, field, args.seed)
    elif scheme == "rncc":
        field = _field_for(args.q, n, m)
    return simkernel.Scenario(
        scheme=scheme,
        n_sources=n,
        n_relays=m,
        snr_grid=tuple(grid_rho),
        trials=args.trials,
        seed=args.seed,
        code=code,
        field=field,
        strategy=args.strategy,
        traffic=args.traffic,
        beta=args.beta,
        rate_r0=r0,
        k_select=args.k_select if scheme == "selection" else None,
    )


def cmd_simulate(args) -> int:
    n, m = args.n, args.m
    r0 = _rate_r0(args, n, m)
    schemes = _schemes(args)
    grid_db = _snr_grid_db(args)
    grid_rho = [10.0 ** (db / 10.0) for db in grid_db]

    dest_cols = ",".join(f"dest{j}_rate" for j in range(n))
    lines = [f"snr_db,scheme,strategy,traffic,trials,{dest_cols},avg_outage,system_rate,ci95"]
    for s in schemes:
        scn = _scenario_for(s, args, grid_rho, r0)
        report = simkernel.run_sweep(scn, workers=args.workers)
        for db, pt in zip(grid_db, report.points):
            cells = [FMT.format(db), s, scn.strategy, scn.traffic, str(pt.trials)]
            cells += [FMT.format(r) for r in pt.dest_rates]
            cells += [
                FMT.format(pt.avg_outage),
                FMT.format(pt.system_rate),
                FMT.format(pt.ci95_avg),
            ]
            lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_dmt(args) -> int:
    schemes = _schemes(args)
    if args.r_points < 2:
        raise ValueError("r-points must be >= 2")
    lines = ["r,scheme,d"]
    for s in schemes:
        curve = analytic.dmt_curve(
            s, args.n, args.m, gamma_n=args.gamma, k_select=args.k_select
        )
        for r in np.linspace(0.0, curve.r_max, args.r_points):
            lines.append(f"{FMT.format(float(r))},{s},{FMT.format(curve.at(float(r)))}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- parser ----------------------------------------------------------------------


def _add_common(p, *, grid=False, sim=False):
    p.add_argument("--n", type=int, default=2, help="number of sources/destinations N")
    p.add_argument("--m", type=int, default=2, help="number of relays M")
    p.add_argument("--q", type=int, default=None,
                   help="field size (power of two); default: smallest admitting N+M+1 points")
    p.add_argument("--seed", type=int, default=0, help="seed for anything randomized")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--config", default=None, help="key=value file; flags override it")
    if grid:
        p.add_argument("--beta", type=float, default=1.0,
                       help="exponential rate of every link gain")
        p.add_argument("--r0", type=float, default=None, help="per-packet rate (bpcu)")
        p.add_argument("--rate", type=float, default=None,
                       help="system rate R (bpcu); r0 = R*(N+M)/N")
        p.add_argument("--snr-start-db", type=float, default=0.0)
        p.add_argument("--snr-stop-db", type=float, default=None,
                       help="default: same as start (single point)")
        p.add_argument("--snr-step-db", type=float, default=1.0)
    if sim:
        p.add_argument("--strategy", choices=("A", "B"), default="A",
                       help="relay forwards only after decoding all N (A) or any subset (B)")
        p.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials per point")
        p.add_argument("--workers", type=int, default=1, help="worker processes")
        p.add_argument("--k-select", type=int, default=None,
                       help="relays kept by selection (scheme=selection)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coopcode",
        description="Construct relay codes, evaluate outage bounds, and run Monte Carlo sweeps.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build and serialize a relay coefficient matrix")
    _add_common(p)
    p.add_argument("--kind", choices=KIND_CHOICES, default="vandermonde")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("analyze", help="closed-form outage bounds over an SNR sweep")
    _add_common(p, grid=True)
    p.add_argument("--kind", choices=KIND_CHOICES, default="vandermonde")
    p.add_argument("--scheme", default="dncc", help="comma-separated scheme labels")
    p.add_argument("--traffic", choices=("multicast", "unicast"), default="multicast")
    p.add_argument("--gamma", type=int, default=None,
                   help="decoding threshold: every gamma received rows give full rank")
    p.add_argument("--lam", type=int, default=None,
                   help="per-destination threshold: every lam rows span the wanted unit vector")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo outage sweep")
    _add_common(p, grid=True, sim=True)
    p.add_argument("--kind", choices=KIND_CHOICES, default="vandermonde")
    p.add_argument("--scheme", default="dncc", help="comma-separated subset of "
                   + ",".join(SCHEME_CHOICES))
    p.add_argument("--traffic", choices=("multicast", "unicast"), default="multicast")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("dmt", help="diversity-multiplexing tradeoff curves")
    _add_common(p)
    p.add_argument("--scheme", default="dncc", help="comma-separated subset of "
                   + ",".join(SCHEME_CHOICES))
    p.add_argument("--gamma", type=int, default=None,
                   help="decoding threshold for dncc/rncc (default N, the ideal code)")
    p.add_argument("--k-select", type=int, default=None,
                   help="relays kept by selection (scheme=selection)")
    p.add_argument("--r-points", type=int, default=101,
                   help="samples per scheme from r=0 to that scheme's maximum r")
    p.set_defaults(fn=cmd_dmt)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = _apply_config(parser, list(argv))
        return args.fn(args)
    except FieldTooSmallError as exc:
        return _die(str(exc))
    except (ValueError, OSError) as exc:
        return _die(str(exc))


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
