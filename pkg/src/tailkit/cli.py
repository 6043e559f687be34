"""Command-line surface: figure data as CSV plus verification runs.

Every CSV starts with a '#'-prefixed manifest block (command, flags,
version, timestamp, grid settings).  Numbers are written with 17
significant digits, NaN cells as empty fields, '\n' line endings; given
an identical manifest (pin --timestamp or SOURCE_DATE_EPOCH) a rerun
reproduces the file byte for byte.  Output goes through a temp file and
an atomic rename, so a partial CSV is never left behind.

Exit codes: 0 ok, 1 verification failure, 2 bad flags, 3 invalid seed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, awgn, dist, engine, verify
from .engine import GridSpec, SeedKind, TailSide
from .errors import SeedInvalid, TailkitError

_ORACLE_N_CAP = 2000


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def _timestamp(args) -> str:
    if getattr(args, "timestamp", None):
        return args.timestamp
    sde = os.environ.get("SOURCE_DATE_EPOCH")
    if sde:
        return _dt.datetime.fromtimestamp(int(sde), _dt.timezone.utc).isoformat()
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _manifest_lines(command: str, params: dict, grid_desc: str, args) -> list[str]:
    kv = " ".join(f"{k}={v}" for k, v in sorted(params.items()))
    return [
        "# tailkit CSV",
        f"# command: {command}",
        f"# parameters: {kv}",
        f"# tool_version: {__version__}",
        f"# timestamp: {_timestamp(args)}",
        f"# settings: {grid_desc}",
    ]


def _write_rows(out_path: str | None, lines: list[str]):
    payload = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(payload)
        return
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tailkit-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _build_dist(args):
    if args.dist == "gaussian":
        return dist.make_gaussian(args.mu, args.sigma), {"dist": "gaussian", "mu": args.mu, "sigma": args.sigma}
    if args.dist == "beta-prime":
        return dist.make_beta_prime(args.alpha, args.beta), {"dist": "beta-prime", "alpha": args.alpha, "beta": args.beta}
    return dist.make_noncentral_chi2(args.k, args.s), {"dist": "ncchi2", "k": args.k, "s": args.s}


def cmd_bounds(args) -> int:
    d, params = _build_dist(args)
    side = TailSide.RIGHT if args.side == "right" else TailSide.LEFT
    seed = SeedKind.PDF if args.seed == "pdf" else SeedKind.SHIFTED_PDF
    params.update(
        side=args.side, seed=args.seed, iters=args.iters,
        x_min=args.x_min, x_max=args.x_max, points=args.points,
    )
    grid = GridSpec()
    window = (args.x_min, args.x_max)

    chain = [engine.make_seed(d, seed, side)]
    for _ in range(args.iters):
        chain.append(engine.iterate(chain[-1]))
    classifications = []
    for it in chain:
        try:
            cls = engine.classify(it, window, grid)
        except TailkitError as exc:
            if it.index == 0:
                raise SeedInvalid(f"seed fails on ({args.x_min}, {args.x_max}): {exc}") from exc
            raise
        if it.index == 0 and cls.verdict is engine.Verdict.INVALID:
            raise SeedInvalid(f"seed invalid on ({args.x_min}, {args.x_max})")
        classifications.append(cls)

    if args.x_min > 0:
        xs = np.geomspace(args.x_min, args.x_max, args.points)
    else:
        xs = np.linspace(args.x_min, args.x_max, args.points)

    n_it = len(chain)
    header = (
        ["x"]
        + [f"P_{i}" for i in range(n_it)]
        + [f"verdict_{i}" for i in range(n_it)]
        + [f"threshold_{i}" for i in range(n_it)]
        + [f"R_{i}" for i in range(n_it - 1)]
    )
    grid_desc = f"grid_points={grid.points} spacing={grid.spacing} tol={engine.DEFAULT_TOL:g}"
    lines = _manifest_lines("bounds", params, grid_desc, args)
    lines.append(",".join(header))
    for x in xs:
        x = float(x)
        row = [_fmt(x)]
        vals = []
        for it in chain:
            try:
                vals.append(it.value(x))
            except TailkitError:
                vals.append(math.nan)
        row += [_fmt(v) for v in vals]
        row += [c.verdict.value for c in classifications]
        row += [_fmt(c.threshold) for c in classifications]
        for it in chain[:-1]:
            try:
                row.append(_fmt(engine.figure_rate(it, x)))
            except TailkitError:
                row.append("")
        lines.append(",".join(row))
    _write_rows(args.out, lines)
    return 0


def cmd_awgn(args) -> int:
    omega = args.omega if args.omega is not None else 10.0 ** (args.omega_db / 10.0)
    if args.n_list:
        ns = [int(v) for v in args.n_list.split(",")]
    else:
        ns = [int(round(v)) for v in np.geomspace(args.n_min, args.n_max, args.n_points)]
    params = dict(omega=omega, eps=args.eps, oracle=args.oracle, n=",".join(str(n) for n in ns))
    lines = _manifest_lines("awgn", params, f"oracle_n_cap={_ORACLE_N_CAP}", args)
    lines.append(
        "n,lambda_p0,lambda_p1,lambda_asym,r_lower,r_upper,r_asym,r_na,capacity,oracle_converse"
    )
    for n in ns:
        cfg = awgn.AwgnConfig(n, omega, args.eps)
        p = awgn.converse_bounds(cfg)
        oc = ""
        if args.oracle == "on" and n <= _ORACLE_N_CAP:
            oc = _fmt(awgn.oracle_converse(cfg))
        lines.append(
            ",".join(
                [
                    str(n),
                    _fmt(p.lambda_p0),
                    _fmt(p.lambda_p1),
                    _fmt(p.lambda_asym),
                    _fmt(p.r_lower),
                    _fmt(p.r_upper),
                    _fmt(p.r_asym),
                    _fmt(p.r_na),
                    _fmt(p.capacity),
                    oc,
                ]
            )
        )
    _write_rows(args.out, lines)
    return 0


def cmd_verify(args) -> int:
    overrides = {}
    for spec_str in args.tol or []:
        key, _, val = spec_str.partition("=")
        if not val:
            raise TailkitError(f"bad --tol override {spec_str!r} (want KEY=VALUE)")
        overrides[key] = float(val)
    ok = verify.run_suites([args.suite], overrides)
    return 0 if ok else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tailkit", description=__doc__)
    p.add_argument("--version", action="version", version=f"tailkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="iterated tail bounds as CSV (figure data)")
    b.add_argument("--dist", required=True, choices=["gaussian", "beta-prime", "ncchi2"])
    b.add_argument("--mu", type=float, default=0.0)
    b.add_argument("--sigma", type=float, default=1.0)
    b.add_argument("--alpha", type=float, default=2.0)
    b.add_argument("--beta", type=float, default=2.0)
    b.add_argument("--k", type=float, default=4.0)
    b.add_argument("--s", type=float, default=1.0)
    b.add_argument("--side", choices=["right", "left"], default="right")
    b.add_argument("--seed", choices=["pdf", "shifted-pdf"], default="pdf")
    b.add_argument("--iters", type=int, default=4, choices=range(1, 9), metavar="I")
    b.add_argument("--x-min", type=float, required=True)
    b.add_argument("--x-max", type=float, required=True)
    b.add_argument("--points", type=int, default=200)
    b.add_argument("--out", default=None)
    b.add_argument("--timestamp", default=None, help="pin the manifest timestamp (reproducible reruns)")
    b.set_defaults(fn=cmd_bounds)

    a = sub.add_parser("awgn", help="finite-blocklength converse bounds as CSV")
    g = a.add_mutually_exclusive_group(required=True)
    g.add_argument("--omega", type=float, default=None, help="SNR, linear scale")
    g.add_argument("--omega-db", type=float, default=None, help="SNR in dB")
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--n-list", default=None, help="comma-separated blocklengths")
    a.add_argument("--n-min", type=float, default=1e3)
    a.add_argument("--n-max", type=float, default=1e6)
    a.add_argument("--n-points", type=int, default=13)
    a.add_argument("--oracle", choices=["on", "off"], default="off")
    a.add_argument("--out", default=None)
    a.add_argument("--timestamp", default=None)
    a.set_defaults(fn=cmd_awgn)

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--suite", choices=["jet", "specfun", "bounds", "awgn", "cli", "all"], default="all")
    v.add_argument("--tol", action="append", metavar="KEY=VALUE", help="tolerance override (repeatable)")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except SeedInvalid as exc:
        print(f"tailkit: seed invalid: {exc}", file=sys.stderr)
        return 3
    except TailkitError as exc:
        print(f"tailkit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
