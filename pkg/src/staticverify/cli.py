"""Command-line front end.

    staticverify verify hemisphere sds:0.1 --path analytic
    staticverify scan-sds --steps 64 --format csv
    staticverify yamabe cylinder --nodes 256
    staticverify ineq --samples 100000 --seed 7
    staticverify ode profile --c 2 --x0 0.5
    staticverify ode singular --lambda 2 --alpha0 1
    staticverify report --out report.json

Exit codes: 0 all checks pass, 1 some check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .report import ConfigError, RunConfig, load_config, run
from .triples import MassRangeError


def _tolerance(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected CHECK=VALUE")
    name, value = text.split("=", 1)
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration file")
    common.add_argument("--format", choices=("json", "csv", "text"), help="report format (default json)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="CHECK=VALUE",
                        help="override the tolerance of one check; repeatable")
    common.add_argument("--timing", action="store_true", default=None,
                        help="record wall time (makes the report non-reproducible)")

    p = argparse.ArgumentParser(prog="staticverify", description="Verification engine for static 3-manifolds")
    p.add_argument("--version", action="version", version=f"staticverify {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="identity suite and Einstein lift checks")
    v.add_argument("triples", nargs="*", help="hemisphere, cylinder, sds:<m>, warped:<file>")
    v.add_argument("--path", choices=("analytic", "fd"))
    v.add_argument("--samples", type=int)

    s = sub.add_parser("scan-sds", parents=[common], help="ratio scan over the SdS family")
    s.add_argument("--m-min", type=float, dest="m_min")
    s.add_argument("--m-max", type=float, dest="m_max")
    s.add_argument("--steps", type=int)
    s.add_argument("--log", action="store_true", default=None)

    y = sub.add_parser("yamabe", parents=[common], help="modified Yamabe quotient minimization")
    y.add_argument("triples", nargs="*")
    y.add_argument("--nodes", type=int)

    i = sub.add_parser("ineq", parents=[common], help="pointwise inequalities on random samples")
    i.add_argument("--samples", type=int, dest="ineq_samples")
    i.add_argument("--sup-search", action="store_true", default=None, dest="sup_search")

    o = sub.add_parser("ode", help="profile and model singular ODEs")
    osub = o.add_subparsers(dest="ode_mode", required=True)
    op = osub.add_parser("profile", parents=[common])
    op.add_argument("--c", type=float)
    op.add_argument("--x0", type=float)
    op.add_argument("--umax", type=float)
    os_ = osub.add_parser("singular", parents=[common])
    os_.add_argument("--lambda", type=float, dest="lam")
    os_.add_argument("--alpha0", type=float)
    os_.add_argument("--smax", type=float)
    os_.add_argument("--forcing", type=float, help="constant right-hand side F")
    osub.add_parser("suite", parents=[common])

    sub.add_parser("report", parents=[common], help="full default suite")
    return p


SUITE_OF = {"verify": "verify", "scan-sds": "scan", "yamabe": "yamabe", "ineq": "ineq", "ode": "ode", "report": "report"}
CLI_KEYS = ("format", "out", "seed", "timing", "path", "samples", "m_min", "m_max", "steps", "log", "nodes",
            "ineq_samples", "sup_search", "ode_mode", "c", "x0", "umax", "lam", "alpha0", "smax", "forcing")


def config_from_args(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    values["suite"] = SUITE_OF[args.command]
    for key in CLI_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    if getattr(args, "triples", None):
        values["triples"] = list(args.triples)
    elif args.command == "yamabe" and "triples" not in values:
        values["triples"] = ["cylinder", "sds:0.1"]
    for name, val in args.tol:
        values[f"tol.{name}"] = val
    return RunConfig.from_mapping(values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
    except (ConfigError, MassRangeError) as exc:
        print(f"staticverify: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"staticverify: error: {exc}", file=sys.stderr)
        return 2
    text = report.render(config.format)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
