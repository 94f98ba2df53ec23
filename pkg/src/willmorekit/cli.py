"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 invalid input or failed
conditions, 3 inequality violated.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import reporting
from .config import load_config
from .errors import (
    ConfigError,
    InequalityViolated,
    InputError,
    NumericalError,
    WillmoreKitError,
)
from .manifold import BUILTIN_NAMES, WarpedProduct, builtin
from .suite import run_property_suite
from .willmore import (
    AnalysisContext,
    prepare,
    slice_functional,
    slice_functional_derivative,
    slice_functional_root,
    slice_data,
    verify_inequality,
)

__all__ = ["main", "build_parser", "RunConfig", "EXIT_OK", "EXIT_NUMERICAL",
           "EXIT_INPUT", "EXIT_VIOLATION", "TOL_ENV"]

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2, 3
TOL_ENV = "WILLMOREKIT_REL_TOL"
TOL_RANGE = (1e-14, 1e-4)


@dataclass
class RunConfig:
    """Everything one invocation needs."""

    command: str
    manifold: str | None = None
    params: dict = field(default_factory=dict)
    config_path: str | None = None
    slice_r0: float = 0.0
    sweep: tuple[float, float, int] = (0.0, 5.0, 51)
    rel_tol: float = 1e-10
    output: str | None = None
    fmt: str = "json"
    seed: int = 0
    cases: int = 200
    inject_faulty: bool = False

    def __post_init__(self):
        if (self.manifold is None) == (self.config_path is None) and self.command != "check":
            raise ConfigError("give exactly one of --manifold or --config")
        lo, hi = TOL_RANGE
        if not lo <= self.rel_tol <= hi:
            raise ConfigError(f"tolerance {self.rel_tol:g} outside [{lo:g}, {hi:g}]")

    def load(self) -> WarpedProduct:
        if self.config_path is not None:
            return load_config(self.config_path)
        return builtin(self.manifold, **self.params)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="willmorekit",
        description="Check sharp Willmore-type inequalities on warped products.")
    sub = parser.add_subparsers(dest="command", required=True)

    def manifold_args(p):
        src = p.add_argument_group("manifold")
        src.add_argument("--manifold", choices=BUILTIN_NAMES)
        src.add_argument("--config", dest="config_path", metavar="PATH",
                         help="JSON manifold configuration")
        src.add_argument("--mass", type=float)
        src.add_argument("--charge", type=float)
        src.add_argument("--dim", type=int)
        src.add_argument("--slope", type=float)
        src.add_argument("--offset", type=float)
        src.add_argument("--kappa", type=float)

    def output_args(p, formats=("json", "csv", "human"), default="json"):
        p.add_argument("--format", dest="fmt", choices=formats, default=default)
        p.add_argument("--output", metavar="PATH", help="write here instead of stdout")
        p.add_argument("--rel-tol", type=float, default=None,
                       help=f"tolerance override (default from ${TOL_ENV} or 1e-10)")

    p = sub.add_parser("constants", help="decay constants, AVR and condition flags")
    manifold_args(p)
    output_args(p)

    p = sub.add_parser("verify", help="verify the inequality on one slice")
    manifold_args(p)
    output_args(p)
    p.add_argument("--slice", dest="slice_r0", type=float, default=0.0, metavar="R0")

    p = sub.add_parser("sweep", help="tabulate slices over an r0 range (CSV)")
    manifold_args(p)
    output_args(p, default="csv")
    p.add_argument("--r0-min", type=float, default=0.0)
    p.add_argument("--r0-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=51)

    p = sub.add_parser("check", help="run the seeded comparison property suite")
    output_args(p, formats=("human",), default="human")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--inject-faulty", action="store_true",
                   help="add an inadmissible manifold as a negative control")
    return parser


def _tolerance(arg: float | None) -> float:
    if arg is not None:
        return arg
    env = os.environ.get(TOL_ENV)
    if env is None:
        return 1e-10
    try:
        return float(env)
    except ValueError as exc:
        raise ConfigError(f"${TOL_ENV} is not a number: {env!r}") from exc


def _run_config(ns: argparse.Namespace) -> RunConfig:
    params = {k: getattr(ns, k, None) for k in ("mass", "charge", "dim", "slope", "offset", "kappa")}
    params = {k: v for k, v in params.items() if v is not None}
    kwargs = dict(command=ns.command, rel_tol=_tolerance(ns.rel_tol), output=ns.output, fmt=ns.fmt)
    if ns.command != "check":
        kwargs.update(manifold=ns.manifold, params=params, config_path=ns.config_path)
    if ns.command == "verify":
        kwargs["slice_r0"] = ns.slice_r0
    if ns.command == "sweep":
        if ns.steps < 1 or ns.r0_min < 0 or ns.r0_max < ns.r0_min:
            raise ConfigError("sweep needs steps >= 1 and 0 <= r0-min <= r0-max")
        kwargs["sweep"] = (ns.r0_min, ns.r0_max, ns.steps)
    if ns.command == "check":
        if ns.cases < 0:
            raise ConfigError("--cases must be nonnegative")
        kwargs.update(seed=ns.seed, cases=ns.cases, inject_faulty=ns.inject_faulty)
    return RunConfig(**kwargs)


def _context(cfg: RunConfig) -> AnalysisContext:
    return prepare(cfg.load(), abs_tol=cfg.rel_tol)


def _render(obj: dict, fmt: str) -> str:
    if fmt == "human":
        return reporting.human(obj)
    if fmt == "csv":
        flat = {k: v for k, v in obj.items() if not isinstance(v, dict)}
        for k, v in obj.items():
            if isinstance(v, dict):
                flat.update({f"{k}.{kk}": vv for kk, vv in v.items() if not isinstance(vv, dict)})
        return reporting.write_csv(list(flat), [list(flat.values())])
    return reporting.dumps(obj)


def cmd_constants(cfg: RunConfig) -> tuple[int, str]:
    ctx = _context(cfg)
    c = ctx.constants
    obj = {
        "manifold": ctx.W.describe(),
        "b0": c.b0,
        "b1": c.b1,
        "avr": ctx.avr.value,
        "errors": {"b0": c.b0_error, "b1": c.b1_error, "avr": ctx.avr.error_estimate},
        "avr_method": ctx.avr.method,
        "flags": ctx.flags.as_dict(),
    }
    return EXIT_OK, _render(obj, cfg.fmt)


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    ctx = _context(cfg)
    report = verify_inequality(ctx.W, cfg.slice_r0, ctx)
    code = EXIT_VIOLATION if report.violated else EXIT_OK
    return code, _render(report.as_dict(), cfg.fmt)


def _sweep_row(ctx: AnalysisContext, r0: float):
    try:
        W, c = ctx.W, ctx.constants
        slc = slice_data(W, r0)
        rep = verify_inequality(W, r0, ctx)
        return [r0, slc.area, slc.mean_curvature, slice_functional(W, c, r0), slice_functional_derivative(W, c, r0),
                rep.lhs, rep.rhs, rep.gap, rep.equality_class]
    except WillmoreKitError as exc:
        return [r0, None, None, None, None, None, None, None,
                f"error: {type(exc).__name__}: {exc}"]


def cmd_sweep(cfg: RunConfig) -> tuple[int, str]:
    ctx = _context(cfg)
    lo, hi, steps = cfg.sweep
    radii = [lo] if steps == 1 else [float(x) for x in np.linspace(lo, hi, steps)]
    with ThreadPoolExecutor(max_workers=min(8, len(radii))) as pool:
        rows = list(pool.map(lambda r: _sweep_row(ctx, r), radii))

    footer = []
    fp = [row[4] for row in rows]
    root = None
    for i in range(len(rows) - 1):
        a, b = fp[i], fp[i + 1]
        if a is not None and b is not None and (a > 0) != (b > 0):
            root = slice_functional_root(ctx.W, ctx.constants, radii[i], radii[i + 1])
            break
    if root is None:
        footer.append("F_prime_root none")
    else:
        s = float(ctx.W.warp.value(root))
        footer.append(f"F_prime_root r0={reporting.format_float(root)} "
                      f"h={reporting.format_float(s)}")
    if cfg.fmt == "csv":
        return EXIT_OK, reporting.write_csv(reporting.SWEEP_HEADER, rows, footer)
    obj = {"rows": [dict(zip(reporting.SWEEP_HEADER, r)) for r in rows],
           "F_prime_root": root}
    if cfg.fmt == "human":
        lines = [reporting.human(r) for r in obj["rows"]]
        return EXIT_OK, "\n".join(lines) + "\n".join(footer) + "\n"
    return EXIT_OK, reporting.dumps(obj)


def cmd_check(cfg: RunConfig) -> tuple[int, str]:
    result = run_property_suite(cfg.seed, cfg.cases, cfg.inject_faulty,
                                rel_tol=min(cfg.rel_tol, 1e-8))
    text = "\n".join(result.lines()) + "\n"
    if result.rejected:
        return EXIT_INPUT, text
    return (EXIT_OK if result.ok else EXIT_VIOLATION), text


COMMANDS = {"constants": cmd_constants, "verify": cmd_verify, "sweep": cmd_sweep,
            "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _run_config(ns)
        code, text = COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"willmorekit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InequalityViolated as exc:
        print(f"willmorekit: inequality violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except NumericalError as exc:
        print(f"willmorekit: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_VIOLATION:
        print("willmorekit: inequality violated beyond tolerance", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
