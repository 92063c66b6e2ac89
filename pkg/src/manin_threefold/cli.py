"""Command-line front end.

Every run prints one JSON document (sorted keys, floats rounded to 15
significant digits, rationals as "num/den"), or CSV for point lists and trend
tables. Exit codes: 0 success, 1 usage, 2 cost cap, 3 internal error,
4 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .errors import CostCapExceeded, InvariantError

EXIT_OK, EXIT_USAGE, EXIT_COST_CAP, EXIT_INTERNAL, EXIT_CHECK_FAILED = 0, 1, 2, 3, 4
THREADS_ENV = "MANIN_THREADS"
SUITES = ("expsums", "localdata", "oscint", "geometry", "points")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default, which is our cost-cap code
        raise UsageError(message)


# --- serialisation -------------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f) or math.isinf(f):
            return str(f)
        return float(f"{f:.15g}")
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2) + "\n"


# --- configuration ---------------------------------------------------------------------


@dataclass
class RunConfig:
    subcommand: str
    options: dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None
    seed: int = 0
    thread_count: int = 1
    timing: bool = False


def read_config_file(path: str) -> list[str]:
    """key=value lines become --key value flags; 'true'/'false' toggle switches."""
    argv: list[str] = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            argv.append(flag)
        elif value.lower() != "false":
            argv += [flag, value]
    return argv


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _triple(text: str) -> tuple[int, int, int]:
    vals = _int_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated integers, got {text!r}")
    return tuple(vals)  # type: ignore[return-value]


def _positive_triple(text: str) -> tuple[int, int, int]:
    t = _triple(text)
    if min(t) < 1:
        raise argparse.ArgumentTypeError("entries must be positive")
    return t


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file of default flags")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help=f"default from ${THREADS_ENV}, else 1")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    p = _Parser(prog="manin-threefold", description="Point counts, local data and constants for the cubic threefold.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    c = sub.add_parser("count-points", parents=[common], help="N(B) by direct and/or torsor enumeration")
    c.add_argument("--height-bound", type=int, required=True)
    c.add_argument("--method", choices=("direct", "torsor", "both"), default="both")

    b = sub.add_parser("boxcount", parents=[common], help="exact box count against the main term")
    b.add_argument("--r", type=_positive_triple, required=True)
    b.add_argument("--X", type=_positive_triple, required=True)
    b.add_argument("--Y", type=_positive_triple, required=True)
    b.add_argument("--mellin-check", action="store_true")
    b.add_argument("--cost-cap", type=int, default=None)

    k = sub.add_parser("constant", parents=[common], help="the Euler product C, or the full constant breakdown")
    g = k.add_mutually_exclusive_group()
    g.add_argument("--prime-cutoff", type=int, default=None)
    g.add_argument("--full", action="store_true")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")

    t = sub.add_parser("trend", parents=[common], help="N(B) / (B (log B)^4) for a list of bounds")
    t.add_argument("--height-bounds", type=_int_list, required=True)
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    argv = list(argv)
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            config_path = argv[i + 1]
        elif arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
    if config_path is not None and argv:
        # file values go right after the subcommand so explicit flags override them
        argv = [argv[0], *read_config_file(config_path), *argv[1:]]
    ns = build_parser().parse_args(argv)
    threads = ns.threads
    if threads is None:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(env)
        except ValueError as exc:
            raise UsageError(f"${THREADS_ENV} must be an integer, got {env!r}") from exc
    if threads < 1:
        raise UsageError("thread count must be positive")
    skip = {"subcommand", "config", "output", "format", "seed", "threads", "timing"}
    options = {k: v for k, v in vars(ns).items() if k not in skip}
    return RunConfig(ns.subcommand, options, ns.format, ns.output, ns.seed, threads, ns.timing)


# --- subcommands ---------------------------------------------------------------------------


def _count_points(cfg: RunConfig) -> tuple[dict, str | None]:
    from .points import enumerate_direct, enumerate_torsor, points_to_csv

    B = cfg.options["height_bound"]
    if B < 1:
        raise UsageError("--height-bound must be positive")
    methods = ("direct", "torsor") if cfg.options["method"] == "both" else (cfg.options["method"],)
    keep = cfg.output_format == "csv"
    results = {}
    points = None
    for m in methods:
        fn = enumerate_direct if m == "direct" else enumerate_torsor
        res = fn(B, keep_points=keep, workers=cfg.thread_count)
        results[m] = {"count": res.count} | ({"raw_count": res.raw_count} if res.raw_count is not None else {})
        points = points or res.points
    payload: dict = {"height_bound": B, "counts": results}
    if len(methods) == 2:
        payload["agree"] = results["direct"]["count"] == results["torsor"]["count"]
    return payload, points_to_csv(points) if keep else None


def _boxcount(cfg: RunConfig) -> tuple[dict, None]:
    from .cmvalidate import DEFAULT_COST_CAP, box_report
    from .oscint import BoxSpec, mellin_crosscheck

    o = cfg.options
    box = BoxSpec(tuple(map(float, o["X"])), tuple(map(float, o["Y"])))
    rep = box_report(o["r"], box, cost_cap=o["cost_cap"] or DEFAULT_COST_CAP)
    payload = rep.to_dict()
    if o["mellin_check"]:
        m = mellin_crosscheck(o["r"], box)
        payload["mellin"] = {
            "mellin_value": m.mellin_value,
            "alpha_value": m.alpha_value,
            "rel_diff": m.rel_diff,
            "error_estimate": m.mellin_error_estimate,
        }
    return payload, None


def _constant(cfg: RunConfig) -> tuple[dict, None]:
    from .geometry import constant_assembly
    from .localdata import constant_C

    o = cfg.options
    P = o["prime_cutoff"] or 1000
    if P < 2:
        raise UsageError("--prime-cutoff must be at least 2")
    if o["full"]:
        br = constant_assembly(P)
        payload = {
            "alpha": br.alpha,
            "mu_inf_closed": br.mu_inf_closed,
            "mu_inf_quadrature": br.mu_inf_quadrature,
            "mu_p": [{"p": p, "value": v} for p, v in sorted(br.mu_p.items())],
            "C": br.C.value,
            "C_tail_bound": br.C.tail_bound,
            "prime_cutoff": P,
            "tau_H": br.tau_H,
            "theta_H": br.theta_H,
            "predicted_coeff": br.predicted_coeff,
            "reconciliation_delta": br.reconciliation_delta,
            "tail_bound": br.tail_bound,
            "reconciled": br.reconciled,
            "alpha_mu_residual": br.alpha_mu_residual,
            "counted_primes": br.counted_primes,
        }
        return payload, None
    c = constant_C(P)
    return {
        "C": c.value,
        "tail_bound": c.approx.tail_bound,
        "prime_cutoff": P,
        "factors": [{"p": p, "value": f} for p, f in c.factors],
    }, None


def _trend(cfg: RunConfig) -> tuple[dict, str | None]:
    from .geometry import ALPHA_MU_CLOSED
    from .localdata import constant_C
    from .points import enumerate_direct

    bounds = sorted(set(cfg.options["height_bounds"]))
    if not bounds or bounds[0] < 3:
        raise UsageError("--height-bounds must be integers >= 3")
    coeff = ALPHA_MU_CLOSED * constant_C(10**6, keep_factors=False).value
    res = enumerate_direct(bounds[-1], keep_points=True, workers=cfg.thread_count)
    counts = res.counts_upto(bounds)
    rows = [{"B": B, "N": counts[B], "ratio": counts[B] / (B * math.log(B) ** 4)} for B in bounds]
    payload = {"rows": rows, "predicted_coeff": coeff, "note": "no tolerance asserted; convergence is very slow"}
    csv_text = None
    if cfg.output_format == "csv":
        csv_text = "B,N,ratio\n" + "".join(f"{r['B']},{r['N']},{r['ratio']:.15g}\n" for r in rows)
    return payload, csv_text


def _verify(cfg: RunConfig) -> tuple[dict, None]:
    from .verify import run_suite

    names = SUITES if cfg.options["suite"] == "all" else (cfg.options["suite"],)
    suites = {n: run_suite(n, cfg.seed) for n in names}
    return {"suites": suites, "passed": all(s["passed"] for s in suites.values())}, None


HANDLERS: dict[str, Callable[[RunConfig], tuple[dict, str | None]]] = {
    "count-points": _count_points,
    "boxcount": _boxcount,
    "constant": _constant,
    "verify": _verify,
    "trend": _trend,
}


def run(cfg: RunConfig) -> tuple[dict, str | None]:
    """Execute a run and return (ReportDocument, optional CSV text)."""
    if cfg.output_format == "csv" and cfg.subcommand not in ("count-points", "trend"):
        raise UsageError("CSV output is only available for count-points and trend")
    start = time.perf_counter()
    payload, csv_text = HANDLERS[cfg.subcommand](cfg)
    doc = {
        "tool_version": __version__,
        "config": {"subcommand": cfg.subcommand, "seed": cfg.seed, **cfg.options},
        "results": payload,
    }
    if cfg.timing:
        doc["timing"] = {"wall_seconds": time.perf_counter() - start}
    return doc, csv_text


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        doc, csv_text = run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CostCapExceeded as exc:
        print(f"cost cap: {exc}", file=sys.stderr)
        return EXIT_COST_CAP
    except InvariantError as exc:
        # invalid inputs that passed argument parsing
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = csv_text if csv_text is not None else dumps(doc)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.subcommand == "verify" and not doc["results"]["passed"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK
