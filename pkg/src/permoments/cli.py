"""Command-line interface: ``permoments {moment,reconstruct,verify,formulas}``.

Every output document carries the schema name, the tool version and the full
run configuration, so a result file is enough to re-run it. Exact values are
written as "p/q" strings in every format.

Exit codes: 0 success (all verdicts pass), 1 failure or error, 2 inconclusive
or over budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__, formulas
from .arith import NoConsistentModel, SurplusMismatch, format_rational
from .ensembles import (
    MeasureKind,
    MomentSpec,
    e1_moments,
    e_uniform_moments,
    eb_expectation_single,
    eb_product_exact,
    eb_product_exact_tiny,
    monte_carlo_moment,
    pick_e1_method,
)
from .errors import BudgetExceeded, HypothesisViolated, InfeasibleEnsemble, UnsupportedMeasure
from .verify import SLOPE_TOLERANCE, SUITES, NodePolicy, SuiteConfig, exit_status, reconstruct_q1_q2, run_suite

SCHEMA_VERSION = 1
E1_ROUTES = ("cycle-reduced", "conjugacy", "matching-union")
METHODS = ("exact", "naive", "tiny-enum", "mc") + E1_ROUTES


@dataclass
class RunConfig:
    command: str
    n: list[int] = field(default_factory=list)
    r: int | None = None
    m_lists: list[list[int]] = field(default_factory=list)
    measure: str | None = None
    method: str | None = None
    samples: int | None = None
    seed: int | None = None
    budget: int | None = None
    node_policy: dict | None = None
    target: str | None = None
    term: str | None = None
    suites: list[str] = field(default_factory=list)
    grid: list[int] | None = None
    mmax: int | None = None
    slope_tolerance: float | None = None
    output_format: str = "json"
    output_path: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = 1, **extra):
        super().__init__(message)
        self.kind = kind
        self.code = code
        self.extra = extra


# -- argument parsing ---------------------------------------------------------


def parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def parse_m_lists(text: str, pairwise: bool = False) -> list[list[int]]:
    """'5,3' -> [[5,3]]; '2-4,3' -> [[2,3],[3,3],[4,3]].

    Ranges expand to a Cartesian product. Lists equal up to order are kept
    once, in first-seen order (the moments and Q2 are symmetric).
    """
    axes = []
    for item in text.split(","):
        item = item.strip()
        if "-" in item:
            lo, hi = (int(x) for x in item.split("-", 1))
            axes.append(range(lo, hi + 1))
        else:
            axes.append([int(item)])
    out, seen = [], set()
    for combo in itertools.product(*axes):
        key = tuple(sorted(combo))
        if key in seen:
            continue
        seen.add(key)
        out.append(list(combo))
    if pairwise and any(len(ml) != 2 for ml in out):
        raise CliError("BadArgument", "--m must name exactly two sizes, e.g. 5,3")
    return out


def _default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--output", dest="output_path", help="write here instead of stdout "
                        "(relative paths are placed under $PERMOMENTS_OUTPUT_DIR when set)")
    common.add_argument("--budget", type=int, help="kernel-evaluation budget (default $PERMOMENTS_BUDGET or 2e6)")
    common.add_argument("--workers", type=int, default=None,
                        help="process pool size (default: available CPUs); never changes the output")

    p = argparse.ArgumentParser(prog="permoments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"permoments {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    mo = sub.add_parser("moment", parents=[common], help="expectation of a product of sub-permanents")
    mo.add_argument("--measure", choices=[k.value for k in MeasureKind], default="e1")
    mo.add_argument("--n", required=True, help="matrix size, or a comma list")
    mo.add_argument("--r", type=int, required=True)
    mo.add_argument("--m", required=True, help="sub-permanent sizes, e.g. 5,3 or 2-4,3")
    mo.add_argument("--method", choices=METHODS, default="exact")
    mo.add_argument("--samples", type=int, default=10000)
    mo.add_argument("--seed", type=int, default=0)

    re_ = sub.add_parser("reconstruct", parents=[common], help="exact Q1 or Q2 as a function of n")
    re_.add_argument("--r", type=int, required=True)
    re_.add_argument("--m", required=True, help="pair of sizes, e.g. 5,3 (ranges allowed)")
    re_.add_argument("--target", choices=("q1", "q2"), default="q2")
    re_.add_argument("--start", type=int, help="first interpolation node (default m1+m2+2)")
    re_.add_argument("--step", type=int, default=1)
    re_.add_argument("--holdout", type=int, default=2)

    ve = sub.add_parser("verify", parents=[common], help="run verification suites")
    ve.add_argument("suites", nargs="*", default=["all"], choices=SUITES, metavar="suite",
                    help=f"one or more of {', '.join(SUITES)}")
    ve.add_argument("--measure", choices=("e1", "eb"), default="e1", help="factorization suite measure")
    ve.add_argument("--r", type=int)
    ve.add_argument("--m", help="sizes for factorization/cancellation/limits/series, e.g. 2,2")
    ve.add_argument("--grid", help="n grid, e.g. 10,20,40")
    ve.add_argument("--mmax", type=int, help="largest m for the degree scan")
    ve.add_argument("--slope-tolerance", type=float, default=SLOPE_TOLERANCE)
    ve.add_argument("--seed", type=int, default=SuiteConfig.seed)
    ve.add_argument("--samples", type=int, default=SuiteConfig.mc_samples)
    ve.add_argument("--timings", action="store_true", help="include runtimes (breaks byte-identical output)")

    fo = sub.add_parser("formulas", parents=[common], help="closed-form terms and series")
    fo.add_argument("--term", required=True, choices=formulas.TERM_LABELS + ("series", "limits", "symmetry"))
    fo.add_argument("--n", default=None)
    fo.add_argument("--r", type=int, required=True)
    fo.add_argument("--m", required=True)
    fo.add_argument("--j", type=int, default=1, help="color index for the symmetry identity")
    return p


# -- commands -----------------------------------------------------------------


def _moment_rows(args, cfg: RunConfig) -> list[dict]:
    measure = MeasureKind(args.measure)
    rows = []
    for n in cfg.n:
        specs = [MomentSpec(n, args.r, tuple(ml)) for ml in cfg.m_lists]
        if args.method == "mc":
            for spec in specs:
                mean, err = monte_carlo_moment(measure, spec, args.samples, args.seed)
                rows.append({"n": n, "r": args.r, "m_list": list(spec.m_list), "method": "mc",
                             "mean": repr(mean), "stderr": repr(err)})
            continue
        values, method = _exact_values(measure, n, args.r, cfg.m_lists, args.method, cfg.budget, args.workers)
        for spec, v in zip(specs, values):
            rows.append({"n": n, "r": args.r, "m_list": list(spec.m_list), "method": method,
                         "value": format_rational(v)})
    return rows


def _exact_values(measure, n, r, m_lists, method, budget, workers):
    if measure is MeasureKind.E1:
        if method in ("exact", "tiny-enum"):
            method = "naive" if method == "tiny-enum" else pick_e1_method(r, max(map(len, m_lists)), n)
        return e1_moments(n, r, m_lists, method, budget, workers), method
    if measure is MeasureKind.E_UNIFORM:
        if method not in ("exact", "tiny-enum"):
            raise UnsupportedMeasure(f"method {method!r} is not available for the uniform ensemble")
        return e_uniform_moments(n, r, m_lists, budget=budget), "tiny-enum"
    # Bernoulli
    if method not in ("exact", "tiny-enum"):
        raise UnsupportedMeasure(f"method {method!r} is not available for E_B")
    out = []
    for ml in m_lists:
        if len(ml) == 1:
            out.append(eb_expectation_single(n, r, ml[0]))
        elif len(ml) == 2 and method == "tiny-enum":
            out.append(eb_product_exact_tiny(n, r, *ml, budget=budget))
        elif len(ml) == 2:
            out.append(eb_product_exact(n, r, *ml))
        else:
            raise UnsupportedMeasure("E_B moments are available for one or two factors")
    return out, "tiny-enum" if method == "tiny-enum" else "matching-union"


def cmd_moment(args, cfg: RunConfig) -> tuple[dict, int]:
    return {"rows": _moment_rows(args, cfg)}, 0


def cmd_reconstruct(args, cfg: RunConfig) -> tuple[dict, int]:
    policy = NodePolicy(args.start, args.step, args.holdout)
    rows = []
    for m1, m2 in cfg.m_lists:
        q1, q2 = reconstruct_q1_q2(args.r, m1, m2, policy, cfg.budget)
        res = q1 if args.target == "q1" else q2
        rows.append({"target": args.target, **res.to_json()})
    return {"rows": rows}, 0


def _verify_config(args, cfg: RunConfig) -> SuiteConfig:
    sc = SuiteConfig(suites=tuple(args.suites), slope_tolerance=args.slope_tolerance,
                     seed=args.seed, mc_samples=args.samples, budget=cfg.budget)
    ms = tuple(cfg.m_lists[0]) if cfg.m_lists else None
    grid = tuple(cfg.grid) if cfg.grid else None
    if args.r is not None or args.mmax is not None:
        r = args.r if args.r is not None else 2
        sc.degree_cases = ((r, args.mmax if args.mmax is not None else 6, None),)
    if args.r is not None or ms or grid:
        if ms is not None and len(ms) == 2:
            r = args.r if args.r is not None else 2
            sc.factorization_cases = ((args.measure, r, ms, grid or (16, 32, 64)),)
        if ms is not None:
            r = args.r if args.r is not None else 2
            sc.cancellation_cases = ((r, ms, grid or (10, 20, 40)),)
            sc.limit_cases = ((r, ms),)
            if len(ms) == 1:
                sc.series_cases = ((r, ms[0]),)
        elif grid is not None:
            sc.factorization_cases = tuple((m, r, ms_, grid) for m, r, ms_, _ in sc.factorization_cases)
            sc.cancellation_cases = tuple((r, ms_, grid) for r, ms_, _ in sc.cancellation_cases)
    return sc


def cmd_verify(args, cfg: RunConfig) -> tuple[dict, int]:
    reports = run_suite(_verify_config(args, cfg), workers=args.workers)
    status = exit_status(reports)
    summary = {v: sum(rep.verdict == v for rep in reports) for v in sorted({rep.verdict for rep in reports})}
    return {"summary": summary, "exit_status": status,
            "reports": [rep.to_json(timings=args.timings) for rep in reports]}, status


def cmd_formulas(args, cfg: RunConfig) -> tuple[dict, int]:
    rows = []
    ms = cfg.m_lists[0]
    if args.term == "series":
        for m in ms:
            sc = formulas.series_coeffs(args.r, m)
            rows.append({"term": "series", "spec": {"r": args.r, "m": m},
                         "value": {k: format_rational(v) for k, v in asdict(sc).items()}})
        return {"rows": rows}, 0
    if args.term == "limits":
        lim = formulas.first_order_limits(args.r, ms)
        rows.append({"term": "limits", "spec": {"r": args.r, "m_list": ms},
                     "value": {k: format_rational(v) for k, v in lim.items()}})
        return {"rows": rows}, 0
    if not cfg.n:
        raise CliError("BadArgument", f"--n is required for term {args.term}")
    for n in cfg.n:
        if args.term == "symmetry":
            for m in ms:
                v = formulas.symmetry_identity_residual(n, args.r, m, args.j)
                rows.append({"term": "symmetry", "spec": {"n": n, "r": args.r, "m": m, "j": args.j},
                             "value": format_rational(v)})
            continue
        spec = MomentSpec(n, args.r, tuple(ms))
        tv = formulas.evaluate_term(args.term, spec)
        rows.append({"term": tv.label, "spec": spec.to_json(), "value": format_rational(tv.value),
                     "applicable": tv.applicable})
    return {"rows": rows}, 0


COMMANDS = {"moment": cmd_moment, "reconstruct": cmd_reconstruct, "verify": cmd_verify, "formulas": cmd_formulas}


# -- output -------------------------------------------------------------------


def _flat(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for k2, v2 in _flat(v).items():
                out[f"{k}.{k2}"] = v2
        elif isinstance(v, list):
            out[k] = json.dumps(v, separators=(",", ":"))
        else:
            out[k] = v
    return out


def _rows_for_tabular(doc: dict) -> list[dict]:
    result = doc["result"]
    if "reports" in result:
        return [{"claim_id": rep["claim_id"], "verdict": rep["verdict"],
                 "inputs": json.dumps(rep["inputs"], separators=(",", ":"))} for rep in result["reports"]]
    if "rows" in result:
        return [_flat(r) for r in result["rows"]]
    return [_flat(result)]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = _rows_for_tabular(doc)
    fields = list(dict.fromkeys(k for row in rows for k in row))
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# permoments {doc['version']} {json.dumps(doc['config'], separators=(',', ':'))}\n")
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    widths = {f: max(len(f), *(len(str(row.get(f, ""))) for row in rows)) for f in fields}
    lines = [f"permoments {doc['version']}  {doc['config']['command']}"]
    lines.append("  ".join(f.ljust(widths[f]) for f in fields))
    lines.append("  ".join("-" * widths[f] for f in fields))
    for row in rows:
        lines.append("  ".join(str(row.get(f, "")).ljust(widths[f]) for f in fields))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _resolve_output(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get("PERMOMENTS_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def make_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command, output_format=args.output_format, output_path=args.output_path)
    cfg.budget = args.budget if args.budget is not None else None
    if args.budget is None and os.environ.get("PERMOMENTS_BUDGET"):
        cfg.budget = int(os.environ["PERMOMENTS_BUDGET"])
    for name in ("r", "measure", "method", "samples", "seed", "target", "term", "mmax"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "n", None):
        cfg.n = parse_int_list(args.n)
    if getattr(args, "m", None):
        cfg.m_lists = parse_m_lists(args.m, pairwise=args.command == "reconstruct")
    if args.command == "moment" and args.method != "mc":
        cfg.samples = None
        cfg.seed = None
    if args.command == "reconstruct":
        cfg.node_policy = {"start": args.start, "step": args.step, "holdout": args.holdout}
    if args.command == "verify":
        cfg.suites = list(args.suites)
        cfg.grid = parse_int_list(args.grid) if args.grid else None
        cfg.slope_tolerance = args.slope_tolerance
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = _default_workers()
    cfg = None
    try:
        cfg = make_config(args)
        result, code = COMMANDS[args.command](args, cfg)
    except CliError as exc:
        err = {"type": exc.kind, "message": str(exc), **exc.extra}
        code = exc.code
        result = None
    except BudgetExceeded as exc:
        err = {"type": "BudgetExceeded", "message": str(exc), "estimate": exc.estimate, "budget": exc.budget}
        code = 2
        result = None
    except SurplusMismatch as exc:
        err = {"type": "SurplusMismatch", "message": str(exc), "node": getattr(exc, "node", None)}
        code = 1
        result = None
    except (UnsupportedMeasure, InfeasibleEnsemble, HypothesisViolated, NoConsistentModel, ValueError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
        result = None
    doc = {
        "schema": f"permoments/{args.command}/v{SCHEMA_VERSION}",
        "version": __version__,
        "config": cfg.to_json() if cfg is not None else {"command": args.command},
    }
    if result is None:
        doc["error"] = err
        _emit(json.dumps(doc, indent=2) + "\n", _resolve_output(cfg.output_path) if cfg else None)
        return code
    doc["result"] = result
    fmt = cfg.output_format
    _emit(render(doc, fmt), _resolve_output(cfg.output_path))
    if args.command == "verify" and cfg.output_path is None and os.environ.get("PERMOMENTS_OUTPUT_DIR"):
        _emit(render(doc, "json"), _resolve_output("verify-report.json"))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
