"""Command-line entry point: roots, dnmap, evaluate, phase-diagram, oracle, compare.

Data goes to stdout (or --output); logs go to stderr as JSON lines.
Exit codes: 0 success, 1 numerical failure (or gate exceeded), 2 bad input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import sys
from typing import Any, Dict, Iterator, List, Optional, TextIO, Tuple

import yaml
from pydantic import ValidationError

from .config import settings
from .errors import INPUT_ERRORS, PreconditionViolation, WavemakerError
from .logging_utils import setup_logging
from .schemas.model_schemas import Equation, FourierBoundary
from .schemas.run_schemas import Axis, RunConfig, load_run_file, merge_config
from .services import asymptotics, sampling
from .services.dispersion import describe_roots
from .services.dnmap import describe, dn_coefficients
from .services.oracle import run as run_oracle

logger = logging.getLogger("wavemaker")


def _pair(text: str) -> Tuple[float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    return parts[0], parts[1]


def _coefficients(text: str) -> List[float]:
    values = [float(v) for v in text.split(",")]
    if len(values) != 5:
        raise argparse.ArgumentTypeError("expected five comma-separated coefficients A_-2,A_0,A_1,A_2,A_3")
    return values


def _axis(text: str) -> Axis:
    try:
        return Axis.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON run file; flags override its values")
    common.add_argument("--model", choices=("kdv", "bbm", "general"))
    common.add_argument("--coefficients", type=_coefficients, help="A_-2,A_0,A_1,A_2,A_3 for --model general")
    common.add_argument("--omega0", type=float)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", help="Write data here instead of stdout")
    common.add_argument("--threads", type=int, help=f"Worker threads (default HALFLINE_THREADS={settings.HALFLINE_THREADS})")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--nx", type=int, help="Oracle grid intervals on [0, x_max]")
    grid.add_argument("--x-max", type=float, dest="x_max")
    grid.add_argument("--integrator", choices=("radau", "exponential", "rk4"))
    grid.add_argument("--dt", type=float, help="Radau or RK4 time step")
    grid.add_argument("--sponge-width", type=float, dest="sponge_width")
    grid.add_argument("--no-richardson", action="store_true")

    parser = argparse.ArgumentParser(prog="halfline", description="Half-line wavemaker problems for linear KdV and BBM")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", parents=[common], help="Characteristic roots of one harmonic")
    p.add_argument("--n", type=int)

    p = sub.add_parser("dnmap", parents=[common], help="D-N map coefficients of the sinusoidal datum")
    p.add_argument("--t", type=_axis, help="Times for the boundary series, start:stop:num or a,b,c")
    p.add_argument("--j", type=int, default=1, help="Derivative order of the boundary series")

    p = sub.add_parser("evaluate", parents=[common, grid], help="Solution samples as CSV rows")
    p.add_argument(
        "--method",
        choices=("exact", "asym", "series", "oracle", "modulation", "all"),
        help="all: one row per method plus exact-minus-other difference rows only",
    )
    p.add_argument("--x", type=_axis)
    p.add_argument("--t", type=_axis)
    p.add_argument("--xi", type=_axis, help="Ray velocities; samples at x = xi * t")
    p.add_argument("--saddle-form", choices=("printed", "steepest_descent"), dest="saddle_form")

    p = sub.add_parser("phase-diagram", parents=[common], help="Region labels and boundary curves")
    p.add_argument("--omega0-range", type=_pair, dest="omega0_range")
    p.add_argument("--xi-range", type=_pair, dest="xi_range")
    p.add_argument("--resolution", type=int)

    p = sub.add_parser("oracle", parents=[common, grid], help="Finite-difference reference run")
    p.add_argument("--t-final", type=float, dest="t_final")
    p.add_argument("--snapshots", type=int, default=2, help="Output times including t = 0")

    p = sub.add_parser("compare", parents=[common, grid], help="Exact vs asymptotic vs oracle at one time")
    p.add_argument("--t", type=float, dest="t_final")
    p.add_argument("--x", type=_axis)
    p.add_argument("--saddle-form", choices=("printed", "steepest_descent"), dest="saddle_form")
    p.add_argument("--max-rel-error", type=float, dest="max_rel_error")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("command", "model", "coefficients", "omega0", "format", "output", "threads", "n", "method",
            "saddle_form", "omega0_range", "xi_range", "resolution", "t_final", "max_rel_error")
    out: Dict[str, Any] = {k: getattr(args, k, None) for k in keys}
    samples = {}
    for name in ("x", "t", "xi"):
        axis = getattr(args, name, None)
        if isinstance(axis, Axis):
            samples[name] = axis.model_dump(exclude_none=True)
    if samples:
        out["samples"] = samples
    oracle = {k: getattr(args, k, None) for k in ("nx", "x_max", "integrator", "dt", "sponge_width")}
    if getattr(args, "no_richardson", False):
        oracle["richardson"] = False
    if any(v is not None for v in oracle.values()):
        out["oracle"] = oracle
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    path = args.config or settings.HALFLINE_CONFIG
    file_values = load_run_file(path) if path else {}
    return merge_config(file_values, _overrides(args))


@contextlib.contextmanager
def _sink(path: Optional[str]) -> Iterator[TextIO]:
    if not path:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _need_omega0(cfg: RunConfig) -> float:
    if cfg.omega0 is None:
        raise PreconditionViolation("--omega0 is required")
    return cfg.omega0


def _need_equation(cfg: RunConfig) -> Equation:
    if cfg.equation is None:
        raise PreconditionViolation(f"{cfg.command} is available for kdv and bbm only")
    return cfg.equation


def _write_table(out: TextIO, header: List[str], rows: List[List[Any]]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([sampling.fmt(v) if isinstance(v, float) else v for v in row])


def _write_rows(cfg: RunConfig, rows: List[sampling.Row]) -> None:
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            json.dump([r.to_dict() for r in rows], out, indent=2)
            out.write("\n")
        else:
            sampling.write_csv(rows, out)


def cmd_roots(cfg: RunConfig) -> int:
    report = describe_roots(cfg.coeffs(), cfg.n, _need_omega0(cfg))
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            json.dump(report, out, indent=2)
            out.write("\n")
            return 0
        _write_table(
            out,
            ["index", "re", "im", "multiplicity", "location", "radiating", "group_velocity"],
            [[r["index"], r["re"], r["im"], r["multiplicity"], r["location"], r["radiating"], r["group_velocity"]]
             for r in report["roots"]],
        )
        out.write("\n")
        facts = [["harmonic", report["harmonic"]], ["omega0", report["omega0"]], ["k0_re", report["k0"][0]],
                 ["k0_im", report["k0"][1]], ["group_velocity_k0", report["group_velocity_k0"]]]
        crit = report["critical_frequencies"]
        if crit is not None:
            facts += [["omega_cr_minus", crit["omega_cr_minus"]], ["omega_cr_plus", crit["omega_cr_plus"]]]
        _write_table(out, ["quantity", "value"], facts)
    return 0


def cmd_dnmap(cfg: RunConfig, args: argparse.Namespace) -> int:
    omega0 = _need_omega0(cfg)
    result = dn_coefficients(cfg.coeffs(), FourierBoundary.sinusoid(omega0))
    times = cfg.samples.t.grid() if cfg.samples.t is not None else []
    report = describe(result, times, j=args.j)
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            json.dump(report, out, indent=2)
            out.write("\n")
            return 0
        rows = []
        for h in report["harmonics"]:
            c_n = h["c_n"] or ["", ""]
            rows.append([h["n"], *h["a_n"], *h["k0"], *h["b_n"], *c_n])
        _write_table(out, ["n", "a_re", "a_im", "k0_re", "k0_im", "b_re", "b_im", "c_re", "c_im"], rows)
        if report["series"]:
            out.write("\n")
            _write_table(out, ["t", "j", "re", "im"], [[s["t"], s["j"], s["re"], s["im"]] for s in report["series"]])
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    omega0 = _need_omega0(cfg)
    rows = sampling.evaluate(
        cfg,
        omega0,
        cfg.samples.points(),
        cfg.method,
        quadrature=cfg.quadrature,
        saddle_form=cfg.saddle_form,
        oracle_grid=cfg.oracle_grid(),
        threads=cfg.threads,
    )
    _write_rows(cfg, rows)
    failures = sum(1 for r in rows if not r.ok)
    logger.info({"event": "cli.evaluate", "rows": len(rows), "failures": failures})
    return 1 if rows and failures == len(rows) else 0


def cmd_phase_diagram(cfg: RunConfig) -> int:
    equation = _need_equation(cfg)
    w_range = cfg.omega0_range or ((0.05, 0.8) if equation is Equation.KDV else (0.05, 1.2))
    xi_range = cfg.xi_range or (0.0, 2.0)
    diagram = asymptotics.phase_diagram(equation, w_range, xi_range, cfg.resolution)
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            payload = {
                "model": equation.value,
                "labels": [{"omega0": w, "xi": xi, "label": label} for w, xi, label in diagram.rows()],
                "curves": {name: [list(p) for p in pts] for name, pts in diagram.curves.items()},
            }
            json.dump(payload, out, indent=2)
            out.write("\n")
            return 0
        rows = [["label", "", w, xi, label or ""] for w, xi, label in diagram.rows()]
        for name, pts in diagram.curves.items():
            rows.extend(["curve", name, w, xi, ""] for w, xi in pts)
        _write_table(out, ["kind", "curve", "omega0", "xi", "label"], rows)
    logger.info({"event": "cli.phase_diagram", "model": equation.value, "resolution": cfg.resolution})
    return 0


def cmd_oracle(cfg: RunConfig, args: argparse.Namespace) -> int:
    equation = _need_equation(cfg)
    omega0 = _need_omega0(cfg)
    if cfg.t_final is None:
        raise PreconditionViolation("--t-final is required")
    result = run_oracle(equation, omega0, cfg.oracle_grid(), cfg.t_final, n_out=max(2, args.snapshots))
    rows = [sampling.Row.from_sample(s) for t in result.times for s in result.samples(float(t))]
    _write_rows(cfg, rows)
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    """One comparison per ``cases`` entry (or the single model/omega0); fails if any case misses the gate."""
    if cfg.t_final is None or cfg.samples.x is None:
        raise PreconditionViolation("compare needs --t and --x")
    saddle_form = cfg.saddle_form if "saddle_form" in cfg.model_fields_set else "steepest_descent"
    rows: List[sampling.Row] = []
    code = 0
    for case in cfg.expand_cases():
        omega0 = _need_omega0(case)
        result = sampling.compare(
            case,
            omega0,
            case.t_final,
            case.samples.x.grid(),
            quadrature=case.quadrature,
            saddle_form=saddle_form,
            oracle_grid=case.oracle_grid(),
            threads=case.threads,
        )
        rows.extend(result.rows)
        if case.max_rel_error is not None and not result.max_rel_error <= case.max_rel_error:
            logger.warning(
                {"event": "cli.compare.gate", "model": case.model, "omega0": omega0,
                 "max_rel_error": result.max_rel_error, "limit": case.max_rel_error}
            )
            code = 1
    _write_rows(cfg, rows)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging(
        service_name="halfline",
        log_dir=settings.LOG_DIR,
        level=settings.LOG_LEVEL,
        retention_days=settings.LOG_RETENTION_DAYS,
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if cfg.command == "roots":
            code = cmd_roots(cfg)
        elif cfg.command == "dnmap":
            code = cmd_dnmap(cfg, args)
        elif cfg.command == "evaluate":
            code = cmd_evaluate(cfg)
        elif cfg.command == "phase-diagram":
            code = cmd_phase_diagram(cfg)
        elif cfg.command == "oracle":
            code = cmd_oracle(cfg, args)
        else:
            code = cmd_compare(cfg)
    except INPUT_ERRORS as exc:
        logger.error({"event": "cli.bad_input", "command": args.command, **exc.to_dict()})
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except WavemakerError as exc:
        logger.error({"event": "cli.failed", "command": args.command, **exc.to_dict()})
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError, OSError, yaml.YAMLError) as exc:
        logger.error({"event": "cli.bad_input", "command": args.command, "detail": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logger.info({"event": "cli.done", "command": args.command, "exit_code": code})
    return code


if __name__ == "__main__":
    sys.exit(main())
