"""Command-line front end.

Subcommands::

    element   one matrix element at one operating point, exponent kept visible
    measure   all derived correlation measures at one operating point
    sweep     2-D parameter grid -> CSV (config file drives the grid)
    figure    named preset -> data CSV + overlay CSVs + metadata + PNG
    validate  independent-route self-checks -> JSON report

Exit codes: 0 success, 1 validation failure, 2 usage/domain error,
3 numeric failure (tolerance blown or non-convergence).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import sys

from .elements import (
    MatrixElements,
    ProtocolParams,
    laa_closed,
    laa_numeric,
    laa_special,
    lab,
    m_element,
    m_pm,
)
from .figures import PRESET_IDS, run_figure
from .measures import CorrelationReport
from .precision import (
    DEFAULT_PRECISION,
    ConvergenceError,
    DomainError,
    NumericsError,
    PrecisionConfig,
)
from .scaling import ScaledComplex
from .sweeps import SweepSpec, csv_lines, run_grid
from .validation import SUITES, run_validation

_PARAM_FLAGS = ("delta_dim", "t_omega", "lbar", "dbar", "lambda_bar")
_DEFAULTS = {"delta_dim": 1.0, "t_omega": 10.0, "lbar": 10.0, "dbar": 0.0,
             "lambda_bar": 1e-3}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("operating point")
    g.add_argument("--delta-dim", type=float, default=None,
                   help="boundary operator dimension (default 1)")
    g.add_argument("--t-omega", type=float, default=None,
                   help="gap times switching width (default 10)")
    g.add_argument("--lbar", type=float, default=None,
                   help="detector separation in switching widths (default 10)")
    g.add_argument("--dbar", type=float, default=None,
                   help="switching delay in switching widths (default 0)")
    g.add_argument("--lambda-bar", type=float, default=None,
                   help="dimensionless coupling (default 1e-3)")
    shared.add_argument("--config", type=pathlib.Path, default=None,
                        help="JSON file with parameters / sweep grid")
    shared.add_argument("--out", type=pathlib.Path, default=None,
                        help="output file (sweep/validate) or directory (figure)")
    shared.add_argument("--threads", type=int, default=1,
                        help="worker processes for grids (default 1)")
    shared.add_argument("--precision-digits", type=int, default=None,
                        help="decimal digits for intermediate arithmetic")
    scale = shared.add_mutually_exclusive_group()
    scale.add_argument("--unscale", action="store_true",
                       help="divide out exp(-(t_omega)^2/2) in printed values "
                            "(the default)")
    scale.add_argument("--raw", action="store_true",
                       help="keep the physical scale; tiny values underflow "
                            "to 0 in CSV/float output")

    p = argparse.ArgumentParser(
        prog="cftharvest",
        description="Detector-pair correlations from conformal field theory "
                    "two-point functions.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("element", parents=[shared],
                        help="one matrix element at one operating point")
    pe.add_argument("name", choices=("laa", "lab", "m", "m_plus", "m_minus"))
    pe.add_argument("--route", default=None,
                    help="laa: closed|special|numeric; "
                         "lab: auto|contour|phase-split|both")

    sub.add_parser("measure", parents=[shared],
                   help="negativity, mutual information and the "
                        "communication split at one operating point")

    sub.add_parser("sweep", parents=[shared],
                   help="evaluate quantities on a 2-D grid, CSV to --out "
                        "or stdout (grid comes from --config)")

    pf = sub.add_parser("figure", parents=[shared],
                        help="compute a named figure preset")
    pf.add_argument("--preset", required=True, choices=PRESET_IDS)
    pf.add_argument("--resolution", type=int, default=None,
                    help="grid points per axis (preset default otherwise)")
    pf.add_argument("--no-render", action="store_true",
                    help="write data/metadata only, skip the PNG")

    pv = sub.add_parser("validate", parents=[shared],
                        help="run self-check suites, JSON report to --out "
                             "or stdout")
    pv.add_argument("--suite", default="all", choices=(*SUITES, "all"))
    return p


# ---------------------------------------------------------------------------
# shared argument plumbing
# ---------------------------------------------------------------------------


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    doc = json.loads(args.config.read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise DomainError("--config must hold a JSON object")
    return doc


def _params_from(args, config: dict) -> ProtocolParams:
    """Operating point: defaults < config file < explicit flags."""
    fixed = dict(_DEFAULTS)
    from_file = config.get("fixed", config)  # accept flat or nested configs
    fixed.update({k: float(v) for k, v in from_file.items() if k in _DEFAULTS})
    for key in _PARAM_FLAGS:
        val = getattr(args, key)
        if val is not None:
            fixed[key] = val
    return ProtocolParams(**fixed)


def _cfg_from(args) -> PrecisionConfig:
    if args.precision_digits is None:
        return DEFAULT_PRECISION
    return PrecisionConfig(working_digits=args.precision_digits)


def _scaling_from(args, config: dict) -> str:
    if args.raw:
        return "raw"
    if args.unscale:
        return "unscaled"
    return config.get("scaling", "unscaled")


def _emit_text(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")


def _value_lines(label: str, v: ScaledComplex, params: ProtocolParams,
                 scaling: str) -> list[str]:
    shift = 0.0 if scaling == "raw" else params.t_omega ** 2 / 2
    assembled = ScaledComplex(v.mantissa, v.log_scale + shift).to_complex()
    note = "" if scaling == "raw" else "  [exp(-(t_omega)^2/2) divided out]"
    return [
        f"{label}.mantissa  = {complex(v.mantissa)!r}",
        f"{label}.log_scale = {v.log_scale:.6f}  (value = mantissa * e^(log_scale))",
        f"{label}.value     = {assembled!r}{note}",
    ]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

_ELEMENT_ROUTES = {
    "laa": ("closed", "special", "numeric"),
    "lab": ("auto", "contour", "phase-split", "both"),
}
# tolerance at which the element's independent routes are held to agree
_ROUTE_TOL = {"laa": 1e-8, "lab": 1e-6, "m": 1e-6, "m_plus": 1e-6,
              "m_minus": 1e-6}


def cmd_element(args) -> int:
    config = _load_config(args)
    params = _params_from(args, config)
    cfg = _cfg_from(args)
    scaling = _scaling_from(args, config)
    name, route = args.name, args.route
    allowed = _ELEMENT_ROUTES.get(name, ())
    if route is not None and route not in allowed:
        raise DomainError(f"element {name!r} has no route {route!r}"
                          + (f"; choose from {allowed}" if allowed else ""))
    if name == "laa":
        route = route or "closed"
        fn = {"closed": laa_closed, "special": laa_special,
              "numeric": laa_numeric}[route]
        value = fn(params, cfg)
    elif name == "lab":
        route = route or "auto"
        value = lab(params, route, cfg)
    elif name == "m":
        route = "feynman-quadrature"
        value = m_element(params, cfg)
    else:
        route = "windowed-split"
        plus, minus = m_pm(params, cfg)
        value = plus if name == "m_plus" else minus
    lines = [
        f"element {name} at delta_dim={params.delta_dim:g} "
        f"t_omega={params.t_omega:g} lbar={params.lbar:g} dbar={params.dbar:g}",
        *_value_lines(name, value, params, scaling),
        f"{name}.route     = {route}",
        f"{name}.tolerance = {_ROUTE_TOL[name]:g}  (independent-route agreement)",
    ]
    _emit_text(args, "\n".join(lines) + "\n")
    return 0


def cmd_measure(args) -> int:
    config = _load_config(args)
    params = _params_from(args, config)
    cfg = _cfg_from(args)
    scaling = _scaling_from(args, config)
    report = CorrelationReport.compute(params, cfg=cfg)
    lines = [
        f"measures at delta_dim={params.delta_dim:g} t_omega={params.t_omega:g} "
        f"lbar={params.lbar:g} dbar={params.dbar:g} "
        f"lambda_bar={params.lambda_bar:g}",
        "per lambda_bar^2:",
    ]
    for label, v in (("negativity", report.negativity),
                     ("mutual_info", report.mutual_information),
                     ("n_plus", report.n_plus),
                     ("n_minus", report.n_minus)):
        lines.extend("  " + s for s in _value_lines(label, v, params, scaling))
    frac = report.comm_fraction
    lines.append("comm_fraction = "
                 + ("undefined (negativity is zero)" if frac is None
                    else f"{frac:.12g}"))
    _emit_text(args, "\n".join(lines) + "\n")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    if "axis1" not in config or "axis2" not in config:
        raise DomainError("sweep needs a --config JSON with axis1/axis2 blocks")
    spec = SweepSpec.from_json(json.dumps({
        "fixed": dataclasses.asdict(_params_from(args, config)),
        "axis1": config["axis1"],
        "axis2": config["axis2"],
        "quantities": config.get("quantities", ["negativity"]),
        "scaling": _scaling_from(args, config),
    }))
    cfg = _cfg_from(args)
    points, rows, warnings = run_grid(spec, args.threads, cfg)
    for msg in warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if warnings:
        print(f"warning: {len(warnings)} quantity evaluations failed "
              "(cells written as nan)", file=sys.stderr)
    text = "\n".join(csv_lines(spec, points, rows)) + "\n"
    _emit_text(args, text)
    all_nan = rows and all(all(c != c for c in row) for row in rows)
    return 3 if all_nan else 0


def cmd_figure(args) -> int:
    config = _load_config(args)
    out_dir = args.out if args.out is not None else pathlib.Path("figures")
    meta = run_figure(
        args.preset, out_dir,
        threads=args.threads,
        resolution=args.resolution,
        render=not args.no_render,
        cfg=_cfg_from(args),
        scaling=_scaling_from(args, config),
    )
    print(f"{args.preset}: {len(meta['data_files'])} data file(s), "
          f"{len(meta['overlay_files'])} overlay(s)"
          + (f", {meta['png']}" if meta["png"] else "")
          + f" in {out_dir} ({meta['runtime_s']}s, "
          f"{len(meta['warnings'])} warnings)", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    report = run_validation(args.suite, _cfg_from(args))
    _emit_text(args, json.dumps(report, indent=2) + "\n")
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "element": cmd_element,
        "measure": cmd_measure,
        "sweep": cmd_sweep,
        "figure": cmd_figure,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, ConvergenceError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
