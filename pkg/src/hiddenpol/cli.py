"""Command-line front end.

Every run writes a report (CSV or JSON) that embeds the fully resolved
configuration, so a report can be fed back through ``--config`` to
reproduce it.  Angles are degrees here and radians everywhere else.

Exit codes: 0 ok, 2 usage or configuration error, 3 quadrature budget
exceeded.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bell import (
    TSIRELSON,
    BellSettings,
    Scenario,
    chsh_from_correlations,
    classical_max,
    search_operator_max,
)
from .cascade import CascadeSpec, HvModel, InputLight, QmModel, hv_cascade, min_beta_sweep, qm_cascade
from .config import BEGIN_MARK, END_MARK, ConfigError, RunConfig, parse_config
from .eprmc import epr_curve
from .model import GeneralizedMalus, HvStep, IdealMalus, evaluate
from .numerics import QuadratureBudgetError

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3

COLUMNS = {
    "transmit": ("deviation_deg", "p"),
    "cascade": ("axes_deg", "model", "p"),
    "sweep": ("alpha_deg", "beta_star_deg", "p_min", "model"),
    "bell": ("scenario", "dim", "achieved_max", "restarts", "seed"),
    "epr": ("rel_angle_deg", "p_hat", "stderr", "p_quadrature", "n_pairs"),
}


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _round(x):
    return float(format(x, ".12g")) if isinstance(x, float) else x


def _deg(rad: float) -> float:
    return math.degrees(rad)


def _malus_law(cfg: RunConfig):
    return IdealMalus() if cfg.epsilon == 0 else GeneralizedMalus(cfg.epsilon)


def _models(cfg: RunConfig) -> list[str]:
    return ["qm", "hv"] if cfg.model == "both" else [cfg.model]


def run_transmit(cfg, threads):
    law = {"ideal": IdealMalus(), "malus": GeneralizedMalus(cfg.epsilon), "hv": HvStep(cfg.hv_params)}[cfg.law]
    return [(d, float(evaluate(law, math.radians(d)))) for d in cfg.grid()], []


def run_cascade(cfg, threads):
    axes = [math.radians(a) for a in cfg.axes]
    label = ";".join(fmt(float(a)) for a in cfg.axes)
    rows = []
    for model in _models(cfg):
        if model == "qm":
            spec = CascadeSpec.uniform(axes, _malus_law(cfg), InputLight.POLARIZED_FIRST_AXIS)
            rows.append((label, "QM", qm_cascade(spec)))
        else:
            spec = CascadeSpec.uniform(axes, HvStep(cfg.hv_params))
            rows.append((label, "HV", hv_cascade(spec, cfg.tol_quad)))
    return rows, []


def run_sweep(cfg, threads):
    alphas = [math.radians(a) for a in cfg.grid()]
    rows = []
    for model in _models(cfg):
        m = QmModel(cfg.epsilon) if model == "qm" else HvModel((HvStep(cfg.hv_params),) * 3, cfg.tol_quad)
        for r in min_beta_sweep(alphas, m, cfg.tol_min, threads):
            rows.append((_deg(r.alpha), _deg(r.beta_star), r.p_min, r.model))
    return rows, []


def run_bell(cfg, threads):
    scenarios = ["classical", "tensor", "free"] if cfg.scenario == "all" else [cfg.scenario]
    rows = []
    for name in scenarios:
        res = search_operator_max(Scenario(name), cfg.dim, cfg.restarts, cfg.seed)
        rows.append((name, cfg.dim, res.achieved_max, cfg.restarts, cfg.seed))
    settings = BellSettings.from_degrees(*cfg.settings)
    summary = [
        ("classical_max", classical_max()),
        ("chsh_qm_at_settings", chsh_from_correlations(settings)),
        ("tsirelson_bound", TSIRELSON),
        ("claimed_free_limit", 2.0 * math.sqrt(3.0)),
    ]
    return rows, summary


def run_epr(cfg, threads):
    law = HvStep(cfg.hv_params)
    points = epr_curve(
        [math.radians(a) for a in cfg.angles], cfg.n_pairs, law, law, cfg.seed, cfg.tol_quad, threads
    )
    rows = [(a, p.p_hat, p.stderr, p.p_quadrature, p.n_pairs) for a, p in zip(cfg.angles, points)]
    return rows, []


RUNNERS = {
    "transmit": run_transmit,
    "cascade": run_cascade,
    "sweep": run_sweep,
    "bell": run_bell,
    "epr": run_epr,
}


def render(command: str, cfg: RunConfig, rows, summary) -> str:
    columns = COLUMNS[command]
    if cfg.format == "json":
        doc = {
            "command": command,
            "version": __version__,
            "config": cfg.as_dict(),
            "columns": list(columns),
            "rows": [dict(zip(columns, map(_round, r))) for r in rows],
            "summary": {k: _round(v) for k, v in summary},
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# hiddenpol {__version__} {command}\n")
    buf.write(BEGIN_MARK + "\n")
    for key, value in cfg.items():
        buf.write(f"# {key} = {value}\n")
    buf.write(END_MARK + "\n")
    for key, value in summary:
        buf.write(f"# {key}: {fmt(value)}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _grid(text: str):
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    return start, stop, step


def _list(text: str):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="config file or previous report")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--hv-a", dest="hv_a", type=float)
    common.add_argument("--hv-e", dest="hv_e", type=float)
    common.add_argument("--hv-c", dest="hv_c", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol-quad", dest="tol_quad", type=float)
    common.add_argument("--tol-min", dest="tol_min", type=float)
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for grid points")

    parser = argparse.ArgumentParser(prog="hiddenpol", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", parents=[common], help="single response law over a deviation grid")
    p.add_argument("--law", choices=["ideal", "malus", "hv"])
    p.add_argument("--deviation", type=_grid, help="start:stop:step in degrees")

    p = sub.add_parser("cascade", parents=[common], help="transmission of one polarizer cascade")
    p.add_argument("--axes", type=_list, help="comma-separated axes in degrees, first 0")
    p.add_argument("--model", choices=["qm", "hv", "both"])

    p = sub.add_parser("sweep", parents=[common], help="minimum-transmission sweep over alpha")
    p.add_argument("--alpha", type=_grid, help="start:stop:step in degrees")
    p.add_argument("--model", choices=["qm", "hv", "both"])

    p = sub.add_parser("bell", parents=[common], help="Bell combination limits")
    p.add_argument("--scenario", choices=["classical", "tensor", "free", "all"])
    p.add_argument("--dim", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--settings", type=_list, help="alpha,alpha',beta,beta' in degrees")

    p = sub.add_parser("epr", parents=[common], help="Monte Carlo coincidence curve")
    p.add_argument("--angles", type=_list, help="relative analyzer angles in degrees")
    p.add_argument("--n", dest="n_pairs", type=int)
    return parser


_OVERRIDES = (
    "epsilon", "hv_a", "hv_e", "hv_c", "seed", "tol_quad", "tol_min", "format", "out",
    "law", "axes", "model", "scenario", "dim", "restarts", "settings", "angles", "n_pairs",
)


def resolve(args: argparse.Namespace) -> RunConfig:
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
    grid = getattr(args, "alpha", None) or getattr(args, "deviation", None)
    if grid is not None:
        overrides.update(grid_start=grid[0], grid_stop=grid[1], grid_step=grid[2])
    return parse_config(text, overrides)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("hiddenpol: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve(args)
        rows, summary = RUNNERS[args.command](cfg, args.threads)
    except ConfigError as exc:
        print(f"hiddenpol: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureBudgetError as exc:
        print(f"hiddenpol: numerical budget exceeded: {exc} (best estimate {exc.estimate})", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"hiddenpol: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = render(args.command, cfg, rows, summary)
    if cfg.out == "-":
        sys.stdout.write(report)
        return EXIT_OK
    try:
        Path(cfg.out).write_text(report, encoding="utf-8")
    except OSError as exc:
        print(f"hiddenpol: cannot write output {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
