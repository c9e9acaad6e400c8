"""Command-line interface.

Every command reads a JSON config (``--config``) describing the map, seeds
and parameters; flags override the matching config fields.  Results go to
stdout, or to ``--out DIR`` as one file per requested ``--format``.

Exit codes: 0 on success, 1 on validation errors, 2 when a resource cap is hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import iet as iet_mod
from . import itm as itm_mod
from . import lab
from . import pwi2d
from .config import ExperimentConfig, load_config
from .errors import NoFinitePartition, NotStabilized, NullAttractor, ResourceCap, Stabilized, ValidationError
from .scalar import format_scalar, to_float
from .stepfn import StepFn

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2


class Output:
    """A command result in up to three renderings."""

    def __init__(self, payload: dict, csv_text: str | None = None, svg_text: str | None = None):
        self.payload = payload
        self.csv_text = csv_text
        self.svg_text = svg_text

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, sort_keys=True, indent=2) + "\n"
        text = self.csv_text if fmt == "csv" else self.svg_text
        if text is None:
            raise ValidationError(f"this command has no {fmt} output")
        return text


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _samples_csv(fn: StepFn, count: int) -> str:
    """Evenly spaced samples of a step function, exact and float."""
    rows = []
    for i in range(count):
        x = Fraction(i, count)
        v = fn(x)
        rows.append((format_scalar(x), repr(float(x)), format_scalar(v), repr(to_float(v))))
    return _csv(["x", "x_float", "value", "value_float"], rows)


def _series_csv(name: str, values) -> str:
    """Rows ``(n, exact, float)`` for a scalar series."""
    return _csv(["n", name, f"{name}_float"], [(k, format_scalar(v), repr(to_float(v))) for k, v in enumerate(values)])


def _need_seed(cfg: ExperimentConfig, kind):
    if not cfg.seeds or not isinstance(cfg.seeds[0], kind):
        raise ValidationError(f"config needs a seeds[0] entry of type {kind.__name__}")
    return cfg.seeds[0]


def _need_map(cfg: ExperimentConfig, kind):
    f = cfg.map
    if kind is itm_mod.Itm and isinstance(f, iet_mod.Iet):
        f = itm_mod.Itm.from_iet(f)
    if not isinstance(f, kind):
        raise ValidationError(f"this command needs a map of type {kind.__name__}")
    return f


def _steps(cfg) -> int:
    """Transfer steps: ``iterations`` when given, else a single step."""
    return cfg.iterations[-1] if "iterations" in cfg.raw else 1


def _budget(cfg, default):
    return cfg.cell_budget if cfg.cell_budget is not None else default


# --- iet ---------------------------------------------------------------------

def iet_eval(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    if not cfg.points:
        raise ValidationError("field points: need at least one point to evaluate")
    rows = [(p, iet_mod.evaluate(f, p)) for p in cfg.points]
    payload = {"points": [{"x": format_scalar(x), "f(x)": format_scalar(y)} for x, y in rows]}
    return Output(payload, _csv(["x", "f(x)", "x_float", "f(x)_float"],
                                [(format_scalar(x), format_scalar(y), repr(to_float(x)), repr(to_float(y)))
                                 for x, y in rows]))


def iet_compose(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    if not isinstance(cfg.second_map, iet_mod.Iet):
        raise ValidationError("field second_map: compose needs a second IET (the result is second_map after map)")
    return Output(iet_mod.compose(cfg.second_map, f).to_json())


def iet_transfer(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    phi = _need_seed(cfg, StepFn)
    for _ in range(_steps(cfg)):
        phi = iet_mod.transfer(f, phi)
    return Output(phi.to_json(), _samples_csv(phi, cfg.samples))


def iet_birkhoff(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    phi = _need_seed(cfg, StepFn)
    avg = iet_mod.birkhoff(f, phi, cfg.iterations[-1], cell_budget=_budget(cfg, iet_mod.DEFAULT_CELL_BUDGET))
    return Output(avg.to_json(), _samples_csv(avg, cfg.samples))


def iet_keane(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    res = iet_mod.keane_check(f, cfg.keane_depth or cfg.depth)
    return Output({"passed": res.passed, "depth": res.depth,
                   "witness": list(res.witness) if res.witness else None, "summary": res.describe()})


def iet_cycles(cfg):
    f = _need_map(cfg, iet_mod.Iet)
    part = iet_mod.invariant_cycles(f, cfg.depth, cfg.extra_cuts)
    if not isinstance(part, iet_mod.CyclePartition):
        return Output({"closed": False, "depth": part.depth, "cuts": part.points})
    payload = {
        "closed": True,
        "cuts": [format_scalar(c) for c in part.cuts],
        "permutation": list(part.permutation),
        "cycles": [list(c) for c in part.cycles],
        "invariant_sets": [s.to_json() for s in part.cycle_sets()],
    }
    if cfg.seeds:
        payload["projections"] = [iet_mod.project_invariant(f, s, cfg.depth, cfg.extra_cuts).to_json()
                                  for s in cfg.seeds]
    return Output(payload)


# --- itm ---------------------------------------------------------------------

def itm_attractor(cfg):
    T = _need_map(cfg, itm_mod.Itm)
    res = itm_mod.attractor(T, max(cfg.depth, 1))
    sets = []
    for k, s in enumerate(itm_mod.image_iterates(T)):
        sets.append(s)
        if k >= len(res.lengths) - 1:
            break
    payload = {"stabilized": res.stabilized, "depth": res.depth, "measure": format_scalar(res.measure),
               "attractor": res.set.to_json(), "lengths": [format_scalar(x) for x in res.lengths]}
    rows = [(k, format_scalar(s.length()), repr(to_float(s.length())), len(s)) for k, s in enumerate(sets)]
    return Output(payload, _csv(["n", "length", "length_float", "components"], rows))


def itm_reduce(cfg):
    T = _need_map(cfg, itm_mod.Itm)
    kwargs = {} if cfg.null_tolerance is None else {"null_tolerance": cfg.null_tolerance}
    return Output(itm_mod.reduce_to_fplus(T, max(cfg.depth, 1), **kwargs).to_json())


def itm_boxdim(cfg):
    T = _need_map(cfg, itm_mod.Itm)
    exps = cfg.box_exponents or list(range(2, 13))
    res = itm_mod.attractor(T, max(cfg.depth, 1))
    if res.stabilized:
        raise Stabilized(f"attractor stabilized at depth {res.depth}; it is a finite union of intervals")
    dim = itm_mod.box_count_dimension(res.set, exps)
    counts = [(k, itm_mod.box_count(res.set, k)) for k in sorted(set(exps))]
    return Output({"depth": res.depth, "dimension": dim, "counts": [list(c) for c in counts]},
                  _csv(["k", "boxes"], counts))


# --- pwi2d -------------------------------------------------------------------

def _density_svg(F, eta):
    return pwi2d.to_svg(eta.cells, F.ambient)


def pwi2d_transfer(cfg):
    F = _need_map(cfg, pwi2d.PwRotation)
    eta = _need_seed(cfg, pwi2d.PolyDensity)
    for _ in range(_steps(cfg)):
        eta = pwi2d.transfer2d(F, eta, cell_budget=_budget(cfg, pwi2d.DEFAULT_CELL_BUDGET_2D))
    return Output({"cells": eta.to_json(), "mass": format_scalar(eta.mass())}, svg_text=_density_svg(F, eta))


def pwi2d_birkhoff(cfg):
    F = _need_map(cfg, pwi2d.PwRotation)
    eta = _need_seed(cfg, pwi2d.PolyDensity)
    avg = pwi2d.birkhoff2d(F, eta, cfg.iterations[-1], cell_budget=_budget(cfg, pwi2d.DEFAULT_CELL_BUDGET_2D))
    return Output({"cells": avg.to_json(), "mass": format_scalar(avg.mass())}, svg_text=_density_svg(F, avg))


def pwi2d_attractor(cfg):
    F = _need_map(cfg, pwi2d.PwRotation)
    res = pwi2d.attractor2d(F, max(cfg.depth, 1), budget=_budget(cfg, pwi2d.DEFAULT_CELL_BUDGET_2D))
    payload = {"stabilized": res.stabilized, "depth": res.depth, "measure": format_scalar(res.measure),
               "areas": [format_scalar(a) for a in res.areas], "attractor": pwi2d.polyset_to_json(res.polys)}
    return Output(payload, _series_csv("area", res.areas), pwi2d.to_svg([(p, 1) for p in res.polys], F.ambient))


# --- lab ---------------------------------------------------------------------

def _lab(name, runner):
    def run(cfg):
        report = runner(cfg)
        svg = report.extras.pop("_svg", None)
        if cfg.out_dir is not None:
            report.artifacts = sorted(f"lab-{name}.{fmt}" for fmt in cfg.formats)
        return Output(report.to_dict(), report.to_csv(), svg)
    return run


COMMANDS = {
    "iet": {"eval": iet_eval, "compose": iet_compose, "transfer": iet_transfer, "birkhoff": iet_birkhoff,
            "keane": iet_keane, "cycles": iet_cycles},
    "itm": {"attractor": itm_attractor, "reduce": itm_reduce, "boxdim": itm_boxdim},
    "pwi2d": {"transfer": pwi2d_transfer, "birkhoff": pwi2d_birkhoff, "attractor": pwi2d_attractor},
    "lab": {"probe": _lab("probe", lab.run_uniqueness_probe),
            "vargrowth": _lab("vargrowth", lab.run_variation_growth),
            "attractor-study": _lab("attractor-study", lab.run_attractor_study)},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pwdyn", description="Exact piecewise isometry dynamics.")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, cmds in COMMANDS.items():
        gp = groups.add_parser(group, help=f"{group} commands")
        sub = gp.add_subparsers(dest="command", required=True)
        for name in cmds:
            p = sub.add_parser(name)
            p.add_argument("--config", required=True, help="JSON config file (see docs/config.md)")
            p.add_argument("--depth", type=int, help="depth for attractors, Keane checks and cycle closure")
            p.add_argument("--iters", type=int, help="iteration count n")
            p.add_argument("--cell-budget", type=int, help="abort with exit code 2 above this many cells")
            p.add_argument("--out", help="directory to write output files into")
            p.add_argument("--format", action="append", choices=["json", "csv", "svg"],
                           help="output format; repeat for several (default json)")
    return parser


def _apply_flags(cfg: ExperimentConfig, args) -> None:
    if args.depth is not None:
        if args.depth < 0:
            raise ValidationError("--depth must be >= 0")
        cfg.depth = args.depth
        cfg.keane_depth = args.depth
    if args.iters is not None:
        if args.iters < 1:
            raise ValidationError("--iters must be >= 1")
        cfg.iterations = [args.iters]
        cfg.raw = {**cfg.raw, "iterations": args.iters}
    if args.cell_budget is not None:
        if args.cell_budget < 1:
            raise ValidationError("--cell-budget must be >= 1")
        cfg.cell_budget = args.cell_budget
    if args.out is not None:
        cfg.out_dir = args.out
    if args.format:
        cfg.formats = list(dict.fromkeys(args.format))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stem = f"{args.group}-{args.command}"
    try:
        cfg = load_config(args.config)
        _apply_flags(cfg, args)
        result = COMMANDS[args.group][args.command](cfg)
        rendered = {fmt: result.render(fmt) for fmt in cfg.formats}
        if cfg.out_dir is None:
            for text in rendered.values():
                sys.stdout.write(text)
        else:
            out = Path(cfg.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            for fmt, text in rendered.items():
                (out / f"{stem}.{fmt}").write_text(text, encoding="utf-8")
    except ResourceCap as exc:
        print(f"error: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, NotStabilized, NullAttractor, Stabilized, NoFinitePartition, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
