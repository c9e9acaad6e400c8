"""Experiment runners producing deterministic reports.

Each runner takes an :class:`~pwdyn.config.ExperimentConfig` and returns a
:class:`Report`.  Reports hold per-iteration series, verdicts and the names
of emitted artifact files; :meth:`Report.to_json` is byte-stable for a
given config.

Verdict strings never claim more than finite-depth evidence.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from .config import ExperimentConfig
from .errors import NotStabilized, NullAttractor, ValidationError
from .iet import (
    DEFAULT_CELL_BUDGET,
    Iet,
    birkhoff_averages,
    boundary_orbit,
    keane_check,
    neighborhood,
    nomadic_gap,
    transfer,
)
from .itm import Itm, attractor, box_count_dimension, image_iterates, reduce_to_fplus
from .pwi2d import (
    DEFAULT_CELL_BUDGET_2D,
    PwRotation,
    attractor2d,
    birkhoff2d,
    l1_distance2d,
    to_svg,
)
from .scalar import format_scalar, parse_scalar, to_float
from .stepfn import StepFn, l1_distance

__all__ = [
    "Report",
    "run_uniqueness_probe",
    "run_variation_growth",
    "run_attractor_study",
    "DEFAULT_TOLERANCE",
    "write_outputs",
]

# L1 collapse threshold for Birkhoff averages of quadratic-field rotations at n = 2000
DEFAULT_TOLERANCE = Fraction(1, 50)


def _num(x) -> dict:
    """Exact string plus float rendering of a scalar."""
    return {"exact": format_scalar(x), "float": to_float(x)}


@dataclass
class Report:
    experiment: str
    map_summary: dict
    series: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "map": self.map_summary,
            "series": self.series,
            "verdicts": self.verdicts,
            "extras": self.extras,
            "artifacts": self.artifacts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Series rows flattened; scalar columns appear as ``<name>`` and ``<name>_float``."""
        if not self.series:
            return ""
        rows = []
        for row in self.series:
            flat = {}
            for k, v in row.items():
                if isinstance(v, dict) and set(v) == {"exact", "float"}:
                    flat[k] = v["exact"]
                    flat[f"{k}_float"] = repr(v["float"])
                elif isinstance(v, (dict, list)):
                    flat[k] = json.dumps(v, sort_keys=True)
                else:
                    flat[k] = v
            rows.append(flat)
        cols = list(rows[0])
        for r in rows[1:]:
            cols.extend(c for c in r if c not in cols)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()


def _map_summary(f) -> dict:
    if isinstance(f, Iet):
        return {"kind": "iet", **f.to_json()}
    if isinstance(f, Itm):
        return {"kind": "itm", **f.to_json()}
    return {"kind": "pwrotation", **f.to_json()}


def _budget(cfg: ExperimentConfig, default: int) -> int:
    return cfg.cell_budget if cfg.cell_budget is not None else default


def run_uniqueness_probe(cfg: ExperimentConfig) -> Report:
    """Birkhoff averages from several seeds; do they collapse to one limit?"""
    f = cfg.map
    if len(cfg.seeds) < 2:
        raise ValidationError("uniqueness probe needs at least two seeds")
    tol = cfg.tolerance if cfg.tolerance is not None else DEFAULT_TOLERANCE
    report = Report("probe", _map_summary(f))
    if isinstance(f, Iet):
        budget = _budget(cfg, DEFAULT_CELL_BUDGET)
        gens = [birkhoff_averages(f, s, cfg.iterations, cell_budget=budget) for s in cfg.seeds]
        for snaps in zip(*gens):
            n = snaps[0][0]
            avgs = [a for _, a in snaps]
            report.series.append(_probe_row(n, avgs, l1_distance, lambda a: a.integrate()))
        points = cfg.points or [Fraction(0)]
        gaps = [nomadic_gap(f, x, cfg.nomadic_n) for x in points]
        report.extras["nomadic_gaps"] = [
            {"x": format_scalar(x), "n": cfg.nomadic_n, "gap": _num(g)} for x, g in zip(points, gaps)
        ]
        report.verdicts["max_nomadic_gap"] = _num(max(gaps))
        if cfg.keane_depth:
            k = keane_check(f, cfg.keane_depth)
            report.verdicts["keane"] = k.describe() if k.passed else f"fails: {k.describe()}"
    elif isinstance(f, PwRotation):
        if not f.is_invertible():
            raise ValidationError("uniqueness probe needs an invertible piecewise rotation")
        budget = _budget(cfg, DEFAULT_CELL_BUDGET_2D)
        for n in cfg.iterations:
            avgs = [birkhoff2d(f, s, n, cell_budget=budget) for s in cfg.seeds]
            report.series.append(_probe_row(n, avgs, l1_distance2d, lambda a: a.mass()))
    else:
        raise ValidationError("uniqueness probe needs an IET or an invertible piecewise rotation")
    last = report.series[-1]
    below = _exact(last["max_pairwise_l1"]) < tol
    report.verdicts["tolerance"] = _num(tol)
    report.verdicts["acip"] = (
        f"consistent with unique ACIP at n={last['n']}" if below
        else f"multiple candidate ACIPs at n={last['n']}"
    )
    return report


def _probe_row(n, avgs, dist, mass) -> dict:
    pairs = []
    worst = Fraction(0)
    for (i, a), (j, b) in combinations(enumerate(avgs), 2):
        d = dist(a, b)
        worst = d if d > worst else worst
        pairs.append({"i": i, "j": j, "l1": _num(d)})
    return {
        "n": n,
        "pairwise_l1": pairs,
        "max_pairwise_l1": _num(worst),
        "mass": [_num(mass(a)) for a in avgs],
    }


def _default_checkpoints(iterations: list) -> list:
    if len(iterations) > 1:
        return iterations
    n = iterations[0]
    if n <= 200:
        return list(range(1, n + 1))
    pts = set(range(1, 101))
    k = 100
    while k < n:
        pts.add(k)
        k = int(k * 1.25) + 1
    pts.add(n)
    return sorted(pts)


def run_variation_growth(cfg: ExperimentConfig) -> Report:
    """Variation of Birkhoff averages against ``n``, plus the one-step contraction check.

    When ``delta`` is set the seed is first made to vanish on the
    ``delta``-neighbourhood of the depth-1 boundary orbit.  For every iterate
    ``L^i phi`` that vanishes there, ``var(L^{i+1} phi) <= var(L^i phi)`` is
    checked exactly and violations are counted.
    """
    f = cfg.map
    if not isinstance(f, Iet):
        raise ValidationError("variation growth needs an IET")
    if not cfg.seeds or not isinstance(cfg.seeds[0], StepFn):
        raise ValidationError("variation growth needs a 1-D seed density")
    seed = cfg.seeds[0]
    report = Report("vargrowth", _map_summary(f))
    region = None
    if cfg.delta is not None:
        region = neighborhood(boundary_orbit(f, 1), cfg.delta)
        seed = seed.vanish_on(region)
        report.extras["neighborhood"] = region.to_json()
    report.extras["seed"] = seed.to_json()
    checkpoints = _default_checkpoints(cfg.iterations)
    budget = _budget(cfg, DEFAULT_CELL_BUDGET)
    for n, avg in birkhoff_averages(f, seed, checkpoints, cell_budget=budget):
        report.series.append({"n": n, "variation": _num(avg.variation()), "cells": len(avg),
                              "mass": _num(avg.integrate())})
    variations = [r["variation"] for r in report.series]
    exact = [_exact(v) for v in variations]
    report.verdicts["max_variation"] = _num(max(exact))
    report.verdicts["seed_variation"] = _num(seed.variation())
    report.verdicts["variation_nonincreasing"] = all(b <= a for a, b in zip(exact, exact[1:]))
    if region is not None:
        applicable = violations = 0
        psi = seed
        for _ in range(checkpoints[-1]):
            nxt = transfer(f, psi)
            if psi.vanish_on(region) == psi:
                applicable += 1
                if nxt.variation() > psi.variation():
                    violations += 1
            psi = nxt
        report.verdicts["contraction_checks"] = applicable
        report.verdicts["contraction_violations"] = violations
    return report


def _exact(num: dict):
    return parse_scalar(num["exact"])


def run_attractor_study(cfg: ExperimentConfig) -> Report:
    """Nested images of an ITM or piecewise rotation, with the induced IET when it exists."""
    f = cfg.map
    if isinstance(f, Iet):
        f = Itm.from_iet(f)
    report = Report("attractor-study", _map_summary(f))
    depth = max(cfg.depth, 1)
    if isinstance(f, Itm):
        res = attractor(f, depth)
        for k, s in enumerate(image_iterates(f)):
            report.series.append({"depth": k, "measure": _num(s.length()), "components": len(s)})
            if k >= res.depth:
                break
        report.verdicts["stabilized"] = res.stabilized
        report.verdicts["depth"] = res.depth
        report.verdicts["measure"] = _num(res.measure)
        report.extras["attractor"] = res.set.to_json()
        if res.stabilized:
            report.verdicts["summary"] = f"images stabilize at depth {res.depth}"
        else:
            report.verdicts["summary"] = f"no stabilization up to depth {res.depth}"
        try:
            kwargs = {} if cfg.null_tolerance is None else {"null_tolerance": cfg.null_tolerance}
            g = reduce_to_fplus(f, depth, **kwargs)
            report.extras["fplus"] = g.to_json()
            report.verdicts["fplus"] = "induced map on the attractor passes IET validation"
        except NullAttractor as exc:
            report.verdicts["fplus"] = f"null attractor: {exc}"
        except NotStabilized as exc:
            report.verdicts["fplus"] = f"not available: {exc}"
        if cfg.box_exponents and not res.stabilized:
            report.verdicts["box_dimension"] = box_count_dimension(res.set, cfg.box_exponents)
    elif isinstance(f, PwRotation):
        res = attractor2d(f, depth, budget=_budget(cfg, DEFAULT_CELL_BUDGET_2D))
        for k, a in enumerate(res.areas):
            report.series.append({"depth": k, "measure": _num(a)})
        report.verdicts["stabilized"] = res.stabilized
        report.verdicts["depth"] = res.depth
        report.verdicts["measure"] = _num(res.measure)
        report.verdicts["summary"] = (f"area constant from depth {res.depth}" if res.stabilized
                                      else f"area still changing at depth {res.depth}")
        report.extras["attractor"] = [p.to_json() for p in res.polys]
        report.extras["_svg"] = to_svg([(p, 1) for p in res.polys], f.ambient)
    else:
        raise ValidationError("attractor study needs an ITM, IET or piecewise rotation")
    return report


def write_outputs(report: Report, out_dir: str | Path, formats, *, stem: str = "report") -> Report:
    """Write the requested formats into ``out_dir`` and record the file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    svg = report.extras.pop("_svg", None)
    names = []
    if "csv" in formats:
        (out / f"{stem}.csv").write_text(report.to_csv(), encoding="utf-8")
        names.append(f"{stem}.csv")
    if "svg" in formats and svg is not None:
        (out / f"{stem}.svg").write_text(svg, encoding="utf-8")
        names.append(f"{stem}.svg")
    if "json" in formats:
        names.append(f"{stem}.json")
    report.artifacts = sorted(names)
    if "json" in formats:
        (out / f"{stem}.json").write_text(report.to_json(), encoding="utf-8")
    return report
