import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from pwdyn.config import load_config, parse_config
from pwdyn.errors import ValidationError
from pwdyn.lab import (
    DEFAULT_TOLERANCE,
    run_attractor_study,
    run_uniqueness_probe,
    run_variation_growth,
    write_outputs,
)
from pwdyn.scalar import parse_scalar

CFG = Path(__file__).resolve().parent.parent / "configs"


def exact(num):
    return parse_scalar(num["exact"])


def test_default_tolerance():
    assert DEFAULT_TOLERANCE == F(1, 50)


def test_probe_golden_small():
    cfg = load_config(CFG / "golden_probe.json")
    cfg.iterations = [10, 100]
    cfg.keane_depth = 100
    report = run_uniqueness_probe(cfg)
    assert [r["n"] for r in report.series] == [10, 100]
    for row in report.series:
        assert all(exact(m) == 1 for m in row["mass"])
    assert report.verdicts["keane"] == "no breakpoint collision up to depth 100"
    l1 = [exact(r["max_pairwise_l1"]) for r in report.series]
    assert l1[1] < l1[0]
    assert report.verdicts["acip"] == "consistent with unique ACIP at n=100"


def test_probe_half_swap():
    report = run_uniqueness_probe(load_config(CFG / "halfswap_probe.json"))
    assert all(exact(r["max_pairwise_l1"]) == 1 for r in report.series)
    assert report.verdicts["acip"].startswith("multiple candidate ACIPs")
    assert exact(report.verdicts["max_nomadic_gap"]) >= F(1, 2)


def test_probe_quarter_turn():
    report = run_uniqueness_probe(load_config(CFG / "quarter_turn_probe.json"))
    assert [exact(r["max_pairwise_l1"]) for r in report.series] == [2, 1, 0, 0]
    assert report.verdicts["acip"] == "consistent with unique ACIP at n=8"


def test_probe_needs_two_seeds():
    cfg = parse_config({"map": {"type": "rotation", "gamma": "1/3"}, "seeds": [{"indicator": ["0", "1"]}]})
    with pytest.raises(ValidationError):
        run_uniqueness_probe(cfg)


def test_vargrowth():
    cfg = load_config(CFG / "golden_vargrowth.json")
    cfg.iterations = [60]
    report = run_variation_growth(cfg)
    assert report.verdicts["contraction_violations"] == 0
    assert report.verdicts["contraction_checks"] >= 1
    assert all(exact(r["mass"]) == exact(report.series[0]["mass"]) for r in report.series)
    seed = report.extras["seed"]
    assert seed["values"][0] == "0"  # the seed vanishes near the boundary orbit


def test_vargrowth_keynes_newton():
    cfg = load_config(CFG / "kn_vargrowth.json")
    cfg.iterations = [40]
    report = run_variation_growth(cfg)
    assert len(report.series) == 40
    # without the boundary neighbourhood the averages pick up variation
    assert exact(report.verdicts["max_variation"]) > exact(report.verdicts["seed_variation"])
    assert "contraction_violations" not in report.verdicts


def test_attractor_study_iet_input():
    cfg = parse_config({"map": {"type": "rotation", "gamma": "1/3"}})
    report = run_attractor_study(cfg)
    assert report.verdicts["stabilized"] and report.verdicts["depth"] == 0
    assert exact(report.verdicts["measure"]) == 1


def test_attractor_study_finite_type():
    report = run_attractor_study(load_config(CFG / "finite_itm.json"))
    assert report.verdicts["summary"] == "images stabilize at depth 2"
    assert report.verdicts["fplus"] == "induced map on the attractor passes IET validation"
    assert report.extras["fplus"]["breakpoints"] == ["0", "1/2", "3/4", "1"]


def test_attractor_study_null():
    cfg = load_config(CFG / "null_itm.json")
    cfg.depth = 40
    cfg.box_exponents = [2, 4, 6, 8]
    report = run_attractor_study(cfg)
    assert report.verdicts["summary"] == "no stabilization up to depth 40"
    assert report.verdicts["fplus"].startswith("not available")
    assert 0 < report.verdicts["box_dimension"] <= 1.0


def test_attractor_study_corner_rotation(tmp_path):
    report = run_attractor_study(load_config(CFG / "corner_rotation.json"))
    areas = [exact(r["measure"]) for r in report.series]
    assert all(b <= a for a, b in zip(areas, areas[1:]))
    assert all(b < a for a, b in zip(areas[:6], areas[1:6]))
    write_outputs(report, tmp_path, ["json", "svg", "csv"], stem="study")
    assert report.artifacts == ["study.csv", "study.json", "study.svg"]
    assert (tmp_path / "study.svg").read_text().startswith("<svg")
    data = json.loads((tmp_path / "study.json").read_text())
    assert "_svg" not in data["extras"]


def test_csv_columns():
    report = run_attractor_study(load_config(CFG / "finite_itm.json"))
    header = report.to_csv().splitlines()[0].split(",")
    assert header == ["depth", "measure", "measure_float", "components"]


@pytest.mark.parametrize("name, runner", [
    ("halfswap_probe.json", run_uniqueness_probe),
    ("quarter_turn_probe.json", run_uniqueness_probe),
    ("finite_itm.json", run_attractor_study),
    ("corner_rotation.json", run_attractor_study),
])
def test_reports_are_byte_stable(name, runner):
    a = runner(load_config(CFG / name)).to_json()
    b = runner(load_config(CFG / name)).to_json()
    assert a == b
