import json
import math
import os
from pathlib import Path

import jsonschema
import pytest

import seqnet

SOURCE = Path(os.environ.get("SEQNET_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def load(name):
    return json.loads((SOURCE / "configs" / name).read_text())


def test_params_and_classification():
    p = seqnet.KineticParams(k_0Q=1.0, k_IL=2.0)
    assert p.k_RS == 1.0
    assert seqnet.sequestration_index(p, 2.0) == pytest.approx(0.75, abs=1e-15)
    assert seqnet.classify_regime(p, 2.0, 10.0) == seqnet.Regime.OptimalSequestration
    assert seqnet.classify_regime(p, 2.0, 10.0, regulated=False) == seqnet.Regime.UnderLoaded
    assert seqnet.classify_regime(p, 2.0, 0.75) == seqnet.Regime.Boundary
    with pytest.raises(KeyError):
        seqnet.KineticParams(k_XX=1.0)
    with pytest.raises(ValueError):
        seqnet.KineticParams(k_LR=0.0)


def test_fixed_point_and_stability():
    p = seqnet.KineticParams(k_0Q=1.0, k_IL=2.0)
    s, u = seqnet.fixed_point(seqnet.Regime.OptimalSequestration, p, 2.0, 10.0)
    assert (s, u) == pytest.approx((0.5, 0.75))
    rep = seqnet.stability_report(seqnet.Regime.OptimalSequestration, p, 2.0, 10.0)
    assert rep["stable"] and rep["p3_positive"]
    assert all(x < 0 for x in rep["eigen_real"])


def test_integrate_limit_linear_case():
    p = seqnet.KineticParams(k_0Q=2.0, k_IL=1.0)
    sol = seqnet.integrate_limit(seqnet.Regime.Stable, p, 2.0, 1.0, True, [0.0], 1.0, 1e-3)
    assert sol["labels"] == ["q"]
    assert sol["x"][-1][0] == pytest.approx(1.0 - math.exp(-1.0), abs=1e-9)
    assert sol["production"][-1] == pytest.approx(1.0)


def test_simulate_is_seeded_and_conserves():
    p = seqnet.KineticParams(k_0Q=2.0, k_IL=1.0)
    a = seqnet.simulate(p, 2.0, 1.0, 100, True, (0, 0, 0, 100, 0), 1.0, 7, points=11, events=True)
    b = seqnet.simulate(p, 2.0, 1.0, 100, True, (0, 0, 0, 100, 0), 1.0, 7, points=11)
    assert a["state"] == b["state"]
    assert len(a["time"]) == 11
    assert a["events"] == len(a["event_log"]) > 0
    for _, _, (s, r, l, q, u), _ in a["event_log"]:
        assert s + r + l <= 100 and min(s, r, l, q, u) >= 0 and u <= a["U0"]
    with pytest.raises(ValueError):
        seqnet.simulate(p, 2.0, 1.0, 100, True, (0, 0, 0, 100, 0), -1.0, 7)


def test_fast_laws_and_tv():
    fi = seqnet.fastinv_dist(1.0, 1.0, 1.0, 1.0)
    assert sum(fi.values()) == pytest.approx(1.0, abs=1e-12)
    assert fi[(0, 0, 0)] == pytest.approx(math.exp(-0.5) * math.exp(-1.0) * math.exp(-0.5) ** 2)
    p1, p2 = seqnet.mm_inf_invariant(1.0, 1.0), seqnet.mm_inf_invariant(2.0, 1.0)
    closed = 2 * math.exp(-1.0) - 3 * math.exp(-2.0)
    assert seqnet.tv_distance(p1, p2) == pytest.approx(closed, rel=1e-12)
    assert seqnet.tv_distance(p1, p1) == 0.0
    p = seqnet.KineticParams(k_0Q=1.0, k_IL=2.0)
    law = seqnet.regime_fast_dist(seqnet.Regime.OptimalSequestration, p, 2.0, 10.0, [0.5, 0.75])
    assert seqnet.regime_fast_labels(seqnet.Regime.OptimalSequestration) == ["r", "l", "q"]
    mean_q = sum(k[2] * v for k, v in law.items())
    assert mean_q == pytest.approx(4.0 / 3.0, rel=1e-9)


def test_shipped_configs_match_the_schema():
    schema = json.loads((SOURCE / "schemas" / "config.schema.json").read_text())
    for f in sorted((SOURCE / "configs").glob("*.json")):
        jsonschema.validate(json.loads(f.read_text()), schema)
    bad = load("stable.json")
    bad["replicas"] = 0
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, schema)


def test_run_experiment_small():
    cfg = load("stable.json")
    cfg.update({"N": [50, 100], "replicas": 3, "horizon": 1.0, "grid_points": 11, "windows": 2})
    rep = seqnet.run_experiment(cfg)
    assert rep["regime"] == "Stable"
    assert [r["N"] for r in rep["results"]] == [50, 100]
    assert all(len(r["slow_sup"]) == 3 for r in rep["results"])
    assert rep == seqnet.run_experiment(json.dumps(cfg))
    with pytest.raises(ValueError):
        seqnet.run_experiment({"k_RS": 1})


def test_cli_entry():
    code, out, _ = seqnet.run_cli(["classify", "--config", str(SOURCE / "configs" / "cond_example.json")])
    assert code == 0
    assert out.splitlines()[:2] == ["OptimalSequestration", "phi 0.75"]
    code, _, err = seqnet.run_cli(["classify", "--config", str(SOURCE / "no_such_file.json")])
    assert code == 1 and "error" in err
