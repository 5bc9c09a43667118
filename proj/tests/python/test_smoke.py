import json
import math

import numpy as np
import pytest

import tiknest


def test_paper_quadratic_oracle():
    obj = tiknest.paper_quadratic(1.0, 5.0)
    assert obj.dimension == 2
    assert obj.lipschitz == pytest.approx(52.0)
    assert obj.value(np.array([5.0, -1.0])) == 0.0
    np.testing.assert_allclose(obj.oracle.x_star, [0.0, 0.0], atol=1e-15)


def test_schedule_values():
    obj = tiknest.paper_quadratic(1.0, 5.0)
    sched = tiknest.Schedule.polynomial(tiknest.PolyScheduleParams(), 0.9 / obj.lipschitz, obj.lipschitz)
    assert sched.eps_at(5) == pytest.approx(0.08944271909999159, rel=1e-15)
    assert sched.q_at(5) == pytest.approx(3.623898318388478, rel=1e-15)
    with pytest.raises(tiknest.IndexError):
        sched.eps_at(0)


def test_run_and_rate_report():
    obj = tiknest.paper_quadratic(1.0, 5.0)
    sched = tiknest.Schedule.polynomial(tiknest.PolyScheduleParams(), 0.9 / obj.lipschitz, obj.lipschitz)
    trace = tiknest.run(obj, sched, np.array([1.0, -1.0]), np.array([-1.0, 1.0]), 2000)
    assert trace.iterations == 2000
    assert trace.records[-1].k == 2000
    assert all(math.isfinite(r.f_x) for r in trace.records)
    report = tiknest.rate_report(trace, sched, obj)
    assert {v.name for v in report.verdicts} >= {"min_norm", "energy_o_q2eps"}
    assert tiknest.write_trace_csv(trace).splitlines()[0] == (
        "k,f_x,f_y,grad_norm_x,grad_norm_y,velocity,dist_xstar,eps_k,b_k,c_k"
    )


def test_cmd_run_and_exit_codes(tmp_path):
    cfg = {
        "problem": {"type": "paper_quadratic", "a": 0.1, "b": 100},
        "schedule": {"a": 1, "q": 0.8, "c": 1, "p": 1.5},
        "s": 0.1,
        "x0": [1, -1],
        "x1": [-1, 1],
        "max_iter": 20,
        "outputs": {"csv_path": str(tmp_path / "t.csv"), "report_path": str(tmp_path / "r.txt")},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, _, err = tiknest.cmd_run(str(path), quiet=True)
    assert code == 0
    assert "step size exceeds 1/L" in err
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 21
    code, _, _ = tiknest.cmd_run(str(tmp_path / "missing.json"))
    assert code == 3


def test_cmd_reproduce_unknown_figure(tmp_path):
    code, _, err = tiknest.cmd_reproduce("fig9", str(tmp_path))
    assert code == 3
    assert "unknown figure" in err
