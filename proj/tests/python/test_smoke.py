import math
import pathlib

import pytest

import canard_lab as cl

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def vdp():
    return cl.LienardSystem("x^2/2 + x^3/3", "x", -0.95, 2.0)


def P(x):
    return x * x / 2 + 2 * x**3 / 3 + x**4 / 4


def test_orders():
    sys = vdp()
    assert (sys.n, sys.m) == (2, 1)
    ok, text = sys.validate()
    assert ok and "PASS" in text


def test_sdi_matches_antiderivative():
    sdi = cl.SdiEvaluator(vdp())
    s = 0.05
    omega = (math.sqrt(1 + 6 * s) - 1) / 2  # first-order guess, refined below
    for _ in range(60):
        omega -= (omega**2 / 2 + omega**3 / 3 - s) / (omega + omega**2)
    assert sdi.minus(s) == pytest.approx(-P(omega), abs=1e-12)
    assert sdi.total(s) < 0


def test_buffer_point_and_relation():
    b = cl.buffer_point(vdp(), 0.1, 1 / 7)
    assert b == pytest.approx(0.0651, abs=5e-4)
    rel = cl.SlowRelation.two_section(vdp(), 0.1, 1 / 7, cl.Interval(0.05, 0.08))
    assert rel.transit_case == "funnel"
    assert rel.limit_map(0.07) == 1 / 7
    assert rel.inverse(rel.s0_map(0.06)) == pytest.approx(0.06, rel=1e-12)


def test_quartic_identity_and_orbits():
    q = cl.LienardSystem("x^4", "x^3", -1.0, 1.0)
    rel = cl.SlowRelation.single_section(q, 0.9)
    assert abs(rel(0.3) - 0.3) < 1e-12
    assert cl.invariant_measures(q, cl.Interval(1e-3, 0.9))["every_measure_invariant"]
    limit, steps, converged, monotone = cl.iterate_orbit(cl.SlowRelation.single_section(vdp(), 0.16), 0.05)
    assert converged and monotone and limit < 1e-8


def test_exit_measure_mass():
    rel = cl.SlowRelation.two_section(vdp(), 0.1, 1 / 7, cl.Interval(0.05, 0.08))
    m = cl.exit_measure(rel)
    assert m["mass"] == pytest.approx(1.0, abs=1e-8)
    assert len(m["atoms"]) == 1 and m["atoms"][0][0] == 1 / 7


def test_control_lambda():
    lam = cl.control_lambda(vdp(), 0.01, 1 / 20, 1 / 10)
    assert lam == pytest.approx(-231 / 20000, rel=0.05)


def test_errors():
    with pytest.raises(cl.ParseError):
        cl.LienardSystem("x^^2", "x", -1.0, 1.0)
    with pytest.raises(cl.ValidationError):
        cl.SdiEvaluator(cl.LienardSystem("x^3", "x", -1.0, 1.0))
    with pytest.raises(cl.RangeError):
        cl.SdiEvaluator(vdp()).minus(5.0)
    assert issubclass(cl.RangeError, cl.CanardError)


def test_cli(tmp_path):
    code, out, _ = cl.run_cli(["relation", "--config", str(CONFIGS / "quartic.cfg"), "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "relation.csv").read_text().splitlines()
    assert lines[0] == "s_minus,S0,tilde_S0"
    for line in lines[1:]:
        s, s0, _ = line.split(",")
        assert abs(float(s0) - float(s)) <= 1e-10
    assert cl.run_cli(["compare", "--config", str(CONFIGS / "vdp.cfg"), "--eps", "0.01"])[0] == 1
