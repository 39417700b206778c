from math import sqrt

import numpy as np
import pytest
import sympy as sp
from scipy.optimize import minimize_scalar

from hyperlagrange.battery import (
    BATTERY,
    LAMBDA_TARGET,
    UnknownProgram,
    claimed_bound,
    const,
    cubic_root_free,
    named_program,
    reduction_bridge,
    verify_battery,
)
from hyperlagrange.programs import ProgramConfig, solve_program
from hyperlagrange.solver import maximize

# closed forms obtained independently with sympy (roots of the derivative)
ARGMAX = {
    "fact_aaa": (3 - sqrt(3)) / 3,
    "perfect_case2": (43 - sqrt(1255)) / 66,
    "claim_n8": 53 / 303,
    "h2_e0": (2 * sqrt(57) - 4) / 53,
    "x3_delta0": 3 * (sqrt(15) - 1) / 14,
}
VALUE = {
    "fact_aaa": sqrt(3) / 18,
    "claim_n8": 0.094550159086315672271,
    "h2_e0": 0.093748865365052592646,
    "x3_delta0": 0.092078444370181768566,
    "perfect_case1": 0.11187436078950710183,
}


@pytest.fixture(scope="module")
def report():
    return verify_battery()


def test_battery_size():
    assert len(BATTERY) == 27


def test_every_program_passes(report):
    assert report.passed, report.table()
    assert report.failures() == []


@pytest.mark.parametrize("name", list(BATTERY))
def test_program_within_bound_and_oracle(report, name):
    r = next(r for r in report.results if r.name == name)
    assert r.value <= claimed_bound(name) + 1e-6
    assert abs(r.oracle_gap) <= 1e-5
    assert r.kkt_residual <= 1e-7


@pytest.mark.parametrize("name", list(ARGMAX))
def test_univariate_argmax(report, name):
    r = next(r for r in report.results if r.name == name)
    assert r.argmax[0] == pytest.approx(ARGMAX[name], abs=1e-8)


@pytest.mark.parametrize("name", list(VALUE))
def test_frozen_values(report, name):
    r = next(r for r in report.results if r.name == name)
    assert r.value == pytest.approx(VALUE[name], abs=1e-12)


def test_perfect_case1_against_scalar_search():
    P = named_program("perfect_case1")
    hi = float(P.ineq_rhs.max())
    res = minimize_scalar(lambda t: -float(P.value(np.array([t]))), bounds=(0, hi), method="bounded")
    assert -res.fun <= VALUE["perfect_case1"] + 1e-12
    assert solve_program(P).vertex


def test_argmax_recomputed_symbolically():
    x = sp.Symbol("x")
    f = sp.Rational(5, 12) * x * (1 - x) ** 2 + sp.Rational(2, 25) * (1 - x) ** 3
    roots = [r for r in sp.solve(sp.diff(f, x), x) if 0 <= r <= 1]
    assert sp.Rational(53, 303) in roots


def test_x2_final_and_y2_values(report):
    got = {r.name: r for r in report.results}
    assert got["x2_final"].value == pytest.approx(0.0960166, abs=1e-7)
    assert got["x2_final"].argmax[0] == pytest.approx(4 / 29, abs=1e-8)
    assert got["y2_eq6"].value == pytest.approx(got["y2_final"].value, abs=1e-9)


def test_y2_alpha_identity(report):
    # at the maximizer the weight on alpha equals d + e
    r = next(r for r in report.results if r.name == "y2_eq6")
    al, c, d, e, f = r.argmax
    assert al == pytest.approx(d + e, abs=1e-7)
    assert c == pytest.approx(const("c_min"), abs=1e-9)


def test_h2_identities_when_inactive(report):
    # c = 2d and d = b only bind where c, d are positive; here c = d = 0
    r = next(r for r in report.results if r.name == "h2")
    a, b, c, d, e = r.argmax
    if c > 1e-8 and d > 1e-8:
        assert c == pytest.approx(2 * d, abs=1e-6) and d == pytest.approx(b, abs=1e-6)
    else:
        assert r.value == pytest.approx(LAMBDA_TARGET, abs=1e-10)


def test_app_a4_shape():
    P = named_program("app_a4")
    assert P.k == 3 and P.variables == ["alpha", "gamma", "eta"]


def test_negative_control_lowered_bound():
    rep = verify_battery(names=["fact_aaa"], bound_overrides={"fact_aaa": LAMBDA_TARGET - 0.01})
    assert not rep.passed and rep.failures() == ["fact_aaa"]
    assert "FAIL" in rep.table()


def test_finer_oracle_agrees():
    for name in ("h1", "x3", "app_a4"):
        coarse = solve_program(named_program(name))
        fine = solve_program(named_program(name), ProgramConfig(oracle_mesh=80))
        assert abs(coarse.oracle_value - fine.oracle_value) <= 1e-5


def test_unknown_program():
    with pytest.raises(UnknownProgram):
        named_program("nonsense")
    with pytest.raises(UnknownProgram):
        reduction_bridge("nonsense")


def test_b2n_program_family():
    P = named_program("b2n:30")
    assert solve_program(P).value == pytest.approx(0.093713824132760329588, abs=1e-12)


@pytest.mark.parametrize("name, n", [("b2n", 10), ("h1", 9), ("h2", 9), ("x3", 10)])
def test_reduction_bridge_sandwich(name, n):
    G, P = reduction_bridge(name, n)
    lam = maximize(G).value
    assert lam <= solve_program(P).value + 1e-9


def test_cubic_root_free():
    out = cubic_root_free()
    assert out["root_free"]
    p = np.poly1d([2137, -882, 125, -6])
    assert p(0.05) < 0 and p(0.15) > 0
