"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line (visible
even under output capture) and then asserts the same condition."""

import time
from math import comb, sqrt

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from hyperlagrange import hypergraph as hg
from hyperlagrange.battery import named_program, verify_battery
from hyperlagrange.certify import certify_upper_bound
from hyperlagrange.programs import solve_program
from hyperlagrange.search import contains_subgraph, enumerate_free, is_free
from hyperlagrange.solver import SolverConfig, evaluate, gradient, grid_oracle, maximize
from hyperlagrange.verification import suite_colex, suite_motzkin_straus

TARGET = sqrt(3) / 18
K4E = hg.k4_plus_edge()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, seconds, limit):
        ok = bool(ok and seconds < limit)
        with capsys.disabled():
            print(f"\nCRITERION {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f}s, limit {limit:g}s]")
        return ok

    return emit


def test_criterion_01_complete_graphs(report):
    worst_err, worst_time = 0.0, 0.0
    for t in range(4, 10):
        start = time.perf_counter()
        value = maximize(hg.complete(t, 3)).value
        worst_time = max(worst_time, time.perf_counter() - start)
        worst_err = max(worst_err, abs(value - comb(t, 3) / t**3))
    named = [maximize(hg.complete(t, 3)).value for t in (5, 6, 9)]
    named_ok = all(abs(v - w) <= 1e-8 for v, w in zip(named, (2 / 25, 5 / 54, 28 / 243)))
    ok = report(1, worst_err <= 1e-8 and named_ok, f"max |lambda(K_t) - C(t,3)/t^3| = {worst_err:.1e}", worst_time, 1)
    assert ok


def test_criterion_02_motzkin_straus(report):
    res = suite_motzkin_straus(count=200)
    worst = res.payload["max_discrepancy"]
    ok = report(2, res.passed and worst <= 1e-7, f"200 random 2-graphs, max discrepancy {worst:.1e}", res.seconds, 30)
    assert ok


def test_criterion_03_colex(report):
    res = suite_colex(t_max=7)
    ok = report(3, res.passed, f"{len(res.checks)} values of t, all m in range", res.seconds, 30)
    assert ok


def test_criterion_04_b2_lower_bound(report):
    start = time.perf_counter()
    values = [maximize(hg.b2(n)).value for n in range(7, 31)]
    seconds = time.perf_counter() - start
    mono = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    below = max(values) < TARGET + 1e-9
    reach = values[-1] >= 0.0937 - 1e-4
    ok = report(4, mono and below and reach, f"nondecreasing={mono}, max={max(values):.10f}, n=30 value {values[-1]:.10f}", seconds, 60)
    assert ok


def test_criterion_05_h1_h2(report):
    start = time.perf_counter()
    h1, h2 = hg.h1(9), hg.h2(9)
    v1, v2 = maximize(h1).value, maximize(h2).value
    c1 = certify_upper_bound(h1, TARGET, 1e-3)
    c2 = certify_upper_bound(h2, TARGET, 1e-3)
    seconds = time.perf_counter() - start
    ok = v1 < TARGET and v2 <= TARGET + 1e-7 and c1.success and c2.success
    detail = f"H1(9)={v1:.10f} cert<={c1.bound:.6f}, H2(9)={v2:.10f} cert<={c2.bound:.6f}"
    assert report(5, ok, detail, seconds, 300)


def test_criterion_06_battery(report):
    rep = verify_battery()
    got = {r.name: r for r in rep.results}
    spots = {
        "fact_aaa": (3 - sqrt(3)) / 3,
        "perfect_case2": (43 - sqrt(1255)) / 66,
        "claim_n8": 53 / 303,
    }
    spot_err = max(abs(got[k].argmax[0] - v) for k, v in spots.items())
    within = all(r.value <= r.claimed_bound + 1e-6 for r in rep.results)
    gap = max(abs(r.oracle_gap) for r in rep.results)
    ok = within and gap <= 1e-5 and spot_err <= 1e-6
    detail = f"{len(rep.results)} programs, max oracle gap {gap:.1e}, argmax error {spot_err:.1e}"
    assert report(6, ok, detail, rep.seconds, 120)


def test_criterion_07_freeness(report):
    start = time.perf_counter()
    b2_ok = all(is_free(hg.b2(n), [K4E]) for n in range(4, 13))
    x4 = hg.disjoint_union(hg.x_family(4), hg.single_edge(3))
    x4_ok = contains_subgraph(x4, K4E) is not None
    k5_ok = contains_subgraph(hg.complete(5, 3), hg.complete_minus(5, 3)) is not None
    seconds = time.perf_counter() - start
    detail = f"B2 free for n<=12: {b2_ok}, X4+edge contains F: {x4_ok}, K5- in K5: {k5_ok}"
    assert report(7, b2_ok and x4_ok and k5_ok, detail, seconds, 10)


def test_criterion_08_exhaustive_small(report):
    start = time.perf_counter()
    best, count, arg = 0.0, 0, None
    for n in range(0, 7):
        for G in enumerate_free(n, [K4E]):
            count += 1
            value = maximize(G).value
            if value > best:
                best, arg = value, G
    seconds = time.perf_counter() - start
    detail = f"{count} classes on n<=6, max lambda {best:.10f} (n={arg.n}, m={arg.m}), margin {TARGET - best:.2e}"
    assert report(8, best < TARGET - 1e-4, detail, seconds, 1800)


def test_criterion_09_solver_properties(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    cfg = SolverConfig(restarts=32)
    fd_ok = kkt_ok = mono_ok = sandwich_ok = True
    for _ in range(50):
        n = int(rng.integers(3, 8))
        G = hg.random_hypergraph(n, 3, float(rng.uniform(0.2, 0.9)), rng)
        x = rng.dirichlet(np.ones(n))
        h = 1e-6
        fd = np.array([(evaluate(G, x + h * e) - evaluate(G, x - h * e)) / (2 * h) for e in np.eye(n)])
        fd_ok &= bool(np.allclose(gradient(G, x), fd, rtol=1e-5, atol=1e-9))
        res = maximize(G, cfg)
        kkt_ok &= res.kkt_residual <= 1e-8
        sub = hg.make_hypergraph(n, 3, [e for e in G.edges if rng.random() < 0.6])
        mono_ok &= maximize(sub, cfg).value <= res.value + 1e-9
        cert = certify_upper_bound(G, 1.0, 1e-3, cfg=cfg)
        mesh = 20 if n <= 5 else 12
        sandwich_ok &= grid_oracle(G, mesh) <= res.value + 1e-12 and res.value <= cert.bound + 1e-12
    seconds = time.perf_counter() - start
    ok = fd_ok and kkt_ok and mono_ok and sandwich_ok
    detail = f"50 graphs: gradient {fd_ok}, KKT {kkt_ok}, monotone {mono_ok}, sandwich {sandwich_ok}"
    assert report(9, ok, detail, seconds, 300)


def test_criterion_10_perfect_cases(report):
    start = time.perf_counter()
    bound = 28 / 243
    values = {}
    for name in ("perfect_case1", "perfect_case2"):
        P = named_program(name)
        hi = float(np.max(P.ineq_rhs))
        scalar = -minimize_scalar(lambda t: -float(P.value(np.array([t]))), bounds=(0, hi), method="bounded").fun
        values[name] = (solve_program(P).value, scalar)
    seconds = time.perf_counter() - start
    (a1, b1), (a2, b2) = values["perfect_case1"], values["perfect_case2"]
    ok = a1 <= bound and b1 <= bound and a2 < bound and b2 < bound
    detail = f"case1 {a1:.10f}/{b1:.10f}, case2 {a2:.10f}/{b2:.10f} vs 28/243 = {bound:.10f}"
    assert report(10, ok, detail, seconds, 1)
