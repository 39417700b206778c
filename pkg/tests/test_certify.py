import json
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperlagrange import hypergraph as hg
from hyperlagrange.certify import certify_upper_bound
from hyperlagrange.hypergraph import CapacityError
from hyperlagrange.solver import SolverConfig, grid_oracle, maximize

TARGET = sqrt(3) / 18


def test_k5_certified_at_its_value():
    res = certify_upper_bound(hg.complete(5, 3), 0.08, 1e-6)
    assert res.success and res.complete
    assert 0.08 <= res.bound <= 0.08 + 1e-6


def test_single_edge():
    res = certify_upper_bound(hg.single_edge(3), 1 / 27, 1e-9)
    assert res.success and res.bound >= 1 / 27


def test_k4_plus_edge_uses_components():
    res = certify_upper_bound(hg.k4_plus_edge(), 1 / 16, 1e-6)
    assert res.success and 1 / 16 <= res.bound <= 1 / 16 + 1e-6


def test_failure_when_target_too_low():
    res = certify_upper_bound(hg.complete(8, 3), 0.1, 1e-6)
    assert not res.success and res.complete
    assert res.bound >= 21 / 192


def test_h2_nine_below_target():
    res = certify_upper_bound(hg.h2(9), TARGET, 1e-3)
    assert res.success and res.bound < TARGET
    assert res.bound >= maximize(hg.h2(9)).value


def test_b2_nine_and_x2():
    for G in (hg.b2(9), hg.x_family(2)):
        res = certify_upper_bound(G, TARGET, 1e-4)
        lam = maximize(G).value
        assert res.success and lam <= res.bound <= lam + 1e-4


def test_capacity_error():
    with pytest.raises(CapacityError):
        certify_upper_bound(hg.complete(13, 3), 0.2)


def test_budget_exhaustion_gives_partial_result():
    G = hg.random_hypergraph(8, 3, 0.5, np.random.default_rng(3))
    res = certify_upper_bound(G, 0.0, 1e-12, max_boxes=20)
    assert not res.complete and not res.success
    assert res.bound >= maximize(G).value
    data = res.to_json()
    assert data["complete"] is False
    json.dumps(data)


def test_empty_graph():
    res = certify_upper_bound(hg.make_hypergraph(4, 3, []), 0.0)
    assert res.success and res.bound == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 6), st.floats(0.2, 0.9), st.integers(0, 2**32 - 1))
def test_sandwich(n, p, seed):
    G = hg.random_hypergraph(n, 3, p, np.random.default_rng(seed))
    res = certify_upper_bound(G, 1.0, 1e-3, cfg=SolverConfig(restarts=16))
    lam = maximize(G, SolverConfig(restarts=16)).value
    assert grid_oracle(G, 10) <= lam + 1e-12
    assert lam <= res.bound + 1e-12
    assert res.bound <= lam + 1e-3 + 1e-9
