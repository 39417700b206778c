"""Named verification suites used by ``hyperlagrange verify``.

Each suite returns a ``SuiteResult`` holding one line per check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import hypergraph as hg
from .battery import LAMBDA_TARGET, cubic_root_free, verify_battery
from .programs import ProgramConfig
from .solver import SolverConfig, maximize, motzkin_straus_check

SUITES = ("battery", "lagrangian", "motzkin-straus", "colex")


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    payload: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(label, bool(ok), detail))

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checks": [{"label": c.label, "ok": c.ok, "detail": c.detail} for c in self.checks],
            **self.payload,
        }

    def lines(self) -> list[str]:
        out = [f"{'PASS' if c.ok else 'FAIL'}  {c.label}" + (f"  ({c.detail})" if c.detail else "") for c in self.checks]
        out.append(f"suite {self.name}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks, {self.seconds:.1f}s)")
        return out


def suite_battery(cfg: SolverConfig | None = None, program_cfg: ProgramConfig | None = None) -> SuiteResult:
    res = SuiteResult("battery")
    start = time.perf_counter()
    report = verify_battery(program_cfg)
    for r in report.results:
        res.add(
            f"{r.name}: value {r.value:.12f} <= bound {r.claimed_bound:.12f}",
            r.satisfied and abs(r.oracle_gap) <= report.gap_tolerance,
            f"gap {r.oracle_gap:.1e}",
        )
    by_name = {r.name: r for r in report.results}
    spots = {
        "fact_aaa": (3 - math.sqrt(3)) / 3,
        "perfect_case2": (43 - math.sqrt(1255)) / 66,
        "claim_n8": 53 / 303,
    }
    for name, x in spots.items():
        got = float(by_name[name].argmax[0])
        res.add(f"{name} argmax {got:.9f} matches {x:.9f}", abs(got - x) <= 1e-6)
    roots = cubic_root_free()
    res.add("2137b^3 - 882b^2 + 125b - 6 has no root on (0,1/9] and [1/8,1/5]", roots["root_free"])
    res.payload["battery"] = report.to_json()
    res.seconds = time.perf_counter() - start
    return res


def suite_lagrangian(cfg: SolverConfig | None = None) -> SuiteResult:
    res = SuiteResult("lagrangian")
    start = time.perf_counter()
    cfg = cfg or SolverConfig()
    for t in range(4, 10):
        got = maximize(hg.complete(t, 3), cfg).value
        want = math.comb(t, 3) / t**3
        res.add(f"lambda(K_{t}^3) = {got:.15f}", abs(got - want) <= 1e-8, f"expected {want:.15f}")
    prev = 0.0
    mono = True
    for n in range(7, 31):
        v = maximize(hg.b2(n), cfg).value
        mono &= v >= prev - 1e-12
        prev = v
    res.add("lambda(B(2,n-2)) nondecreasing for n = 7..30", mono)
    res.add(f"lambda(B(2,28)) = {prev:.12f} in [0.0936, sqrt3/18)", 0.0937 - 1e-4 <= prev < LAMBDA_TARGET + 1e-9)
    h1 = maximize(hg.h1(9), cfg).value
    h2 = maximize(hg.h2(9), cfg).value
    res.add(f"lambda(H1(9)) = {h1:.12f} < sqrt3/18", h1 < LAMBDA_TARGET)
    res.add(f"lambda(H2(9)) = {h2:.12f} <= sqrt3/18", h2 <= LAMBDA_TARGET + 1e-7)
    res.seconds = time.perf_counter() - start
    return res


def suite_motzkin_straus(cfg: SolverConfig | None = None, count: int = 200, seed: int = 0) -> SuiteResult:
    res = SuiteResult("motzkin-straus")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 8))
        G = hg.random_hypergraph(n, 2, float(rng.uniform(0.2, 0.9)), rng)
        if G.m == 0:
            G = hg.make_hypergraph(n, 2, [(1, 2)])
        _, _, gap = motzkin_straus_check(G, cfg)
        worst = max(worst, gap)
    res.add(f"{count} random 2-graphs: max |lambda - (1 - 1/omega)/2| = {worst:.2e}", worst <= 1e-7)
    res.payload["max_discrepancy"] = worst
    res.seconds = time.perf_counter() - start
    return res


def suite_colex(cfg: SolverConfig | None = None, t_max: int = 7) -> SuiteResult:
    res = SuiteResult("colex")
    start = time.perf_counter()
    for t in range(4, t_max + 1):
        want = maximize(hg.complete(t - 1, 3), cfg).value
        lo = math.comb(t - 1, 3)
        worst = 0.0
        for m in range(lo, lo + math.comb(t - 2, 2) + 1):
            worst = max(worst, abs(maximize(hg.colex_first(3, m), cfg).value - want))
        res.add(
            f"t={t}: lambda(C_3,m) = lambda(K_{t - 1}^3) = {want:.12f} for m in [{lo}, {lo + math.comb(t - 2, 2)}]",
            worst <= 1e-8,
            f"max deviation {worst:.1e}",
        )
    res.seconds = time.perf_counter() - start
    return res


def run_suite(name: str, cfg: SolverConfig | None = None) -> list[SuiteResult]:
    runners = {
        "battery": suite_battery,
        "lagrangian": suite_lagrangian,
        "motzkin-straus": suite_motzkin_straus,
        "colex": suite_colex,
    }
    if name == "all":
        return [runners[s](cfg) for s in SUITES]
    if name not in runners:
        raise KeyError(f"unknown suite {name!r}; choose one of {', '.join(SUITES)} or all")
    return [runners[name](cfg)]
