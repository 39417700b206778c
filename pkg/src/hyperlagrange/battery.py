"""The battery of reduced polynomial programs and their claimed bounds.

Every program is transcribed as a sympy expression over a handful of
grouped weights.  ``CONSTANTS`` holds the decimal thresholds that appear in
the derivations, each with a short note on where it enters.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import hypergraph as hg
from .hypergraph import Hypergraph
from .programs import PolyProgram, ProgramConfig, ProgramResult, solve_program

R = sp.Rational
SQRT3_18 = sp.sqrt(3) / 18
LAMBDA_TARGET = float(SQRT3_18)

CONSTANTS: dict[str, tuple[sp.Expr, str]] = {
    "sqrt3_18": (SQRT3_18, "target Lagrangian, max of x^2(1-x)/4 + x(1-x)^2/2"),
    "k9": (R(28, 243), "Lagrangian of the complete 3-graph on 9 vertices"),
    "f_7_25": (R(108, 1250), "a(1-a)^2/2 + (1-a)^3/27 at a = 7/25, equal to 0.0864"),
    "gamma_min": (R("0.22354"), "lower bound on the weight c+d of the two non-pair K4 vertices"),
    "d_split": (R("0.11177"), "half of gamma_min, splits the two appendix cases"),
    "x_v_min": (R("0.0848"), "lower weight of a vertex whose removal kills every K4"),
    "beta_min": (R("0.307"), "lower bound on b+c when d < 0.11177"),
    "tau4": (R("0.0789"), "cubic coefficient bounding the A4 part"),
    "tau3": (R("0.092"), "cubic coefficient bounding the A4 and A3 parts"),
    "c_min": (R("0.08"), "lower bound on c in the two-copy-sharing-a-triple program"),
    "alpha_min": (R(2, 9), "lower bound on alpha in the final two-copy program"),
    "pi_k4": (R("0.5615"), "flag algebra upper bound on the Turan density of K4"),
    "k4_slack": (R("0.00264"), "minimum weight of each K4 edge in the appendix"),
}


def const(name: str) -> sp.Expr:
    return CONSTANTS[name][0]


def _simplex(vs) -> list:
    return [sp.Eq(sum(vs), 1)] + [v >= 0 for v in vs]


# ---------------------------------------------------------------------------
# program builders; each returns (objective, variables, constraints, denominator)

def _fact_aaa():
    x = sp.Symbol("x")
    return x**2 * (1 - x) / 4 + x * (1 - x) ** 2 / 2, [x], [x >= 0, x <= 1], None


def _b2n(n: int):
    a, b = sp.symbols("a b")
    obj = a**2 * b / 4 + a * b**2 * R(n - 3, 2 * (n - 2))
    return obj, [a, b], _simplex([a, b]), None


def _h1_obj():
    a, b, c, d, e = sp.symbols("a b c d e")
    obj = (
        a * b * (c + d + e)
        + a * (c**2 / 4 + d**2 / 4 + e**2 / 2 + c * d + c * e + d * e)
        + b * (c**2 / 4 + d**2 / 4 + c * d + c * e + d * e)
        + c**2 * d / 4
    )
    return obj, [a, b, c, d, e]


def _h1():
    obj, vs = _h1_obj()
    return obj, vs, _simplex(vs), None


def _h1_b0():
    obj, vs = _h1_obj()
    return obj, vs, _simplex(vs) + [sp.Eq(vs[1], 0)], None


def _h2():
    a, b, c, d, e = vs = sp.symbols("a b c d e")
    obj = (
        a * b * (c + d + e)
        + a * (c**2 / 2 + d**2 / 2 + e**2 / 2 + c * d + c * e + d * e)
        + b * (c**2 / 4 + e**2 / 2 + c * d + c * e + d * e)
        + c**2 * d / 4
    )
    return obj, list(vs), _simplex(vs), None


def _h2_e0():
    d = sp.Symbol("d")
    return (-53 * d**3 - 12 * d**2 + 12 * d) / 16, [d], [d >= 0, d <= R(2, 7)], None


def _perfect_case1():
    x = sp.Symbol("x")
    hi = 1 - 2 * sp.sqrt(14) / 9
    return SQRT3_18 * (1 - x) ** 3, [x], [x >= 0, x <= hi], 1 - 3 * x


def _perfect_case2():
    a = sp.Symbol("a")
    obj = (1 - 2 * a) ** 3 / 10 + a**2 * (1 - 2 * a) + R(6, 7) * a * (1 - 2 * a) ** 2
    return obj, [a], [a >= 0, a <= R(1, 2)], None


def _claim_n8():
    x = sp.Symbol("x")
    return R(5, 12) * x * (1 - x) ** 2 + R(2, 25) * (1 - x) ** 3, [x], [x >= 0, x <= 1], None


def _x3():
    a, b, c, t = vs = sp.symbols("a b c delta")
    obj = a * b * (c + t) + (a + b) * (R(5, 12) * c**2 + c * t + t**2 / 2) + c**3 / 27
    return obj, list(vs), _simplex(vs), None


def _x3_delta0():
    c = sp.Symbol("c")
    obj = (1 - c) ** 2 * c / 4 + R(5, 12) * (1 - c) * c**2 + c**3 / 27
    return obj, [c], [c >= 0, c <= 1], None


def _x2_obj():
    a, b, c, d, e = vs = sp.symbols("a b c d e")
    obj = (
        a * b * d
        + a * (c * d + c * e + d * e + d**2 / 2 + e**2 / 2)
        + b * (c * d + c * e + d * e + e**2 / 2)
        + R(2, 25) * (a + b + c) ** 3
        + (d + e) * c**2 / 4
    )
    return obj, list(vs)


def _x2(face: str | None):
    obj, vs = _x2_obj()
    cons = _simplex(vs)
    if face:
        cons.append(sp.Eq(vs["abcde".index(face)], 0))
    return obj, vs, cons, None


def _x2_final():
    b, c = sp.symbols("b c")
    obj = (
        16 * b**3 - R(3, 2) * b * c**2 - 9 * b**2 + R(3, 2) * b
        + (3 * b + c) ** 3 / 12 + (1 - 3 * b - c) * c**2 / 4
    )
    return obj, [b, c], [b >= 0, c >= 0, 5 * b + c <= 1], None


def _y2(face: str | None):
    al, c, d, e, f = vs = sp.symbols("alpha c d e f")
    obj = (
        al**2 * (c + d + e + f) / 4
        + al * c * (d + e)
        + al * (d * e + e**2 / 2)
        + (al + c) * (d * f + e * f + f**2 / 2)
        + d**2 * (al + e + f) / 4
    )
    cons = _simplex(vs) + [c >= const("c_min")]
    if face:
        cons.append(sp.Eq({"alpha": al, "d": d, "e": e, "f": f}[face], 0))
    return obj, list(vs), cons, None


def _y2_final():
    al, c = sp.symbols("alpha c")
    obj = (
        -R(5, 108) * al**3 + R(14, 9) * al**2 * c - R(11, 36) * al**2 + R(23, 18) * al * c**2
        - R(14, 9) * al * c + R(5, 18) * al + R(25, 54) * c**3 - R(8, 9) * c**2 + R(7, 18) * c + R(1, 27)
    )
    cons = [2 * al + c <= 1, al >= const("alpha_min"), c >= const("c_min")]
    return obj, [al, c], cons, None


def _app_a4():
    al, g, eta = vs = sp.symbols("alpha gamma eta")
    obj = al**2 * g / 4 + al * g**2 / 4 + al * eta**2 / 2 + eta * (al + g) ** 2 / 4
    cons = _simplex(vs) + [g >= const("gamma_min"), al >= g]
    return obj, list(vs), cons, None


def _app_a3_case1():
    al, eta, rho = vs = sp.symbols("alpha eta rho")
    fixed = const("d_split") + const("gamma_min")  # delta + beta
    obj = (
        const("tau4") * (al + fixed + eta) ** 3
        + fixed * al * rho
        + (eta * rho + rho**2 / 2) * (al + const("gamma_min"))
    )
    cons = [sp.Eq(al + eta + rho, 1 - fixed), al >= 0, eta >= 0, rho >= 0]
    return obj, list(vs), cons, None


def _app_a3_case2():
    al, be, eta, rho = vs = sp.symbols("alpha beta eta rho")
    dl = const("x_v_min")
    obj = const("tau4") * (al + be + dl + eta) ** 3 + (al * be + dl * al) * rho + (eta * rho + rho**2 / 2) * (al + be)
    cons = [sp.Eq(al + be + eta + rho, 1 - dl), al >= 0, be >= const("beta_min"), eta >= 0, rho >= 0]
    return obj, list(vs), cons, None


def _app_a2_case1():
    al, z, eta = vs = sp.symbols("alpha zeta eta")
    dl = const("d_split")
    obj = const("tau3") * (al + dl + z) ** 3 + al**2 * eta / 4 + (z * eta + eta**2 / 2) * (al + dl)
    cons = [sp.Eq(al + z + eta, 1 - dl), al >= 0, z >= 0, eta >= 0]
    return obj, list(vs), cons, None


def _app_a2_case2():
    a, be, z, eta = vs = sp.symbols("a beta zeta eta")
    dl = const("x_v_min")
    obj = const("tau3") * (a + be + dl + z) ** 3 + a * be * eta + (z * eta + eta**2 / 2) * (a + be + dl)
    cons = [sp.Eq(a + be + z + eta, 1 - dl), a >= 0, be >= const("beta_min"), z >= 0, eta >= 0]
    return obj, list(vs), cons, None


@dataclass(frozen=True)
class BatteryEntry:
    name: str
    build: object
    bound: sp.Expr
    description: str


S = SQRT3_18
BATTERY: dict[str, BatteryEntry] = {
    e.name: e
    for e in [
        BatteryEntry("fact_aaa", _fact_aaa, S, "x^2(1-x)/4 + x(1-x)^2/2 on [0,1]"),
        BatteryEntry("b2n", lambda: _b2n(30), S, "B(2,n-2) reduction with the pair weight a, n = 30"),
        BatteryEntry("h1", _h1, S, "H1 reduction in a, b, c, d, e"),
        BatteryEntry("h1_b0", _h1_b0, const("f_7_25"), "H1 reduction with b = 0"),
        BatteryEntry("h2", _h2, S, "H2 reduction in a, b, c, d, e"),
        BatteryEntry("h2_e0", _h2_e0, R("0.094"), "H2 with e = 0 after c = 2d, a = b + d/2"),
        BatteryEntry("perfect_case1", _perfect_case1, R(28, 243), "(sqrt3/18)(1-x)^3/(1-3x)"),
        BatteryEntry("perfect_case2", _perfect_case2, R(28, 243), "heavy vertex of weight a, second case"),
        BatteryEntry("claim_n8", _claim_n8, R("0.095"), "(5/12)x(1-x)^2 + (2/25)(1-x)^3"),
        BatteryEntry("x3", _x3, S, "three K4 copies sharing a pair, in a, b, c, delta"),
        BatteryEntry("x3_delta0", _x3_delta0, R("0.0921"), "the X3 program with delta = 0 and a = b"),
        BatteryEntry("x2_eq1", lambda: _x2(None), S, "two K4 copies sharing a pair, in a, b, c, d, e"),
        BatteryEntry("x2_b0", lambda: _x2("b"), S, "x2_eq1 on the face b = 0"),
        BatteryEntry("x2_e0", lambda: _x2("e"), R("0.0939"), "x2_eq1 on the face e = 0"),
        BatteryEntry("x2_c0", lambda: _x2("c"), R("0.083"), "x2_eq1 on the face c = 0"),
        BatteryEntry("x2_final", _x2_final, S, "lambda_0(b, c) with 5b + c <= 1"),
        BatteryEntry("y2_eq6", lambda: _y2(None), S, "two K4 copies sharing a triple, c >= 0.08"),
        BatteryEntry("y2_2a0", lambda: _y2("alpha"), const("f_7_25"), "y2_eq6 with alpha = 0"),
        BatteryEntry("y2_2f0", lambda: _y2("f"), R("0.096"), "y2_eq6 with f = 0"),
        BatteryEntry("y2_2e0", lambda: _y2("e"), S, "y2_eq6 with e = 0"),
        BatteryEntry("y2_2d0", lambda: _y2("d"), R("0.0955"), "y2_eq6 with d = 0"),
        BatteryEntry("y2_final", _y2_final, R("0.096"), "lambda(alpha, c) with 2alpha + c <= 1, alpha >= 2/9, c >= 0.08"),
        BatteryEntry("app_a4", _app_a4, const("tau4"), "tau(alpha, gamma, eta) with gamma >= 0.22354, alpha >= gamma"),
        BatteryEntry("app_a3_case1", _app_a3_case1, const("tau3"), "tau with delta = 0.11177, beta = 0.22354"),
        BatteryEntry("app_a3_case2", _app_a3_case2, const("tau3"), "tau with delta = 0.0848, beta >= 0.307"),
        BatteryEntry("app_a2_case1", _app_a2_case1, R("0.096"), "lambda with d = 0.11177"),
        BatteryEntry("app_a2_case2", _app_a2_case2, R("0.0961"), "lambda with d = 0.0848, beta >= 0.307"),
    ]
}


class UnknownProgram(KeyError):
    pass


def _make(name: str, builder, description: str) -> PolyProgram:
    obj, vs, cons, den = builder()
    return PolyProgram.from_sympy(name, obj, vs, cons, denominator=den, description=description)


def named_program(name: str) -> PolyProgram:
    """The program called ``name``; ``b2n:N`` selects the B(2,N-2) reduction for N vertices."""
    if name.startswith("b2n:"):
        n = int(name.split(":", 1)[1])
        if n < 4:
            raise UnknownProgram(f"b2n needs n >= 4, got {n}")
        return _make(name, lambda: _b2n(n), f"B(2,n-2) reduction, n = {n}")
    if name not in BATTERY:
        raise UnknownProgram(f"unknown program {name!r}; known: {', '.join(BATTERY)}")
    entry = BATTERY[name]
    return _make(name, entry.build, entry.description)


def claimed_bound(name: str) -> float:
    if name.startswith("b2n:"):
        return LAMBDA_TARGET
    return float(BATTERY[name].bound)


# ---------------------------------------------------------------------------
# battery report

@dataclass
class BatteryReport:
    results: list[ProgramResult]
    gap_tolerance: float = 1e-5
    seconds: float = 0.0
    variables: dict[str, list[str]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.satisfied and abs(r.oracle_gap) <= self.gap_tolerance for r in self.results)

    def failures(self) -> list[str]:
        return [r.name for r in self.results if not (r.satisfied and abs(r.oracle_gap) <= self.gap_tolerance)]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "gap_tolerance": self.gap_tolerance,
            "programs": [r.to_json(self.variables.get(r.name)) for r in self.results],
        }

    def table(self) -> str:
        lines = [f"{'name':<14} {'value':>15} {'bound':>15} {'margin':>12} {'gap':>9}  status"]
        for r in self.results:
            ok = r.satisfied and abs(r.oracle_gap) <= self.gap_tolerance
            lines.append(
                f"{r.name:<14} {r.value:>15.12f} {r.claimed_bound:>15.12f} {r.claimed_bound - r.value:>12.3e} "
                f"{r.oracle_gap:>9.1e}  {'PASS' if ok else 'FAIL'}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.results)} programs)")
        return "\n".join(lines)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def verify_battery(
    cfg: ProgramConfig | None = None,
    names: list[str] | None = None,
    bound_overrides: dict[str, float] | None = None,
    gap_tolerance: float = 1e-5,
) -> BatteryReport:
    """Solve every battery program and compare with its claimed bound."""
    start = time.perf_counter()
    bound_overrides = bound_overrides or {}
    results, variables = [], {}
    for name in names or list(BATTERY):
        P = named_program(name)
        bound = bound_overrides.get(name, claimed_bound(name))
        results.append(solve_program(P, cfg, claimed_bound=bound))
        variables[name] = P.variables
    return BatteryReport(results, gap_tolerance, time.perf_counter() - start, variables)


# ---------------------------------------------------------------------------
# reductions from concrete hypergraphs to programs

def x3_host(n: int) -> Hypergraph:
    """A 3-graph that the X3 program bounds: three K4 copies on the pair {1,2}
    (C = 3..8), the extra vertices D = 9..n joined to 1 and 2, 2xy removed for
    x, y in D, and the 3-partite edges inside C."""
    if n < 8:
        raise hg.HypergraphError("x3 host needs n >= 8")
    D = set(range(9, n + 1))
    edges = [e for e in hg.b2(n).edges if not (e[0] == 2 and e[1] in D and e[2] in D)]
    edges += [(p, q, s) for p in (3, 4) for q in (5, 6) for s in (7, 8)]
    return hg.make_hypergraph(n, 3, edges)


def reduction_bridge(name: str, n: int = 9, D=None) -> tuple[Hypergraph, PolyProgram]:
    """Return a hypergraph and a program whose maximum is >= its Lagrangian.

    The programs group vertex weights (the pair, the K4 partners, the rest)
    and bound every group of edges from above, so the direction is always
    lambda(graph) <= program value.
    """
    if name == "b2n":
        return hg.b2(n), named_program(f"b2n:{n}")
    if name == "h1":
        return hg.h1(n), named_program("h1")
    if name == "h2":
        return hg.h2(n, D), named_program("h2")
    if name == "x3":
        return x3_host(n), named_program("x3")
    raise UnknownProgram(f"no reduction bridge for {name!r}; choose b2n, h1, h2 or x3")


# ---------------------------------------------------------------------------
# the cubic from the two-copy analysis

X2_CUBIC = (2137, -882, 125, -6)
X2_CUBIC_INTERVALS = ((0.0, 1 / 9), (1 / 8, 1 / 5))


def _cubic_range(coefs, lo: float, hi: float) -> tuple[float, float]:
    """Enclosure of the cubic on [lo, hi] by Horner evaluation in interval arithmetic."""
    a_lo, a_hi = float(coefs[0]), float(coefs[0])
    for c in coefs[1:]:
        prods = (a_lo * lo, a_lo * hi, a_hi * lo, a_hi * hi)
        a_lo, a_hi = min(prods) + c, max(prods) + c
    return a_lo, a_hi


def cubic_root_free(coefs=X2_CUBIC, intervals=X2_CUBIC_INTERVALS, samples: int = 10_000, pieces: int = 4096) -> dict:
    """Check that the cubic keeps one sign on each interval.

    Sampling looks for a sign change; a subdivided interval enclosure proves
    the absence of a root.
    """
    p = np.poly1d(coefs)
    out = {}
    for lo, hi in intervals:
        xs = np.linspace(lo, hi, samples)
        vals = p(xs)
        sampled = bool(np.all(vals > 0) or np.all(vals < 0))
        sign = np.sign(vals[len(vals) // 2])
        edges = np.linspace(lo, hi, pieces + 1)
        proven = True
        for k in range(pieces):
            a, b = _cubic_range(coefs, edges[k], edges[k + 1])
            if sign > 0 and a <= 0 or sign < 0 and b >= 0:
                proven = False
        out[f"[{lo:.6g}, {hi:.6g}]"] = {"sampled_no_sign_change": sampled, "interval_proof": proven, "sign": int(sign)}
    out["root_free"] = all(v["sampled_no_sign_change"] and v["interval_proof"] for v in out.values() if isinstance(v, dict))
    return out
