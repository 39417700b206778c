"""Evaluation and maximization of hypergraph Lagrangians on the simplex.

lambda(G, x) = sum over edges e of prod_{i in e} x_i, and lambda(G) is its
maximum over the probability simplex.  ``maximize`` runs batched projected
gradient ascent from many starts, polishes the best points with Newton's
method on the support, then symmetrizes interchangeable vertices.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from .hypergraph import (
    CapacityError,
    Hypergraph,
    HypergraphError,
    induced,
    make_hypergraph,
    remove_edges,
    drop_isolated,
    twin_classes,
)
from .search import clique_number

SUPPORT_EPS = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 64
    max_iterations: int = 5000
    gradient_tolerance: float = 1e-11
    seed: int = 0
    symmetrize: bool = True

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.gradient_tolerance <= 0 or self.seed < 0:
            raise ValueError(f"invalid solver configuration {self}")

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class LagrangianResult:
    value: float
    weights: np.ndarray
    kkt_residual: float
    method: str = "multistart-gradient"
    restarts_used: int = 0
    seed: int = 0
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "weights": [float(f"{w:.15g}") for w in self.weights],
            "kkt_residual": self.kkt_residual,
            "method": self.method,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# evaluation

def _check(G: Hypergraph, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != G.n:
        raise HypergraphError(f"weight vector has dimension {x.shape[-1]}, graph has {G.n} vertices")
    return x


def evaluate(G: Hypergraph, x) -> float | np.ndarray:
    """lambda(G, x).  A 2-d array of weight vectors gives one value per row."""
    x = _check(G, x)
    if G.m == 0:
        return 0.0 if x.ndim == 1 else np.zeros(x.shape[0])
    return x[..., G.edge_array].prod(axis=-1).sum(axis=-1)


def _others(V: np.ndarray) -> np.ndarray:
    """For V of shape (..., m, r): products of all entries but one, same shape."""
    r = V.shape[-1]
    out = np.empty_like(V)
    for p in range(r):
        out[..., p] = np.prod(np.delete(V, p, axis=-1), axis=-1)
    return out


def gradient(G: Hypergraph, x) -> np.ndarray:
    """Partial derivatives of lambda(G, x); works row-wise on 2-d input."""
    x = _check(G, x)
    g = np.zeros(x.shape)
    if G.m == 0:
        return g
    E = G.edge_array
    contrib = _others(x[..., E])
    if x.ndim == 1:
        np.add.at(g, E.ravel(), contrib.ravel())
    else:
        g += contrib.reshape(x.shape[0], -1) @ _scatter(G)
    return g


def _scatter(G: Hypergraph) -> np.ndarray:
    S = np.zeros((G.m * G.r, G.n))
    S[np.arange(G.m * G.r), G.edge_array.ravel()] = 1.0
    return S


def hessian(G: Hypergraph, x) -> np.ndarray:
    x = _check(G, x)
    H = np.zeros((G.n, G.n))
    if G.m == 0 or G.r < 2:
        return H
    E = G.edge_array
    V = x[E]
    for p, q in itertools.combinations(range(G.r), 2):
        rest = [k for k in range(G.r) if k not in (p, q)]
        val = V[:, rest].prod(axis=1) if rest else np.ones(G.m)
        np.add.at(H, (E[:, p], E[:, q]), val)
        np.add.at(H, (E[:, q], E[:, p]), val)
    return H


def kkt_residual(G: Hypergraph, x, support_eps: float = SUPPORT_EPS) -> float:
    """Violation of the simplex KKT conditions at x: positive-weight vertices
    must have partial r*lambda, zero-weight vertices at most r*lambda."""
    x = _check(G, x)
    g = gradient(G, x)
    target = G.r * evaluate(G, x)
    on = x > support_eps
    res = 0.0
    if on.any():
        res = float(np.max(np.abs(g[on] - target)))
    if (~on).any():
        res = max(res, float(np.max(np.maximum(0.0, g[~on] - target))))
    return res


# ---------------------------------------------------------------------------
# simplex machinery

def project_simplex(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of V onto the probability simplex."""
    V = np.atleast_2d(V)
    n = V.shape[1]
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    cond = U - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(V.shape[0]), rho] / (rho + 1)
    return np.maximum(V - theta[:, None], 0.0)


def _normalize(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, 0.0)
    return x / x.sum()


def _starts(n: int, r: int, count: int, seed: int, salt: int) -> np.ndarray:
    X = np.empty((count, n))
    X[0] = 1.0 / n
    for k in range(1, count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, salt, k]))
        if k % 2:
            size = int(rng.integers(min(r, n), n + 1))
            support = rng.choice(n, size=size, replace=False)
            X[k] = 0.0
            X[k, support] = 1.0 / size
        else:
            X[k] = rng.dirichlet(np.ones(n))
    return X


def _ascend(G: Hypergraph, X: np.ndarray, iterations: int, tol: float) -> tuple[np.ndarray, int, np.ndarray]:
    """Batched projected gradient ascent with per-row backtracking.

    Returns the points, the iterations used and the mask of rows that have
    not yet met the stationarity tolerance."""
    S = _scatter(G)
    E = G.edge_array
    B = X.shape[0]

    def values(Y):
        return Y[:, E].prod(axis=2).sum(axis=1)

    def grads(Y):
        return _others(Y[:, E]).reshape(Y.shape[0], -1) @ S

    f = values(X)
    step = np.ones(B)
    active = np.ones(B, dtype=bool)
    it = 0
    for it in range(1, iterations + 1):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        Xa = X[rows]
        Ga = grads(Xa)
        stat = np.abs(project_simplex(Xa + Ga) - Xa).max(axis=1)
        done = stat < tol
        active[rows[done]] = False
        rows, Xa, Ga = rows[~done], Xa[~done], Ga[~done]
        t = step[rows].copy()
        pending = np.ones(rows.size, dtype=bool)
        stuck = np.zeros(rows.size, dtype=bool)
        newX = Xa.copy()
        newf = f[rows].copy()
        for _ in range(60):
            if not pending.any():
                break
            idx = np.flatnonzero(pending)
            Y = project_simplex(Xa[idx] + t[idx, None] * Ga[idx])
            fy = values(Y)
            up = fy > f[rows[idx]]
            newX[idx[up]] = Y[up]
            newf[idx[up]] = fy[up]
            pending[idx[up]] = False
            # a trial point that no longer moves cannot ascend either
            flat = ~up & (np.abs(Y - Xa[idx]).max(axis=1) < 1e-15)
            stuck[idx[flat]] = True
            pending[idx[flat]] = False
            t[idx[~up]] *= 0.5
        # rows that never found ascent are stationary to machine precision
        active[rows[pending | stuck]] = False
        X[rows] = newX
        f[rows] = newf
        step[rows] = np.minimum(t * 2.0, 1e3)
    return X, it, active


def _batch_gradient(G: Hypergraph, Y: np.ndarray) -> np.ndarray:
    return _others(Y[:, G.edge_array]).reshape(Y.shape[0], -1) @ _scatter(G)


def _ascend_with_jumps(G: Hypergraph, X: np.ndarray, iterations: int, tol: float, chunk: int = 100):
    """Projected gradient ascent in chunks.  Between chunks, rows that have
    nearly stopped moving (projected gradient step below 1e-5) are clustered and one Newton polish per cluster is
    tried; a clean KKT point that is no worse finishes the whole cluster.
    Nearly stationary rows more than 1e-6 below a finished restart are
    dropped.  Degenerate maxima, where ascent converges sublinearly, end
    quickly."""
    active = np.ones(X.shape[0], dtype=bool)
    used = 0
    while active.any() and used < iterations:
        rows = np.flatnonzero(active)
        Y, it, still = _ascend(G, X[rows], min(chunk, iterations - used), tol)
        X[rows] = Y
        active[rows[~still]] = False
        used += it
        rows = np.flatnonzero(active)
        if rows.size:
            stat = np.abs(project_simplex(X[rows] + _batch_gradient(G, X[rows])) - X[rows]).max(axis=1)
            rows = rows[stat < 1e-5]
            # nearly stationary and clearly below a finished restart: drop
            done = ~active
            if done.any():
                best = evaluate(G, X[done]).max()
                worse = evaluate(G, X[rows]) < best - 1e-6
                active[rows[worse]] = False
                rows = rows[~worse]
        while rows.size:
            rep = X[rows[0]]
            near = rows[np.abs(X[rows] - rep).max(axis=1) < 1e-4]
            rows = np.setdiff1d(rows, near)
            y = _newton_polish(G, rep)
            if kkt_residual(G, y) <= tol and evaluate(G, y) >= evaluate(G, rep) - 1e-15:
                X[near] = y
                active[near] = False
    return X, used


def _newton_polish(G: Hypergraph, x: np.ndarray, iters: int = 40) -> np.ndarray:
    """Solve grad_S = nu * 1, sum x_S = 1 on the support S by Newton's method,
    dropping coordinates that turn negative."""
    x = x.copy()
    support = np.flatnonzero(x > 1e-9 * x.max())
    nu = G.r * evaluate(G, x)
    for _ in range(iters):
        k = support.size
        g = gradient(G, x)[support]
        F = np.concatenate([g - nu, [x[support].sum() - 1.0]])
        J = np.zeros((k + 1, k + 1))
        J[:k, :k] = hessian(G, x)[np.ix_(support, support)]
        J[:k, k] = -1.0
        J[k, :k] = 1.0
        delta = np.linalg.lstsq(J, -F, rcond=None)[0]
        trial = x[support] + delta[:k]
        if np.any(trial <= 0):
            x[support[trial <= 0]] = 0.0
            x = _normalize(x)
            support = np.flatnonzero(x > 0)
            nu = G.r * evaluate(G, x)
            continue
        x[support] = trial
        nu += delta[k]
        if np.max(np.abs(delta)) < 1e-15:
            break
    return _normalize(x)


def _dominance(G: Hypergraph) -> list[tuple[int, int]]:
    """Pairs (i, j), 0-based, with L_G(j minus i) empty: i may take weight >= j."""
    nbr = [set() for _ in range(G.n)]
    for e in G.edge_array:
        for v in e:
            nbr[v].add(tuple(int(u) for u in e if u != v))
    pairs = []
    for i in range(G.n):
        for j in range(G.n):
            if i != j and all(i in s or s in nbr[i] for s in nbr[j]):
                pairs.append((i, j))
    return pairs


def _symmetrize(G: Hypergraph, x: np.ndarray, dominance) -> np.ndarray:
    x = x.copy()
    for cls in twin_classes(G):
        if len(cls) > 1:
            idx = np.array(cls) - 1
            x[idx] = x[idx].mean()
    for _ in range(4 * G.n):
        moved = False
        for i, j in dominance:
            if x[i] < x[j] - 1e-15:
                x[i] = x[j] = 0.5 * (x[i] + x[j])
                moved = True
        if not moved:
            break
    return x


def _solve_connected(G: Hypergraph, cfg: SolverConfig, salt: int) -> tuple[np.ndarray, int]:
    X = _starts(G.n, G.r, cfg.restarts, cfg.seed, salt)
    tol = max(cfg.gradient_tolerance, 1e-10)
    X, iters = _ascend_with_jumps(G, X, cfg.max_iterations, tol)
    vals = evaluate(G, X)
    order = np.argsort(-vals, kind="stable")
    best, best_val = X[order[0]], vals[order[0]]
    best_res = kkt_residual(G, best)
    # polish a handful of the leading candidates, ties go to the earlier restart
    seen = []
    for k in order[: min(6, len(order))]:
        if any(np.abs(X[k] - s).max() < 1e-6 for s in seen):
            continue
        seen.append(X[k])
        y = _newton_polish(G, X[k])
        vy, ry = evaluate(G, y), kkt_residual(G, y)
        if vy > best_val + 1e-15 or (vy >= best_val - 1e-15 and ry < best_res):
            best, best_val, best_res = y, vy, ry
    if cfg.symmetrize:
        dom = _dominance(G)
        y = _symmetrize(G, best, dom)
        y = _symmetrize(G, _newton_polish(G, y), dom)
        if evaluate(G, y) >= best_val - 1e-14:
            best = y
    return best, iters


def maximize(G: Hypergraph, cfg: SolverConfig | None = None) -> LagrangianResult:
    """Best value of lambda(G, x) found over the simplex.

    The returned value is evaluate(G, weights) at a feasible point, hence a
    lower bound on lambda(G).  Components are solved separately.
    """
    cfg = cfg or SolverConfig()
    if G.m == 0:
        w = np.full(G.n, 1.0 / G.n) if G.n else np.zeros(0)
        return LagrangianResult(0.0, w, 0.0, "closed-form", 0, cfg.seed)
    best_w, best_val, total_iters = None, -1.0, 0
    closed = True
    for salt, comp in enumerate(G.components()):
        H = induced(G, comp)
        x, iters = _solve_connected(H, cfg, salt)
        closed &= iters == 0
        total_iters += iters
        val = evaluate(H, x)
        if val > best_val + 1e-15:
            best_val = val
            best_w = np.zeros(G.n)
            best_w[np.array(comp) - 1] = x
    value = float(evaluate(G, best_w))
    return LagrangianResult(
        value=value,
        weights=best_w,
        kkt_residual=kkt_residual(G, best_w),
        method="closed-form" if closed else "multistart-gradient",
        restarts_used=0 if closed else cfg.restarts,
        seed=cfg.seed,
        iterations=total_iters,
    )


# ---------------------------------------------------------------------------
# grid oracle

def _compositions(total: int, parts: int, chunk: int = 200_000):
    """Yield arrays of compositions of ``total`` into ``parts`` non-negative parts."""
    if parts == 1:
        yield np.array([[total]])
        return
    bars = itertools.combinations(range(total + parts - 1), parts - 1)
    while True:
        block = list(itertools.islice(bars, chunk))
        if not block:
            return
        B = np.asarray(block)
        edges = np.hstack([np.full((len(B), 1), -1), B, np.full((len(B), 1), total + parts - 1)])
        yield np.diff(edges, axis=1) - 1


def grid_oracle(G: Hypergraph, mesh: int, max_points: int = 5_000_000) -> float:
    """max of lambda(G, x) over simplex points whose coordinates are multiples
    of 1/mesh.  A lower bound on lambda(G)."""
    if mesh < 1:
        raise ValueError("mesh must be positive")
    H = drop_isolated(G)
    if H.m == 0:
        return 0.0
    count = comb(mesh + H.n - 1, H.n - 1)
    if count > max_points:
        raise CapacityError(f"grid with mesh {mesh} on {H.n} vertices has {count} points (limit {max_points})")
    best = 0.0
    for C in _compositions(mesh, H.n):
        best = max(best, float(evaluate(H, C / mesh).max()))
    return best


# ---------------------------------------------------------------------------
# dense subgraphs and Motzkin-Straus

def densify(G: Hypergraph, cfg: SolverConfig | None = None) -> Hypergraph:
    """Remove edges while lambda stays within cfg.gradient_tolerance of lambda(G);
    isolated vertices of the result are dropped."""
    cfg = cfg or SolverConfig()
    res = maximize(G, cfg)
    target = res.value - cfg.gradient_tolerance
    support = set(np.flatnonzero(res.weights > SUPPORT_EPS) + 1)
    # edges leaving the optimal support contribute nothing at the optimum
    H = make_hypergraph(G.n, G.r, (e for e in G.edges if set(e) <= support))
    changed = True
    while changed:
        changed = False
        for e in H.edges:
            trial = remove_edges(H, [e])
            if maximize(trial, cfg).value >= target:
                H = trial
                changed = True
                break
    return drop_isolated(H)


def motzkin_straus_check(G: Hypergraph, cfg: SolverConfig | None = None) -> tuple[float, int, float]:
    """(lambda, clique number, |lambda - (1 - 1/omega)/2|) for a 2-graph."""
    if G.r != 2:
        raise HypergraphError("Motzkin-Straus applies to 2-graphs")
    lam = maximize(G, cfg).value
    w = clique_number(G)
    expected = 0.5 * (1.0 - 1.0 / w) if w else 0.0
    return lam, w, abs(lam - expected)
