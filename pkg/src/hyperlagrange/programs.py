"""Small polynomial programs: maximize a cubic over a polytope.

A program has at most a handful of variables, a polynomial objective of
total degree <= 3 (optionally divided by a positive affine denominator),
linear equalities and linear inequalities ``a . x <= b``.

``solve_program`` walks every face of the polytope (every subset of
inequalities taken as equalities), finds the stationary points of the
objective restricted to the face by batched Newton iterations from a grid
of seeds, and keeps the best feasible candidate.  An independent dense
grid search polished with SLSQP serves as the oracle.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize, nnls

log = logging.getLogger(__name__)

FEAS_TOL = 1e-9


class ProgramError(ValueError):
    pass


@dataclass
class PolyProgram:
    """Maximize objective(x) / denominator(x) subject to linear constraints.

    ``terms`` maps sorted tuples of variable indices (a monomial as a
    multiset, () for the constant) to coefficients.
    """

    name: str
    variables: list[str]
    terms: dict[tuple[int, ...], float]
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    ineq_labels: list[str] = field(default_factory=list)
    denominator: tuple[float, np.ndarray] | None = None
    description: str = ""

    def __post_init__(self):
        k = self.k
        if k == 0 or k > 7:
            raise ProgramError(f"{self.name}: between 1 and 7 variables supported, got {k}")
        self.eq_matrix = np.asarray(self.eq_matrix, dtype=float).reshape(-1, k)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float).ravel()
        self.ineq_matrix = np.asarray(self.ineq_matrix, dtype=float).reshape(-1, k)
        self.ineq_rhs = np.asarray(self.ineq_rhs, dtype=float).ravel()
        if not self.ineq_labels:
            self.ineq_labels = [f"row{i}" for i in range(len(self.ineq_rhs))]
        c0, g, Q, T = 0.0, np.zeros(k), np.zeros((k, k)), np.zeros((k, k, k))
        for mono, coef in self.terms.items():
            if len(mono) > 3:
                raise ProgramError(f"{self.name}: degree {len(mono)} term {mono}")
            if len(mono) == 0:
                c0 += coef
            elif len(mono) == 1:
                g[mono[0]] += coef
            elif len(mono) == 2:
                i, j = mono
                Q[i, j] += coef / 2
                Q[j, i] += coef / 2
            else:
                perms = set(itertools.permutations(mono))
                for p in perms:
                    T[p] += coef / len(perms)
        self._c0, self._g, self._Q, self._T = c0, g, Q, T

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        return max((len(m) for m, c in self.terms.items() if c != 0), default=0)

    # numerator pieces, vectorized over leading axes
    def _num(self, X):
        return (
            self._c0
            + X @ self._g
            + np.einsum("...i,ij,...j->...", X, self._Q, X)
            + np.einsum("...i,...j,...l,ijl->...", X, X, X, self._T)
        )

    def _num_grad(self, X):
        return self._g + 2 * X @ self._Q + 3 * np.einsum("...i,...j,ijl->...l", X, X, self._T)

    def _num_hess(self, X):
        return 2 * self._Q + 6 * np.einsum("...i,ijl->...jl", X, self._T)

    def value(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        p = self._num(X)
        if self.denominator is None:
            return p
        q0, qv = self.denominator
        return p / (q0 + X @ qv)

    def grad(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        gp = self._num_grad(X)
        if self.denominator is None:
            return gp
        q0, qv = self.denominator
        q = (q0 + X @ qv)[..., None]
        p = self._num(X)[..., None]
        return gp / q - p * qv / q**2

    def hess(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Hp = self._num_hess(X)
        if self.denominator is None:
            return Hp
        q0, qv = self.denominator
        q = (q0 + X @ qv)[..., None, None]
        p = self._num(X)[..., None, None]
        gp = self._num_grad(X)
        outer_gq = gp[..., :, None] * qv[None, :]
        qq = np.outer(qv, qv)
        return Hp / q - (outer_gq + np.swapaxes(outer_gq, -1, -2)) / q**2 + 2 * p * qq / q**3

    def feasible(self, X, tol: float = FEAS_TOL) -> np.ndarray:
        X = np.atleast_2d(X)
        ok = np.all(X @ self.ineq_matrix.T <= self.ineq_rhs + tol, axis=1)
        if len(self.eq_rhs):
            ok &= np.all(np.abs(X @ self.eq_matrix.T - self.eq_rhs) <= tol, axis=1)
        return ok

    @classmethod
    def from_sympy(cls, name, expr, variables, constraints, denominator=None, description=""):
        """Build a program from sympy objects.

        ``constraints`` holds sympy relations (Eq, <=, >=) that are linear in
        the variables; ``denominator`` an optional affine expression.
        """
        import sympy as sp

        syms = list(variables)
        poly = sp.Poly(sp.expand(expr), *syms)
        terms: dict[tuple[int, ...], float] = {}
        for exps, coef in poly.terms():
            mono = tuple(i for i, e in enumerate(exps) for _ in range(e))
            terms[mono] = terms.get(mono, 0.0) + float(coef)

        def affine(e):
            p = sp.Poly(sp.expand(e), *syms)
            if p.total_degree() > 1:
                raise ProgramError(f"{name}: constraint {e} is not linear")
            row = np.array([float(p.coeff_monomial(s)) for s in syms])
            const = float(p.coeff_monomial(1))
            return row, const

        eq_rows, eq_rhs, in_rows, in_rhs, labels = [], [], [], [], []
        for c in constraints:
            if isinstance(c, sp.Equality):
                row, const = affine(c.lhs - c.rhs)
                eq_rows.append(row)
                eq_rhs.append(-const)
            elif isinstance(c, (sp.LessThan, sp.StrictLessThan)):
                row, const = affine(c.lhs - c.rhs)
                in_rows.append(row)
                in_rhs.append(-const)
                labels.append(str(c))
            elif isinstance(c, (sp.GreaterThan, sp.StrictGreaterThan)):
                row, const = affine(c.rhs - c.lhs)
                in_rows.append(row)
                in_rhs.append(-const)
                labels.append(str(c))
            else:
                raise ProgramError(f"{name}: unsupported constraint {c!r}")
        den = None
        if denominator is not None:
            row, const = affine(denominator)
            den = (const, row)
        k = len(syms)
        return cls(
            name=name,
            variables=[str(s) for s in syms],
            terms=terms,
            eq_matrix=np.array(eq_rows).reshape(-1, k),
            eq_rhs=np.array(eq_rhs),
            ineq_matrix=np.array(in_rows).reshape(-1, k),
            ineq_rhs=np.array(in_rhs),
            ineq_labels=labels,
            denominator=den,
            description=description,
        )


@dataclass(frozen=True)
class ProgramConfig:
    grid_points: int = 11
    random_seeds: int = 20
    max_face_seeds: int = 20_000
    newton_iterations: int = 60
    oracle_mesh: int = 40
    oracle_max_points: int = 2_000_000
    seed: int = 0


@dataclass
class ProgramResult:
    name: str
    value: float
    argmax: np.ndarray
    active_set: list[str]
    kkt_residual: float
    vertex: bool
    oracle_value: float
    claimed_bound: float | None = None
    satisfied: bool | None = None
    faces: int = 0
    candidates: int = 0
    newton_failures: int = 0

    @property
    def oracle_gap(self) -> float:
        return self.value - self.oracle_value

    def to_json(self, variables=None) -> dict:
        arg = [float(f"{v:.15g}") for v in self.argmax]
        return {
            "name": self.name,
            "value": self.value,
            "argmax": dict(zip(variables, arg)) if variables else arg,
            "active_set": self.active_set,
            "kkt_residual": self.kkt_residual,
            "vertex": self.vertex,
            "oracle_value": self.oracle_value,
            "oracle_gap": self.oracle_gap,
            "claimed_bound": self.claimed_bound,
            "satisfied": self.satisfied,
        }


def _bounding_box(P: PolyProgram) -> tuple[np.ndarray, np.ndarray]:
    lb, ub = np.empty(P.k), np.empty(P.k)
    A_eq = P.eq_matrix if len(P.eq_rhs) else None
    b_eq = P.eq_rhs if len(P.eq_rhs) else None
    for i in range(P.k):
        c = np.zeros(P.k)
        for sign, store in ((1.0, lb), (-1.0, ub)):
            c[i] = sign
            res = linprog(c, A_ub=P.ineq_matrix, b_ub=P.ineq_rhs, A_eq=A_eq, b_eq=b_eq, bounds=[(None, None)] * P.k)
            if res.status == 2:
                raise ProgramError(f"{P.name}: infeasible constraints")
            if res.status != 0:
                raise ProgramError(f"{P.name}: feasible region is not bounded ({res.message})")
            store[i] = sign * res.fun
    return lb, ub


def _face_seeds(x0, N, lb, ub, cfg: ProgramConfig, rng) -> np.ndarray:
    f = N.shape[1]
    lo = np.minimum(N * (lb - x0)[:, None], N * (ub - x0)[:, None]).sum(axis=0)
    hi = np.maximum(N * (lb - x0)[:, None], N * (ub - x0)[:, None]).sum(axis=0)
    per_dim = cfg.grid_points
    while per_dim > 2 and per_dim**f > cfg.max_face_seeds:
        per_dim -= 1
    axes = [np.linspace(lo[j], hi[j], per_dim) for j in range(f)]
    grid = np.array(list(itertools.product(*axes))).reshape(-1, f)
    rand = lo + (hi - lo) * rng.random((cfg.random_seeds, f))
    return np.vstack([grid, rand])


def _newton(P: PolyProgram, x0, N, Z, iters) -> tuple[np.ndarray, np.ndarray]:
    """Batched Newton iterations on N^T grad(x0 + N z) = 0.  Returns the final
    points and a mask of seeds that converged."""
    Z = Z.copy()
    alive = np.ones(len(Z), dtype=bool)
    moving = np.ones(len(Z), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            idx = np.flatnonzero(alive & moving)
            if len(idx) == 0:
                break
            X = x0 + Z[idx] @ N.T
            g = P.grad(X) @ N
            H = np.einsum("ij,bjk,kl->bil", N.T, P.hess(X), N)
            # plain solves where the reduced Hessian is well conditioned
            cond = np.linalg.cond(H)
            step = np.empty_like(g)
            good = np.isfinite(cond) & (cond < 1e10)
            if good.any():
                step[good] = np.linalg.solve(H[good], g[good][..., None])[..., 0]
            if (~good).any():
                step[~good] = np.einsum("bij,bj->bi", np.linalg.pinv(H[~good]), g[~good])
            Z[idx] -= step
            bad = ~np.isfinite(Z[idx]).all(axis=1) | (np.abs(Z[idx]).max(axis=1) > 1e3)
            alive[idx[bad]] = False
            moving[idx[np.abs(step).max(axis=1) < 1e-15]] = False
        X = x0 + Z @ N.T
        g = np.abs(P.grad(X) @ N).max(axis=1)
    scale = 1.0 + np.abs(P.grad(X)).max(axis=1)
    converged = alive & np.isfinite(g) & (g < 1e-10 * scale)
    return X, converged


def _dedupe(X: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    out: list[np.ndarray] = []
    for x in X[np.lexsort(X.T[::-1])] if len(X) else []:
        if not out or np.abs(out[-1] - x).max() > tol:
            if all(np.abs(o - x).max() > tol for o in out[-8:]):
                out.append(x)
    return np.array(out).reshape(-1, X.shape[1])


def kkt_multipliers(P: PolyProgram, x: np.ndarray) -> tuple[float, list[int]]:
    """KKT residual of a maximizer candidate: grad = A_act^T mu + A_eq^T nu, mu >= 0."""
    slack = P.ineq_rhs - P.ineq_matrix @ x
    active = [i for i, s in enumerate(slack) if abs(s) <= FEAS_TOL]
    g = P.grad(x)
    cols = [P.ineq_matrix[i] for i in active]
    cols += list(P.eq_matrix) + list(-P.eq_matrix)
    if not cols:
        return float(np.abs(g).max()), active
    M = np.array(cols).T
    _, res = nnls(M, g)
    coef = nnls(M, g)[0]
    return float(np.abs(M @ coef - g).max()), active


def grid_oracle_program(P: PolyProgram, mesh: int, max_points: int, lb=None, ub=None, polish: int = 8) -> float:
    """Independent check: best value on a dense grid over the feasible region,
    refined by SLSQP from the best grid points."""
    if lb is None:
        lb, ub = _bounding_box(P)
    if len(P.eq_rhs):
        x0 = np.linalg.lstsq(P.eq_matrix, P.eq_rhs, rcond=None)[0]
        N = null_space(P.eq_matrix)
    else:
        x0, N = np.zeros(P.k), np.eye(P.k)
    f = N.shape[1]
    if f == 0:
        return float(P.value(x0))
    lo = np.minimum(N * (lb - x0)[:, None], N * (ub - x0)[:, None]).sum(axis=0)
    hi = np.maximum(N * (lb - x0)[:, None], N * (ub - x0)[:, None]).sum(axis=0)
    per_dim = mesh + 1
    while per_dim > 3 and per_dim**f > max_points:
        per_dim -= 1
    axes = [np.linspace(lo[j], hi[j], per_dim) for j in range(f)]
    mesh_z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f)
    X = x0 + mesh_z @ N.T
    X = X[P.feasible(X)]
    if len(X) == 0:
        raise ProgramError(f"{P.name}: oracle grid found no feasible point")
    vals = P.value(X)
    best = float(vals.max())
    cons = [{"type": "ineq", "fun": lambda x, i=i: P.ineq_rhs[i] - P.ineq_matrix[i] @ x} for i in range(len(P.ineq_rhs))]
    if len(P.eq_rhs):
        cons.append({"type": "eq", "fun": lambda x: P.eq_matrix @ x - P.eq_rhs})
    for idx in np.argsort(-vals)[:polish]:
        res = minimize(
            lambda x: -float(P.value(x)),
            X[idx],
            jac=lambda x: -P.grad(x),
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-15, "maxiter": 500},
        )
        if P.feasible(res.x)[0]:
            best = max(best, float(P.value(res.x)))
    return best


def solve_program(P: PolyProgram, cfg: ProgramConfig | None = None, claimed_bound: float | None = None) -> ProgramResult:
    cfg = cfg or ProgramConfig()
    rng = np.random.default_rng(cfg.seed)
    lb, ub = _bounding_box(P)
    rows = len(P.ineq_rhs)
    cands: list[np.ndarray] = []
    faces = failures = 0
    for size in range(rows + 1):
        for active in itertools.combinations(range(rows), size):
            M = np.vstack([P.eq_matrix, P.ineq_matrix[list(active)]])
            rhs = np.concatenate([P.eq_rhs, P.ineq_rhs[list(active)]])
            if len(rhs):
                x0 = np.linalg.lstsq(M, rhs, rcond=None)[0]
                if np.abs(M @ x0 - rhs).max() > FEAS_TOL:
                    continue
                N = null_space(M)
            else:
                x0, N = np.zeros(P.k), np.eye(P.k)
            faces += 1
            if N.shape[1] == 0:
                if P.feasible(x0)[0]:
                    cands.append(x0)
                continue
            Z = _face_seeds(x0, N, lb, ub, cfg, rng)
            X, ok = _newton(P, x0, N, Z, cfg.newton_iterations)
            keep = ok & P.feasible(X)
            failures += int((~ok).sum())
            if keep.any():
                cands.extend(_dedupe(X[keep]))
    if not cands:
        raise ProgramError(f"{P.name}: no feasible candidate found")
    if failures:
        log.debug("%s: %d Newton seeds did not converge", P.name, failures)
    C = _dedupe(np.array(cands))
    vals = P.value(C)
    best = int(np.argmax(vals))
    x = C[best]
    value = float(P.value(x))
    kkt, active = kkt_multipliers(P, x)
    rank = np.linalg.matrix_rank(np.vstack([P.eq_matrix, P.ineq_matrix[active]])) if active or len(P.eq_rhs) else 0
    oracle = grid_oracle_program(P, cfg.oracle_mesh, cfg.oracle_max_points, lb, ub)
    return ProgramResult(
        name=P.name,
        value=value,
        argmax=x,
        active_set=[P.ineq_labels[i] for i in active],
        kkt_residual=kkt,
        vertex=bool(rank == P.k),
        oracle_value=oracle,
        claimed_bound=claimed_bound,
        satisfied=None if claimed_bound is None else bool(value <= claimed_bound + 1e-6),
        faces=faces,
        candidates=len(C),
        newton_failures=failures,
    )
