"""Rigorous upper bounds on lambda(G) by interval branch-and-bound.

The simplex is covered by axis-aligned boxes.  Each box is first shrunk to
the slab sum(x) = 1, then bounded from above in two ways and the smaller
bound is kept:

* the naive interval bound, sum over edges of the product of upper ends;
* a centred (mean value) form around the box midpoint c,
      lambda(x) <= lambda(c) + sum_i [(Ghi_i - mu)^+ (hi_i - c_i) + (mu - Glo_i)^+ (c_i - lo_i)]
                   + mu (1 - sum c),
  valid for every real mu because sum(x) = 1; Glo/Ghi are the interval
  partial derivatives.  We take the best mu among the breakpoints.

Boxes that cannot contain a global maximizer are removed using two
necessary conditions: every positive weight vertex of a maximizer has
partial derivative r*lambda(G) >= r*incumbent and no vertex has a larger
partial derivative.  Interchangeable vertices share one variable.

Floating point results are inflated by a relative 1e-9 plus 1e-12 absolute,
far above the accumulated rounding error of the few hundred operations per
bound, so the reported bound is sound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .hypergraph import CapacityError, Hypergraph, induced, twin_classes
from .solver import SolverConfig, maximize

MAX_CERTIFY_VERTICES = 12
_REL = 1e-9
_ABS = 1e-12
_SLACK = 1e-12


@dataclass
class CertifiedBound:
    bound: float
    boxes_explored: int
    max_depth: int
    tolerance: float
    target: float
    success: bool
    complete: bool = True
    incumbent: float = 0.0
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "target": self.target,
            "tolerance": self.tolerance,
            "success": self.success,
            "complete": self.complete,
            "boxes_explored": self.boxes_explored,
            "max_depth": self.max_depth,
            "incumbent": self.incumbent,
        }


def _tighten(lo, hi, size):
    """Shrink boxes to the slab sum(size * y) = 1; returns a mask of non-empty boxes."""
    for _ in range(2):
        slo = (size * lo).sum(axis=1, keepdims=True)
        shi = (size * hi).sum(axis=1, keepdims=True)
        hi = np.minimum(hi, (1.0 - (slo - size * lo)) / size + _SLACK)
        lo = np.maximum(lo, (1.0 - (shi - size * hi)) / size - _SLACK)
        lo = np.maximum(lo, 0.0)
    ok = ((size * lo).sum(axis=1) <= 1.0 + 1e-12) & ((size * hi).sum(axis=1) >= 1.0 - 1e-12)
    ok &= np.all(lo <= hi, axis=1)
    return lo, hi, ok


class _Bounder:
    """lambda restricted to points that are constant on twin classes.

    Averaging the weights of interchangeable vertices never lowers lambda,
    so some global maximizer is constant on every twin class and it is
    enough to search over one weight y_c per class with sum(|c| y_c) = 1.
    The restricted polynomial has non-negative coefficients, so partial
    derivatives are monotone on boxes.
    """

    def __init__(self, G: Hypergraph):
        self.G = G
        classes = twin_classes(G)
        cls_of = np.empty(G.n, dtype=np.intp)
        for k, cls in enumerate(classes):
            cls_of[np.array(cls) - 1] = k
        self.k = len(classes)
        self.size = np.array([len(c) for c in classes], dtype=float)
        self.classes = classes
        self.E = cls_of[G.edge_array]
        r = G.r
        self.S = np.zeros((G.m * r, self.k))
        self.S[np.arange(G.m * r), self.E.ravel()] = 1.0
        self.pos_pairs = [(p, q) for p in range(r) for q in range(r) if p != q]
        flat = [self.E[:, p] * self.k + self.E[:, q] for p, q in self.pos_pairs]
        self.H_scatter = np.zeros((G.m * len(self.pos_pairs), self.k * self.k))
        self.H_scatter[np.arange(self.H_scatter.shape[0]), np.concatenate(flat)] = 1.0

    def values(self, Y):
        return Y[:, self.E].prod(axis=2).sum(axis=1)

    def grads(self, Y):
        V = Y[:, self.E]
        r = V.shape[2]
        out = np.empty_like(V)
        for p in range(r):
            out[:, :, p] = np.prod(np.delete(V, p, axis=2), axis=2)
        return out.reshape(Y.shape[0], -1) @ self.S

    def hessians(self, Y):
        V = Y[:, self.E]
        parts = []
        for p, q in self.pos_pairs:
            rest = [t for t in range(V.shape[2]) if t not in (p, q)]
            parts.append(V[:, :, rest].prod(axis=2) if rest else np.ones(V.shape[:2]))
        return (np.concatenate(parts, axis=1) @ self.H_scatter).reshape(-1, self.k, self.k)

    def kkt_prune(self, lo, hi, incumbent):
        """Force y_c = 0 where a maximizer must vanish; drop impossible boxes.

        At a symmetric maximizer each vertex of a positive class has partial
        derivative r*lambda(G) >= r*incumbent, and none has a larger one.
        """
        glo = self.grads(lo) / self.size
        ghi = self.grads(hi) / self.size
        r = self.G.r
        ghi_up = ghi * (1.0 + _REL) + _ABS
        glo_dn = glo * (1.0 - _REL) - _ABS
        dead = (ghi_up < r * incumbent) | (ghi_up < glo_dn.max(axis=1, keepdims=True))
        ok = ~np.any(dead & (lo > 0), axis=1)
        hi = np.where(dead, 0.0, hi)
        return lo, hi, ok

    def _linear_part(self, c, lo, hi, glo, ghi):
        """min over mu of sum_c [(ghi - mu s)^+ (hi - c) + (mu s - glo)^+ (c - lo)] + mu (1 - s.c)."""
        s = self.size
        mus = np.concatenate([glo / s, ghi / s], axis=1)
        up = (hi - c)[:, None, :]
        dn = (c - lo)[:, None, :]
        ms = mus[:, :, None] * s
        term = np.maximum(ghi[:, None, :] - ms, 0.0) * up + np.maximum(ms - glo[:, None, :], 0.0) * dn
        return (term.sum(axis=2) + mus * (1.0 - (s * c).sum(axis=1))[:, None]).min(axis=1)

    def upper(self, lo, hi):
        naive = hi[:, self.E].prod(axis=2).sum(axis=1)
        c = 0.5 * (lo + hi)
        lam_c = self.values(c)
        # mean value form with interval partial derivatives
        best = np.minimum(naive, lam_c + self._linear_part(c, lo, hi, self.grads(lo), self.grads(hi)))
        if self.G.r <= 3:
            # exact Taylor expansion of a homogeneous polynomial of degree <= 3
            g = self.grads(c)
            half = 0.5 * (hi - lo)
            tail = self.values(half)
            if self.G.r == 3:
                H = self.hessians(c)
                tail = tail + 0.5 * np.einsum("bi,bij,bj->b", half, H, half)
            best = np.minimum(best, lam_c + self._linear_part(c, lo, hi, g, g) + tail)
        return best * (1.0 + _REL) + _ABS


def _certify_connected(G, target, tolerance, incumbent, max_boxes, batch):
    B = _Bounder(G)
    size = B.size
    lo = np.zeros((1, B.k))
    hi = np.ones((1, B.k)) / size
    depth = np.zeros(1, dtype=int)
    threshold = incumbent + tolerance
    pruned_max = -np.inf
    explored = 0
    max_depth = 0
    stack = [(lo, hi, depth)]
    while stack:
        lo, hi, depth = stack.pop()
        if explored >= max_boxes:
            stack.append((lo, hi, depth))
            break
        explored += lo.shape[0]
        lo, hi, ok = _tighten(lo, hi, size)
        lo, hi, ok2 = B.kkt_prune(lo, hi, incumbent)
        ok &= ok2
        lo, hi, ok3 = _tighten(lo, hi, size)
        ok &= ok3
        lo, hi, depth = lo[ok], hi[ok], depth[ok]
        if lo.shape[0] == 0:
            continue
        ub = B.upper(lo, hi)
        # improve the incumbent with a feasible point of each box
        spare = np.maximum(1.0 - (size * lo).sum(axis=1), 0.0)
        room = (size * (hi - lo)).sum(axis=1)
        p = lo + (hi - lo) * (spare / np.where(room > 0, room, 1.0))[:, None]
        p /= (size * p).sum(axis=1, keepdims=True)
        incumbent = max(incumbent, float(B.values(p).max()))
        done = ub <= threshold
        if done.any():
            pruned_max = max(pruned_max, float(ub[done].max()))
        lo, hi, depth = lo[~done], hi[~done], depth[~done]
        if lo.shape[0] == 0:
            continue
        width = size * (hi - lo)
        k = width.argmax(axis=1)
        rows = np.arange(lo.shape[0])
        mid = 0.5 * (lo[rows, k] + hi[rows, k])
        lo2, hi2 = lo.copy(), hi.copy()
        hi[rows, k] = mid
        lo2[rows, k] = mid
        depth = depth + 1
        max_depth = max(max_depth, int(depth.max()))
        kids_lo = np.vstack([lo, lo2])
        kids_hi = np.vstack([hi, hi2])
        kids_d = np.concatenate([depth, depth])
        for s in range(0, kids_lo.shape[0], batch):
            stack.append((kids_lo[s : s + batch], kids_hi[s : s + batch], kids_d[s : s + batch]))
    complete = not stack
    leftover = -np.inf
    if not complete:
        for lo, hi, _ in stack:
            lo, hi, ok = _tighten(lo, hi, size)
            if ok.any():
                leftover = max(leftover, float(B.upper(lo[ok], hi[ok]).max()))
    bound = max(pruned_max, leftover)
    if not np.isfinite(bound):
        bound = incumbent
    return bound, explored, max_depth, complete, incumbent


def certify_upper_bound(
    G: Hypergraph,
    target: float,
    tolerance: float = 1e-3,
    max_boxes: int = 2_000_000,
    batch: int = 4096,
    cfg: SolverConfig | None = None,
) -> CertifiedBound:
    """Sound upper bound on lambda(G); success means bound <= target + tolerance.

    Components are certified separately (lambda of a disjoint union is the
    largest component value).  Intended for components with at most 9
    vertices; larger ones up to 12 are accepted but may exhaust the budget.
    """
    start = time.perf_counter()
    comps = G.components()
    if not comps:
        return CertifiedBound(0.0, 0, 0, tolerance, target, 0.0 <= target + tolerance)
    big = max(len(c) for c in comps)
    if big > MAX_CERTIFY_VERTICES:
        raise CapacityError(f"component with {big} vertices exceeds the certification limit {MAX_CERTIFY_VERTICES}")
    bound, explored, depth, complete, inc_all = -np.inf, 0, 0, True, 0.0
    per_budget = max_boxes // len(comps)
    for comp in comps:
        H = induced(G, comp)
        incumbent = maximize(H, cfg).value
        b, e, d, c, inc = _certify_connected(H, target, tolerance, incumbent, per_budget, batch)
        bound = max(bound, b)
        explored += e
        depth = max(depth, d)
        complete &= c
        inc_all = max(inc_all, inc)
    return CertifiedBound(
        bound=float(bound),
        boxes_explored=explored,
        max_depth=depth,
        tolerance=tolerance,
        target=target,
        success=bool(bound <= target + tolerance),
        complete=complete,
        incumbent=inc_all,
        seconds=time.perf_counter() - start,
    )
