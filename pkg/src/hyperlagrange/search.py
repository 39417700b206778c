"""Subgraph containment, clique numbers, canonical forms and small enumerations."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .hypergraph import (
    CapacityError,
    Hypergraph,
    HypergraphError,
    link_graph,
    make_hypergraph,
    twin_classes,
)

EXACT_THRESHOLD = 10


# ---------------------------------------------------------------------------
# containment

def _search_order(H: Hypergraph) -> list[int]:
    """Order pattern vertices so that edges close as early as possible."""
    deg = H.degrees()
    left = {v for v in range(1, H.n + 1) if deg[v - 1] > 0}
    order: list[int] = []
    placed: set[int] = set()
    while left:
        def score(v):
            closed = sum(1 for e in H.edges if v in e and all(u in placed or u == v for u in e))
            touching = sum(1 for e in H.edges if v in e and any(u in placed for u in e))
            return (closed, touching, deg[v - 1], -v)

        v = max(left, key=score)
        order.append(v)
        placed.add(v)
        left.remove(v)
    order += [v for v in range(1, H.n + 1) if deg[v - 1] == 0]
    return order


def contains_subgraph(G: Hypergraph, H: Hypergraph) -> tuple[int, ...] | None:
    """Return an embedding of H into G (not necessarily induced) or None.

    The embedding is a tuple whose (k-1)-th entry is the image of H-vertex k.
    """
    if G.r != H.r:
        raise HypergraphError(f"uniformity mismatch: {G.r} vs {H.r}")
    if H.n > G.n or H.m > G.m:
        return None
    order = _search_order(H)
    pos = {v: k for k, v in enumerate(order)}
    # edges that become fully mapped when order[k] is placed
    closing: list[list[tuple[int, ...]]] = [[] for _ in order]
    for e in H.edges:
        last = max(pos[v] for v in e)
        closing[last].append(tuple(pos[v] for v in e if pos[v] != last))
    hdeg = H.degrees()
    gdeg = G.degrees()
    need = [hdeg[v - 1] for v in order]
    cands = [[w for w in range(1, G.n + 1) if gdeg[w - 1] >= need[k]] for k in range(len(order))]
    masks = G.edge_masks
    image = [0] * len(order)
    used = [False] * (G.n + 1)

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        for w in cands[k]:
            if used[w]:
                continue
            ok = True
            for rest in closing[k]:
                m = 1 << w
                for p in rest:
                    m |= 1 << image[p]
                if m not in masks:
                    ok = False
                    break
            if not ok:
                continue
            image[k] = w
            used[w] = True
            if extend(k + 1):
                return True
            used[w] = False
        return False

    if not extend(0):
        return None
    emb = [0] * H.n
    for k, v in enumerate(order):
        emb[v - 1] = image[k]
    return tuple(emb)


def is_free(G: Hypergraph, forbidden: Iterable[Hypergraph]) -> bool:
    return all(contains_subgraph(G, F) is None for F in forbidden)


# ---------------------------------------------------------------------------
# cliques

def _max_clique(adj: list[int]) -> int:
    best = 0

    def expand(size: int, cand: int):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        # pivot on the candidate with most neighbours inside cand
        pivot = max((v for v in range(len(adj)) if cand >> v & 1), key=lambda v: bin(adj[v] & cand).count("1"))
        rest = cand & ~adj[pivot]
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            expand(size + 1, cand & adj[v])
            cand &= ~(1 << v)
            if size + bin(cand).count("1") <= best:
                return

    expand(0, (1 << len(adj)) - 1)
    return best


def clique_number(G: Hypergraph) -> int:
    """Clique number of a 2-graph (0 for the graph on no vertices)."""
    if G.r != 2:
        raise HypergraphError("clique_number needs a 2-graph")
    adj = [0] * G.n
    for a, b in G.edges:
        adj[a - 1] |= 1 << (b - 1)
        adj[b - 1] |= 1 << (a - 1)
    return _max_clique(adj)


def link_clique_number(G: Hypergraph, v: int) -> int:
    """omega(G_v), the clique number of the link graph of v.

    The link is taken on the vertices other than v, so an empty link on at
    least one other vertex has clique number 1.
    """
    if G.r != 3:
        raise HypergraphError("link_clique_number needs a 3-graph")
    L = link_graph(G, v)
    others = [u for u in range(1, G.n + 1) if u != v]
    pos = {u: k + 1 for k, u in enumerate(others)}
    return clique_number(make_hypergraph(len(others), 2, ((pos[a], pos[b]) for a, b in L.edges)))


# ---------------------------------------------------------------------------
# canonical forms

@dataclass(frozen=True, order=True)
class CanonicalForm:
    key: bytes
    exact: bool = True


class InexactCanonicalForm(RuntimeError):
    pass


def _refine(G: Hypergraph, incident: list[list[tuple[int, ...]]], cells: list[list[int]]) -> list[list[int]]:
    while True:
        where = {}
        for c, cell in enumerate(cells):
            for v in cell:
                where[v] = c
        out: list[list[int]] = []
        for c, cell in enumerate(cells):
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {}
            for v in cell:
                sig[v] = tuple(sorted(tuple(sorted(where[u] for u in rest)) for rest in incident[v]))
            for s in sorted(set(sig.values())):
                out.append([v for v in cell if sig[v] == s])
        if len(out) == len(cells):
            return out
        cells = out


def _exact_key(G: Hypergraph) -> bytes:
    incident: list[list[tuple[int, ...]]] = [[] for _ in range(G.n + 1)]
    for e in G.edges:
        for v in e:
            incident[v].append(tuple(u for u in e if u != v))
    twin_of = {}
    for cls in twin_classes(G):
        for v in cls:
            twin_of[v] = cls[0]
    best: list = [None]

    def leaf(cells):
        label = {cell[0]: k + 1 for k, cell in enumerate(cells)}
        cert = tuple(sorted(tuple(sorted(label[v] for v in e)) for e in G.edges))
        if best[0] is None or cert < best[0]:
            best[0] = cert

    def search(cells):
        cells = _refine(G, incident, cells)
        target = next((k for k, cell in enumerate(cells) if len(cell) > 1), None)
        if target is None:
            leaf(cells)
            return
        tried = set()
        for w in cells[target]:
            if twin_of[w] in tried:
                continue
            tried.add(twin_of[w])
            rest = [v for v in cells[target] if v != w]
            search(cells[:target] + [[w], rest] + cells[target + 1:])

    search([list(range(1, G.n + 1))] if G.n else [])
    if G.n == 0:
        best[0] = ()
    flat = [G.n, G.r, len(best[0])] + [v for e in best[0] for v in e]
    return np.asarray(flat, dtype=">u2").tobytes()


def _invariant_key(G: Hypergraph) -> bytes:
    incident: list[list[tuple[int, ...]]] = [[] for _ in range(G.n + 1)]
    for e in G.edges:
        for v in e:
            incident[v].append(tuple(u for u in e if u != v))
    cells = _refine(G, incident, [list(range(1, G.n + 1))])
    text = repr((G.n, G.r, G.m, [len(c) for c in cells], sorted(G.degrees().tolist())))
    return hashlib.sha256(text.encode()).digest()


def canonical_form(G: Hypergraph, exact_threshold: int = EXACT_THRESHOLD) -> CanonicalForm:
    """Isomorphism-invariant key.  Exact (complete invariant) when n <= exact_threshold;
    otherwise an invariant hash with ``exact=False``."""
    if G.n <= exact_threshold:
        return CanonicalForm(_exact_key(G), True)
    return CanonicalForm(_invariant_key(G), False)


def isomorphic(G1: Hypergraph, G2: Hypergraph, exact_threshold: int = EXACT_THRESHOLD) -> bool:
    if (G1.n, G1.r, G1.m) != (G2.n, G2.r, G2.m):
        return False
    k1 = canonical_form(G1, exact_threshold)
    k2 = canonical_form(G2, exact_threshold)
    if k1.exact and k2.exact:
        return k1.key == k2.key
    if k1.key != k2.key:
        return False
    # same size and edge count: an embedding is an isomorphism
    return contains_subgraph(G1, G2) is not None


# ---------------------------------------------------------------------------
# enumeration of 3-graphs on at most 6 vertices

@lru_cache(maxsize=None)
def _class_masks(n: int) -> np.ndarray:
    """Minimum edge-bitmask representative of every isomorphism class of
    3-graphs on [n]; bit k stands for the k-th triple in lex order."""
    triples = list(itertools.combinations(range(n), 3))
    T = len(triples)
    index = {t: k for k, t in enumerate(triples)}
    masks = np.arange(1 << T, dtype=np.uint32)
    canon = masks.copy()
    lo_bits = T // 2
    lo_mask = np.uint32((1 << lo_bits) - 1)
    lo_part = masks[: 1 << lo_bits]
    hi_part = masks[: 1 << (T - lo_bits)]
    for perm in itertools.permutations(range(n)):
        image = np.array([1 << index[tuple(sorted(perm[v] for v in t))] for t in triples], dtype=np.uint32)
        lo_tab = np.zeros(1 << lo_bits, dtype=np.uint32)
        hi_tab = np.zeros(1 << (T - lo_bits), dtype=np.uint32)
        for k in range(lo_bits):
            lo_tab |= np.where(lo_part >> k & 1, image[k], 0).astype(np.uint32)
        for k in range(T - lo_bits):
            hi_tab |= np.where(hi_part >> k & 1, image[lo_bits + k], 0).astype(np.uint32)
        np.minimum(canon, lo_tab[masks & lo_mask] | hi_tab[masks >> lo_bits], out=canon)
    reps = masks[canon == masks]
    counts = np.array([bin(int(x)).count("1") for x in reps])
    return reps[np.lexsort((reps, counts))]


def enumerate_free(n: int, forbidden: Iterable[Hypergraph] = (), r: int = 3) -> Iterator[Hypergraph]:
    """Yield one representative of every isomorphism class of forbidden-free
    3-graphs on exactly n vertices (isolated vertices allowed)."""
    if r != 3:
        raise HypergraphError("enumeration is implemented for 3-graphs only")
    if n > 6:
        raise CapacityError(f"enumeration is limited to n <= 6 (2^20 edge sets); got n={n}")
    if n < 0:
        raise HypergraphError("n must be non-negative")
    forbidden = list(forbidden)
    triples = list(itertools.combinations(range(1, n + 1), 3))
    for mask in _class_masks(n) if n >= 3 else np.zeros(1, dtype=np.uint32):
        mask = int(mask)
        G = make_hypergraph(n, 3, (t for k, t in enumerate(triples) if mask >> k & 1))
        if is_free(G, forbidden):
            yield G
