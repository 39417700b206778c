"""Uniform hypergraphs: construction, named families, transforms and I/O.

Vertices are the integers 1..n.  Edges are stored as sorted tuples and the
edge list itself is kept sorted, so two ``Hypergraph`` objects built from the
same edge set compare equal.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, ...]


class HypergraphError(ValueError):
    """Raised for malformed hypergraphs.  ``edge`` holds the offending edge."""

    def __init__(self, message: str, edge: Sequence[int] | None = None):
        super().__init__(message)
        self.edge = tuple(edge) if edge is not None else None


class CapacityError(RuntimeError):
    """Raised when a request exceeds a documented size limit."""


class ParseError(ValueError):
    """Raised by the text/JSON readers.  ``line`` is 1-based (0 if unknown)."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class Hypergraph:
    n: int
    r: int
    edges: tuple[Edge, ...] = field(default=())

    def __post_init__(self):
        if self.r < 2:
            raise HypergraphError(f"uniformity must be at least 2, got {self.r}")
        if self.n < 0:
            raise HypergraphError(f"vertex count must be non-negative, got {self.n}")
        clean = set()
        for e in self.edges:
            e = tuple(int(v) for v in e)
            if len(e) != self.r:
                raise HypergraphError(f"edge {e} has {len(e)} vertices, expected {self.r}", e)
            if len(set(e)) != len(e):
                raise HypergraphError(f"edge {e} repeats a vertex", e)
            if min(e) < 1 or max(e) > self.n:
                raise HypergraphError(f"edge {e} has a vertex outside 1..{self.n}", e)
            clean.add(tuple(sorted(e)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self):
        return len(self.edges)

    def __contains__(self, e):
        return tuple(sorted(e)) in self.edge_set

    def __repr__(self):
        return f"Hypergraph(n={self.n}, r={self.r}, m={self.m})"

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an (m, r) array of 0-based vertex indices."""
        if not self.edges:
            return np.zeros((0, self.r), dtype=np.intp)
        return np.asarray(self.edges, dtype=np.intp) - 1

    @cached_property
    def edge_masks(self) -> frozenset:
        """Edges as bitmasks (bit v set for vertex v)."""
        return frozenset(sum(1 << v for v in e) for e in self.edges)

    def degrees(self) -> np.ndarray:
        """Vertex degrees, index 0 is vertex 1."""
        deg = np.zeros(self.n, dtype=int)
        if self.edges:
            np.add.at(deg, self.edge_array.ravel(), 1)
        return deg

    def isolated_vertices(self) -> list[int]:
        return [v + 1 for v, d in enumerate(self.degrees()) if d == 0]

    def components(self) -> list[list[int]]:
        """Vertex sets of the connected components that carry at least one edge."""
        parent = list(range(self.n + 1))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            root = find(e[0])
            for v in e[1:]:
                parent[find(v)] = root
        groups: dict[int, list[int]] = {}
        for v in sorted({v for e in self.edges for v in e}):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())


def make_hypergraph(n: int, r: int, edges: Iterable[Sequence[int]]) -> Hypergraph:
    return Hypergraph(n, r, tuple(tuple(e) for e in edges))


def random_hypergraph(n: int, r: int, p: float, rng: np.random.Generator) -> Hypergraph:
    """Each r-subset of [n] becomes an edge independently with probability p."""
    cands = list(itertools.combinations(range(1, n + 1), r))
    keep = rng.random(len(cands)) < p
    return make_hypergraph(n, r, (e for e, k in zip(cands, keep) if k))


# ---------------------------------------------------------------------------
# named families

def complete(t: int, r: int = 3) -> Hypergraph:
    """K_t^r, all r-subsets of [t]."""
    return make_hypergraph(t, r, itertools.combinations(range(1, t + 1), r))


def complete_minus(t: int, r: int = 3) -> Hypergraph:
    """K_t^r with its lexicographically last edge removed."""
    if t < r:
        raise HypergraphError(f"K_{t}^{r} has no edge to remove")
    last = tuple(range(t - r + 1, t + 1))
    return make_hypergraph(t, r, (e for e in itertools.combinations(range(1, t + 1), r) if e != last))


def single_edge(r: int = 3) -> Hypergraph:
    return make_hypergraph(r, r, [tuple(range(1, r + 1))])


def b2(n: int) -> Hypergraph:
    """The 3-graph on [n] whose edges are all triples meeting {1, 2}."""
    if n < 3:
        raise HypergraphError("B2 needs at least 3 vertices")
    return make_hypergraph(n, 3, (e for e in itertools.combinations(range(1, n + 1), 3) if e[0] <= 2))


def _k4_copies(n: int, quads: Iterable[Sequence[int]]) -> Hypergraph:
    edges = set()
    for q in quads:
        edges.update(itertools.combinations(sorted(q), 3))
    return make_hypergraph(n, 3, edges)


def x_family(i: int) -> Hypergraph:
    """i copies of K_4^3 sharing the pair {1, 2}: copy j lives on {1, 2, 2j+1, 2j+2}."""
    if i < 1:
        raise HypergraphError("X_i needs i >= 1")
    return _k4_copies(2 * i + 2, ((1, 2, 2 * j + 1, 2 * j + 2) for j in range(1, i + 1)))


def y_family(i: int) -> Hypergraph:
    """i copies of K_4^3 sharing the triple {1, 2, 3}: copy j lives on {1, 2, 3, j+3}."""
    if i < 1:
        raise HypergraphError("Y_i needs i >= 1")
    return _k4_copies(i + 3, ((1, 2, 3, j + 3) for j in range(1, i + 1)))


def s2t(t: int) -> Hypergraph:
    """S_{2,t}: vertices v1=1, v2=2, u_j=j+2 and the edges v1 v2 u_j."""
    if t < 1:
        raise HypergraphError("S_{2,t} needs t >= 1")
    return make_hypergraph(t + 2, 3, ((1, 2, u) for u in range(3, t + 3)))


def matching(t: int, r: int = 3) -> Hypergraph:
    """M_t^r, t pairwise disjoint edges."""
    return make_hypergraph(t * r, r, (tuple(range(j * r + 1, j * r + r + 1)) for j in range(t)))


def h1(n: int) -> Hypergraph:
    """B2(n) without the triples 2ij (i, j outside [6]), plus 345 and 346."""
    if n < 6:
        raise HypergraphError("H1 needs at least 6 vertices")
    edges = [e for e in b2(n).edges if not (e[0] == 2 and e[1] > 6 and e[2] > 6)]
    return make_hypergraph(n, 3, edges + [(3, 4, 5), (3, 4, 6)])


def h2(n: int, D: Iterable[int] | None = None) -> Hypergraph:
    """B2(n) without the triples 2ij (i, j in D), plus 34i for i in D.

    D must be a subset of {5..n} with at least two elements; default {5..n}.
    """
    D = frozenset(range(5, n + 1)) if D is None else frozenset(D)
    if len(D) < 2 or min(D) < 5 or max(D) > n:
        raise HypergraphError(f"H2 needs D inside 5..{n} with |D| >= 2, got {sorted(D)}")
    edges = [e for e in b2(n).edges if not (e[0] == 2 and e[1] in D and e[2] in D)]
    return make_hypergraph(n, 3, edges + [(3, 4, i) for i in D])


def k4_plus_edge() -> Hypergraph:
    """K_4^3 together with a disjoint edge: 123, 124, 134, 234, 567."""
    return disjoint_union(complete(4, 3), single_edge(3))


# ---------------------------------------------------------------------------
# colex order

def colex_key(e: Sequence[int]) -> tuple[int, ...]:
    """Sort key for colex order: compare by largest element first."""
    return tuple(sorted(e, reverse=True))


def colex_first(r: int, m: int, n: int | None = None) -> Hypergraph:
    """C_{r,m}: the first m r-subsets of the positive integers in colex order.

    The vertex set is [t] with t the smallest integer allowing m edges,
    unless ``n`` is given (it must be at least t).
    """
    if m < 0:
        raise HypergraphError("m must be non-negative")
    t = r
    while comb(t, r) < m:
        t += 1
    if n is None:
        n = t if m else 0
    elif n < t:
        raise HypergraphError(f"{m} colex {r}-sets need {t} vertices, got n={n}")
    edges = sorted(itertools.combinations(range(1, t + 1), r), key=colex_key)[:m]
    return make_hypergraph(n, r, edges)


# ---------------------------------------------------------------------------
# transforms

def relabel(G: Hypergraph, mapping: dict[int, int], n: int | None = None) -> Hypergraph:
    n = G.n if n is None else n
    return make_hypergraph(n, G.r, (tuple(mapping[v] for v in e) for e in G.edges))


def complement(G: Hypergraph) -> Hypergraph:
    return make_hypergraph(
        G.n, G.r, (e for e in itertools.combinations(range(1, G.n + 1), G.r) if e not in G.edge_set)
    )


def induced(G: Hypergraph, S: Iterable[int]) -> Hypergraph:
    """Induced subgraph on S, relabelled to 1..|S| in increasing order."""
    S = sorted(set(S))
    pos = {v: k + 1 for k, v in enumerate(S)}
    return make_hypergraph(
        len(S), G.r, (tuple(pos[v] for v in e) for e in G.edges if all(v in pos for v in e))
    )


def remove_vertices(G: Hypergraph, S: Iterable[int]) -> Hypergraph:
    S = set(S)
    return induced(G, (v for v in range(1, G.n + 1) if v not in S))


def remove_edges(G: Hypergraph, E: Iterable[Sequence[int]]) -> Hypergraph:
    drop = {tuple(sorted(e)) for e in E}
    return make_hypergraph(G.n, G.r, (e for e in G.edges if e not in drop))


def drop_isolated(G: Hypergraph) -> Hypergraph:
    return induced(G, (v for v, d in enumerate(G.degrees(), start=1) if d > 0))


def link_graph(G: Hypergraph, v: int) -> Hypergraph:
    """The (r-1)-graph on the same vertex set with edges e - {v}, v in e."""
    if G.r < 3:
        raise HypergraphError("link of a 2-graph is not a hypergraph of uniformity >= 2")
    return make_hypergraph(G.n, G.r - 1, (tuple(u for u in e if u != v) for e in G.edges if v in e))


def link_difference(G: Hypergraph, i: int, j: int) -> frozenset:
    """L_G(j minus i): (r-1)-sets e avoiding i with e+j an edge but e+i not."""
    out = set()
    for e in G.edges:
        if j in e and i not in e:
            rest = tuple(u for u in e if u != j)
            if tuple(sorted(rest + (i,))) not in G.edge_set:
                out.add(rest)
    return frozenset(out)


def costars(G: Hypergraph, x: int, y: int) -> frozenset:
    """Vertices z with {x, y, z} an edge (3-graphs only)."""
    if G.r != 3:
        raise HypergraphError("costars is defined for 3-graphs")
    return frozenset(v for e in G.edges if x in e and y in e for v in e if v not in (x, y))


def uncovered_pairs(G: Hypergraph) -> list[tuple[int, int]]:
    covered = set()
    for e in G.edges:
        covered.update(itertools.combinations(e, 2))
    return [p for p in itertools.combinations(range(1, G.n + 1), 2) if p not in covered]


def covers_pairs(G: Hypergraph) -> bool:
    return not uncovered_pairs(G)


def disjoint_union(G1: Hypergraph, G2: Hypergraph) -> Hypergraph:
    if G1.r != G2.r:
        raise HypergraphError("disjoint union needs equal uniformity")
    shifted = (tuple(v + G1.n for v in e) for e in G2.edges)
    return make_hypergraph(G1.n + G2.n, G1.r, list(G1.edges) + list(shifted))


def extension(F: Hypergraph) -> Hypergraph:
    """For every pair {i, j} not covered by an edge of F, add an edge made of
    i, j and r-2 brand new vertices."""
    extra = []
    nxt = F.n + 1
    for i, j in uncovered_pairs(F):
        fresh = tuple(range(nxt, nxt + F.r - 2))
        nxt += F.r - 2
        extra.append((i, j) + fresh)
    return make_hypergraph(nxt - 1, F.r, list(F.edges) + extra)


def twin_classes(G: Hypergraph) -> list[list[int]]:
    """Classes of vertices whose pairwise transpositions are automorphisms,
    i.e. L(i minus j) and L(j minus i) are both empty."""
    nbr: dict[int, set] = {v: set() for v in range(1, G.n + 1)}
    for e in G.edges:
        for v in e:
            nbr[v].add(tuple(u for u in e if u != v))
    classes: list[list[int]] = []
    for v in range(1, G.n + 1):
        for cls in classes:
            u = cls[0]
            a = {s for s in nbr[v] if u not in s}
            b = {s for s in nbr[u] if v not in s}
            if a == b:
                cls.append(v)
                break
        else:
            classes.append([v])
    return classes


# ---------------------------------------------------------------------------
# serialization

def serialize(G: Hypergraph) -> str:
    lines = [f"{G.n} {G.r}"]
    lines += [" ".join(map(str, e)) for e in G.edges]
    return "\n".join(lines) + "\n"


def _parse_lines(lines: list[tuple[int, str]]) -> Hypergraph:
    header_no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError("header must be 'n r'", header_no)
    try:
        n, r = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header must hold two integers", header_no) from None
    edges = []
    for no, text in lines[1:]:
        try:
            e = tuple(int(tok) for tok in text.split())
        except ValueError:
            raise ParseError(f"non-integer token in {text!r}", no) from None
        if len(e) != r:
            raise ParseError(f"edge has {len(e)} vertices, expected {r}", no)
        if len(set(e)) != r:
            raise ParseError(f"edge {e} repeats a vertex", no)
        if min(e) < 1 or max(e) > n:
            raise ParseError(f"edge {e} leaves the vertex range 1..{n}", no)
        edges.append(e)
    try:
        return make_hypergraph(n, r, edges)
    except HypergraphError as exc:
        raise ParseError(str(exc), header_no) from None


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        out.append((no, "" if s.startswith("#") else s))
    return out


def parse(text: str) -> Hypergraph:
    """Read the 'n r' header plus one edge per line format; '#' starts a comment line."""
    lines = [(no, s) for no, s in _content_lines(text) if s]
    if not lines:
        raise ParseError("empty input", 1)
    return _parse_lines(lines)


def serialize_many(graphs: Iterable[Hypergraph]) -> str:
    """Several hypergraphs, separated by blank lines."""
    return "\n".join(serialize(G) for G in graphs)


def parse_many(text: str) -> list[Hypergraph]:
    blocks: list[list[tuple[int, str]]] = [[]]
    for no, s in _content_lines(text):
        if s:
            blocks[-1].append((no, s))
        elif blocks[-1] and not text.splitlines()[no - 1].strip().startswith("#"):
            blocks.append([])
    return [_parse_lines(b) for b in blocks if b]


def to_json(G: Hypergraph) -> dict:
    return {"n": G.n, "r": G.r, "edges": [list(e) for e in G.edges]}


def from_json(obj: dict | str) -> Hypergraph:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), exc.lineno) from None
    try:
        return make_hypergraph(int(obj["n"]), int(obj["r"]), obj["edges"])
    except KeyError as exc:
        raise ParseError(f"missing key {exc}") from None
    except HypergraphError as exc:
        raise ParseError(str(exc)) from None
