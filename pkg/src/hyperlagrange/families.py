"""Named hypergraph families and the short text names used on the command line.

Grammar (case sensitive)::

    K:t:r    complete r-graph on t vertices
    Km:t:r   complete r-graph minus one edge
    K5m      shorthand for Km:5:3
    E:r      a single r-edge
    B2:s     all triples meeting a fixed pair, on s + 2 vertices
    X:i      i copies of K_4^3 sharing a pair
    Y:i      i copies of K_4^3 sharing a triple
    S2:t     S_{2,t}
    M:t:r    t disjoint r-edges
    H1:n     H1 on n vertices
    H2:n[:d1,d2,...]   H2 on n vertices with the listed D (default 5..n)
    C:r:m    first m r-sets in colex order
    K4e      K_4^3 plus a disjoint edge

Any name may carry a ``+edge`` suffix, which adds a disjoint edge.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import hypergraph as hg
from .hypergraph import Hypergraph

_ARITY = {"K": 2, "Km": 2, "E": 1, "B2": 1, "X": 1, "Y": 1, "S2": 1, "M": 2, "H1": 1, "C": 2}


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: tuple = ()
    plus_edge: bool = False

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        text = text.strip()
        plus = text.endswith("+edge")
        if plus:
            text = text[: -len("+edge")]
        if text == "K4e":
            return cls("K4e", (), plus)
        if text == "K5m":
            return cls("Km", (5, 3), plus)
        kind, *rest = text.split(":")
        if kind == "H2":
            if not rest:
                raise FamilyError("H2 needs at least the vertex count, e.g. H2:9")
            try:
                n = int(rest[0])
                D = tuple(sorted(int(d) for d in rest[1].split(","))) if len(rest) > 1 else None
            except ValueError:
                raise FamilyError(f"bad H2 parameters in {text!r}") from None
            if len(rest) > 2:
                raise FamilyError(f"too many fields in {text!r}")
            return cls("H2", (n, D), plus)
        if kind not in _ARITY:
            raise FamilyError(f"unknown family {kind!r}")
        if len(rest) != _ARITY[kind]:
            raise FamilyError(f"{kind} takes {_ARITY[kind]} parameter(s), got {len(rest)}")
        try:
            params = tuple(int(p) for p in rest)
        except ValueError:
            raise FamilyError(f"non-integer parameter in {text!r}") from None
        if kind == "B2":
            # B2:s is B(2, s): the pair plus s further vertices
            params = (params[0] + 2,)
        return cls(kind, params, plus)

    def build(self) -> Hypergraph:
        G = _build(self.kind, self.params)
        if self.plus_edge:
            G = hg.disjoint_union(G, hg.single_edge(G.r))
        return G

    def __str__(self):
        if self.kind == "K4e":
            base = "K4e"
        elif self.kind == "B2":
            base = f"B2:{self.params[0] - 2}"
        elif self.kind == "H2":
            n, D = self.params
            base = f"H2:{n}" + ("" if D is None else ":" + ",".join(map(str, D)))
        else:
            base = ":".join([self.kind, *map(str, self.params)])
        return base + ("+edge" if self.plus_edge else "")


def _build(kind: str, p: tuple) -> Hypergraph:
    if kind == "K":
        return hg.complete(p[0], p[1])
    if kind == "Km":
        return hg.complete_minus(p[0], p[1])
    if kind == "E":
        return hg.single_edge(p[0])
    if kind == "B2":
        return hg.b2(p[0])
    if kind == "X":
        return hg.x_family(p[0])
    if kind == "Y":
        return hg.y_family(p[0])
    if kind == "S2":
        return hg.s2t(p[0])
    if kind == "M":
        return hg.matching(p[0], p[1])
    if kind == "H1":
        return hg.h1(p[0])
    if kind == "H2":
        return hg.h2(p[0], p[1])
    if kind == "C":
        return hg.colex_first(p[0], p[1])
    if kind == "K4e":
        return hg.k4_plus_edge()
    raise FamilyError(f"unknown family {kind!r}")


def family(spec: str | FamilySpec) -> Hypergraph:
    """Build a hypergraph from a FamilySpec or its text name."""
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)
    try:
        return spec.build()
    except hg.HypergraphError as exc:
        raise FamilyError(str(exc)) from None
