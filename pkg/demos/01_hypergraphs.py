"""Building and inspecting 3-graphs.

Run with:  python3 demos/01_hypergraphs.py
"""

from hyperlagrange import family
from hyperlagrange import hypergraph as hg

# K_4^3 plus a disjoint edge: the forbidden graph F used throughout.
F = hg.k4_plus_edge()
print("F has", F.n, "vertices and edges", F.edges)
print("pairs of F not covered by an edge:", len(hg.uncovered_pairs(F)))

# The extension H^F covers every pair of the original vertices with a new edge.
H = hg.extension(F)
print(f"extension: {H.n} vertices, {H.m} edges, covers pairs of F: "
      f"{all(p[1] > F.n for p in hg.uncovered_pairs(H))}")

# The extremal construction: every edge meets the pair {1, 2}.
B = hg.b2(8)
print("B(2,6):", B.m, "edges; twin classes", hg.twin_classes(B))

# The link graph of vertex 1 in K_4^3 is a triangle.
print("link of vertex 1 in K4:", hg.link_graph(hg.complete(4, 3), 1).edges)

# Colex prefixes: the first 10 triples are exactly K_5^3.
print("C(3,10) is K5:", hg.colex_first(3, 10) == hg.complete(5, 3))

# Family names are handy in scripts and on the command line.
for name in ("K:6:3", "X:2", "H2:9", "B2:28"):
    G = family(name)
    print(f"{name:>6}: n={G.n:>2} m={G.m}")

# The text format round-trips.
text = hg.serialize(hg.complete(4, 3))
print(text, end="")
assert hg.parse(text) == hg.complete(4, 3)
