"""Containment, freeness and exhaustive enumeration of small 3-graphs.

Run with:  python3 demos/02_structure_search.py
"""

from hyperlagrange import hypergraph as hg
from hyperlagrange.search import canonical_form, contains_subgraph, enumerate_free, is_free

F = hg.k4_plus_edge()

# B(2, n-2) never contains K_4^3 plus a disjoint edge: any K_4^3 in it uses
# the pair {1, 2}, and every other edge does too.
print("B(2,8) is F-free:", is_free(hg.b2(10), [F]))

# Four copies of K_4^3 on a common pair plus one more edge do contain F.
G = hg.disjoint_union(hg.x_family(4), hg.single_edge(3))
print("X4 + edge, embedding of F:", contains_subgraph(G, F))

# Canonical forms identify relabelled copies.
perm = {v: 7 - v for v in range(1, 7)}
print("X2 and its relabelling agree:", canonical_form(hg.x_family(2)) == canonical_form(hg.relabel(hg.x_family(2), perm)))

# Every 3-graph on at most 6 vertices, one per isomorphism class.
counts = [sum(1 for _ in enumerate_free(n)) for n in range(7)]
print("classes on n = 0..6 vertices:", counts)

# Forbidding K_4^3 itself on 5 vertices.
free5 = list(enumerate_free(5, [hg.complete(4, 3)]))
print("K4-free classes on 5 vertices:", len(free5), "largest has", max(G.m for G in free5), "edges")
