"""Computing Lagrangians and certifying upper bounds.

Run with:  python3 demos/03_lagrangians.py
"""

from math import comb, sqrt

from hyperlagrange import hypergraph as hg
from hyperlagrange.certify import certify_upper_bound
from hyperlagrange.solver import densify, grid_oracle, maximize, motzkin_straus_check

TARGET = sqrt(3) / 18

# Complete graphs: the uniform weighting is optimal.
for t in (4, 5, 6, 9):
    res = maximize(hg.complete(t, 3))
    print(f"lambda(K_{t}^3) = {res.value:.12f}  (C(t,3)/t^3 = {comb(t, 3) / t**3:.12f})")

# The construction B(2, n-2) approaches sqrt(3)/18 from below.
for n in (10, 20, 30):
    print(f"lambda(B(2,{n - 2})) = {maximize(hg.b2(n)).value:.12f}   target {TARGET:.12f}")

# A grid search is a cheap, independent lower bound.
G = hg.x_family(2)
print("X2: maximize", maximize(G).value, " grid(30)", grid_oracle(G, 30))

# Branch and bound turns the numerical value into a proven upper bound.
cert = certify_upper_bound(hg.h2(9), TARGET, 1e-3)
print(f"H2(9): certified lambda <= {cert.bound:.6f} after {cert.boxes_explored} boxes, success={cert.success}")

# Dense subgraph: the extra edge of F contributes nothing.
print("densify(F) == K4:", densify(hg.k4_plus_edge()) == hg.complete(4, 3))

# For 2-graphs the Lagrangian is determined by the clique number.
C5 = hg.make_hypergraph(5, 2, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
lam, omega, gap = motzkin_straus_check(C5)
print(f"C5: lambda = {lam:.6f}, clique number {omega}, discrepancy {gap:.1e}")
