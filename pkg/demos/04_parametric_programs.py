"""Solving the small polynomial programs behind the upper-bound argument.

Run with:  python3 demos/04_parametric_programs.py
"""

import sympy as sp

from hyperlagrange.battery import cubic_root_free, named_program, reduction_bridge, verify_battery
from hyperlagrange.programs import PolyProgram, solve_program
from hyperlagrange.solver import maximize

# A program written directly in sympy: maximize xyz on the simplex.
x, y, z = sp.symbols("x y z")
P = PolyProgram.from_sympy("xyz", x * y * z, [x, y, z], [x >= 0, y >= 0, z >= 0, sp.Eq(x + y + z, 1)])
res = solve_program(P)
print(f"xyz: value {res.value:.12f} at {res.argmax.round(6)}, oracle gap {res.oracle_gap:.1e}")

# One named program in detail.
res = solve_program(named_program("x2_final"), claimed_bound=0.0961)
print(f"x2_final: value {res.value:.10f}, active {res.active_set}, satisfied {res.satisfied}")

# A program bounds the Lagrangian of a concrete graph from above.
G, P = reduction_bridge("h2", 9)
print(f"H2(9): lambda {maximize(G).value:.10f} <= program {solve_program(P).value:.10f}")

# The cubic that must have no root on two intervals.
print("cubic root free:", cubic_root_free()["root_free"])

# Every program at once.
report = verify_battery()
print(report.table())
