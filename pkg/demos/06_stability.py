"""
When refinement stops, and when it does not
===========================================

Refinement pushes subspaces along every map until nothing new appears.
"""

from posetmod.cmod import random_module, validate
from posetmod.gallery import d4_shear
from posetmod.linalg import GF
from posetmod.local import compute
from posetmod.poset import grid, zigzag_grid

m = random_module(grid(2, 4), 3, seed=2)
ls = compute(m, validate(m), max_iters=20)
print("2x4 grid:", ls.status, "after", ls.iterations, "refinement(s)")

# over a finite field there are only finitely many subspaces
m = random_module(grid(3, 3), 3, seed=2, field=GF(2))
print("3x3 grid over F_2:", compute(m, validate(m)).status)

# a shear around a loop keeps producing new lines
m = d4_shear()
ls = compute(m, validate(m), max_iters=12)
print("d4-shear:", ls.status)
for i, sizes in enumerate(ls.trace[:7]):
    print(f"  stage {i}: x1={sizes['x1']} x2={sizes['x2']} y1={sizes['y1']} y2={sizes['y2']}")

# no loop holonomy here, yet the flags keep growing
m = random_module(zigzag_grid([True, False], [False, True]), 3, seed=3138)
ls = compute(m, validate(m), max_iters=6)
print("3x3 zig-zag, seed 3138:", ls.status, [s["0,1"] for s in ls.trace])
