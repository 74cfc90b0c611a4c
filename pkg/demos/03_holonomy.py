"""
Holonomy obstructs inner products
=================================

On Gamma_2 (two sources, two sinks) a single scalar can travel around the
loop x1 -> y1 <- x2 -> y2 <- x1 and come back doubled.  No choice of inner
products can make every map an isometry on the orthogonal complement of
its kernel.  The same module arises as H_1 of a diagram of complexes.
"""

import random

from posetmod.cmod import validate
from posetmod.gallery import d5_module
from posetmod.ip import check_ipc, obstruction_scan
from posetmod.linalg import Gram, Matrix
from posetmod.local import compute
from posetmod.simplicial import gallery_D7, homology_functor

m = d5_module()
report = obstruction_scan(compute(m, validate(m)))
print(report.describe())

rng = random.Random(0)
for _ in range(3):
    grams = {x: Gram(Matrix([[rng.randint(1, 9)]])) for x in m.category.objects}
    r = check_ipc(m, None, grams)
    print("random Grams", {x: str(g.matrix[0, 0]) for x, g in grams.items()}, "->", r.verdict)

print()
print("== geometric version ==")
d = gallery_D7()
h1 = homology_functor(d, 1)
for e, a in h1.edge_maps.items():
    print(f"  H_1 {e[0]} -> {e[1]}: degree {a[0, 0]}")
print(obstruction_scan(compute(h1, validate(h1))).describe())
