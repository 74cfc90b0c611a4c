"""
Building inner products
=======================

For persistence modules (products of chains) we search for Gram matrices
that make every structure map an isometry off its kernel.
"""

from posetmod.cmod import from_maps, random_module, validate
from posetmod.gallery import grid_star
from posetmod.ip import check_ipc, construct_ip_persistence
from posetmod.linalg import Gram, Matrix
from posetmod.local import compute
from posetmod.poset import grid

# doubling a line: the source must be four times as long
m = from_maps(grid(1, 2), {"0,0": 1, "0,1": 1}, {("0,0", "0,1"): [[2]]})
w, strategy = construct_ip_persistence(m)
print("doubling map:", {x: str(w[x].matrix[0, 0]) for x in m.category.objects}, "via", strategy)

m = random_module(grid(2, 3), 2, seed=5)
t = validate(m)
w, strategy = construct_ip_persistence(m, t, composites=True)
print("random 2x3 module:", strategy, "->", check_ipc(m, t, w, composites=True).verdict)

# checking Hasse edges is weaker than checking every composite
star = grid_star()
grams = {x: Gram(Matrix([[1]])) for x in ("0,1", "0,2", "1,2")}
grams["1,0"] = Gram(Matrix([[2]]))
grams["0,0"] = Gram(Matrix.zeros(0, 0))
grams["1,1"] = Gram(Matrix([[1, 1], [1, 2]]))
print("grid star, Hasse edges:", check_ipc(star, None, grams).verdict)
r = check_ipc(star, None, grams, composites=True)
print("grid star, composites: ", r.verdict, "on", r.edge)
print("grid star excess:", compute(star, validate(star)).total_excess)
