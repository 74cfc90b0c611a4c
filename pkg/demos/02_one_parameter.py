"""
Persistence over a chain
========================

On a chain every module splits into intervals.  The local structure finds
them, the tame cover is an isomorphism, and the bars agree with the rank
inclusion-exclusion formula.
"""

from posetmod.blocks import barcode_1d, enumerate_blocks, tame_cover
from posetmod.cmod import random_module, validate
from posetmod.ip import construct_ip_persistence
from posetmod.local import compute
from posetmod.poset import chain

m = random_module(chain(5), 3, seed=12)
t = validate(m)
print("dims:", m.dims)

ls = compute(m, t)
print("status:", ls.status, "| total excess:", ls.total_excess)

for b in enumerate_blocks(ls):
    print(f"  block on {b.key()} of dim {b.dim}")

w, strategy = construct_ip_persistence(m, t)
cover = tame_cover(ls, w)
print("inner products from:", strategy)
print("tame cover is an isomorphism:", cover.is_isomorphism())

print("bars (1-based):", barcode_1d(m, t).bars)
