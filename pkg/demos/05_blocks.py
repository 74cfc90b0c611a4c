"""
Blocks, their holonomy, and splitting
=====================================
"""

from posetmod.blocks import block_holonomy, enumerate_blocks, gbc_decompose, gbcd_vector
from posetmod.cmod import direct_sum, gbc_module, validate
from posetmod.gallery import gamma1_block
from posetmod.local import compute
from posetmod.poset import gamma1

# a rank-2 block on the commuting square, with trivial holonomy
m = gamma1_block()
[b] = enumerate_blocks(compute(m, validate(m)))
print("support", b.key(), "dim", b.dim)
print("holonomy:", [str(op) for op in block_holonomy(b)])

parts = gbc_decompose(b)
print("split into", len(parts), "rank-one blocks:")
for p in parts:
    vec = lambda v: "(" + ", ".join(map(str, v)) + ")"
    print("  frame at a:", vec(p.frame["a"][0]), " frame at d:", vec(p.frame["d"][0]))

# the GBCD vector counts blocks by support, whatever lift is chosen
cat = gamma1()
n = direct_sum(gbc_module(cat, cat.sub(["a", "b"])), gbc_module(cat, cat.full()))
print("GBCD:", gbcd_vector(compute(n, validate(n))))
