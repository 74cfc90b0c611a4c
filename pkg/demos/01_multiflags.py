"""
Multi-flags and excess
======================

Three lines in the plane, closed under intersection.
"""

from posetmod.linalg import Gram, Matrix, span_of
from posetmod.multiflag import close, excess, graded

lines = [span_of([[1, 0]], 2), span_of([[0, 1]], 2), span_of([[1, 1]], 2)]
f = close(2, lines)

print("== members ==")
for w in f:
    print("  ", w)

# each line contributes a 1-dim piece, but the plane only has room for two
print("graded dims:", graded(f).piece_dims())
print("excess:", excess(f))

# an orthogonal lift changes the pieces, never their dimensions
g = Gram(Matrix([[2, 1], [1, 1]]))
print("graded dims with a Gram matrix:", graded(f, g).piece_dims())

# two lines sit in general position
print("excess of two lines:", excess(close(2, lines[:2])))
