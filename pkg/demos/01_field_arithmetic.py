"""Prime-field linear algebra: matrices, rank, inverses, and solving.

Everything downstream (network coding, syndrome decoding) runs on this
small GF(p) toolkit, so this walk-through starts at the bottom.
"""

import numpy as np

from compnet.gf import (
    PrimeField,
    identity,
    invertible_fraction_expected,
    mat_invert,
    mat_rank,
    matrix,
    next_prime,
    random_matrix,
    solve,
)

# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

f7 = PrimeField(7)
print("field:", f7)
print("3 + 5 =", f7.add(3, 5), "  3 * 5 =", f7.mul(3, 5), "  1/3 =", f7.inv(3))
print("next prime after 7:", next_prime(7))

# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

a = matrix(f7, [[1, 2, 0], [0, 1, 3], [2, 0, 1]])
print("\na =\n", a.array)
print("rank(a) =", mat_rank(a))

inv = mat_invert(a)
print("a^-1 =\n", inv.array)
print("a @ a^-1 == I:", np.array_equal((a @ inv).array, identity(f7, 3).array))

y = np.array([4, 2, 6])
x, null_basis = solve(a, y)
print("solve(a, y) =", x, " unique:", null_basis.shape[0] == 0,
      " check a @ x == y:", np.array_equal(a.apply(x), y))

# ---------------------------------------------------------------------------
# how often is a random square matrix invertible?
# ---------------------------------------------------------------------------

rng = np.random.default_rng(1)
for q, n in ((2, 4), (17, 4)):
    field = PrimeField(q)
    hits = sum(mat_rank(random_matrix(field, n, n, rng)) == n for _ in range(2000))
    print(f"q={q:2d} n={n}: measured {hits / 2000:.3f}  "
          f"formula {invertible_fraction_expected(q, n):.3f}")
