"""Rate formulas: computing a sum over an adder channel vs classic schemes.

Reproduces the headline comparisons as printed tables.  The CLI writes
the same numbers as CSV, e.g.:

    compnet rates mac-sum --power-db 15 --k-max 30 --out mac_sum.csv
    compnet rates dsbs-orthogonal --power-db 15 --alpha-grid 0:0.5:0.05 --out dsbs.csv
    compnet rates superposition --power-db 15 --h2-grid 1:3:0.25 --out sup.csv
"""

from compnet.rates import (
    dsbs_orthogonal_sweep,
    mac_sum_sweep,
    superposition_sweep,
)
from compnet.shannon import db_to_linear

P15 = db_to_linear(15.0)

# ---------------------------------------------------------------------------
# many senders, one adder: computation beats separation once K >= 3
# ---------------------------------------------------------------------------

print("sum of K fair bits over an equal-gain Gaussian adder at 15 dB")
print(f"{'K':>3} {'computation':>12} {'separation':>11} {'cutset':>8}")
for row in mac_sum_sweep(P15, 10):
    print(f"{row['K']:>3} {row['computation']:>12.4f} "
          f"{row['separation']:>11.4f} {row['cutset']:>8.4f}")

# ---------------------------------------------------------------------------
# correlated pair over orthogonal links: hybrid covers both endpoints
# ---------------------------------------------------------------------------

print("\ncorrelated binary pair, orthogonal unit-gain links, 15 dB")
print(f"{'alpha':>6} {'hybrid':>8} {'separation':>11} {'linear':>8} {'cutset':>8}")
for row in dsbs_orthogonal_sweep(P15, [0.05, 0.15, 0.25, 0.35, 0.45]):
    print(f"{row['alpha']:>6.2f} {row['hybrid']:>8.4f} {row['separation']:>11.4f} "
          f"{row['linear']:>8.4f} {row['cutset']:>8.4f}")

# ---------------------------------------------------------------------------
# unequal gains: layering a private stream on the stronger sender pays
# ---------------------------------------------------------------------------

print("\ntwo-sender adder with gains (1, h2) at 15 dB")
print(f"{'h2':>5} {'superposition':>14} {'equal_layer':>12}")
for row in superposition_sweep(P15, [1.0, 1.5, 2.0, 2.5, 3.0]):
    print(f"{row['h2']:>5.2f} {row['superposition']:>14.4f} {row['equal_layer']:>12.4f}")
