"""Source models and the functions computed over them.

Senders observe correlated discrete symbols; the receiver wants a
function of the whole tuple, not the tuple itself.  The gap between
H(sources) and H(function) is where in-network computation wins.
"""

import numpy as np

from compnet.rng import substream
from compnet.sources import (
    ArithmeticSum,
    IIDSource,
    TypeFunction,
    build_source,
    conditional_entropy,
    function_pmf,
    joint_entropy,
    sample,
    unit_sum,
)

# ---------------------------------------------------------------------------
# independent senders
# ---------------------------------------------------------------------------

iid = IIDSource(2, 3)
print("three i.i.d. fair bits, joint entropy:", joint_entropy(iid), "bits")

total = unit_sum(2, 3)
fp = function_pmf(iid, total)
print("integer sum takes values", fp.support.ravel().tolist(),
      "with probabilities", np.round(fp.probs, 4).tolist())
print("H(sum) =", round(fp.entropy(), 6), "bits vs 3 bits for the full tuple")

# ---------------------------------------------------------------------------
# correlated pair
# ---------------------------------------------------------------------------

pair = build_source("dsbs", alpha=0.25)
print("\ncorrelated binary pair, flip probability 0.25")
print("H(S1, S2) =", round(joint_entropy(pair), 6))
print("H(S1 | S2) =", round(conditional_entropy(pair, [0], [1]), 6))
print("H(S1 + S2) =", round(function_pmf(pair, unit_sum(2, 2)).entropy(), 6))

# ---------------------------------------------------------------------------
# weighted sums and histograms
# ---------------------------------------------------------------------------

weighted = ArithmeticSum(2, [[1, 1, 0], [0, 1, 1]])
block = sample(iid, 8, substream(2))
print("\nsampled block (one row per sender):\n", block)
print("two weighted sums of it:\n", weighted.apply(block))

hist = TypeFunction(2)
print("symbol histogram per position:\n", hist.apply(block))
print("histogram rows always add up to the sender count:",
      (hist.apply(block).sum(axis=0) == 3).all())
