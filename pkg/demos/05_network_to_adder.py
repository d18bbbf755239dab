"""Turning a coded relay network into a clean modulo-q adder.

Random linear coding at every node gives each sender an end-to-end
transfer matrix.  When all of them are invertible, precoding by the
inverses makes the whole network act as one big modulo-q sum of the
sender payloads, which is exactly the channel the function codes want.
"""

import numpy as np

from compnet import netgraph
from compnet.gf import PrimeField, invertible_fraction_expected
from compnet.rng import substream
from compnet.transform import (
    assign_random_code,
    draw_identity_channel,
    end_to_end_matrices,
    precode_and_channel,
)

# ---------------------------------------------------------------------------
# one draw, inspected step by step
# ---------------------------------------------------------------------------

field = PrimeField(17)
net = netgraph.diamond_field_net(field)
code = assign_random_code(net, n=2, tau=2, rng=substream(0))
chan = end_to_end_matrices(code)
print("per-sender end-to-end matrices:",
      {s: m.shape for s, m in zip(net.senders, chan.matrices)})
print("all full rank:", chan.all_full_rank)

adapter = precode_and_channel(code, chan)
rng = np.random.default_rng(1)
payload = rng.integers(0, 17, size=(2, adapter.width, 5), dtype=np.int64)
print("adapter output equals the mod-17 payload sum:",
      np.array_equal(adapter.transmit(payload), payload.sum(axis=0) % 17))

# ---------------------------------------------------------------------------
# how often does a random draw succeed?
# ---------------------------------------------------------------------------

trials = 300
for q in (2, 5, 17):
    ffnet = netgraph.diamond_field_net(PrimeField(q))
    full = sum(end_to_end_matrices(assign_random_code(ffnet, 2, 2, substream(s))).all_full_rank
               for s in range(trials))
    print(f"q={q:2d}: full-rank fraction {full / trials:.3f}  "
          f"(two independent square draws: {invertible_fraction_expected(q, 4) ** 2:.3f})")

# ---------------------------------------------------------------------------
# the redraw helper bundles the loop
# ---------------------------------------------------------------------------

adapter, draws = draw_identity_channel(netgraph.diamond_field_net(PrimeField(5)),
                                       n=2, tau=2, rng=substream(9))
print(f"\nidentity channel found after {draws} draw(s), width {adapter.width}")
