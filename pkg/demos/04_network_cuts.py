"""Relay networks: cut values, layer structure, and time unfolding.

A network is described by directed edges with real gains.  Cut values
under different abstractions bound what any scheme can push through;
the layer check and unfolding prepare a graph for linear network coding.
"""

from compnet import netgraph
from compnet.gf import PrimeField
from compnet.shannon import db_to_linear

P15 = db_to_linear(15.0)

# ---------------------------------------------------------------------------
# the two-relay diamond
# ---------------------------------------------------------------------------

net = netgraph.diamond_network()
print("nodes:", net.nodes)
print("edges:", [(e.u, e.v) for e in net.edges])

for mode in ("ptp", "mac", "mac_forwarding"):
    value = netgraph.min_cut(net, [0], mode, P15)
    print(f"min cut separating sender t1, mode {mode:>15}: {value:.4f} bits")
print("edge-count cut (capacity mode):", netgraph.min_cut(net, [0], "capacity"))

# serialization round-trips through plain JSON
text = netgraph.dump_network(net)
assert netgraph.load_network(text).edges == net.edges
print("\nJSON round-trip ok,", len(text), "bytes")

# ---------------------------------------------------------------------------
# layering and unfolding
# ---------------------------------------------------------------------------

field = PrimeField(5)
layered = netgraph.lift_ptp(net, field)
check = netgraph.layering(layered)
print("\ndiamond is layered:", check.is_layered, "layers:", check.layers)

# add a layer-skipping shortcut and repair it by unfolding in time
skip = netgraph.NetworkSpec(net.nodes, net.edges + (netgraph.Edge("t1", "d", 1.0),),
                            net.senders, net.receiver)
lifted = netgraph.lift_ptp(skip, field)
print("with a t1->d shortcut, layered:", netgraph.layering(lifted).is_layered)
unfolded = netgraph.unfold(lifted, 6)
print("after unfolding 6 stages:", netgraph.layering(unfolded.net).is_layered,
      f"({len(unfolded.net.nodes)} nodes)")

# ---------------------------------------------------------------------------
# finite-field rank cuts
# ---------------------------------------------------------------------------

ffnet = netgraph.diamond_field_net(PrimeField(17))
for sender in (0, 1):
    print(f"rank min-cut for sender {ffnet.senders[sender]}:",
          netgraph.min_cut(ffnet, [sender], "rank"))
