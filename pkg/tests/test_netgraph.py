import json
import math

import numpy as np
import pytest

from compnet.errors import GuardExceeded
from compnet.gf import PrimeField
from compnet.netgraph import (
    Edge,
    FiniteFieldNet,
    NetworkError,
    NetworkSpec,
    diamond_network,
    dump_network,
    layering,
    lift_mac,
    lift_ptp,
    load_network,
    mac_network,
    min_cut,
    orthogonal_network,
    subnetwork_for,
    subnetwork_for_field,
    unfold,
)
from compnet.shannon import c_awgn, c_plus


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_builtin_topologies():
    mac = mac_network([1.0, 2.0, 0.5])
    assert mac.K == 3 and len(mac.edges) == 3
    orth = orthogonal_network([1.0, 1.0])
    assert orth.K == 2 and len(orth.edges) == 2
    dia = diamond_network()
    assert dia.K == 2 and len(dia.edges) == 6 and dia.receiver == "d"


def test_rejects_receiver_as_sender():
    with pytest.raises(NetworkError):
        NetworkSpec(("a",), (), ("a",), "a")


def test_rejects_node_with_no_route_to_receiver():
    edges = (Edge("s", "d", 1.0), Edge("s", "x", 1.0))
    with pytest.raises(NetworkError):
        NetworkSpec(("s", "x", "d"), edges, ("s",), "d")


def test_rejects_bare_intermediate_node():
    # a non-sender with no incoming edge can never carry information
    edges = (Edge("s", "d", 1.0), Edge("x", "d", 1.0))
    with pytest.raises(NetworkError):
        NetworkSpec(("s", "x", "d"), edges, ("s",), "d")


def test_rejects_self_loop_parallel_edges_and_bad_gain():
    with pytest.raises(NetworkError):
        NetworkSpec(("s", "d"), (Edge("s", "s", 1.0), Edge("s", "d", 1.0)), ("s",), "d")
    with pytest.raises(NetworkError):
        NetworkSpec(("s", "d"), (Edge("s", "d", 1.0), Edge("s", "d", 2.0)), ("s",), "d")
    with pytest.raises(NetworkError):
        NetworkSpec(("s", "d"), (Edge("s", "d", math.inf),), ("s",), "d")


def test_network_json_round_trip():
    net = diamond_network(1.5)
    text = dump_network(net)
    parsed = json.loads(text)
    assert set(parsed) == {"nodes", "edges", "senders", "receiver"}
    back = load_network(text)
    assert back.nodes == net.nodes
    assert back.edges == net.edges
    assert back.senders == net.senders
    assert back.receiver == net.receiver


def test_load_network_rejects_missing_keys():
    with pytest.raises(ValueError):
        load_network("{}")
    with pytest.raises(ValueError):
        load_network(json.dumps({"nodes": ["a"], "edges": [], "senders": ["a"]}))


# ---------------------------------------------------------------------------
# subnetworks
# ---------------------------------------------------------------------------


def test_subnetwork_keeps_reachable_nodes_only():
    net = diamond_network()
    sub = subnetwork_for(net, [0])
    assert sub.senders == ("t1",)
    assert "t2" not in sub.nodes
    assert {"t1", "r1", "r2", "d"} == set(sub.nodes)
    full = subnetwork_for(net, None)
    assert full.nodes == net.nodes


def test_subnetwork_rejects_bad_indices():
    net = diamond_network()
    with pytest.raises(ValueError):
        subnetwork_for(net, [2])
    with pytest.raises(ValueError):
        subnetwork_for(net, [])


# ---------------------------------------------------------------------------
# cuts on Gaussian networks
# ---------------------------------------------------------------------------


def test_ptp_cut_on_single_hop_is_sum_of_links():
    gains = [1.0, 2.0, 0.5]
    net = mac_network(gains)
    P = 10.0
    for i, g in enumerate(gains):
        assert min_cut(net, [i], "ptp", P) == pytest.approx(c_awgn(g * g * P))
    assert min_cut(net, None, "ptp", P) == pytest.approx(
        sum(c_awgn(g * g * P) for g in gains))


def test_mac_cut_on_single_hop_adds_amplitudes():
    gains = [1.0, 2.0]
    net = mac_network(gains)
    P = 5.0
    assert min_cut(net, None, "mac", P) == pytest.approx(c_awgn((1.0 + 2.0) ** 2 * P))


def test_mac_cut_on_diamond_bottlenecks_at_receiver():
    net = diamond_network()
    P = 31.622776601683793  # 15 dB
    # the receiver-side cut dominates: both relays add coherently
    assert min_cut(net, [0], "mac", P) == pytest.approx(c_awgn(4 * P))
    assert min_cut(net, None, "mac", P) == pytest.approx(c_awgn(4 * P))


def test_mac_forwarding_matches_compute_forward_bottleneck():
    rng = np.random.default_rng(2)
    for _ in range(10):
        K = int(rng.integers(2, 6))
        gains = rng.uniform(0.5, 2.0, size=K)
        net = mac_network(gains.tolist())
        P = float(rng.uniform(0.5, 20.0))
        want = c_plus(1.0 / K + float(np.min(gains ** 2)) * P)
        for i in range(K):
            assert min_cut(net, [i], "mac_forwarding", P) == pytest.approx(want)


def test_capacity_cut_counts_integer_pipes():
    net = diamond_network()
    assert min_cut(net, None, "capacity", 1.0) == 2
    assert min_cut(net, [0], "capacity", 1.0) == 2
    chain = NetworkSpec(("s", "m", "d"),
                        (Edge("s", "m", 3.0), Edge("m", "d", 1.0)), ("s",), "d")
    assert min_cut(chain, None, "capacity", 1.0) == 1


def test_cut_modes_reject_unknown_and_guard_large_nets():
    net = diamond_network()
    with pytest.raises(ValueError):
        min_cut(net, None, "waterfall", 1.0)
    # 24 relay hops leave more than 22 free nodes to enumerate
    nodes = ["s"] + [f"m{i}" for i in range(24)] + ["d"]
    edges = [Edge("s", "m0", 1.0)]
    edges += [Edge(f"m{i}", f"m{i+1}", 1.0) for i in range(23)]
    edges += [Edge("m23", "d", 1.0)]
    big = NetworkSpec(tuple(nodes), tuple(edges), ("s",), "d")
    with pytest.raises(GuardExceeded):
        min_cut(big, None, "ptp", 1.0)


# ---------------------------------------------------------------------------
# layering
# ---------------------------------------------------------------------------


def test_layering_of_builtin_nets():
    lay = layering(mac_network([1.0, 1.0]))
    assert lay.is_layered and lay.depth == 2
    lay = layering(diamond_network())
    assert lay.is_layered and lay.depth == 3
    assert lay.layers["t1"] == 1 and lay.layers["r2"] == 2 and lay.layers["d"] == 3


def test_layering_detects_skip_edges():
    edges = diamond_network().edges + (Edge("t1", "d", 1.0),)
    net = NetworkSpec(diamond_network().nodes, edges, ("t1", "t2"), "d")
    lay = layering(net)
    assert not lay.is_layered
    assert lay.witness_edge is not None


# ---------------------------------------------------------------------------
# finite-field networks
# ---------------------------------------------------------------------------


def _tiny_field_net(q=5):
    # s1, s2 -> r -> d; the relay hears each sender on its own slot but
    # forwards a single symbol, so the relay pipe is the bottleneck
    field = PrimeField(q)
    blocks = {
        ("s1", "r"): np.array([[1], [0]]),
        ("s2", "r"): np.array([[0], [1]]),
        ("r", "d"): np.array([[1]]),
    }
    alpha = {"s1": 1, "s2": 1, "r": 1, "d": 0}
    beta = {"s1": 0, "s2": 0, "r": 2, "d": 1}
    return FiniteFieldNet(field, ("s1", "s2", "r", "d"), blocks, alpha, beta,
                          ("s1", "s2"), "d")


def test_field_net_shapes_and_neighbors():
    net = _tiny_field_net()
    assert net.K == 2
    assert net.in_neighbors("r") == ["s1", "s2"]
    assert net.out_neighbors("s1") == ["r"]
    assert ("s1", "r") in net.edges


def test_field_net_rejects_inconsistent_blocks():
    field = PrimeField(5)
    blocks = {("s", "d"): np.array([[1, 0]])}  # widths disagree with alpha
    with pytest.raises(ValueError):
        FiniteFieldNet(field, ("s", "d"), blocks, {"s": 1, "d": 0}, {"s": 0, "d": 1},
                       ("s",), "d")


def test_rank_cut_on_lifted_diamond():
    net = lift_ptp(diamond_network(), PrimeField(7))
    assert min_cut(net, [0], "rank") == 2
    assert min_cut(net, None, "rank") == 2
    sub = subnetwork_for_field(net, [0])
    assert sub.K == 1 and "t2" not in sub.nodes


def test_lift_ptp_dimensions_follow_degrees():
    net = diamond_network()
    lifted = lift_ptp(net, PrimeField(3))
    assert lifted.alpha["t1"] == 2  # two outgoing unit-width links
    assert lifted.beta["d"] == 2
    assert lifted.beta["t1"] == 0 and lifted.alpha["d"] == 0


def test_lift_mac_merges_fan_in():
    net = diamond_network()
    lifted = lift_mac(net, PrimeField(3))
    # each receiving node decodes one modular sum per unit width
    assert lifted.beta["r1"] == 1
    assert lifted.beta["d"] == 1
    assert lifted.alpha["t1"] == 2


def test_rank_cut_on_tiny_relay_net():
    net = _tiny_field_net()
    assert min_cut(net, None, "rank") == 1  # relay pipe is the bottleneck
    assert min_cut(net, [0], "rank") == 1


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------


def _skip_field_net(q=5):
    # a -> b -> d plus a direct a -> d edge; path lengths disagree, so the
    # net is not layered and must be unfolded before coding
    field = PrimeField(q)
    blocks = {
        ("a", "b"): np.array([[1, 0]]),
        ("b", "d"): np.array([[1], [0]]),
        ("a", "d"): np.array([[0, 0], [0, 1]]),
    }
    alpha = {"a": 2, "b": 1, "d": 0}
    beta = {"a": 0, "b": 1, "d": 2}
    return FiniteFieldNet(field, ("a", "b", "d"), blocks, alpha, beta, ("a",), "d")


def test_skip_net_is_not_layered():
    assert not layering(_skip_field_net()).is_layered


def test_unfold_requires_more_steps_than_nodes():
    net = _skip_field_net()
    with pytest.raises(ValueError):
        unfold(net, 3)


def test_unfold_produces_layered_net_with_budget():
    net = _skip_field_net()
    # every sender cut of the original has rank 2, so r_min = 2
    out = unfold(net, 7)
    assert out.T == 7
    lay = layering(out.net)
    assert lay.is_layered
    assert out.tau == (7 - 3) * 2
    assert out.memory_capacity_bits > 0
    assert len(out.memory_edges) > 0
    # stage labels cover sender copies through the receiver copy
    assert min(out.stage.values()) == 0
    assert out.stage[out.net.receiver] == 7 + 1
