"""Directed relay networks, cuts, layer structure, and time unfolding.

Two network flavors share the graph machinery:

* :class:`NetworkSpec` describes a Gaussian relay network by real channel
  gains on directed edges, with designated sender nodes and one receiver.
* :class:`FiniteFieldNet` describes a linear deterministic network over a
  prime field: each node transmits a symbol vector and each edge applies a
  fixed matrix block, with every node receiving the modular sum of its
  incoming blocks.

Cut values are found by exhaustive enumeration of sender/receiver
bipartitions, guarded by the number of freely assignable nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import gf
from .errors import GuardExceeded
from .shannon import c_awgn, c_plus

# Cut enumeration walks 2**(free nodes) bipartitions.
_FREE_NODE_GUARD = 22


class NetworkError(ValueError):
    """A network description violates one of the structural invariants."""


class Edge(NamedTuple):
    u: str
    v: str
    gain: float


# ---------------------------------------------------------------------------
# graph helpers shared by both network flavors
# ---------------------------------------------------------------------------


def _reachable_from(starts: Iterable[str], adjacency: dict[str, list[str]]) -> set[str]:
    seen = set(starts)
    frontier = list(seen)
    while frontier:
        nxt = []
        for u in frontier:
            for v in adjacency.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def _forward_adjacency(edges: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
    return adj


def _validate_structure(nodes, edges, senders, receiver, kind: str):
    """Checks shared by both network flavors.  ``edges`` iterates (u, v)."""
    if len(set(nodes)) != len(nodes):
        raise NetworkError(f"invariant duplicate-node: repeated node name in {kind}")
    node_set = set(nodes)
    if receiver not in node_set:
        raise NetworkError(f"invariant receiver-declared: {receiver!r} is not a node")
    if not senders:
        raise NetworkError("invariant senders-nonempty: at least one sender required")
    if len(set(senders)) != len(senders):
        raise NetworkError("invariant senders-distinct: repeated sender name")
    for s in senders:
        if s not in node_set:
            raise NetworkError(f"invariant sender-declared: {s!r} is not a node")
    if receiver in senders:
        raise NetworkError(f"invariant receiver-not-sender: {receiver!r} appears in senders")
    seen_pairs = set()
    for u, v in edges:
        if u not in node_set or v not in node_set:
            raise NetworkError(f"invariant edge-endpoints: edge ({u!r}, {v!r}) references unknown node")
        if u == v:
            raise NetworkError(f"invariant no-self-loop: edge ({u!r}, {v!r})")
        if (u, v) in seen_pairs:
            raise NetworkError(f"invariant no-parallel-edges: edge ({u!r}, {v!r}) repeated")
        seen_pairs.add((u, v))


@dataclass(frozen=True)
class NetworkSpec:
    """A Gaussian relay network with real gains and one receiver.

    Invariants: the receiver is not a sender, every node has a directed path
    to the receiver, and every node without incoming edges is a sender.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    senders: tuple[str, ...]
    receiver: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))
        object.__setattr__(self, "edges", tuple(Edge(str(e[0]), str(e[1]), float(e[2])) for e in self.edges))
        object.__setattr__(self, "senders", tuple(str(s) for s in self.senders))
        object.__setattr__(self, "receiver", str(self.receiver))
        _validate_structure(self.nodes, [(e.u, e.v) for e in self.edges],
                            self.senders, self.receiver, "NetworkSpec")
        for e in self.edges:
            if not np.isfinite(e.gain):
                raise NetworkError(f"invariant finite-gain: edge ({e.u!r}, {e.v!r}) has gain {e.gain}")
        # every node reaches the receiver
        back = _forward_adjacency((e.v, e.u) for e in self.edges)
        reaches = _reachable_from([self.receiver], back)
        stranded = [n for n in self.nodes if n not in reaches]
        if stranded:
            raise NetworkError(f"invariant path-to-receiver: node {stranded[0]!r} cannot reach {self.receiver!r}")
        # only senders may lack incoming edges
        has_in = {e.v for e in self.edges}
        orphans = [n for n in self.nodes if n not in has_in and n not in self.senders]
        if orphans:
            raise NetworkError(f"invariant no-incoming-implies-sender: node {orphans[0]!r} has no incoming edge")

    @property
    def K(self) -> int:
        return len(self.senders)

    def gain(self, u: str, v: str) -> float:
        for e in self.edges:
            if e.u == u and e.v == v:
                return e.gain
        raise KeyError(f"no edge ({u!r}, {v!r})")

    def in_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.v == v]

    def out_edges(self, u: str) -> list[Edge]:
        return [e for e in self.edges if e.u == u]


def load_network(text: str) -> NetworkSpec:
    """Parse the JSON network format.

    Expected shape::

        { "nodes": ["t1", ...],
          "edges": [{"from": "t1", "to": "r1", "gain": 1.0}, ...],
          "senders": ["t1", ...],
          "receiver": "d" }
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"network file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkError("network file must hold a JSON object")
    for key in ("nodes", "edges", "senders", "receiver"):
        if key not in doc:
            raise NetworkError(f"network file is missing the {key!r} field")
    edges = []
    for entry in doc["edges"]:
        if not isinstance(entry, dict) or not {"from", "to", "gain"} <= set(entry):
            raise NetworkError(f"edge entries need 'from', 'to' and 'gain', got {entry!r}")
        edges.append(Edge(entry["from"], entry["to"], entry["gain"]))
    return NetworkSpec(tuple(doc["nodes"]), tuple(edges), tuple(doc["senders"]), doc["receiver"])


def dump_network(net: NetworkSpec) -> str:
    doc = {
        "nodes": list(net.nodes),
        "edges": [{"from": e.u, "to": e.v, "gain": e.gain} for e in net.edges],
        "senders": list(net.senders),
        "receiver": net.receiver,
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# canonical topologies
# ---------------------------------------------------------------------------


def mac_network(gains: Iterable[float]) -> NetworkSpec:
    """Single-hop multiple access: K senders into one receiver."""
    gains = [float(g) for g in gains]
    senders = tuple(f"t{i + 1}" for i in range(len(gains)))
    edges = tuple(Edge(s, "d", g) for s, g in zip(senders, gains))
    return NetworkSpec(senders + ("d",), edges, senders, "d")


def orthogonal_network(gains: Iterable[float]) -> NetworkSpec:
    """Single-hop orthogonal links: K senders, each on its own channel.

    Structurally identical to :func:`mac_network`; the difference is the
    cut mode applied to it (``ptp`` instead of ``mac``).
    """
    return mac_network(gains)


def diamond_network(gain: float = 1.0) -> NetworkSpec:
    """Two senders, two relays, one receiver, all six links equal-gain."""
    edges = [
        Edge("t1", "r1", gain), Edge("t1", "r2", gain),
        Edge("t2", "r1", gain), Edge("t2", "r2", gain),
        Edge("r1", "d", gain), Edge("r2", "d", gain),
    ]
    return NetworkSpec(("t1", "t2", "r1", "r2", "d"), tuple(edges), ("t1", "t2"), "d")


# ---------------------------------------------------------------------------
# subnetworks and cuts
# ---------------------------------------------------------------------------


def _sigma_names(net, sigma: Iterable[int] | None) -> tuple[str, ...]:
    if sigma is None:
        return tuple(net.senders)
    idx = sorted(set(int(i) for i in sigma))
    if not idx:
        raise ValueError("sender subset must be nonempty")
    for i in idx:
        if not 0 <= i < len(net.senders):
            raise ValueError(f"sender index {i} out of range [0, {len(net.senders)})")
    return tuple(net.senders[i] for i in idx)


def subnetwork_for(net: NetworkSpec, sigma: Iterable[int] | None = None) -> NetworkSpec:
    """Induced subgraph on the nodes reachable from the senders in ``sigma``.

    ``sigma`` holds 0-based indices into ``net.senders``; None keeps all.
    """
    chosen = _sigma_names(net, sigma)
    fwd = _forward_adjacency((e.u, e.v) for e in net.edges)
    keep = _reachable_from(chosen, fwd)
    nodes = tuple(n for n in net.nodes if n in keep)
    edges = tuple(e for e in net.edges if e.u in keep and e.v in keep)
    senders = tuple(s for s in net.senders if s in chosen)
    return NetworkSpec(nodes, edges, senders, net.receiver)


def _cut_bipartitions(nodes, must_omega, receiver):
    """Yield every Omega with the chosen senders inside and the receiver outside."""
    free = [n for n in nodes if n not in must_omega and n != receiver]
    if len(free) > _FREE_NODE_GUARD:
        raise GuardExceeded(
            f"cut enumeration over {len(free)} free nodes exceeds 2**{_FREE_NODE_GUARD}")
    base = set(must_omega)
    for mask in range(2 ** len(free)):
        omega = set(base)
        for i, n in enumerate(free):
            if mask >> i & 1:
                omega.add(n)
        yield omega


def _ptp_cut_value(sub: NetworkSpec, omega: set[str], P: float) -> float:
    return sum(c_awgn(e.gain * e.gain * P) for e in sub.edges
               if e.u in omega and e.v not in omega)


def _capacity_cut_value(sub: NetworkSpec, omega: set[str]) -> float:
    total = 0.0
    for e in sub.edges:
        if e.u in omega and e.v not in omega:
            if e.gain < 0:
                raise ValueError(f"capacity mode needs nonnegative edge values, got {e.gain}")
            total += e.gain
    return total


def _mac_cut_value(sub: NetworkSpec, omega: set[str], P: float) -> float:
    total = 0.0
    for v in sub.nodes:
        if v in omega:
            continue
        amplitude = sum(abs(e.gain) for e in sub.in_edges(v) if e.u in omega)
        if amplitude > 0:
            total += c_awgn(amplitude * amplitude * P)
    return total


def _mac_forwarding_cut_value(full: NetworkSpec, sub: NetworkSpec, omega: set[str], P: float) -> float:
    # Per-node value of the sum-forwarding abstraction: every node decodes the
    # modular sum of all its incoming streams, so its in-degree and weakest
    # gain are taken in the full network even when the cut lives on G(sigma).
    total = 0.0
    for v in sub.nodes:
        if v in omega:
            continue
        if not any(e.u in omega for e in sub.in_edges(v)):
            continue
        fan_in = full.in_edges(v)
        weakest = min(e.gain * e.gain for e in fan_in)
        total += c_plus(1.0 / len(fan_in) + weakest * P)
    return total


_GAUSSIAN_MODES = ("ptp", "mac", "mac_forwarding", "capacity")


def min_cut(net, sigma: Iterable[int] | None = None, mode: str = "ptp",
            P: float | None = None) -> float:
    """Minimum cut value separating the senders in ``sigma`` from the receiver.

    Modes on a :class:`NetworkSpec` (cut on the subnetwork reachable from
    the chosen senders):

    * ``ptp``: sum of C(h^2 P) over crossing edges,
    * ``mac``: per receiving node, C((sum of crossing |h|)^2 P),
    * ``mac_forwarding``: per receiving node hit by the cut, the
      sum-forwarding value C+(1/indegree + min h^2 P); this is the
      achievability-side cut of the modular forwarding scheme,
    * ``capacity``: crossing edge gains summed as bit capacities.

    Mode ``rank`` applies to a :class:`FiniteFieldNet` and returns the rank
    of the cut transfer matrix minimized over cuts.
    """
    if isinstance(net, FiniteFieldNet):
        if mode != "rank":
            raise ValueError(f"finite-field networks support mode 'rank', got {mode!r}")
        return _min_cut_rank(net, sigma)
    if mode not in _GAUSSIAN_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "capacity":
        if P is None or P <= 0:
            raise ValueError(f"mode {mode!r} needs a positive power P, got {P}")
    sub = subnetwork_for(net, sigma)
    must = set(sub.senders)
    best = float("inf")
    for omega in _cut_bipartitions(sub.nodes, must, sub.receiver):
        if mode == "ptp":
            value = _ptp_cut_value(sub, omega, P)
        elif mode == "capacity":
            value = _capacity_cut_value(sub, omega)
        elif mode == "mac":
            value = _mac_cut_value(sub, omega, P)
        else:
            value = _mac_forwarding_cut_value(net, sub, omega, P)
        best = min(best, value)
    return best


# ---------------------------------------------------------------------------
# layering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Layering:
    """Result of the layer check.

    ``layers`` maps node to 1-based layer; senders sit in layer 1 and the
    receiver alone in the deepest layer.  When the network is not layered,
    ``witness_edge`` or ``witness_node`` names one violation.
    """

    is_layered: bool
    layers: dict[str, int] | None = None
    depth: int | None = None
    witness_edge: tuple[str, str] | None = None
    witness_node: str | None = None


def layering(net) -> Layering:
    """Check whether every path from the senders advances one layer per edge."""
    edges = [(e.u, e.v) for e in net.edges] if isinstance(net, NetworkSpec) \
        else [(u, v) for (u, v) in net.edges]
    fwd = _forward_adjacency(edges)
    layers: dict[str, int] = {s: 1 for s in net.senders}
    frontier = list(net.senders)
    while frontier:
        nxt = []
        for u in frontier:
            for v in fwd.get(u, ()):
                if v not in layers:
                    layers[v] = layers[u] + 1
                    nxt.append(v)
        frontier = nxt
    # Nodes feeding the laid-out part but unreachable from the senders are
    # placed one layer above their shallowest successor.
    pending = [n for n in net.nodes if n not in layers]
    changed = True
    while pending and changed:
        changed = False
        for n in list(pending):
            succ = [layers[v] for v in fwd.get(n, ()) if v in layers]
            if succ:
                layers[n] = min(succ) - 1
                pending.remove(n)
                changed = True
    if pending:
        return Layering(False, witness_node=pending[0])
    for u, v in edges:
        if layers[v] != layers[u] + 1:
            return Layering(False, witness_edge=(u, v))
    for n in net.nodes:
        if n not in net.senders and layers[n] < 2:
            return Layering(False, witness_node=n)
    depth = max(layers.values())
    deepest = [n for n in net.nodes if layers[n] == depth]
    if deepest != [net.receiver]:
        return Layering(False, witness_node=deepest[0])
    return Layering(True, layers=layers, depth=depth)


# ---------------------------------------------------------------------------
# finite-field networks
# ---------------------------------------------------------------------------


class FiniteFieldNet:
    """A linear network over GF(q).

    Node ``u`` transmits a vector of ``alpha[u]`` symbols per use; node ``v``
    receives the modular sum of ``block[(u, v)] @ x_u`` over its in-edges,
    a vector of ``beta[v]`` symbols.  Blocks have shape (beta[v], alpha[u]).
    """

    def __init__(self, field: gf.PrimeField, nodes: Iterable[str],
                 blocks: dict[tuple[str, str], np.ndarray],
                 alpha: dict[str, int], beta: dict[str, int],
                 senders: Iterable[str], receiver: str):
        self.field = field
        self.nodes = tuple(str(n) for n in nodes)
        self.senders = tuple(str(s) for s in senders)
        self.receiver = str(receiver)
        _validate_structure(self.nodes, list(blocks.keys()), self.senders,
                            self.receiver, "FiniteFieldNet")
        self.alpha = {n: int(alpha.get(n, 0)) for n in self.nodes}
        self.beta = {n: int(beta.get(n, 0)) for n in self.nodes}
        for n in self.nodes:
            if self.alpha[n] < 0 or self.beta[n] < 0:
                raise NetworkError(f"invariant width-nonnegative: node {n!r}")
        self.blocks: dict[tuple[str, str], np.ndarray] = {}
        for (u, v), block in blocks.items():
            arr = field.reduce(block)
            if arr.shape != (self.beta[v], self.alpha[u]):
                raise NetworkError(
                    f"invariant block-shape: edge ({u!r}, {v!r}) block {arr.shape} "
                    f"should be ({self.beta[v]}, {self.alpha[u]})")
            arr.setflags(write=False)
            self.blocks[(u, v)] = arr

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(self.blocks.keys())

    @property
    def K(self) -> int:
        return len(self.senders)

    def in_neighbors(self, v: str) -> list[str]:
        return [u for (u, w) in self.blocks if w == v]

    def out_neighbors(self, u: str) -> list[str]:
        return [w for (t, w) in self.blocks if t == u]

    def __repr__(self):
        return (f"FiniteFieldNet(GF({self.field.q}), {len(self.nodes)} nodes, "
                f"{len(self.blocks)} edges)")


def subnetwork_for_field(net: FiniteFieldNet, sigma: Iterable[int] | None = None) -> FiniteFieldNet:
    """Restriction of a finite-field net to nodes reachable from ``sigma``."""
    chosen = _sigma_names(net, sigma)
    fwd = _forward_adjacency(net.blocks.keys())
    keep = _reachable_from(chosen, fwd)
    nodes = tuple(n for n in net.nodes if n in keep)
    blocks = {(u, v): b for (u, v), b in net.blocks.items() if u in keep and v in keep}
    senders = tuple(s for s in net.senders if s in chosen)
    return FiniteFieldNet(net.field, nodes, blocks,
                          {n: net.alpha[n] for n in nodes},
                          {n: net.beta[n] for n in nodes},
                          senders, net.receiver)


def _min_cut_rank(net: FiniteFieldNet, sigma: Iterable[int] | None) -> int:
    sub = subnetwork_for_field(net, sigma)
    must = set(sub.senders)
    best = None
    for omega in _cut_bipartitions(sub.nodes, must, sub.receiver):
        crossing = [(u, v) for (u, v) in sub.blocks if u in omega and v not in omega]
        if not crossing:
            best = 0 if best is None else min(best, 0)
            continue
        rx = sorted({v for _, v in crossing}, key=sub.nodes.index)
        tx = sorted({u for u, _ in crossing}, key=sub.nodes.index)
        row_off = {v: off for v, off in zip(rx, np.cumsum([0] + [sub.beta[v] for v in rx])[:-1])}
        col_off = {u: off for u, off in zip(tx, np.cumsum([0] + [sub.alpha[u] for u in tx])[:-1])}
        mat = np.zeros((sum(sub.beta[v] for v in rx), sum(sub.alpha[u] for u in tx)),
                       dtype=np.int64)
        for (u, v) in crossing:
            block = sub.blocks[(u, v)]
            mat[row_off[v]:row_off[v] + sub.beta[v], col_off[u]:col_off[u] + sub.alpha[u]] = block
        rank = gf.mat_rank(gf.FieldMatrix(net.field, mat)) if mat.size else 0
        best = rank if best is None else min(best, rank)
    return int(best) if best is not None else 0


# ---------------------------------------------------------------------------
# lifting Gaussian networks to finite-field form
# ---------------------------------------------------------------------------


def lift_ptp(net: NetworkSpec, field: gf.PrimeField,
             edge_width: int | dict[tuple[str, str], int] = 1) -> FiniteFieldNet:
    """Finite-field view of an orthogonal-link network.

    Each directed link carries its own stream of ``edge_width`` symbols;
    a node's transmit vector concatenates its outgoing streams and its
    receive vector concatenates its incoming streams, so the edge blocks
    are plain routing (selection) matrices.
    """
    def width(e: Edge) -> int:
        if isinstance(edge_width, dict):
            return int(edge_width[(e.u, e.v)])
        return int(edge_width)

    out_off: dict[tuple[str, str], int] = {}
    in_off: dict[tuple[str, str], int] = {}
    alpha = {n: 0 for n in net.nodes}
    beta = {n: 0 for n in net.nodes}
    for n in net.nodes:
        run = 0
        for e in net.out_edges(n):
            out_off[(e.u, e.v)] = run
            run += width(e)
        alpha[n] = run
        run = 0
        for e in net.in_edges(n):
            in_off[(e.u, e.v)] = run
            run += width(e)
        beta[n] = run
    blocks = {}
    for e in net.edges:
        w = width(e)
        block = np.zeros((beta[e.v], alpha[e.u]), dtype=np.int64)
        r, c = in_off[(e.u, e.v)], out_off[(e.u, e.v)]
        block[r:r + w, c:c + w] = np.eye(w, dtype=np.int64)
        blocks[(e.u, e.v)] = block
    return FiniteFieldNet(field, net.nodes, blocks, alpha, beta, net.senders, net.receiver)


def lift_mac(net: NetworkSpec, field: gf.PrimeField,
             node_width: int | dict[str, int] = 1) -> FiniteFieldNet:
    """Finite-field view of a network of multiple-access components.

    Each node ``v`` decodes one ``node_width[v]``-symbol stream equal to the
    modular sum of the streams its in-neighbors address to it; a node's
    transmit vector concatenates one stream per out-neighbor.
    """
    def width(v: str) -> int:
        if isinstance(node_width, dict):
            return int(node_width[v])
        return int(node_width)

    beta = {n: (width(n) if net.in_edges(n) else 0) for n in net.nodes}
    out_off: dict[tuple[str, str], int] = {}
    alpha = {n: 0 for n in net.nodes}
    for n in net.nodes:
        run = 0
        for e in net.out_edges(n):
            out_off[(e.u, e.v)] = run
            run += beta[e.v]
        alpha[n] = run
    blocks = {}
    for e in net.edges:
        w = beta[e.v]
        block = np.zeros((w, alpha[e.u]), dtype=np.int64)
        c = out_off[(e.u, e.v)]
        block[:, c:c + w] = np.eye(w, dtype=np.int64)
        blocks[(e.u, e.v)] = block
    return FiniteFieldNet(field, net.nodes, blocks, alpha, beta, net.senders, net.receiver)


def diamond_field_net(field: gf.PrimeField) -> FiniteFieldNet:
    """Canonical finite-field diamond: relay sum-channels of width 2, final
    sum-channel of width 3.

    The widened last hop keeps the relay stage injective for almost every
    draw, so random coding on this net is full rank for both senders about
    as often as two independent uniform square matrices are invertible.
    Equal widths would insert extra square random factors and drag that
    probability well below the concentration regime.
    """
    return lift_mac(diamond_network(), field,
                    node_width={"r1": 2, "r2": 2, "d": 3})


# ---------------------------------------------------------------------------
# time unfolding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnfoldedNet:
    """A layered copy-expansion of a finite-field network over T time steps.

    Stage 0 holds fresh sender copies, stages 1..T hold one copy of every
    node, and stage T+1 holds the receiver copy.  Memory edges carry
    ``memory_width`` symbols between consecutive copies of the same node;
    channel edges repeat the original blocks between consecutive stages.
    ``tau`` is the end-to-end symbol budget (T - |V|) * r_min guaranteed
    across every sender cut.
    """

    net: FiniteFieldNet
    T: int
    tau: int
    memory_width: int
    stage: dict[str, int]
    memory_edges: frozenset[tuple[str, str]]
    memory_capacity_bits: float


def unfold(net: FiniteFieldNet, T: int, c_min: int | None = None) -> UnfoldedNet:
    """Unfold ``net`` over ``T`` steps into a layered network.

    ``c_min`` is the per-step memory budget in symbols; it defaults to the
    smallest per-sender rank min-cut, which is also the r_min entering the
    ``tau`` bookkeeping.  Requires ``T > |V|``.
    """
    n_nodes = len(net.nodes)
    if T <= n_nodes:
        raise ValueError(f"unfolding needs T > |V| = {n_nodes}, got T = {T}")
    r_min = min(min_cut(net, [i], "rank") for i in range(net.K))
    if c_min is None:
        c_min = r_min
    c_min = int(c_min)
    if c_min < 1:
        raise ValueError(f"memory budget must be at least 1 symbol, got {c_min}"
                         + (" (a sender cut carries no rank)" if r_min < 1 else ""))
    w = T * c_min
    tau = (T - n_nodes) * r_min

    def copy_name(v: str, j: int) -> str:
        return f"{v}[{j}]"

    stage: dict[str, int] = {}
    nodes: list[str] = []
    for s in net.senders:
        name = copy_name(s, 0)
        nodes.append(name)
        stage[name] = 0
    for j in range(1, T + 1):
        for v in net.nodes:
            name = copy_name(v, j)
            nodes.append(name)
            stage[name] = j
    sink = copy_name(net.receiver, T + 1)
    nodes.append(sink)
    stage[sink] = T + 1

    def mem_out(v: str, j: int) -> bool:
        if j == 0:
            return v in net.senders
        return j < T or (v == net.receiver and j == T)

    def mem_in(v: str, j: int) -> bool:
        if j == 0:
            return False
        if j == 1:
            return v in net.senders
        return True

    alpha: dict[str, int] = {}
    beta: dict[str, int] = {}
    for name in nodes:
        base, j = name.rsplit("[", 1)
        j = int(j[:-1])
        if j == 0:
            alpha[name], beta[name] = w, 0
            continue
        if j == T + 1:
            alpha[name], beta[name] = 0, w
            continue
        alpha[name] = (w if mem_out(base, j) else 0) + (net.alpha[base] if j < T else 0)
        beta[name] = (w if mem_in(base, j) else 0) + (net.beta[base] if j >= 2 else 0)

    blocks: dict[tuple[str, str], np.ndarray] = {}
    memory: set[tuple[str, str]] = set()

    def add_memory(u_name: str, v_name: str):
        block = np.zeros((beta[v_name], alpha[u_name]), dtype=np.int64)
        block[:w, :w] = np.eye(w, dtype=np.int64)
        blocks[(u_name, v_name)] = block
        memory.add((u_name, v_name))

    for s in net.senders:
        add_memory(copy_name(s, 0), copy_name(s, 1))
    for j in range(1, T):
        for v in net.nodes:
            add_memory(copy_name(v, j), copy_name(v, j + 1))
    add_memory(copy_name(net.receiver, T), sink)

    for j in range(1, T):
        for (u, v), base_block in net.blocks.items():
            u_name, v_name = copy_name(u, j), copy_name(v, j + 1)
            block = np.zeros((beta[v_name], alpha[u_name]), dtype=np.int64)
            r = w if mem_in(v, j + 1) else 0
            c = w if mem_out(u, j) else 0
            block[r:r + net.beta[v], c:c + net.alpha[u]] = base_block
            blocks[(u_name, v_name)] = block

    senders = tuple(copy_name(s, 0) for s in net.senders)
    unfolded = FiniteFieldNet(net.field, nodes, blocks, alpha, beta, senders, sink)
    bits = w * float(np.log2(net.field.q))
    return UnfoldedNet(unfolded, T, tau, w, stage, frozenset(memory), bits)
