"""Linear transform coding over layered finite-field networks.

Every node applies one linear map per block: senders encode a message of
``n * tau`` field symbols, relays re-encode what they hear, and the
receiver applies a decoding map.  Because every operation is linear, the
end-to-end action on sender i is a single matrix G_i; when all G_i are
invertible, precoding by their inverses turns the whole network into an
ideal modulo-q adder for the messages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import netgraph
from .errors import ConfigError
from .gf import FieldMatrix, PrimeField, mat_invert, matrix, random_matrix
from .shannon import c_awgn, c_plus


def _kron_identity(block: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return block
    return np.kron(np.eye(n, dtype=np.int64), block)


@dataclass(frozen=True)
class LinearNetCode:
    """One draw of linear maps for every node of a layered network.

    ``encoders[t]`` has shape (n*alpha_t, n*tau), ``relays[v]`` shape
    (n*alpha_v, n*beta_v), and ``decoder`` shape (n*tau, n*beta_d).  The
    channel blocks act per use; stacking ``n`` uses block-diagonally lets
    the node maps mix across uses.
    """

    net: netgraph.FiniteFieldNet
    n: int
    tau: int
    encoders: dict
    relays: dict
    decoder: FieldMatrix
    layer_order: tuple

    @property
    def field(self) -> PrimeField:
        return self.net.field

    @property
    def message_symbols(self) -> int:
        return self.n * self.tau


_STRICT_CUT_NODES = 18


def assign_random_code(net: netgraph.FiniteFieldNet, n: int, tau: int,
                       rng: Optional[np.random.Generator] = None) -> LinearNetCode:
    """Draw uniform node maps for ``net``: block length ``n``, width ``tau``.

    The network must be layered, and ``tau`` may not exceed the smallest
    single-sender min-cut rank (the guaranteed end-to-end dimension).  Cut
    enumeration is exponential in the node count, so that precondition is
    verified only on nets of at most 18 nodes; larger nets (typically the
    output of unfold, which guarantees its own budget) are trusted.
    """
    if rng is None:
        raise ValueError("an explicit random generator is required")
    if n < 1 or tau < 1:
        raise ConfigError(f"need n >= 1 and tau >= 1, got n={n}, tau={tau}")
    lay = netgraph.layering(net)
    if not lay.is_layered:
        raise ConfigError(f"network is not layered (witness: {lay.witness_edge or lay.witness_node})")
    if len(net.nodes) <= _STRICT_CUT_NODES:
        floor = min(netgraph.min_cut(net, [i], "rank") for i in range(net.K))
        if tau > floor:
            raise ConfigError(f"tau={tau} exceeds the smallest single-sender cut rank {floor}")

    q = net.field.q
    encoders = {}
    relays = {}
    for t in net.senders:
        encoders[t] = random_matrix(net.field, n * net.alpha[t], n * tau, rng)
    order = sorted((v for v in net.nodes if v not in net.senders and v != net.receiver),
                   key=lambda v: (lay.layers[v], net.nodes.index(v)))
    for v in order:
        alpha, beta = net.alpha[v], net.beta[v]
        if alpha and beta:
            relays[v] = random_matrix(net.field, n * alpha, n * beta, rng)
    decoder = random_matrix(net.field, n * tau, n * net.beta[net.receiver], rng)
    full_order = tuple(list(net.senders) + order + [net.receiver])
    return LinearNetCode(net, n, tau, encoders, relays, decoder, full_order)


class PropagationResult(NamedTuple):
    """Receiver-side signals: raw symbols heard, and the decoder's output."""

    received: np.ndarray
    decoded: np.ndarray


def propagate(code: LinearNetCode, messages: np.ndarray) -> PropagationResult:
    """Push a batch of sender messages through the network layer by layer.

    ``messages`` has shape (K, n*tau, batch) with entries in [0, q).
    Returns both the receiver's raw block (shape (n*beta_d, batch), before
    its decoding map) and the decoded block (shape (n*tau, batch)).
    """
    net = code.net
    q = net.field.q
    messages = np.asarray(messages, dtype=np.int64)
    expected = (net.K, code.message_symbols)
    if messages.ndim != 3 or messages.shape[:2] != expected:
        raise ValueError(f"messages must have shape ({expected[0]}, {expected[1]}, batch), "
                         f"got {messages.shape}")
    if np.any(messages < 0) or np.any(messages >= q):
        raise ValueError(f"message symbols must lie in [0, {q})")

    batch = messages.shape[2]
    sent: dict = {}
    for idx, t in enumerate(net.senders):
        sent[t] = code.encoders[t].apply(messages[idx])
    for v in code.layer_order:
        if v in net.senders:
            continue
        beta = net.beta[v]
        if beta == 0:
            continue
        y = np.zeros((code.n * beta, batch), dtype=np.int64)
        for u in net.in_neighbors(v):
            if u not in sent:
                continue
            block = _kron_identity(net.blocks[(u, v)], code.n)
            y = (y + matrix(net.field, block).apply(sent[u])) % q
        if v == net.receiver:
            return PropagationResult(y, code.decoder.apply(y))
        if v in code.relays:
            sent[v] = code.relays[v].apply(y)
    raise RuntimeError("receiver was never reached during propagation")


@dataclass(frozen=True)
class EndToEndChannel:
    """Per-sender end-to-end matrices of a linear network code.

    ``matrices[i]`` maps sender i's message to its additive contribution at
    the decoder output; ``full_rank[i]`` says whether that map is
    invertible, and ``inverses[i]`` holds the inverse when it is.
    """

    matrices: tuple
    full_rank: tuple
    inverses: tuple

    @property
    def all_full_rank(self) -> bool:
        return all(self.full_rank)


def end_to_end_matrices(code: LinearNetCode) -> EndToEndChannel:
    """Extract the maps G_i with decoded block = sum_i G_i w_i.

    Each G_i is read off by propagating the identity batch for sender i
    with every other sender silent.
    """
    m = code.message_symbols
    mats, flags, invs = [], [], []
    for i in range(code.net.K):
        probe = np.zeros((code.net.K, m, m), dtype=np.int64)
        probe[i] = np.eye(m, dtype=np.int64)
        g = matrix(code.net.field, propagate(code, probe).decoded)
        inv = mat_invert(g)
        mats.append(g)
        flags.append(inv is not None)
        invs.append(inv)
    return EndToEndChannel(tuple(mats), tuple(flags), tuple(invs))


class ModSumChannel:
    """Ideal modulo-q adder: the receiver sees the symbol-wise message sum."""

    def __init__(self, field: PrimeField, width: int):
        if width < 1:
            raise ValueError(f"width must be positive, got {width}")
        self.field = field
        self.width = width

    def transmit(self, messages: np.ndarray) -> np.ndarray:
        messages = np.asarray(messages, dtype=np.int64)
        if messages.ndim != 3 or messages.shape[1] != self.width:
            raise ValueError(f"messages must have shape (K, {self.width}, batch), got {messages.shape}")
        if np.any(messages < 0) or np.any(messages >= self.field.q):
            raise ValueError(f"message symbols must lie in [0, {self.field.q})")
        return messages.sum(axis=0) % self.field.q


class ModSumAdapter:
    """A linear network code plus precoders, presented as a modulo-q adder.

    Sender i applies G_i^{-1} before its encoder, which cancels the network
    transform; the receiver's decoded block is then exactly the modular sum
    of the original messages.
    """

    def __init__(self, code: LinearNetCode, precoders: tuple):
        self.code = code
        self.precoders = precoders
        self.field = code.field
        self.width = code.message_symbols

    def transmit(self, messages: np.ndarray) -> np.ndarray:
        messages = np.asarray(messages, dtype=np.int64)
        if messages.ndim != 3 or messages.shape[:2] != (self.code.net.K, self.width):
            raise ValueError(f"messages must have shape ({self.code.net.K}, {self.width}, batch), "
                             f"got {messages.shape}")
        shaped = np.stack([self.precoders[i].apply(messages[i])
                           for i in range(self.code.net.K)])
        return propagate(self.code, shaped).decoded


def precode_and_channel(code: LinearNetCode,
                        channel: Optional[EndToEndChannel] = None) -> Optional[ModSumAdapter]:
    """Build the adder view of ``code``, or None when some G_i is singular.

    ``channel`` defaults to a fresh end_to_end_matrices pass.  A singular
    draw is an ordinary outcome (the retry signal is the None return);
    callers redraw the code.
    """
    if channel is None:
        channel = end_to_end_matrices(code)
    if not channel.all_full_rank:
        return None
    return ModSumAdapter(code, channel.inverses)


def draw_identity_channel(net: netgraph.FiniteFieldNet, n: int, tau: int,
                          rng: Optional[np.random.Generator] = None,
                          max_draws: int = 32):
    """Redraw random codes until the end-to-end maps are all invertible.

    A non-layered network is first unfolded over T = 4 |V| stages.
    Returns (adapter, draws used).  For field sizes of practical interest a
    single draw almost always succeeds; the cap exists so a misconfigured
    network fails loudly instead of looping.
    """
    if not netgraph.layering(net).is_layered:
        net = netgraph.unfold(net, 4 * len(net.nodes)).net
    for attempt in range(1, max_draws + 1):
        code = assign_random_code(net, n, tau, rng)
        adapter = precode_and_channel(code)
        if adapter is not None:
            return adapter, attempt
    raise RuntimeError(f"no invertible end-to-end draw in {max_draws} attempts; "
                       "check tau against the network's cut ranks")


@dataclass(frozen=True)
class GaussianAbstraction:
    """Reliable bit budgets that justify a finite-field network model.

    ``budgets`` maps edges (ptp mode) or receiving nodes (mac mode) to bits
    per channel use.  A field symbol per use fits everywhere iff
    log2(q) <= min_budget.
    """

    mode: str
    budgets: dict
    min_budget: float

    def supports_field(self, q: int) -> bool:
        return np.log2(q) <= self.min_budget + 1e-12

    @property
    def note(self) -> str:
        return (f"one field symbol per use fits on every {self.mode} resource "
                f"iff log2(q) <= {self.min_budget:.4f}")


def gaussian_abstraction(net: netgraph.NetworkSpec, P: float, mode: str = "ptp") -> GaussianAbstraction:
    """Bit budgets of the Gaussian network, for choosing a field model.

    In ptp mode each edge is an orthogonal link of capacity C(h^2 P); in
    mac mode each receiving node decodes a modular sum at rate
    Cplus(1/indegree + min h^2 P) over its fan-in.
    """
    if P <= 0:
        raise ValueError(f"power must be positive, got {P}")
    budgets: dict = {}
    if mode == "ptp":
        for e in net.edges:
            budgets[(e.u, e.v)] = c_awgn(e.gain * e.gain * P)
    elif mode == "mac":
        for v in net.nodes:
            fan_in = net.in_edges(v)
            if not fan_in:
                continue
            weakest = min(e.gain * e.gain for e in fan_in)
            budgets[v] = c_plus(1.0 / len(fan_in) + weakest * P)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return GaussianAbstraction(mode, budgets, min(budgets.values()))
