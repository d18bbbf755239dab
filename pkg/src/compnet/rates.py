"""Computation rates: achievable schemes and outer bounds, in function
symbols per channel use.

Conventions: logarithms are base 2 throughout, powers are linear (not dB),
and a rate denominator of zero makes the corresponding constraint inactive
(the rate is unbounded in that direction).  Real-channel capacity forms are
used everywhere except the fading routines, which model a complex channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import netgraph
from .shannon import c_awgn, c_plus, c_awgn_complex, c_plus_complex, db_to_linear  # noqa: F401
from .sources import (
    ArithmeticSum,
    DesiredFunction,
    FunctionPMF,
    IIDSource,
    JointSource,
    Source,
    TypeFunction,
    conditional_entropy,
    entropy,
    function_pmf,
    joint_entropy,
    unit_sum,
)

_ZERO_TOL = 1e-12


def shannon_c(x: float, variant: str = "C") -> float:
    """Gaussian capacity forms: C(x) = 0.5 log2(1+x), Cplus(x) = max(0.5 log2 x, 0)."""
    if variant == "C":
        return c_awgn(x)
    if variant == "Cplus":
        return c_plus(x)
    raise ValueError(f"unknown variant {variant!r}, expected 'C' or 'Cplus'")


def cf_rate(h: Sequence[float], a: Sequence[int], P: float) -> float:
    """Reliable decoding exponent for an integer combination over a Gaussian MAC.

    Bits per channel use at which the sum ``sum_i a_i x_i`` of lattice
    codewords can be decoded through gains ``h`` at power ``P``.  Dividing by
    log2 of the symbol alphabet converts to symbols per use.
    """
    h = np.asarray(h, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if h.shape != a.shape or h.ndim != 1:
        raise ValueError(f"gain and coefficient vectors must share a 1-D shape, got {h.shape} and {a.shape}")
    if not np.any(a):
        raise ValueError("coefficient vector must be nonzero")
    if P <= 0:
        raise ValueError(f"power must be positive, got {P}")
    denom = float(a @ a) - P * float(h @ a) ** 2 / (1.0 + P * float(h @ h))
    # Cauchy-Schwarz keeps denom > 0 for every nonzero a.
    return c_plus(1.0 / denom)


# ---------------------------------------------------------------------------
# cut-set and separation bounds
# ---------------------------------------------------------------------------


def _nonempty_subsets(K: int):
    for r in range(1, K + 1):
        yield from combinations(range(K), r)


def cutset_rate(net: netgraph.NetworkSpec, src: Source, func: DesiredFunction,
                P: float, mode: str = "ptp") -> float:
    """Cut-set upper bound min over sender subsets of cut / H(f(S) | rest)."""
    if src.K != net.K:
        raise ValueError(f"source has {src.K} senders, network {net.K}")
    best = math.inf
    for sigma in _nonempty_subsets(net.K):
        complement = [i for i in range(net.K) if i not in sigma]
        denom = conditional_entropy(src, func, complement)
        if denom <= _ZERO_TOL:
            continue
        best = min(best, netgraph.min_cut(net, sigma, mode, P) / denom)
    return best


def _separation_minimum(net: netgraph.NetworkSpec, src: Source, P: float, mode: str) -> float:
    best = math.inf
    for sigma in _nonempty_subsets(net.K):
        complement = [i for i in range(net.K) if i not in sigma]
        denom = conditional_entropy(src, list(sigma), complement)
        if denom <= _ZERO_TOL:
            continue
        best = min(best, netgraph.min_cut(net, sigma, mode, P) / denom)
    return best


def is_single_hop(net: netgraph.NetworkSpec) -> bool:
    """True when every edge lands directly on the receiver."""
    return all(e.v == net.receiver for e in net.edges)


def separation_rate(net: netgraph.NetworkSpec, src: Source, func: DesiredFunction,
                    P: float, mode: str = "ptp") -> float:
    """Best rate of a separation scheme: recover the sources, then compute.

    Evaluates min over sender subsets of cut / H(S_subset | rest), which
    for orthogonal single-hop networks is the exact separation optimum and
    for the symmetric i.i.d. adder reduces to C(full cut) / (K H(S)).  The
    value does not depend on ``func``: separation reconstructs the sources
    themselves, one function value per source tuple.  Multi-hop networks
    are rejected; reports fall back to a cut-based proxy and say so.
    """
    if src.K != net.K:
        raise ValueError(f"source has {src.K} senders, network {net.K}")
    if not is_single_hop(net):
        raise ValueError("separation_rate covers single-hop networks only; "
                         "multi-hop reports carry a cut-based proxy instead")
    return _separation_minimum(net, src, P, mode)


def linear_coding_rate(gains: Sequence[float], P: float, func_entropy: float) -> float:
    """Rate of one-shot linear coding over orthogonal links.

    Every sender ships a fresh linear hash of its block at the full function
    entropy; the binding subset constraint is min over subsets of
    (sum of link capacities) / (|subset| H(f)).
    """
    gains = np.asarray(gains, dtype=np.float64)
    if func_entropy <= _ZERO_TOL:
        return math.inf
    caps = np.sort(np.array([c_awgn(g * g * P) for g in gains]))
    # prefix sums of the weakest links dominate the minimum
    return float(min(caps[: r + 1].sum() / ((r + 1) * func_entropy) for r in range(len(caps))))


# ---------------------------------------------------------------------------
# hybrid auxiliary-variable rate for orthogonal single-hop networks
# ---------------------------------------------------------------------------


def _axes_entropy(table: np.ndarray, axes: Iterable[int]) -> float:
    axes = tuple(sorted(set(axes)))
    if not axes:
        return 0.0
    drop = tuple(i for i in range(table.ndim) if i not in axes)
    return entropy(table.sum(axis=drop) if drop else table)


def hybrid_rate(gains: Sequence[float], P: float, joint: np.ndarray,
                func: DesiredFunction, tol: float = 1e-9) -> float:
    """Best rate with per-sender auxiliary descriptions over orthogonal links.

    ``joint`` is a pmf array over (S_1..S_K, W_1..W_K): the first K axes are
    the source symbols, the last K the auxiliaries.  Each W_i may only
    depend on S_i, i.e. the array must factor as p(s) prod_i p(w_i | s_i);
    this Markov structure is validated to ``tol``.  Choosing W_i = S_i
    reproduces the separation rate, constant W_i the linear-coding rate.
    """
    gains = np.asarray(gains, dtype=np.float64)
    K = gains.size
    joint = np.asarray(joint, dtype=np.float64)
    if joint.ndim != 2 * K:
        raise ValueError(f"joint must have 2K = {2 * K} axes, got {joint.ndim}")
    p = joint.shape[0]
    if joint.shape[:K] != (p,) * K:
        raise ValueError(f"source axes must share one alphabet, got {joint.shape[:K]}")
    if np.any(joint < 0) or abs(joint.sum() - 1.0) > 1e-9:
        raise ValueError("joint must be a probability array")
    if func.p != p:
        raise ValueError(f"function alphabet {func.p} does not match source alphabet {p}")

    # Markov validation: rebuild p(s) prod_i p(w_i | s_i) and compare.
    p_s = joint.sum(axis=tuple(range(K, 2 * K)))
    recon = p_s.reshape(joint.shape[:K] + (1,) * K)
    for i in range(K):
        keep = (i, K + i)
        pair = joint.sum(axis=tuple(ax for ax in range(2 * K) if ax not in keep))
        marg = pair.sum(axis=1)
        cond = np.divide(pair, marg[:, None], out=np.zeros_like(pair), where=marg[:, None] > 0)
        shape = [1] * (2 * K)
        shape[i], shape[K + i] = pair.shape
        recon = recon * cond.reshape(shape)
    if np.max(np.abs(recon - joint)) > tol:
        raise ValueError("auxiliaries must be conditionally independent given their own source "
                         f"(Markov mismatch {np.max(np.abs(recon - joint)):.2e} > {tol:.0e})")

    s_axes = tuple(range(K))
    h_w = _axes_entropy(joint, range(K, 2 * K))
    h_sw = entropy(joint)

    # H(f(S), W_1..W_K) via the pushforward on the source axes.
    coords = np.stack(np.unravel_index(np.arange(p**K), (p,) * K))
    fvals = func.apply(coords).T
    uniq, inverse = np.unique(fvals, axis=0, return_inverse=True)
    flat = joint.reshape(p**K, -1)
    fw = np.zeros((uniq.shape[0], flat.shape[1]))
    np.add.at(fw, inverse, flat)
    h_f_given_w = entropy(fw) - h_w

    caps = np.array([c_awgn(g * g * P) for g in gains])
    best = math.inf
    for sigma in _nonempty_subsets(K):
        w_rest = tuple(K + i for i in range(K) if i not in sigma)
        mutual = (h_w - _axes_entropy(joint, w_rest)
                  - h_sw + _axes_entropy(joint, s_axes + w_rest))
        denom = max(mutual, 0.0) + len(sigma) * h_f_given_w
        if denom <= _ZERO_TOL:
            continue
        best = min(best, float(caps[list(sigma)].sum()) / denom)
    return best


def identity_auxiliaries(src: JointSource) -> np.ndarray:
    """Joint array for W_i = S_i (reproduces separation)."""
    p, K = src.p, src.K
    out = np.zeros((p,) * (2 * K))
    for idx in np.ndindex(*src.pmf.shape):
        out[idx + idx] = src.pmf[idx]
    return out


def constant_auxiliaries(src: JointSource) -> np.ndarray:
    """Joint array for constant W_i (reproduces plain linear coding)."""
    return src.pmf.reshape(src.pmf.shape + (1,) * src.K)


def bsc_auxiliaries(src: JointSource, beta: float) -> np.ndarray:
    """Joint array for W_i = S_i xor Bern(beta), for binary sources."""
    if src.p != 2:
        raise ValueError("the symmetric-flip family needs a binary source")
    if not 0.0 <= beta <= 0.5:
        raise ValueError(f"flip probability must lie in [0, 0.5], got {beta}")
    K = src.K
    out = np.zeros((2,) * (2 * K))
    flip = np.array([[1 - beta, beta], [beta, 1 - beta]])
    for s_idx in np.ndindex(*src.pmf.shape):
        base = src.pmf[s_idx]
        if base == 0.0:
            continue
        for w_idx in np.ndindex(*(2,) * K):
            prob = base
            for i in range(K):
                prob *= flip[s_idx[i], w_idx[i]]
            out[s_idx + w_idx] += prob
    return out


def product_auxiliaries(src: JointSource, channels: Sequence[np.ndarray]) -> np.ndarray:
    """Joint array for arbitrary per-sender channels W_i | S_i.

    ``channels[i]`` has shape (p, W_i cardinality) with rows summing to one.
    """
    if len(channels) != src.K:
        raise ValueError(f"need one channel per sender, got {len(channels)} for K={src.K}")
    out = src.pmf.copy().reshape(src.pmf.shape + (1,) * src.K)
    for i, ch in enumerate(channels):
        ch = np.asarray(ch, dtype=np.float64)
        if ch.shape[0] != src.p or np.max(np.abs(ch.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError(f"channel {i} must have shape ({src.p}, *) with unit row sums")
        shape = [1] * (2 * src.K)
        shape[i], shape[src.K + i] = ch.shape
        out = out * ch.reshape(shape)
    return out


# ---------------------------------------------------------------------------
# classic distributed source coding regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionConstraint:
    """One lower bound: sum of R_i over ``senders`` is at least ``bound`` bits."""

    senders: tuple[int, ...]
    bound: float


def _xor_entropy(src: JointSource) -> float:
    p_odd = float(src.pmf[0, 1] + src.pmf[1, 0])
    return entropy(np.array([1.0 - p_odd, p_odd]))


def classic_regions(src: JointSource, query: str) -> list[RegionConstraint]:
    """Rate regions of reference two-terminal source coding problems.

    ``slepian_wolf`` (any K) lists every subset constraint for lossless
    reproduction of all sources.  ``korner_marton`` and ``cascade`` describe
    encoding the modulo-2 sum of two binary sources (the cascade variant
    lets the second encoder observe the first message).
    """
    if query == "slepian_wolf":
        out = []
        for sigma in _nonempty_subsets(src.K):
            complement = [i for i in range(src.K) if i not in sigma]
            out.append(RegionConstraint(tuple(sigma), conditional_entropy(src, list(sigma), complement)))
        return out
    if query in ("korner_marton", "cascade"):
        if src.K != 2 or src.p != 2:
            raise ValueError(f"{query} is defined for two binary sources")
        h_xor = _xor_entropy(src)
        if query == "korner_marton":
            return [RegionConstraint((0,), h_xor), RegionConstraint((1,), h_xor)]
        return [RegionConstraint((0,), conditional_entropy(src, [0], [1])),
                RegionConstraint((1,), h_xor)]
    raise ValueError(f"unknown region {query!r}")


# ---------------------------------------------------------------------------
# end-to-end network rates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateReport:
    """Achievable computation rate with its matching outer bounds.

    All values are in function symbols per channel use.  ``separation`` is
    exact for single-hop networks and an optimistic cut-based proxy
    otherwise; ``details['separation_kind']`` records which.
    """

    achievable: float
    cutset: float
    separation: float | None
    gap: float
    mode: str
    details: dict = field(default_factory=dict)


_SEPARATION_SUBSET_GUARD = 16


def net_achievable_rate(net: netgraph.NetworkSpec, src: Source, func: DesiredFunction,
                        P: float, mode: str = "ptp",
                        include_separation: bool = True) -> RateReport:
    """Rate of in-network modular computation on ``net`` with outer bounds.

    For ``ptp`` mode every link is orthogonal; for ``mac`` mode every node
    receives through a Gaussian adder.  The achievable value is
    min over senders i of cut(i) / H(f(S)) with the mode's forwarding cut;
    the reported cut-set bound fixes the full sender set.  The separation
    entry is exact for single-hop topologies and a cut-based proxy for
    multi-hop ones (``details['separation_kind']`` says which); pass
    ``include_separation=False`` to skip its subset enumeration.
    """
    if mode not in ("ptp", "mac"):
        raise ValueError(f"unknown mode {mode!r}")
    if src.K != net.K:
        raise ValueError(f"source has {src.K} senders, network {net.K}")
    h_f = function_pmf(src, func).entropy()
    forward_mode = "ptp" if mode == "ptp" else "mac_forwarding"
    per_sender = [netgraph.min_cut(net, [i], forward_mode, P) for i in range(net.K)]
    full_cut = netgraph.min_cut(net, None, mode, P)
    achievable = min(per_sender) / h_f if h_f > _ZERO_TOL else math.inf
    cutset = full_cut / h_f if h_f > _ZERO_TOL else math.inf
    separation = None
    if include_separation and net.K <= _SEPARATION_SUBSET_GUARD:
        separation = _separation_minimum(net, src, P, "ptp" if mode == "ptp" else "mac")
    details = {
        "per_sender_cuts": tuple(per_sender),
        "function_entropy": h_f,
        "separation_kind": "exact-single-hop" if is_single_hop(net) else "cut-proxy",
    }
    return RateReport(achievable=achievable, cutset=cutset, separation=separation,
                      gap=cutset - achievable, mode=mode, details=details)


@dataclass(frozen=True)
class GapPoint:
    P: float
    upper: float
    lower: float
    gap: float
    bound: float | None
    within_bound: bool | None


def gap_report(net: netgraph.NetworkSpec, src: Source, func: DesiredFunction,
               P_grid: Sequence[float], mode: str = "mac") -> list[GapPoint]:
    """Upper/lower rate pairs over a power grid, with the analytic gap bound.

    For an equal-gain single-hop adder network the gap obeys
    (log2 K + 1) / H(f(S)) at every power; that derived bound is attached
    and checked.  Other topologies report the raw gap with no bound.
    """
    h_f = function_pmf(src, func).entropy()
    gains = [e.gain for e in net.edges]
    single_hop_equal = (all(e.v == net.receiver for e in net.edges)
                        and len(set(abs(g) for g in gains)) == 1)
    bound = None
    if single_hop_equal and mode == "mac" and h_f > _ZERO_TOL:
        bound = (math.log2(net.K) + 1.0) / h_f
    out = []
    for P in P_grid:
        report = net_achievable_rate(net, src, func, P, mode, include_separation=False)
        gap = report.cutset - report.achievable
        within = None if bound is None else bool(gap <= bound + 1e-12)
        out.append(GapPoint(float(P), report.cutset, report.achievable, gap, bound, within))
    return out


# ---------------------------------------------------------------------------
# superposition over a two-user adder channel
# ---------------------------------------------------------------------------


def superposition_rate(h1: float, h2: float, P: float, src: Source,
                       func: DesiredFunction) -> float:
    """Computation rate of layering a private stream on the stronger sender.

    Requires ``h2**2 >= h1**2``: the weaker gain carries the common modular
    layer, the gain difference carries a refinement that the receiver peels
    off first.  With equal gains the value reduces to the plain forwarding
    rate C+(1/2 + h1^2 P) / H(f(S)).
    """
    if src.K != 2:
        raise ValueError(f"superposition applies to two senders, source has {src.K}")
    if h2 * h2 < h1 * h1:
        raise ValueError(f"needs h2^2 >= h1^2, got h1={h1}, h2={h2}")
    if P <= 0:
        raise ValueError(f"power must be positive, got {P}")
    h_f = function_pmf(src, func).entropy()
    h_1_given_2 = conditional_entropy(src, [0], [1])
    h_2 = joint_entropy(src, [1])
    common = c_plus(0.5 + h1 * h1 * P)
    first = common / h_1_given_2 if h_1_given_2 > _ZERO_TOL else math.inf
    if h_f <= _ZERO_TOL:
        return math.inf
    excess = h_f - h_1_given_2
    refine = c_awgn((h2 * h2 - h1 * h1) * P / (1.0 + 2.0 * h1 * h1 * P))
    if excess <= _ZERO_TOL:
        second = common / h_f
    else:
        if h_2 <= _ZERO_TOL:
            raise ValueError("the second sender must be nondegenerate to carry the refinement")
        second = common / h_f + (excess / h_2) * refine / h_f
    return min(first, second)


# ---------------------------------------------------------------------------
# block fading with power inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FadingReport:
    """Monte Carlo lower rate estimates over a power grid plus the gap bound.

    ``rates[i]`` estimates the expected forwarding rate at ``powers[i]``
    under unit-mean exponential power fading with channel inversion; gaps to
    the fading cut-set bound stay below ``gap_bound`` for every power.
    """

    K: int
    trials: int
    powers: tuple[float, ...]
    rates: tuple[float, ...]
    stderrs: tuple[float, ...]
    gap_bound: float
    inversion_ratio: float


def fading_report(K: int, P, src: Source, func: DesiredFunction, trials: int,
                  rng: np.random.Generator) -> FadingReport:
    """Estimate the fading forwarding rate by Monte Carlo.

    The power-control denominator E[min_i g_i / g_1] is estimated on its own
    pre-pass of ``trials`` draws; the main pass reuses one set of fading
    draws across the whole power grid, so the estimates are comparable
    point to point (common random numbers).  Complex-channel capacity forms
    apply.  ``P`` may be one power or a sequence.
    """
    if K < 1:
        raise ValueError(f"need at least one sender, got K={K}")
    if trials < 1000:
        raise ValueError(f"need at least 1000 trials for a usable estimate, got {trials}")
    powers = tuple(float(x) for x in (P if isinstance(P, (list, tuple, np.ndarray)) else [P]))
    if any(x <= 0 for x in powers):
        raise ValueError("powers must be positive")
    h_f = function_pmf(src, func).entropy()
    if h_f <= _ZERO_TOL:
        raise ValueError("the target function is deterministic; the rate is unbounded")

    pre = rng.exponential(1.0, size=(trials, K))
    ratio = float(np.mean(pre.min(axis=1) / pre[:, 0]))
    main = rng.exponential(1.0, size=(trials, K))
    weakest = main.min(axis=1)
    rates, errs = [], []
    for P_val in powers:
        arg = 1.0 / K + weakest * P_val / ratio
        vals = np.where(arg > 1.0, np.log2(np.maximum(arg, 1.0)), 0.0) / h_f
        rates.append(float(vals.mean()))
        errs.append(float(vals.std(ddof=1) / math.sqrt(trials)))
    gap_bound = (3.0 * math.log2(K) + 2.0 + math.log2(math.e)) / h_f
    return FadingReport(K, trials, powers, tuple(rates), tuple(errs), gap_bound, ratio)


# ---------------------------------------------------------------------------
# modular linear combinations
# ---------------------------------------------------------------------------


def modp_sum_rate(src: Source, weights, net: netgraph.NetworkSpec, P: float,
                  mode: str = "mac") -> float:
    """Rate for computing a modulo-p linear combination of the sources.

    The decoder obtains the integer-weighted sums and reduces mod p for
    free, so the rate equals the arithmetic-sum rate for the same weights
    (with the integer sum's entropy, not the reduced one, in the
    denominator).
    """
    func = ArithmeticSum(src.p, weights)
    return net_achievable_rate(net, src, func, P, mode,
                               include_separation=False).achievable


# ---------------------------------------------------------------------------
# parameter sweeps backing the CLI scenarios
# ---------------------------------------------------------------------------


def mac_sum_sweep(P: float, k_max: int) -> list[dict]:
    """Equal-gain adder network, i.i.d. uniform binary sources, full sum."""
    if k_max < 2:
        raise ValueError(f"k_max must be at least 2, got {k_max}")
    rows = []
    for K in range(2, k_max + 1):
        src = IIDSource(2, K)
        net = netgraph.mac_network([1.0] * K)
        h_u = function_pmf(src, unit_sum(2, K)).entropy()
        computation = min(netgraph.min_cut(net, [i], "mac_forwarding", P)
                          for i in range(K)) / h_u
        full_cut = netgraph.min_cut(net, None, "mac", P)
        rows.append({
            "K": K,
            "computation": computation,
            "separation": full_cut / (K * 1.0),
            "cutset": full_cut / h_u,
        })
    return rows


def dsbs_orthogonal_sweep(P: float, alphas: Sequence[float],
                          betas: Sequence[float] | None = None) -> list[dict]:
    """Doubly symmetric binary sources over two orthogonal links, full sum.

    The hybrid column maximizes over the symmetric-flip auxiliary family
    W_i = S_i xor Bern(beta) on the given grid (default step 0.025).
    """
    from .sources import build_source

    if betas is None:
        betas = np.round(np.arange(0.0, 0.5 + 1e-9, 0.025), 6)
    gains = [1.0, 1.0]
    net = netgraph.orthogonal_network(gains)
    func = unit_sum(2, 2)
    rows = []
    for alpha in alphas:
        src = build_source("dsbs", alpha=float(alpha))
        h_f = function_pmf(src, func).entropy()
        hybrid = max(hybrid_rate(gains, P, bsc_auxiliaries(src, float(b)), func)
                     for b in betas)
        rows.append({
            "alpha": float(alpha),
            "hybrid": hybrid,
            "separation": separation_rate(net, src, func, P, "ptp"),
            "linear": linear_coding_rate(gains, P, h_f),
            "cutset": cutset_rate(net, src, func, P, "ptp"),
        })
    return rows


def superposition_sweep(P: float, h2_values: Sequence[float]) -> list[dict]:
    """Two-sender adder with unequal gains, i.i.d. uniform binary, full sum."""
    src = IIDSource(2, 2).to_joint()
    func = unit_sum(2, 2)
    h_f = function_pmf(src, func).entropy()
    rows = []
    for h2 in h2_values:
        base = c_plus(0.5 + 1.0 * P) / h_f
        rows.append({
            "h2": float(h2),
            "superposition": superposition_rate(1.0, float(h2), P, src, func),
            "equal_layer": base,
            "cutset": c_awgn((1.0 + abs(h2)) ** 2 * P) / h_f,
        })
    return rows
