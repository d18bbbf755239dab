"""Discrete source models and the function variables they induce.

Senders observe one coordinate each of a K-tuple drawn i.i.d. over time from
a joint pmf on ``[0, p)**K``.  Two families of target functions are modeled:

* :class:`ArithmeticSum` computes L weighted integer sums of the symbols
  (no modular reduction, weights in ``[0, p)``),
* :class:`TypeFunction` computes the empirical histogram of the K symbols,
  from which every symmetric statistic (mean, max, min, median, mode,
  variance) can be read off exactly.

Joint models come in two flavors: :class:`JointSource` keeps the full dense
table (guarded to ``p**K <= 2**24`` entries) and supports arbitrary
correlation; :class:`IIDSource` stores only a marginal and a count, which
keeps large-K sweeps exact without materializing the table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import GuardExceeded

_TABLE_GUARD = 2**24
_PROB_TOL = 1e-12


# ---------------------------------------------------------------------------
# target functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArithmeticSum:
    """L weighted sums ``u_l = sum_i weights[l, i] * s_i`` over the integers.

    Weights must lie in ``[0, p)``; outputs range over ``[0, (p-1)**2 * K]``.
    """

    p: int
    weights: tuple  # nested tuples, shape (L, K)

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.p}")
        w = np.asarray(self.weights, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError(f"weights must be a nonempty 2-D array, got shape {w.shape}")
        if np.any(w < 0) or np.any(w > self.p - 1):
            raise ValueError(f"weights must lie in [0, {self.p - 1}]")
        object.__setattr__(self, "weights", tuple(tuple(int(x) for x in row) for row in w))

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.int64)

    @property
    def L(self) -> int:
        return len(self.weights)

    @property
    def K(self) -> int:
        return len(self.weights[0])

    @property
    def output_len(self) -> int:
        return self.L

    def max_values(self) -> np.ndarray:
        """Largest attainable value of each component sum."""
        return self.weight_array.sum(axis=1) * (self.p - 1)

    def apply(self, s: np.ndarray) -> np.ndarray:
        """Evaluate on one symbol column (K,) or a block (K, m)."""
        s = np.asarray(s, dtype=np.int64)
        return self.weight_array @ s


@dataclass(frozen=True)
class TypeFunction:
    """The histogram map ``s -> (count of symbol l in s)_{l in [0, p)}``."""

    p: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.p}")

    @property
    def output_len(self) -> int:
        return self.p

    def apply(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.int64)
        one_col = s.ndim == 1
        cols = s[:, None] if one_col else s
        counts = np.stack([(cols == l).sum(axis=0) for l in range(self.p)])
        return counts[:, 0] if one_col else counts


DesiredFunction = Union[ArithmeticSum, TypeFunction]


def unit_sum(p: int, K: int) -> ArithmeticSum:
    """The plain sum of all K symbols."""
    return ArithmeticSum(p, ((1,) * K,))


# ---------------------------------------------------------------------------
# joint source models
# ---------------------------------------------------------------------------


class JointSource:
    """A dense joint pmf over ``[0, p)**K``.

    The table axis ``i`` indexes sender ``i`` (0-based).  Probabilities must
    be nonnegative and sum to one within 1e-12.
    """

    def __init__(self, p: int, K: int, pmf: np.ndarray):
        if p < 2:
            raise ValueError(f"alphabet size must be at least 2, got {p}")
        if K < 1:
            raise ValueError(f"sender count must be at least 1, got {K}")
        if p**K > _TABLE_GUARD:
            raise GuardExceeded(f"dense table would hold {p}**{K} > 2**24 entries")
        table = np.asarray(pmf, dtype=np.float64)
        if table.shape != (p,) * K:
            raise ValueError(f"pmf shape {table.shape} does not match ({p},)*{K}")
        if np.any(table < 0):
            raise ValueError("pmf entries must be nonnegative")
        total = float(table.sum())
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"pmf sums to {total!r}, not 1 within {_PROB_TOL}")
        table = table.copy()
        table.setflags(write=False)
        self.p = p
        self.K = K
        self.pmf = table

    def marginal(self, axes: Iterable[int]) -> np.ndarray:
        """Marginal table over the given sender axes, in the given order."""
        axes = list(axes)
        drop = tuple(i for i in range(self.K) if i not in axes)
        marg = self.pmf.sum(axis=drop) if drop else self.pmf
        # reorder surviving axes to the requested order
        kept = [i for i in range(self.K) if i in axes]
        perm = [kept.index(a) for a in axes]
        return np.transpose(marg, perm) if perm else marg

    def __repr__(self):
        return f"JointSource(p={self.p}, K={self.K})"


class IIDSource:
    """K independent senders sharing one marginal pmf over ``[0, p)``."""

    def __init__(self, p: int, K: int, marginal: Sequence[float] | None = None):
        if p < 2:
            raise ValueError(f"alphabet size must be at least 2, got {p}")
        if K < 1:
            raise ValueError(f"sender count must be at least 1, got {K}")
        if marginal is None:
            marg = np.full(p, 1.0 / p)
        else:
            marg = np.asarray(marginal, dtype=np.float64)
        if marg.shape != (p,):
            raise ValueError(f"marginal shape {marg.shape} does not match ({p},)")
        if np.any(marg < 0) or abs(marg.sum() - 1.0) > _PROB_TOL:
            raise ValueError("marginal must be a probability vector")
        marg = marg.copy()
        marg.setflags(write=False)
        self.p = p
        self.K = K
        self.marginal_pmf = marg

    def to_joint(self) -> JointSource:
        """Materialize the dense product table (subject to the size guard)."""
        if self.p**self.K > _TABLE_GUARD:
            raise GuardExceeded(f"dense table would hold {self.p}**{self.K} > 2**24 entries")
        table = self.marginal_pmf
        out = table
        for _ in range(self.K - 1):
            out = np.multiply.outer(out, table)
        return JointSource(self.p, self.K, out)

    def __repr__(self):
        return f"IIDSource(p={self.p}, K={self.K})"


Source = Union[JointSource, IIDSource]


def build_source(kind: str, *, p: int = 2, K: int = 2, alpha: float | None = None,
                 marginal: Sequence[float] | None = None,
                 table: np.ndarray | None = None) -> JointSource:
    """Construct a dense joint source.

    ``kind`` selects the model: ``"iid"`` (product of one marginal,
    uniform by default), ``"dsbs"`` (doubly symmetric binary source with
    flip probability ``alpha``), or ``"explicit"`` (caller-supplied table).
    """
    if kind == "iid":
        return IIDSource(p, K, marginal).to_joint()
    if kind == "dsbs":
        if p != 2 or K != 2:
            raise ValueError("dsbs is defined for p=2, K=2")
        if alpha is None or not 0.0 <= alpha <= 1.0:
            raise ValueError(f"dsbs needs alpha in [0, 1], got {alpha}")
        same = (1.0 - alpha) / 2.0
        diff = alpha / 2.0
        return JointSource(2, 2, np.array([[same, diff], [diff, same]]))
    if kind == "explicit":
        if table is None:
            raise ValueError("explicit sources need a table")
        arr = np.asarray(table, dtype=np.float64)
        if arr.ndim != K or arr.shape != (p,) * K:
            raise ValueError(f"table shape {arr.shape} does not match ({p},)*{K}")
        return JointSource(p, K, arr)
    raise ValueError(f"unknown source kind {kind!r}")


def load_joint_table(text: str) -> JointSource:
    """Parse the joint-table text format.

    The first non-empty line is ``p K``; each following line is
    ``s1 s2 ... sK prob``.  Tuples may appear at most once; omitted tuples
    get probability zero.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty joint table")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'p K', got {lines[0]!r}")
    try:
        p, K = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"header must hold two integers, got {lines[0]!r}") from exc
    if p < 2 or K < 1:
        raise ValueError(f"header values p={p}, K={K} out of range")
    if p**K > _TABLE_GUARD:
        raise GuardExceeded(f"dense table would hold {p}**{K} > 2**24 entries")
    table = np.zeros((p,) * K, dtype=np.float64)
    seen: set[tuple[int, ...]] = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != K + 1:
            raise ValueError(f"expected {K} symbols and a probability, got {ln!r}")
        try:
            symbols = tuple(int(tok) for tok in parts[:K])
            prob = float(parts[K])
        except ValueError as exc:
            raise ValueError(f"unparsable table line {ln!r}") from exc
        if any(not 0 <= s < p for s in symbols):
            raise ValueError(f"symbol out of [0, {p}) in line {ln!r}")
        if symbols in seen:
            raise ValueError(f"duplicate tuple {symbols} in joint table")
        seen.add(symbols)
        table[symbols] = prob
    return JointSource(p, K, table)


def dump_joint_table(src: JointSource) -> str:
    """Serialize a dense joint source in the text format of load_joint_table."""
    out = [f"{src.p} {src.K}"]
    for idx in np.ndindex(*src.pmf.shape):
        prob = float(src.pmf[idx])
        if prob != 0.0:
            out.append(" ".join(str(i) for i in idx) + f" {prob!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------


def entropy(probs: np.ndarray) -> float:
    """Shannon entropy in bits, with the 0 log 0 = 0 convention."""
    p = np.asarray(probs, dtype=np.float64).ravel()
    pos = p[p > 0]
    return float(-(pos * np.log2(pos)).sum())


def binary_entropy(a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"binary entropy needs an argument in [0, 1], got {a}")
    if a in (0.0, 1.0):
        return 0.0
    return float(-a * np.log2(a) - (1 - a) * np.log2(1 - a))


def joint_entropy(src: Source, subset: Iterable[int] | None = None) -> float:
    """Entropy in bits of the senders in ``subset`` (all senders if None)."""
    idx = list(range(src.K)) if subset is None else sorted(set(subset))
    _check_subset(src, idx)
    if not idx:
        return 0.0
    if isinstance(src, IIDSource):
        return len(idx) * entropy(src.marginal_pmf)
    return entropy(src.marginal(idx))


def _check_subset(src: Source, idx: Sequence[int]):
    for i in idx:
        if not 0 <= i < src.K:
            raise ValueError(f"sender index {i} out of range [0, {src.K})")


def conditional_entropy(src: Source, target, given: Iterable[int] = ()) -> float:
    """Conditional entropy H(target | senders in ``given``) in bits.

    ``target`` is either an iterable of sender indices or a desired function
    applied to the whole K-tuple.
    """
    given_idx = sorted(set(given))
    _check_subset(src, given_idx)
    if isinstance(target, (ArithmeticSum, TypeFunction)):
        return _function_conditional_entropy(src, target, given_idx)
    target_idx = sorted(set(target))
    _check_subset(src, target_idx)
    if isinstance(src, IIDSource):
        fresh = [i for i in target_idx if i not in given_idx]
        return len(fresh) * entropy(src.marginal_pmf)
    both = sorted(set(target_idx) | set(given_idx))
    return joint_entropy(src, both) - joint_entropy(src, given_idx)


def _function_conditional_entropy(src: Source, func: DesiredFunction, given_idx: list[int]) -> float:
    if isinstance(src, IIDSource):
        # Independence splits the function into a known part (the conditioned
        # senders) plus an independent rest, so only the rest contributes.
        rest = [i for i in range(src.K) if i not in given_idx]
        if not rest:
            return 0.0
        if isinstance(func, ArithmeticSum):
            sub_w = func.weight_array[:, rest]
            pmf = _weighted_sum_table(src.marginal_pmf, sub_w)
            return entropy(pmf)
        sub = IIDSource(src.p, len(rest), src.marginal_pmf)
        return function_pmf(sub, TypeFunction(src.p)).entropy()
    values, probs = _function_given_table(src, func, given_idx)
    h_joint = entropy(probs)
    h_given = joint_entropy(src, given_idx)
    return h_joint - h_given


# ---------------------------------------------------------------------------
# pushforward pmfs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionPMF:
    """Exact pmf of a function of the source tuple.

    ``support`` holds one value tuple per row (lexicographically sorted),
    ``probs`` the matching probabilities.
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", np.asarray(self.support, dtype=np.int64))
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=np.float64))
        self.support.setflags(write=False)
        self.probs.setflags(write=False)

    @property
    def L(self) -> int:
        return self.support.shape[1]

    def entropy(self) -> float:
        return entropy(self.probs)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(v) for v in row): float(pr)
                for row, pr in zip(self.support, self.probs)}

    def dense_table(self, size: int) -> np.ndarray:
        """Dense probability tensor of shape ``(size,) * L`` (values as indices)."""
        if np.any(self.support < 0) or np.any(self.support >= size):
            raise ValueError(f"support exceeds requested table size {size}")
        table = np.zeros((size,) * self.L, dtype=np.float64)
        table[tuple(self.support.T)] = self.probs
        return table

    def prefix_conditional_entropies(self) -> list[float]:
        """H(V_l | V_1 .. V_{l-1}) for each component, in bits."""
        out = []
        prev = 0.0
        for l in range(1, self.L + 1):
            rows = self.support[:, :l]
            _, inverse = np.unique(rows, axis=0, return_inverse=True)
            probs = np.bincount(inverse, weights=self.probs)
            h = entropy(probs)
            out.append(h - prev)
            prev = h
        return out


def _aggregate(values: np.ndarray, probs: np.ndarray) -> FunctionPMF:
    """Sum probabilities of identical value rows; drop zero-probability rows."""
    keep = probs > 0
    values, probs = values[keep], probs[keep]
    uniq, inverse = np.unique(values, axis=0, return_inverse=True)
    agg = np.bincount(inverse, weights=probs)
    return FunctionPMF(uniq, agg)


def _dense_function_values(src: JointSource, func: DesiredFunction) -> np.ndarray:
    """Function values for every tuple of the dense table, flat C order."""
    total = src.p**src.K
    coords = np.stack(np.unravel_index(np.arange(total), src.pmf.shape))
    return func.apply(coords).T  # (total, L)


def function_pmf(src: Source, func: DesiredFunction) -> FunctionPMF:
    """Exact pushforward pmf of ``func`` under the source model."""
    _check_function(src, func)
    if isinstance(src, IIDSource):
        if isinstance(func, ArithmeticSum):
            table = _weighted_sum_table(src.marginal_pmf, func.weight_array)
            values = np.stack(np.nonzero(table)).T
            probs = table[tuple(values.T)]
            order = np.lexsort(values.T[::-1])
            return FunctionPMF(values[order], probs[order])
        return _type_pmf_iid(src)
    values = _dense_function_values(src, func)
    return _aggregate(values, src.pmf.ravel())


def _check_function(src: Source, func: DesiredFunction):
    if func.p != src.p:
        raise ValueError(f"function alphabet {func.p} does not match source alphabet {src.p}")
    if isinstance(func, ArithmeticSum) and func.K != src.K:
        raise ValueError(f"function expects {func.K} senders, source has {src.K}")


def _weighted_sum_table(marginal: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Joint pmf tensor of L weighted sums of independent symbols.

    Returns an array of shape ``(max_1 + 1, ..., max_L + 1)`` built by
    convolving one sender at a time.
    """
    L, K = weights.shape
    p = marginal.shape[0]
    maxes = weights.sum(axis=1) * (p - 1)
    table = np.zeros(tuple(int(m) + 1 for m in maxes))
    table[(0,) * L] = 1.0
    for i in range(K):
        nxt = np.zeros_like(table)
        for s in range(p):
            prob = marginal[s]
            if prob == 0.0:
                continue
            shift = weights[:, i] * s
            src_slice = tuple(slice(0, table.shape[l] - int(shift[l])) for l in range(L))
            dst_slice = tuple(slice(int(shift[l]), table.shape[l]) for l in range(L))
            nxt[dst_slice] += prob * table[src_slice]
        table = nxt
    return table


def _type_pmf_iid(src: IIDSource) -> FunctionPMF:
    """Multinomial pmf over histograms for an i.i.d. source."""
    p, K = src.p, src.K
    marg = src.marginal_pmf
    rows: list[tuple[int, ...]] = []
    probs: list[float] = []

    def compositions(remaining: int, parts: int):
        if parts == 1:
            yield (remaining,)
            return
        for head in range(remaining + 1):
            for tail in compositions(remaining - head, parts - 1):
                yield (head,) + tail

    for combo in compositions(K, p):
        prob = 1.0
        count = K
        weight = 1.0
        for l, b in enumerate(combo):
            weight *= comb(count, b)
            count -= b
            prob *= marg[l] ** b
        total = weight * prob
        if total > 0:
            rows.append(combo)
            probs.append(total)
    values = np.asarray(rows, dtype=np.int64)
    order = np.lexsort(values.T[::-1])
    return FunctionPMF(values[order], np.asarray(probs)[order])


def _function_given_table(src: JointSource, func: DesiredFunction, given_idx: list[int]):
    """Joint pmf rows over (function value, conditioned symbols)."""
    values = _dense_function_values(src, func)
    total = src.p**src.K
    coords = np.stack(np.unravel_index(np.arange(total), src.pmf.shape))
    keyed = np.concatenate([values, coords[given_idx].T], axis=1) if given_idx else values
    agg = _aggregate(keyed, src.pmf.ravel())
    return agg.support, agg.probs


# ---------------------------------------------------------------------------
# sampling and statistics
# ---------------------------------------------------------------------------


def sample(src: Source, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``k`` i.i.d. source tuples; returns an array of shape (K, k)."""
    if k < 1:
        raise ValueError(f"sample length must be positive, got {k}")
    if isinstance(src, IIDSource):
        cum = np.cumsum(src.marginal_pmf)
        draws = rng.random((src.K, k))
        return np.searchsorted(cum, draws, side="right").astype(np.int64)
    flat = src.pmf.ravel()
    cum = np.cumsum(flat)
    idx = np.searchsorted(cum, rng.random(k), side="right")
    idx = np.minimum(idx, flat.size - 1)
    coords = np.unravel_index(idx, src.pmf.shape)
    return np.stack(coords).astype(np.int64)


_STATS = ("mean", "max", "min", "median", "mode", "variance")


def type_to_statistic(counts: Sequence[int], stat: str) -> Fraction:
    """Evaluate a symmetric statistic exactly from a histogram.

    ``counts[l]`` is the multiplicity of symbol ``l``.  Ties for the mode
    resolve to the smallest symbol.  Results are exact rationals.
    """
    b = [int(c) for c in counts]
    if any(c < 0 for c in b) or sum(b) == 0:
        raise ValueError("histogram must be nonnegative with a positive total")
    if stat not in _STATS:
        raise ValueError(f"unknown statistic {stat!r}, expected one of {_STATS}")
    K = sum(b)
    present = [l for l, c in enumerate(b) if c > 0]
    if stat == "max":
        return Fraction(present[-1])
    if stat == "min":
        return Fraction(present[0])
    if stat == "mode":
        top = max(b)
        return Fraction(b.index(top))
    mean = Fraction(sum(l * c for l, c in enumerate(b)), K)
    if stat == "mean":
        return mean
    if stat == "variance":
        return Fraction(sum(c * (Fraction(l) - mean) ** 2 for l, c in enumerate(b)), K)
    # median of the sorted multiset
    def value_at(pos: int) -> int:
        run = 0
        for l, c in enumerate(b):
            run += c
            if pos < run:
                return l
        raise AssertionError("position out of histogram range")

    if K % 2 == 1:
        return Fraction(value_at(K // 2))
    lo, hi = value_at(K // 2 - 1), value_at(K // 2)
    return Fraction(lo + hi, 2)
