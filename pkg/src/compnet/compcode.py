"""Distributed coding of a function over a modulo-q adder.

Each sender embeds its source symbols so that the channel's modular sum
equals the desired function value without wraparound, then compresses its
embedded stream with shared linear hash matrices.  The receiver sees the
hashed function stream and recovers the function block by maximum
likelihood over the hash cosets, using the function's joint distribution
as prior.  Rates approach log2(q) / H(f(S)) symbols per channel use as the
margin shrinks and the block grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, GuardExceeded
from .gf import FieldMatrix, PrimeField, is_prime, mat_rank, next_prime, random_matrix, solve
from .rng import substream
from .sources import ArithmeticSum, DesiredFunction, FunctionPMF, Source, TypeFunction, function_pmf, sample
from .transform import ModSumChannel

_DECODE_GUARD_BITS = 20
_TABLE_GUARD_BITS = 24
_RANK_REDRAWS = 32


@dataclass(frozen=True, eq=False)
class EmbedMap:
    """Bijection between bounded integers and field elements, plus the
    per-sender contribution tables whose modular sum is the function value.

    ``max_value`` is the largest integer any function component can take;
    the field satisfies q > max_value, so integer sums never wrap and the
    embedding g is the identity on [0, max_value].  ``tables[i, s]`` is the
    length-L field vector sender i contributes for symbol s.
    """

    p: int
    K: int
    q: int
    L: int
    max_value: int
    tables: np.ndarray

    @classmethod
    def for_function(cls, func: DesiredFunction, K: int, q: Optional[int] = None) -> "EmbedMap":
        p = func.p
        if isinstance(func, ArithmeticSum):
            if func.K != K:
                raise ConfigError(f"weight matrix covers {func.K} senders, source has {K}")
            threshold = (p - 1) * (p - 1) * K
        elif isinstance(func, TypeFunction):
            threshold = K
        else:
            raise ConfigError(f"no embedding for {type(func).__name__}")
        if q is None:
            q = next_prime(threshold)
        if not is_prime(q):
            raise ConfigError(f"field size {q} is not prime")
        if q <= threshold:
            raise ConfigError(f"field size {q} cannot hold values up to {threshold} without wraparound")
        if isinstance(func, ArithmeticSum):
            L = func.L
            tables = np.zeros((K, p, L), dtype=np.int64)
            for i in range(K):
                for s in range(p):
                    tables[i, s] = (func.weight_array[:, i] * s) % q
        else:
            L = p
            tables = np.zeros((K, p, L), dtype=np.int64)
            for s in range(p):
                tables[:, s, s] = 1
        return cls(p, K, q, L, threshold, tables)

    def apply(self, symbols: np.ndarray) -> np.ndarray:
        """Embed a block: (K, k) symbols -> (K, L, k) field vectors."""
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.shape[0] != self.K:
            raise ValueError(f"expected {self.K} sender rows, got {symbols.shape[0]}")
        if np.any(symbols < 0) or np.any(symbols >= self.p):
            raise ValueError(f"symbols must lie in [0, {self.p})")
        return np.transpose(self.tables[np.arange(self.K)[:, None], symbols], (0, 2, 1))


def embed(emap: EmbedMap, values: np.ndarray) -> np.ndarray:
    """Map integer function values into the field (identity, range-checked)."""
    values = np.asarray(values, dtype=np.int64)
    if np.any(values < 0) or np.any(values > emap.max_value):
        raise ValueError(f"values must lie in [0, {emap.max_value}] to embed without wraparound")
    return values % emap.q


def unembed(emap: EmbedMap, residues: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed`: field elements back to integers."""
    residues = np.asarray(residues, dtype=np.int64)
    if np.any(residues < 0) or np.any(residues >= emap.q):
        raise ValueError(f"residues must lie in [0, {emap.q})")
    if np.any(residues > emap.max_value):
        raise ValueError(f"residue outside the embedded range [0, {emap.max_value}]")
    return residues.copy()


@dataclass(frozen=True, eq=False)
class SWComputationCode:
    """Linear hash compressors for the embedded function stream.

    Component l of the stream is hashed by ``matrices[l]`` with
    ``n_values[l]`` rows, sized from the chained conditional entropies
    H(V_l | V_1..V_{l-1}) plus a fractional margin.  Every sender applies
    the same matrices, so the adder output is the hash of the function
    stream itself.
    """

    embed: EmbedMap
    field: PrimeField
    k: int
    margin: float
    n_values: tuple
    matrices: tuple
    fpmf: FunctionPMF
    log_table: np.ndarray

    @property
    def L(self) -> int:
        return self.embed.L

    @property
    def total_syndrome_symbols(self) -> int:
        return int(sum(self.n_values))

    @property
    def decode_candidates(self) -> int:
        return self.field.q ** (self.L * self.k - self.total_syndrome_symbols)

    @property
    def symbols_per_use(self) -> float:
        total = self.total_syndrome_symbols
        return self.k / total if total else math.inf


def _log_prior_table(fpmf: FunctionPMF, q: int, L: int) -> np.ndarray:
    if L * math.log2(q) > _TABLE_GUARD_BITS:
        raise GuardExceeded(f"prior table q^L = {q}^{L} exceeds 2^{_TABLE_GUARD_BITS} entries")
    table = np.full((q,) * L, -np.inf)
    table[tuple(fpmf.support.T)] = np.log(fpmf.probs)
    return table


def design_code(src: Source, func: DesiredFunction, k: int, margin: float,
                rng: np.random.Generator, q: Optional[int] = None) -> SWComputationCode:
    """Size and draw the hash matrices for one block length and margin.

    Row counts are n_l = min(k, ceil(k * H(V_l | V_<l) * (1 + margin) /
    log2 q)); each drawn matrix is redrawn until it has full row rank.
    Negative margins (down to but excluding -1) deliberately compress below
    the entropy rate, for converse-side experiments.
    """
    if k < 1:
        raise ConfigError(f"block length must be positive, got {k}")
    if margin <= -1:
        raise ConfigError(f"margin must exceed -1, got {margin}")
    if src.p != func.p:
        raise ConfigError(f"source alphabet {src.p} does not match function alphabet {func.p}")
    embed = EmbedMap.for_function(func, src.K, q)
    field = PrimeField(embed.q)
    fpmf = function_pmf(src, func)
    cond = fpmf.prefix_conditional_entropies()
    log_q = math.log2(embed.q)
    n_values = []
    matrices = []
    for l in range(embed.L):
        n_l = min(k, math.ceil(k * cond[l] * (1.0 + margin) / log_q - 1e-12))
        n_l = max(n_l, 0)
        if n_l == 0:
            n_values.append(0)
            matrices.append(None)
            continue
        for attempt in range(_RANK_REDRAWS):
            h = random_matrix(field, n_l, k, rng)
            if mat_rank(h) == n_l:
                break
        else:
            raise RuntimeError(f"no full-rank {n_l}x{k} hash in {_RANK_REDRAWS} draws")
        n_values.append(n_l)
        matrices.append(h)
    log_table = _log_prior_table(fpmf, embed.q, embed.L)
    return SWComputationCode(embed, field, k, margin, tuple(n_values), tuple(matrices),
                             fpmf, log_table)


def sw_encode(code: SWComputationCode, sender: int, symbols: np.ndarray) -> np.ndarray:
    """One sender's transmit block: hash its weighted embedded stream.

    ``symbols`` is sender ``sender``'s length-k source vector; the result
    concatenates H_l applied to that sender's component-l contribution, in
    component order (length sum n_l).
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.shape != (code.k,):
        raise ValueError(f"expected a length-{code.k} source vector, got shape {symbols.shape}")
    if not 0 <= sender < code.embed.K:
        raise ValueError(f"sender index {sender} out of range [0, {code.embed.K})")
    if np.any(symbols < 0) or np.any(symbols >= code.embed.p):
        raise ValueError(f"symbols must lie in [0, {code.embed.p})")
    contrib = code.embed.tables[sender, symbols].T
    out = np.zeros(code.total_syndrome_symbols, dtype=np.int64)
    col = 0
    for l, h in enumerate(code.matrices):
        n_l = code.n_values[l]
        if n_l == 0:
            continue
        out[col:col + n_l] = h.apply(contrib[l])
        col += n_l
    return out


def type_encode(code: SWComputationCode, symbols: np.ndarray) -> np.ndarray:
    """Transmit block for a type (histogram) code: per-bin indicators hashed.

    Every sender uses the same tables for a type function, so no sender
    index is needed.
    """
    if code.embed.L != code.embed.p or not np.all(
            code.embed.tables == code.embed.tables[0]):
        raise ConfigError("type_encode applies to type-function codes")
    return sw_encode(code, 0, symbols)


def encode_all(code: SWComputationCode, symbols: np.ndarray) -> np.ndarray:
    """Stack sw_encode over senders: (K, k) symbols -> (K, sum n_l)."""
    symbols = np.asarray(symbols, dtype=np.int64)
    return np.stack([sw_encode(code, i, symbols[i]) for i in range(code.embed.K)])


def true_sum(code: SWComputationCode, symbols: np.ndarray) -> np.ndarray:
    """The embedded modular sum, i.e. the function stream: (L, k)."""
    return code.embed.apply(symbols).sum(axis=0) % code.field.q


def _coset(code: SWComputationCode, l: int, y: np.ndarray) -> np.ndarray:
    """All solutions of H_l x = y as rows, in mixed-radix coefficient order."""
    q, k = code.field.q, code.k
    h = code.matrices[l]
    if h is None:
        particular = np.zeros(k, dtype=np.int64)
        basis = np.eye(k, dtype=np.int64)
    else:
        sol = solve(h, y)
        if sol is None:
            raise ValueError("received syndrome is not in the hash image")
        particular, basis = sol
    d = basis.shape[0]
    if d == 0:
        return particular[None, :]
    radix = q ** np.arange(d, dtype=np.int64)
    coefs = (np.arange(q**d, dtype=np.int64)[:, None] // radix) % q
    return (particular[None, :] + coefs @ basis) % q


def sw_decode(code: SWComputationCode, received: np.ndarray,
              fpmf: Optional[FunctionPMF] = None) -> np.ndarray:
    """Most likely function stream consistent with the received hashes.

    Enumerates the coset cross product (guarded at 2^20 candidates),
    scores each candidate block positionwise by the joint log-probability
    of ``fpmf`` (default: the distribution the code was designed for), and
    breaks exact ties toward the lexicographically smallest stream.
    """
    bits = (code.L * code.k - code.total_syndrome_symbols) * math.log2(code.field.q)
    if bits > _DECODE_GUARD_BITS + 1e-9:
        raise GuardExceeded(f"coset enumeration needs {code.decode_candidates} candidates, "
                            f"over the 2^{_DECODE_GUARD_BITS} guard")
    received = np.asarray(received, dtype=np.int64)
    if received.shape != (code.total_syndrome_symbols,):
        raise ValueError(f"expected {code.total_syndrome_symbols} received symbols, got {received.shape}")
    log_table = (code.log_table if fpmf is None
                 else _log_prior_table(fpmf, code.field.q, code.L))

    cosets = []
    col = 0
    for l in range(code.L):
        n_l = code.n_values[l]
        cosets.append(_coset(code, l, received[col:col + n_l]))
        col += n_l
    sizes = tuple(c.shape[0] for c in cosets)

    score = np.zeros(sizes)
    for j in range(code.k):
        ix = tuple(cosets[l][:, j].reshape(tuple(sizes[l] if m == l else 1 for m in range(code.L)))
                   for l in range(code.L))
        score = score + log_table[ix]
    flat = score.reshape(-1)
    best = flat.max()
    ties = np.flatnonzero(flat == best)
    if ties.size > 1:
        rows = []
        for t in ties:
            idx = np.unravel_index(t, sizes)
            rows.append(np.stack([cosets[l][idx[l]] for l in range(code.L)]))
        rows.sort(key=lambda v: tuple(v.reshape(-1)))
        return rows[0]
    idx = np.unravel_index(ties[0], sizes)
    return np.stack([cosets[l][idx[l]] for l in range(code.L)])


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of a block error-rate run.

    ``channel_uses`` counts adder slots consumed per source block,
    including padding when the stream is chunked to the channel width;
    ``symbols_per_use`` is k over that count.
    """

    q: int
    k: int
    margin: float
    n_values: tuple
    trials: int
    block_errors: int
    channel_uses: int

    @property
    def error_rate(self) -> float:
        return self.block_errors / self.trials

    @property
    def symbols_per_use(self) -> float:
        return self.k / self.channel_uses if self.channel_uses else math.inf


def end_to_end_experiment(scenario, src: Source, func: DesiredFunction, k: int,
                          margin: float, trials: int, master_seed: int,
                          q: Optional[int] = None) -> ExperimentResult:
    """Run repeated encode / transmit / decode trials and count block errors.

    ``scenario`` is the channel: None for an ideal modulo-q adder matched
    to the syndrome length, or any object with ``field`` / ``width`` /
    ``transmit`` (such as a precoded network adapter); streams are
    zero-padded up to a multiple of the channel width.  The code is
    designed once from its own seed substream; trial t draws its source
    block from substream (master_seed, 1, t), so different margins and
    channels see identical payloads.  Each trial's decoded block is
    unembedded and compared against the function evaluated directly on the
    drawn sources.
    """
    if trials < 1:
        raise ConfigError(f"need at least one trial, got {trials}")
    code = design_code(src, func, k, margin, substream(master_seed, 0), q=q)
    total = code.total_syndrome_symbols
    channel = scenario
    if channel is None:
        channel = ModSumChannel(code.field, max(total, 1))
    if channel.field.q != code.field.q:
        raise ConfigError(f"channel field {channel.field.q} does not match code field {code.field.q}")
    width = channel.width
    blocks = max(1, math.ceil(total / width)) if total else 0

    errors = 0
    for t in range(trials):
        rng_t = substream(master_seed, 1, t)
        symbols = sample(src, k, rng_t)
        truth = func.apply(symbols)
        if total:
            synd = encode_all(code, symbols)
            padded = np.zeros((src.K, blocks * width), dtype=np.int64)
            padded[:, :total] = synd
            stacked = padded.reshape(src.K, blocks, width).transpose(0, 2, 1)
            out = channel.transmit(stacked)
            received = out.T.reshape(-1)[:total]
        else:
            received = np.zeros(0, dtype=np.int64)
        decoded = sw_decode(code, received)
        ok = (np.all(decoded <= code.embed.max_value)
              and np.array_equal(unembed(code.embed, decoded), truth))
        errors += int(not ok)
    return ExperimentResult(code.field.q, k, margin, code.n_values, trials, errors,
                            blocks * width)
