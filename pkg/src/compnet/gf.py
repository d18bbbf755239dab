"""Exact arithmetic and dense linear algebra over prime fields GF(q).

Elements are represented as integer residues in ``[0, q)`` held in int64
numpy arrays.  All routines are exact: products are reduced before any
intermediate value can overflow 64-bit integers, so the module is valid for
any prime modulus up to 2**31 - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_MODULUS = 2**31 - 1

# Witness set making Miller-Rabin deterministic for every n < 3.3e24,
# far beyond the 2**31 - 1 modulus cap enforced below.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    candidate = max(2, n + 1)
    while not is_prime(candidate):
        candidate += 1
    if candidate > _MAX_MODULUS:
        raise ValueError(f"no admissible prime above {n} within the modulus cap")
    return candidate


@dataclass(frozen=True)
class PrimeField:
    """The prime field GF(q), with scalar arithmetic on residues.

    Parameters
    ----------
    q:
        Field order.  Must be prime and lie in ``[2, 2**31 - 1]``.
    """

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)):
            raise TypeError(f"field order must be an integer, got {type(self.q).__name__}")
        object.__setattr__(self, "q", int(self.q))
        if not 2 <= self.q <= _MAX_MODULUS:
            raise ValueError(f"field order {self.q} outside [2, 2**31 - 1]")
        if not is_prime(self.q):
            raise ValueError(f"field order {self.q} is not prime")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse.  Zero has none and raises ZeroDivisionError."""
        a = a % self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no multiplicative inverse in GF({self.q})")
        return pow(a, -1, self.q)

    def reduce(self, values) -> np.ndarray:
        """Reduce an integer array elementwise into ``[0, q)``."""
        return np.asarray(values, dtype=np.int64) % self.q


def scalar_arith(field: PrimeField, a: int, b: int, op: str) -> int:
    """Single residue operation: op in {add, sub, mul, inv}.

    ``inv`` inverts ``a`` and ignores ``b``; inverting zero raises.
    """
    if op == "add":
        return field.add(a, b)
    if op == "sub":
        return field.sub(a, b)
    if op == "mul":
        return field.mul(a, b)
    if op == "inv":
        return field.inv(a)
    raise ValueError(f"unknown op {op!r}, expected add, sub, mul, or inv")


def _matmul_reduced(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Product of residue matrices, chunked so int64 never overflows."""
    # Each partial sum accumulates at most `block` products of size (q-1)^2.
    block = max(1, (2**63 - 1) // max(1, (q - 1) ** 2) - 1)
    inner = a.shape[-1]
    if inner <= block:
        return (a @ b) % q
    acc = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    for start in range(0, inner, block):
        stop = start + block
        acc = (acc + a[..., start:stop] @ b[start:stop, ...]) % q
    return acc


class FieldMatrix:
    """An immutable matrix over a prime field.

    Entries are stored as an int64 array of residues; the backing array is
    marked read-only.  Arithmetic between matrices requires identical fields.
    """

    __slots__ = ("field", "array")

    def __init__(self, field: PrimeField, entries):
        arr = np.asarray(entries, dtype=np.int64) % field.q
        if arr.ndim != 2:
            raise ValueError(f"matrix entries must be 2-D, got {arr.ndim}-D")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "array", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FieldMatrix is immutable")

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    def _check_compatible(self, other: "FieldMatrix"):
        if not isinstance(other, FieldMatrix):
            raise TypeError(f"expected FieldMatrix, got {type(other).__name__}")
        if other.field.q != self.field.q:
            raise ValueError(f"field mismatch: GF({self.field.q}) vs GF({other.field.q})")

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_compatible(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch for product: {self.shape} @ {other.shape}")
        return FieldMatrix(self.field, _matmul_reduced(self.array, other.array, self.field.q))

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_compatible(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for sum: {self.shape} + {other.shape}")
        return FieldMatrix(self.field, (self.array + other.array) % self.field.q)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_compatible(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for difference: {self.shape} - {other.shape}")
        return FieldMatrix(self.field, (self.array - other.array) % self.field.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.field.q == other.field.q and np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash((self.field.q, self.array.tobytes(), self.shape))

    def __repr__(self) -> str:
        return f"FieldMatrix(GF({self.field.q}), shape={self.shape})"

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Multiply a residue vector or matrix (as a plain array) from the left."""
        x = self.field.reduce(x)
        if x.ndim == 1:
            return _matmul_reduced(self.array, x[:, None], self.field.q)[:, 0]
        return _matmul_reduced(self.array, x, self.field.q)

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.array.T)

    def rank(self) -> int:
        return mat_rank(self)

    def inverse(self) -> "FieldMatrix | None":
        return mat_invert(self)


def matrix(field: PrimeField, entries) -> FieldMatrix:
    """Build a :class:`FieldMatrix` from any integer array-like."""
    return FieldMatrix(field, entries)


def identity(field: PrimeField, n: int) -> FieldMatrix:
    return FieldMatrix(field, np.eye(n, dtype=np.int64))


def zeros(field: PrimeField, rows: int, cols: int) -> FieldMatrix:
    return FieldMatrix(field, np.zeros((rows, cols), dtype=np.int64))


def _row_reduce(m: np.ndarray, q: int, aug: np.ndarray | None = None):
    """In-place Gauss-Jordan elimination over GF(q).

    Scans columns left to right, picking the first nonzero entry below the
    current row as pivot.  Returns ``(rank, pivot_columns)``; ``m`` (and
    ``aug`` when given) are reduced to reduced row echelon form.
    """
    rows, cols = m.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
            if aug is not None:
                aug[[r, p]] = aug[[p, r]]
        pivot_inv = pow(int(m[r, c]), -1, q)
        m[r] = m[r] * pivot_inv % q
        if aug is not None:
            aug[r] = aug[r] * pivot_inv % q
        col = m[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % q
            if aug is not None:
                aug[hit] = (aug[hit] - np.outer(col[hit], aug[r])) % q
        pivots.append(c)
        r += 1
    return r, pivots


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Matrix product over the common field."""
    return a @ b


def mat_rank(a: FieldMatrix) -> int:
    """Rank over GF(q)."""
    work = a.array.copy()
    rank, _ = _row_reduce(work, a.field.q)
    return rank


def mat_invert(a: FieldMatrix) -> FieldMatrix | None:
    """Inverse of a square matrix, or None when the matrix is singular.

    Singularity is an expected outcome for randomly drawn matrices, so it is
    reported through the return value rather than an exception.
    """
    if a.rows != a.cols:
        raise ValueError(f"only square matrices can be inverted, got shape {a.shape}")
    work = a.array.copy()
    aug = np.eye(a.rows, dtype=np.int64)
    rank, _ = _row_reduce(work, a.field.q, aug)
    if rank < a.rows:
        return None
    return FieldMatrix(a.field, aug)


def solve(a: FieldMatrix, y: np.ndarray):
    """Solve ``a x = y`` over GF(q).

    Returns ``(particular, null_basis)`` where ``particular`` is one solution
    (1-D int64 array of length ``a.cols``) and ``null_basis`` is an array of
    shape ``(nullity, a.cols)`` whose rows span the null space of ``a``.
    Returns None when the system is inconsistent.  An empty constraint matrix
    (zero rows) is consistent with everything.
    """
    q = a.field.q
    y = a.field.reduce(y).ravel()
    if y.shape[0] != a.rows:
        raise ValueError(f"right-hand side length {y.shape[0]} does not match {a.rows} rows")
    work = a.array.copy()
    aug = y[:, None].copy()
    rank, pivots = _row_reduce(work, q, aug)
    # Any zero row of the reduced matrix must carry a zero right-hand side.
    if np.any(aug[rank:, 0] % q != 0):
        return None
    particular = np.zeros(a.cols, dtype=np.int64)
    for row_idx, c in enumerate(pivots):
        particular[c] = aug[row_idx, 0]
    free_cols = [c for c in range(a.cols) if c not in set(pivots)]
    null_basis = np.zeros((len(free_cols), a.cols), dtype=np.int64)
    for b_idx, free in enumerate(free_cols):
        null_basis[b_idx, free] = 1
        for row_idx, c in enumerate(pivots):
            null_basis[b_idx, c] = (-work[row_idx, free]) % q
    return particular, null_basis


def random_matrix(field: PrimeField, rows: int, cols: int, rng: np.random.Generator) -> FieldMatrix:
    """Matrix with i.i.d. entries uniform over the field."""
    if rows < 0 or cols < 0:
        raise ValueError(f"matrix dimensions must be nonnegative, got {rows}x{cols}")
    entries = rng.integers(0, field.q, size=(rows, cols), dtype=np.int64)
    return FieldMatrix(field, entries)


def invertible_fraction_expected(q: int, n: int) -> float:
    """Probability that a uniform n x n matrix over GF(q) is invertible."""
    out = 1.0
    for i in range(1, n + 1):
        out *= 1.0 - q ** (-i)
    return out
