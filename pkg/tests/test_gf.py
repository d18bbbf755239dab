import numpy as np
import pytest

from compnet.gf import (
    FieldMatrix,
    PrimeField,
    identity,
    invertible_fraction_expected,
    is_prime,
    mat_invert,
    mat_mul,
    mat_rank,
    matrix,
    next_prime,
    random_matrix,
    scalar_arith,
    solve,
    zeros,
)


# ---------------------------------------------------------------------------
# primality
# ---------------------------------------------------------------------------


def test_is_prime_small_values():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}
    for n in range(-3, 32):
        assert is_prime(n) == (n in primes)


def test_next_prime_is_strictly_above():
    assert next_prime(1) == 2
    assert next_prime(2) == 3
    assert next_prime(4) == 5
    assert next_prime(7) == 11
    assert next_prime(14) == 17
    assert next_prime(90) == 97
    for n in range(0, 200):
        q = next_prime(n)
        assert q > n and is_prime(q)
        assert all(not is_prime(m) for m in range(n + 1, q))


def test_prime_field_rejects_composite():
    for bad in (0, 1, 4, 6, 9, 100):
        with pytest.raises(ValueError):
            PrimeField(bad)


# ---------------------------------------------------------------------------
# field axioms, exhaustive over small primes
# ---------------------------------------------------------------------------


def test_field_axioms_exhaustive():
    for q in (2, 3, 5, 7, 11):
        f = PrimeField(q)
        elems = range(q)
        for a in elems:
            assert f.add(a, 0) == a
            assert f.mul(a, 1) == a
            assert f.add(a, f.neg(a)) == 0
            if a != 0:
                assert f.mul(a, f.inv(a)) == 1
            for b in elems:
                assert f.add(a, b) == f.add(b, a)
                assert f.mul(a, b) == f.mul(b, a)
                assert f.sub(a, b) == f.add(a, f.neg(b))
                for c in elems:
                    assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_inverse_of_zero_rejected():
    f = PrimeField(7)
    with pytest.raises(ZeroDivisionError):
        f.inv(0)
    with pytest.raises(ZeroDivisionError):
        scalar_arith(f, 0, 3, "inv")


def test_scalar_arith_matches_methods():
    f = PrimeField(11)
    for a in range(11):
        for b in range(11):
            assert scalar_arith(f, a, b, "add") == f.add(a, b)
            assert scalar_arith(f, a, b, "sub") == f.sub(a, b)
            assert scalar_arith(f, a, b, "mul") == f.mul(a, b)
        if a != 0:
            assert scalar_arith(f, a, 0, "inv") == f.inv(a)
    with pytest.raises(ValueError):
        scalar_arith(f, 1, 2, "div")


def test_reduce_maps_negatives_into_range():
    f = PrimeField(5)
    out = f.reduce(np.array([-1, -7, 12, 5]))
    assert out.tolist() == [4, 3, 2, 0]


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def test_matrix_ops_match_integer_arithmetic():
    f = PrimeField(7)
    a = matrix(f, [[1, 2], [3, 4]])
    b = matrix(f, [[5, 6], [0, 1]])
    assert (a + b) == matrix(f, [[6, 1], [3, 5]])
    assert (a - b) == matrix(f, [[3, 3], [3, 3]])
    assert (a @ b) == matrix(f, [[5, 1], [1, 1]])
    assert mat_mul(a, b) == a @ b
    assert a.T == matrix(f, [[1, 3], [2, 4]])


def test_identity_is_neutral():
    rng = np.random.default_rng(3)
    for q in (2, 5, 13):
        f = PrimeField(q)
        for _ in range(10):
            a = random_matrix(f, 4, 4, rng)
            eye = identity(f, 4)
            assert a @ eye == a
            assert eye @ a == a


def test_matmul_survives_large_prime():
    # entries near q must not overflow int64 inside the product
    q = 2147483647
    f = PrimeField(q)
    a = matrix(f, [[q - 1, q - 2], [q - 3, q - 4]])
    b = matrix(f, [[q - 5, q - 6], [q - 7, q - 8]])
    got = (a @ b).array
    for i in range(2):
        for j in range(2):
            want = sum(int(a.array[i, m]) * int(b.array[m, j]) for m in range(2)) % q
            assert int(got[i, j]) == want


def test_rank_of_identity_and_zero():
    f = PrimeField(5)
    assert identity(f, 6).rank() == 6
    assert zeros(f, 3, 4).rank() == 0
    assert mat_rank(identity(f, 6)) == 6


def test_rank_of_product_bounded_by_factors():
    rng = np.random.default_rng(11)
    for _ in range(60):
        q = int(rng.choice([2, 3, 7]))
        f = PrimeField(q)
        r1, c1, c2 = (int(x) for x in rng.integers(1, 6, size=3))
        a = random_matrix(f, r1, c1, rng)
        b = random_matrix(f, c1, c2, rng)
        assert (a @ b).rank() <= min(a.rank(), b.rank())


def test_inverse_round_trip_and_singular_none():
    rng = np.random.default_rng(5)
    f = PrimeField(11)
    found = 0
    for _ in range(40):
        a = random_matrix(f, 4, 4, rng)
        inv = mat_invert(a)
        if inv is None:
            assert a.rank() < 4
            continue
        found += 1
        assert a @ inv == identity(f, 4)
        assert inv @ a == identity(f, 4)
        assert a.inverse() == inv
    assert found > 10
    # rank-deficient by construction: duplicate row
    sing = matrix(f, [[1, 2], [1, 2]])
    assert mat_invert(sing) is None
    with pytest.raises(ValueError):
        mat_invert(zeros(f, 2, 3))


def test_matrix_equality_and_hash():
    f = PrimeField(3)
    a = matrix(f, [[1, 2], [0, 1]])
    b = matrix(f, [[1, 2], [0, 1]])
    assert a == b and hash(a) == hash(b)
    assert a != matrix(f, [[1, 2], [0, 2]])


def test_apply_matches_matmul_on_plain_arrays():
    rng = np.random.default_rng(8)
    f = PrimeField(7)
    a = random_matrix(f, 3, 5, rng)
    x = rng.integers(0, 7, size=(5, 4), dtype=np.int64)
    assert np.array_equal(a.apply(x), (a.array @ x) % 7)


# ---------------------------------------------------------------------------
# linear solving
# ---------------------------------------------------------------------------


def test_solve_reproduces_planted_solutions():
    rng = np.random.default_rng(21)
    for _ in range(50):
        q = int(rng.choice([2, 3, 5]))
        f = PrimeField(q)
        rows, cols = (int(x) for x in rng.integers(1, 6, size=2))
        a = random_matrix(f, rows, cols, rng)
        x0 = rng.integers(0, q, size=cols, dtype=np.int64)
        y = (a.array @ x0) % q
        res = solve(a, y)
        assert res is not None
        particular, basis = res
        assert np.array_equal((a.array @ particular) % q, y)
        assert basis.shape[1] == cols
        for row in basis:
            assert np.array_equal((a.array @ row) % q, np.zeros(rows, dtype=np.int64))
        # any coset member is again a solution
        if basis.shape[0]:
            coefs = rng.integers(0, q, size=basis.shape[0], dtype=np.int64)
            member = (particular + coefs @ basis) % q
            assert np.array_equal((a.array @ member) % q, y)


def test_solve_solution_count_is_q_to_nullity():
    f = PrimeField(3)
    a = matrix(f, [[1, 2, 0], [0, 0, 1]])
    y = np.array([1, 2])
    particular, basis = solve(a, y)
    # enumerate the full solution set directly
    brute = set()
    for x0 in range(3):
        for x1 in range(3):
            for x2 in range(3):
                if (x0 + 2 * x1) % 3 == 1 and x2 % 3 == 2:
                    brute.add((x0, x1, x2))
    spanned = set()
    for c in range(3 ** basis.shape[0]):
        coefs = np.array([(c // 3 ** i) % 3 for i in range(basis.shape[0])])
        member = (particular + coefs @ basis) % 3
        spanned.add(tuple(int(v) for v in member))
    assert spanned == brute
    assert len(brute) == 3 ** basis.shape[0]


def test_solve_detects_inconsistency():
    f = PrimeField(2)
    a = matrix(f, [[1], [1]])
    assert solve(a, np.array([0, 1])) is None


# ---------------------------------------------------------------------------
# random draws
# ---------------------------------------------------------------------------


def test_random_matrix_range_and_determinism():
    f = PrimeField(13)
    a = random_matrix(f, 6, 7, np.random.default_rng(99))
    b = random_matrix(f, 6, 7, np.random.default_rng(99))
    assert a == b
    assert int(a.array.min()) >= 0 and int(a.array.max()) < 13


def test_invertible_fraction_expected_values():
    assert invertible_fraction_expected(2, 1) == pytest.approx(0.5)
    assert invertible_fraction_expected(2, 2) == pytest.approx(0.375)
    # (1 - 1/5)(1 - 1/25)(1 - 1/125)
    assert invertible_fraction_expected(5, 3) == pytest.approx(0.8 * 0.96 * 0.992)
    # larger fields lose fewer draws
    assert invertible_fraction_expected(17, 4) > invertible_fraction_expected(2, 4)
