import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morphcert.errors import DomainError, ResourceError
from morphcert.numtheory import (
    CountSeries,
    SieveTable,
    count_series,
    diff_bound_check,
    factorize,
    lr_estimate_sieve,
    lr_euler_product,
    multiplicativity_check,
    sieve_s2_additive,
    sieve_s2_multiplicative,
    sieve_s2_nonzero,
    spf_sieve,
)

# 0.76422365358922066 is the Landau-Ramanujan constant (OEIS A064533)
LR_CONSTANT = 0.76422365358922066


def brute_s2(n: int) -> int:
    return int(
        any(
            round(math.isqrt(n - x * x)) ** 2 == n - x * x
            for x in range(math.isqrt(n) + 1)
        )
    )


def brute_s2_nonzero(n: int) -> int:
    for x in range(1, math.isqrt(n) + 1):
        rest = n - x * x
        y = math.isqrt(rest)
        if y >= 1 and y * y == rest:
            return 1
    return 0


class TestSieves:
    def test_small_membership(self):
        table = sieve_s2_additive(10)
        assert [n for n in range(11) if table.bit(n)] == [0, 1, 2, 4, 5, 8, 9, 10]
        nz = sieve_s2_nonzero(10)
        assert [n for n in range(11) if nz.bit(n)] == [2, 5, 8, 10]

    def test_matches_brute_force(self):
        table = sieve_s2_additive(500)
        nz = sieve_s2_nonzero(500)
        for n in range(501):
            assert table.bit(n) == brute_s2(n), n
            assert nz.bit(n) == brute_s2_nonzero(n), n

    def test_multiplicative_route_agrees(self):
        # dual-route oracle at 1e5 (the acceptance suite runs 1e6)
        a = sieve_s2_additive(10**5)
        m = sieve_s2_multiplicative(10**5)
        assert np.array_equal(a.bits, m.bits)

    def test_multiplicative_tiny(self):
        for N in (0, 1, 2, 3, 9):
            a = sieve_s2_additive(N)
            m = sieve_s2_multiplicative(N)
            assert np.array_equal(a.bits, m.bits), N

    def test_nonzero_subset_of_s2(self):
        a = sieve_s2_additive(10**4)
        nz = sieve_s2_nonzero(10**4)
        assert not np.any(nz.bits & ~a.bits)

    def test_bit_range(self):
        table = sieve_s2_additive(10)
        assert table.bit(0) == 1
        with pytest.raises(DomainError):
            table.bit(11)
        with pytest.raises(DomainError):
            table.bit(-1)

    def test_rejects_negative_limit(self):
        for build in (sieve_s2_additive, sieve_s2_nonzero, sieve_s2_multiplicative):
            with pytest.raises(DomainError):
                build(-1)

    def test_memory_budget(self):
        for build in (sieve_s2_additive, sieve_s2_nonzero, sieve_s2_multiplicative):
            with pytest.raises(ResourceError):
                build(10**7, mem_budget=1024)


class TestSpf:
    def test_table(self):
        spf = spf_sieve(30)
        assert spf[0] == 0 and spf[1] == 1
        assert spf[2] == 2 and spf[17] == 17  # primes map to themselves
        assert spf[12] == 2 and spf[15] == 3 and spf[25] == 5

    def test_factorize(self):
        spf = spf_sieve(1000)
        assert factorize(360, spf) == [(2, 3), (3, 2), (5, 1)]
        assert factorize(1, spf) == []
        assert factorize(997, spf) == [(997, 1)]
        for n in range(1, 200):
            assert math.prod(p**e for p, e in factorize(n, spf)) == n

    def test_factorize_range(self):
        spf = spf_sieve(10)
        with pytest.raises(DomainError):
            factorize(0, spf)
        with pytest.raises(DomainError):
            factorize(11, spf)


class TestCountSeries:
    def test_known_counts(self):
        table = sieve_s2_additive(100)
        series = count_series(table, [0, 10, 100])
        # 44 members of A001481 in [0, 100], 0 included
        assert series.entries == ((0, 1), (10, 8), (100, 44))
        nz = sieve_s2_nonzero(100)
        assert count_series(nz, [10]).entries == ((10, 4),)

    def test_empty_and_bounds(self):
        table = sieve_s2_additive(10)
        assert count_series(table, []).entries == ()
        with pytest.raises(DomainError):
            count_series(table, [11])
        with pytest.raises(DomainError):
            count_series(table, [-1])


class TestLrEstimates:
    def test_sieve_formula(self):
        series = CountSeries(((100, 43),))
        (est,) = lr_estimate_sieve(series)
        assert est.method == "sieve"
        assert est.parameter == 100
        assert est.value == pytest.approx(43 * math.sqrt(math.log(100)) / 100)
        assert est.tail_bound is None

    def test_sieve_rejects_small_n(self):
        with pytest.raises(DomainError):
            lr_estimate_sieve(CountSeries(((2, 2),)))

    def test_sieve_estimate_descends_toward_constant(self):
        table = sieve_s2_additive(10**6)
        ests = lr_estimate_sieve(count_series(table, [10**4, 10**5, 10**6]))
        values = [e.value for e in ests]
        assert values[0] > values[1] > values[2] > LR_CONSTANT
        assert 0.76 < values[2] < 0.90

    def test_euler_exact_small_cases(self):
        # only p = 3 contributes below 5: K = sqrt(0.5/(1 - 1/9)) = 3/4
        assert lr_euler_product(3).value == 0.75
        assert lr_euler_product(4).value == 0.75
        # no primes = 3 (mod 4) at or below 2
        assert lr_euler_product(2).value == math.sqrt(0.5)

    def test_euler_converges_to_literature_value(self):
        est = lr_euler_product(10**6)
        assert est.tail_bound is not None and est.tail_bound < 1.1e-6
        # truncation only omits factors > 1, so the value sits just below K
        assert LR_CONSTANT - est.tail_bound < est.value < LR_CONSTANT

    def test_euler_monotone_in_p(self):
        v1 = lr_euler_product(10**3)
        v2 = lr_euler_product(10**4)
        assert v1.value < v2.value < LR_CONSTANT
        assert v1.tail_bound > v2.tail_bound

    def test_euler_rejects(self):
        with pytest.raises(DomainError):
            lr_euler_product(1)
        with pytest.raises(ResourceError):
            lr_euler_product(10**7, mem_budget=1024)


class TestDiffBound:
    def test_equality_case_at_ten(self):
        # B(10) = 8, B'(10) = 4: diff 4 == floor(sqrt(10)) + 1
        first, max_diff = diff_bound_check(10)
        assert first is None
        assert max_diff == 4

    def test_n_zero(self):
        assert diff_bound_check(0) == (None, 1)

    def test_holds_to_ten_thousand(self):
        first, max_diff = diff_bound_check(10**4)
        assert first is None
        assert max_diff <= math.isqrt(10**4) + 1

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            diff_bound_check(-1)


class TestMultiplicativity:
    def test_clean_table_has_no_counterexample(self):
        table = sieve_s2_additive(10**4)
        assert multiplicativity_check(table, 100) is None

    def test_corrupted_table_is_caught(self):
        table = sieve_s2_additive(10**4)
        bad = SieveTable(table.limit, table.bits.copy(), table.kind)
        bad.bits[25] ^= 1  # 25 = 3^2 + 4^2, now wrongly marked non-member
        hit = multiplicativity_check(bad, 100)
        assert hit == (2, 25)
        p, q = hit
        assert math.gcd(p, q) == 1
        assert bad.bit(p) & bad.bit(q) != bad.bit(p * q)

    def test_rejects(self):
        table = sieve_s2_additive(100)
        with pytest.raises(DomainError):
            multiplicativity_check(table, 0)
        with pytest.raises(DomainError):
            multiplicativity_check(table, 11)  # 121 > 100


# --- properties -------------------------------------------------------------

_TABLE = sieve_s2_additive(10**6)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 1000), st.integers(1, 1000))
def test_multiplicativity_random_pairs(p, q):
    if math.gcd(p, q) == 1:
        assert _TABLE.bit(p) & _TABLE.bit(q) == _TABLE.bit(p * q)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_membership_random_vs_brute(n):
    assert _TABLE.bit(n) == brute_s2(n)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 998))
def test_count_series_is_cumulative(n):
    series = count_series(_TABLE, [n, n + 1])
    (a_n, b_n), (_, b_next) = series.entries
    assert b_next - b_n == _TABLE.bit(n + 1)
