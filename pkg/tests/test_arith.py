from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, isqrt

import pytest

from divbound.arith import (
    Factorization,
    divisors_from_factorization,
    divisors_up_to_fourth_root,
    euler_phi,
    factorize,
    integer_kth_root,
    is_prime,
    next_prime_after,
    next_prime_in,
    omega,
    sieve_primes,
    spf_sieve_segment,
    tau,
)
from oracles import (
    oracle_divisors,
    oracle_factor,
    oracle_is_prime,
    oracle_phi,
    oracle_tau,
)


class TestFactorize:
    def test_one_has_empty_factorization(self):
        assert factorize(1).factors == ()

    def test_360(self):
        assert factorize(360).factors == tuple(oracle_factor(360))
        assert factorize(360).factors == ((2, 3), (3, 2), (5, 1))

    def test_prime(self):
        assert factorize(97).factors == ((97, 1),)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            factorize(0)
        with pytest.raises(ValueError):
            factorize(-6)

    def test_matches_trial_oracle_up_to_3000(self):
        for n in range(1, 3001):
            assert factorize(n).factors == tuple(oracle_factor(n))

    def test_large_semiprime(self):
        p, q = 1048583, 1048589  # both just above the sieved prime cache
        f = factorize(p * q)
        assert f.factors == ((p, 1), (q, 1))

    def test_deterministic(self):
        assert factorize(2310) == factorize(2310)

    def test_all_reported_primes_pass_primality(self):
        rng = random.Random(7)
        for _ in range(300):
            n = rng.randrange(2, 10**9)
            for p, a in factorize(n).factors:
                assert is_prime(p)
                assert a >= 1


class TestFactorizationType:
    def test_product_invariant_enforced(self):
        with pytest.raises(ValueError):
            Factorization(12, ((2, 1), (3, 1)))

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            Factorization(6, ((3, 1), (2, 1)))

    def test_exponent_positive(self):
        with pytest.raises(ValueError):
            Factorization(2, ((2, 1), (3, 0)))

    def test_unit_iff_empty(self):
        assert Factorization(1, ()).factors == ()
        with pytest.raises(ValueError):
            Factorization(2, ())


class TestMultiplicativeFunctions:
    def test_tau_examples(self):
        assert tau(factorize(1)) == 1
        assert tau(factorize(30)) == oracle_tau(30) == 8
        assert tau(factorize(144)) == oracle_tau(144) == 15

    def test_omega_examples(self):
        assert omega(factorize(1)) == 0
        assert omega(factorize(12)) == 2
        assert omega(factorize(30030)) == len(oracle_factor(30030)) == 6

    def test_phi_examples(self):
        assert euler_phi(factorize(1)) == 1
        assert euler_phi(factorize(10)) == oracle_phi(10) == 4
        assert euler_phi(factorize(9)) == oracle_phi(9) == 6

    def test_tau_against_divisor_count_up_to_10_4(self, small_tau_table):
        for n in range(1, 10**4 + 1):
            assert tau(factorize(n)) == small_tau_table[n]

    def test_multiplicativity_on_random_coprime_pairs(self):
        # tau and phi multiply, omega adds, across 10^4 coprime pairs
        rng = random.Random(20260808)
        checked = 0
        while checked < 10**4:
            m = rng.randrange(1, 10**5)
            n = rng.randrange(1, 10**5)
            if gcd(m, n) != 1:
                continue
            fm, fn, fmn = factorize(m), factorize(n), factorize(m * n)
            assert tau(fmn) == tau(fm) * tau(fn)
            assert omega(fmn) == omega(fm) + omega(fn)
            assert euler_phi(fmn) == euler_phi(fm) * euler_phi(fn)
            checked += 1

    def test_divisor_enumeration_matches_oracle(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randrange(1, 10**6)
            assert divisors_from_factorization(factorize(n)) == oracle_divisors(n)


class TestDivisorsUpToFourthRoot:
    def test_examples(self):
        assert divisors_up_to_fourth_root(1) == [1]
        assert divisors_up_to_fourth_root(30) == [1, 2]
        assert divisors_up_to_fourth_root(2431) == [1]

    def test_perfect_power_boundaries(self):
        assert 2 in divisors_up_to_fourth_root(16)
        assert divisors_up_to_fourth_root(15) == [1]
        assert 3 in divisors_up_to_fourth_root(81)
        assert 3 not in divisors_up_to_fourth_root(80)
        assert 10 in divisors_up_to_fourth_root(10**4)

    def test_oracle_equivalence_up_to_10_4(self):
        for n in range(1, 10**4 + 1):
            expected = [d for d in oracle_divisors(n) if d**4 <= n]
            assert divisors_up_to_fourth_root(n) == expected

    def test_exact_membership_up_to_10_5(self):
        # both directions of (d | n and d^4 <= n) <=> membership, with the
        # comparison done through Fraction to rule out any float drift
        for n in range(1, 10**5 + 1):
            got = set(divisors_up_to_fourth_root(n))
            for d in range(1, 18):
                member = n % d == 0 and Fraction(d) ** 4 <= n
                assert (d in got) == member, (n, d)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            divisors_up_to_fourth_root(0)


class TestSieveSegment:
    def test_example_2_to_10(self):
        seg = spf_sieve_segment(2, 10)
        assert list(seg.spf) == [2, 3, 2, 5, 2, 7, 2, 3, 2]

    def test_unit_sentinel(self):
        seg = spf_sieve_segment(1, 1)
        assert seg.spf_of(1) == 1

    def test_window_100_110(self):
        seg = spf_sieve_segment(100, 110)
        assert seg.spf_of(101) == 101
        assert seg.spf_of(105) == 3

    def test_entries_divide_and_are_least(self):
        seg = spf_sieve_segment(2, 5000)
        for n in range(2, 5001):
            p = seg.spf_of(n)
            assert n % p == 0
            assert p == oracle_factor(n)[0][0]

    def test_consistency_with_factorize(self):
        for lo, hi in [(1, 3000), (10**6 - 500, 10**6 + 500), (999983, 10**6)]:
            seg = spf_sieve_segment(lo, hi)
            for n in range(max(lo, 2), hi + 1):
                assert seg.factor(n) == list(factorize(n).factors)

    def test_rejects_bad_ranges(self):
        with pytest.raises(ValueError):
            spf_sieve_segment(10, 5)
        with pytest.raises(ValueError):
            spf_sieve_segment(0, 5)
        with pytest.raises(ValueError):
            spf_sieve_segment(1, 100, max_size=10)

    def test_rejects_out_of_range_lookup(self):
        seg = spf_sieve_segment(10, 20)
        with pytest.raises(ValueError):
            seg.spf_of(9)


class TestPrimes:
    def test_is_prime_matches_oracle(self):
        for n in range(10**4):
            assert is_prime(n) == oracle_is_prime(n), n

    def test_is_prime_large(self):
        assert is_prime((1 << 61) - 1)  # Mersenne prime
        assert not is_prime((1 << 60) + 1)

    def test_next_prime_in_examples(self):
        assert next_prime_in(11, 22) == 13
        assert next_prime_in(8, 9) is None
        assert next_prime_in(2, 4) == 3
        assert next_prime_in(1, 3) == 2

    def test_next_prime_after(self):
        assert next_prime_after(1) == 2
        assert next_prime_after(2) == 3
        assert next_prime_after(10**6) == 1000003

    def test_sieve_primes(self):
        assert sieve_primes(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        assert sieve_primes(1) == []


class TestIntegerKthRoot:
    def test_exact_on_powers(self):
        for base in (2, 3, 10, 99):
            for k in range(2, 8):
                n = base**k
                assert integer_kth_root(n, k) == base
                assert integer_kth_root(n - 1, k) == base - 1

    def test_floor_property_random(self):
        rng = random.Random(11)
        for _ in range(500):
            n = rng.randrange(0, 1 << 62)
            k = rng.randrange(2, 7)
            r = integer_kth_root(n, k)
            assert r**k <= n < (r + 1) ** k

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            integer_kth_root(-1, 2)
        with pytest.raises(ValueError):
            integer_kth_root(4, 0)
