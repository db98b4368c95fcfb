from __future__ import annotations

from fractions import Fraction

import pytest

from divbound.arith import is_prime
from divbound.census import CensusConfig, divisor_weight_sum
from divbound.lowerbound import LowerBoundInstance, build_instance, verify_instance


def landreau_weight(d: int) -> int:
    t = 1
    w = 0
    m = d
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            t *= e + 1
            w += 1
        p += 1
    if m > 1:
        t *= 2
        w += 1
    return (2**w * t) ** 4


class TestBuildInstance:
    def test_k4_canonical(self):
        inst = build_instance(4)
        assert inst.primes == (11, 13, 17)
        assert inst.n == 2431
        assert inst.ratio == 8
        assert 11**4 > 2431

    def test_k2(self):
        inst = build_instance(2)
        assert inst.primes == (2,)
        assert inst.n == 2
        assert inst.ratio == 2
        assert 2**2 > 2

    def test_k3(self):
        inst = build_instance(3)
        assert inst.primes == (3, 5)
        assert inst.n == 15
        assert 3**3 > 15

    def test_k_2_to_12_all_verify(self):
        for k in range(2, 13):
            inst = build_instance(k)
            notes: list[str] = []
            assert verify_instance(inst, diagnostics=notes), notes
            assert inst.ratio == 2 ** (k - 1)
            # chained inequality in exact arithmetic
            p1, rest = inst.primes[0], inst.primes[1:]
            prod = 1
            for p in rest:
                prod *= p
            if k >= 3:
                assert p1 ** (k - 1) > prod
            assert all(is_prime(p) for p in inst.primes)

    def test_seed_above(self):
        inst = build_instance(4, seed_above=100)
        assert inst.primes[0] == 101
        assert verify_instance(inst)

    def test_rejects_k1(self):
        with pytest.raises(ValueError):
            build_instance(1)

    def test_rejects_oversized_k(self):
        with pytest.raises(OverflowError):
            build_instance(13)


class TestVerifyInstance:
    def test_default_weight(self):
        assert verify_instance(build_instance(4))

    def test_landreau_weight(self):
        # S depends only on f(1) = 1 here, so any multiplicative weight works
        assert verify_instance(build_instance(4), weight=landreau_weight)

    def test_corrupted_interval_detected(self):
        # replace p3 by a prime above 2^2 * p1 = 44
        bad = LowerBoundInstance(4, (11, 13, 47), 11 * 13 * 47, Fraction(8))
        notes: list[str] = []
        assert not verify_instance(bad, diagnostics=notes)
        assert any("p3" in msg for msg in notes)

    def test_composite_detected(self):
        bad = LowerBoundInstance(4, (11, 15, 17), 11 * 15 * 17, Fraction(8))
        assert not verify_instance(bad)

    def test_small_leading_prime_detected(self):
        bad = LowerBoundInstance(4, (7, 11, 13), 7 * 11 * 13, Fraction(8))
        notes: list[str] = []
        assert not verify_instance(bad, diagnostics=notes)
        assert any("p1" in msg for msg in notes)

    def test_wrong_ratio_detected(self):
        bad = LowerBoundInstance(4, (11, 13, 17), 2431, Fraction(4))
        assert not verify_instance(bad)

    def test_bad_weight_rejected(self):
        notes: list[str] = []
        assert not verify_instance(
            build_instance(4), weight=lambda d: 2, diagnostics=notes
        )
        assert any("weight(1)" in msg for msg in notes)


class TestCensusLink:
    def test_weight_sum_is_one(self):
        # the census sum over admissible divisors collapses to f(1) = 1
        for k in (2, 3, 4, 5):
            inst = build_instance(k)
            cfg = CensusConfig(n_max=max(inst.n, 1), k=k)
            assert divisor_weight_sum(inst.n, cfg) == 1

    def test_k4_instance_is_an_equality_case(self):
        inst = build_instance(4)
        cfg = CensusConfig(n_max=inst.n)
        assert 2 ** (inst.k - 1) == 8 * divisor_weight_sum(inst.n, cfg)
