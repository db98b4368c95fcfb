from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, isqrt

import pytest

from divbound.gaussian import (
    CostCeilingError,
    GammaSpec,
    congruence_sum_A,
    congruence_sum_A_via_residues,
    discrepancy_table,
    main_term_M,
    rho,
    sequence_a,
)

# frozen from a 60-digit decimal evaluation of the same sums
M1_AT_100 = 47.4130511209931
M5_AT_100 = 16.193939156287037


def oracle_sequence(x: int, gamma: GammaSpec) -> dict:
    """Independent double loop over all ordered pairs."""
    a: dict[int, object] = {}
    for l in range(1, x + 1):
        for m in range(1, x + 1):
            n = l * l + m * m
            if n > x:
                break
            if gcd(l, m) == 1:
                c = gamma.coefficient(l)
                if c:
                    a[n] = a.get(n, 0) + c
    return a


def oracle_rho(d: int) -> int:
    return sum(1 for v in range(d) if (v * v + 1) % d == 0)


class TestGammaSpec:
    def test_all_ones_r1(self):
        g = GammaSpec(r=1)
        assert g.coefficient(1) == 1
        assert g.coefficient(7) == 1

    def test_all_ones_r2_support(self):
        g = GammaSpec(r=2)
        assert g.coefficient(4) == 1
        assert g.coefficient(3) == 0

    def test_table_mode(self):
        g = GammaSpec(r=2, mode="table", table={4: Fraction(1, 2), 9: -1})
        assert g.coefficient(4) == Fraction(1, 2)
        assert g.coefficient(9) == -1
        assert g.coefficient(16) == 0

    def test_rejects_off_support(self):
        with pytest.raises(ValueError):
            GammaSpec(r=2, mode="table", table={3: 1})

    def test_rejects_large_magnitude(self):
        with pytest.raises(ValueError):
            GammaSpec(r=1, mode="table", table={2: Fraction(3, 2)})

    def test_rejects_bad_r(self):
        with pytest.raises(ValueError):
            GammaSpec(r=0)

    def test_from_file(self, tmp_path):
        path = tmp_path / "gamma.txt"
        path.write_text("# support on squares\n1 1\n4 -1/2\n9 0.25\n")
        g = GammaSpec.from_file(str(path), r=2)
        assert g.coefficient(4) == Fraction(-1, 2)
        assert g.coefficient(9) == Fraction(1, 4)

    def test_from_file_rejects_magnitude(self, tmp_path):
        path = tmp_path / "gamma.txt"
        path.write_text("1 1.5\n")
        with pytest.raises(ValueError):
            GammaSpec.from_file(str(path), r=1)

    def test_from_file_rejects_garbage(self, tmp_path):
        path = tmp_path / "gamma.txt"
        path.write_text("1 one\n")
        with pytest.raises(ValueError):
            GammaSpec.from_file(str(path), r=1)


class TestSequence:
    def test_total_at_25(self):
        seq = sequence_a(25, GammaSpec(r=1))
        assert sum(seq.values()) == 11

    def test_x2_single_pair(self):
        assert sequence_a(2, GammaSpec(r=1)) == {2: 1}

    def test_square_support_at_25(self):
        seq = sequence_a(25, GammaSpec(r=2))
        assert seq[25] == 1  # (4, 3) contributes; (3, 4) has zero coefficient
        assert seq[17] == 2  # (1, 4) and (4, 1)

    def test_matches_oracle_enumeration(self):
        for x in (10, 50, 200, 500):
            for gamma in (GammaSpec(r=1), GammaSpec(r=2), GammaSpec(r=3)):
                assert sequence_a(x, gamma) == oracle_sequence(x, gamma)

    def test_ordered_pairs_weighted_separately(self):
        g = GammaSpec(r=2, mode="table", table={1: Fraction(1, 2), 4: 1})
        seq = sequence_a(25, g)
        # 17 = 1^2 + 4^2 = 4^2 + 1^2 picks up gamma_1 + gamma_4
        assert seq[17] == Fraction(3, 2)

    def test_magnitude_bound(self):
        rng = random.Random(6)
        table = {l * l: Fraction(rng.randrange(-4, 5), 4) for l in range(1, 10)}
        g = GammaSpec(r=2, mode="table", table=table)
        seq = sequence_a(400, g)
        counts = oracle_sequence(400, GammaSpec(r=2))
        for n, v in seq.items():
            assert abs(v) <= counts.get(n, 0)

    def test_memory_guard(self):
        with pytest.raises(ValueError):
            sequence_a(10**9, GammaSpec(r=1), max_x=10**6)


class TestRho:
    def test_convention_at_1(self):
        assert rho(1) == (1, [0])

    def test_examples(self):
        assert rho(5) == (2, [2, 3])
        assert rho(65)[0] == 4
        assert rho(12) == (0, [])
        assert rho(2) == (1, [1])
        assert rho(4) == (0, [])

    def test_brute_force_to_2000(self):
        for d in range(1, 2001):
            count, roots = rho(d)
            assert count == oracle_rho(d) if d > 1 else True
            assert len(roots) == count
            for v in roots:
                assert 0 <= v < d
                assert (v * v + 1) % d == 0 or d == 1

    def test_prime_power_lifting(self):
        for pa in (5**4, 13**3, 17**2, 29**5):
            count, roots = rho(pa)
            assert count == 2
            assert all((v * v + 1) % pa == 0 for v in roots)

    def test_multiplicative_on_coprime_pairs(self):
        rng = random.Random(8)
        for _ in range(200):
            a = rng.randrange(1, 1000)
            b = rng.randrange(1, 1000)
            if gcd(a, b) != 1:
                continue
            assert rho(a * b)[0] == rho(a)[0] * rho(b)[0]

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            rho(0)


class TestCongruenceSums:
    def test_d1_is_total(self):
        g = GammaSpec(r=1)
        seq = sequence_a(10**3, g)
        assert congruence_sum_A(10**3, 1, g) == sum(seq.values())

    def test_frozen_small_values(self):
        g = GammaSpec(r=1)
        assert congruence_sum_A(25, 5, g) == 6
        assert congruence_sum_A_via_residues(25, 2, g) == 3

    def test_d3_vanishes(self):
        g = GammaSpec(r=1)
        for x in (100, 1000, 5000):
            assert congruence_sum_A(x, 3, g) == 0

    def test_residue_path_matches_direct(self):
        for x in (100, 1000):
            for gamma in (GammaSpec(r=1), GammaSpec(r=2)):
                seq = sequence_a(x, gamma)
                for d in range(1, 31):
                    direct = congruence_sum_A(x, d, gamma, seq=seq)
                    via = congruence_sum_A_via_residues(x, d, gamma)
                    assert direct == via, (x, d, gamma.r)

    def test_zero_rho_forces_zero_sum(self):
        g = GammaSpec(r=1)
        for d in (3, 4, 7, 9, 11, 12, 19, 21, 49):
            assert rho(d)[0] == 0
            assert congruence_sum_A(2000, d, g) == 0
            assert congruence_sum_A_via_residues(2000, d, g) == 0


class TestMainTerm:
    def test_zero_rho(self):
        assert main_term_M(10**4, 3, GammaSpec(r=1)) == 0.0

    def test_frozen_d1_x100(self):
        got = main_term_M(100, 1, GammaSpec(r=1))
        assert got == pytest.approx(M1_AT_100, rel=1e-12)

    def test_frozen_d5_x100(self):
        got = main_term_M(100, 5, GammaSpec(r=1))
        assert got == pytest.approx(M5_AT_100, rel=1e-12)

    def test_rho_scaling_relation(self):
        # same coprime-filtered sum, scaled by rho(d)/d
        g = GammaSpec(r=1)
        raw = 0.0
        for l in range(1, isqrt(100) + 1):
            if l * l < 100 and gcd(l, 5) == 1:
                from divbound.arith import euler_phi, factorize

                raw += euler_phi(factorize(l)) / l * (100 - l * l) ** 0.5
        assert main_term_M(100, 5, g) == pytest.approx(2 / 5 * raw, rel=1e-12)


class TestDiscrepancyTable:
    def test_minimal_table(self):
        t = discrepancy_table(2, 1, GammaSpec(r=1))
        row = t.rows[0]
        assert row.A == 1 and row.rho == 1
        assert row.M == pytest.approx(1.0)

    def test_row_invariants(self):
        g = GammaSpec(r=1)
        t = discrepancy_table(10**4, 100, g)
        assert len(t.rows) == 100
        seq = sequence_a(10**4, g)
        assert t.rows[0].A == sum(seq.values())
        for row in t.rows:
            if row.rho == 0:
                assert row.A == 0 and row.M == 0.0
            assert row.abs_err == abs(float(row.A) - row.M)
        assert t.total_err == pytest.approx(sum(r.abs_err for r in t.rows))

    def test_csv_format(self):
        t = discrepancy_table(100, 5, GammaSpec(r=1))
        lines = t.to_csv().strip().split("\n")
        assert lines[0] == "d,A_d,rho_d,M_d,abs_err"
        assert len(lines) == 6
        first = lines[1].split(",")
        assert first[0] == "1"
        float(first[3])  # parses as a decimal

    def test_cost_ceiling(self):
        with pytest.raises(CostCeilingError) as err:
            discrepancy_table(10**6, 10**5, GammaSpec(r=1))
        assert "10" in str(err.value)  # refusal quotes the estimated cost
