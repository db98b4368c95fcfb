"""Sequences supported on sums of two coprime squares, their congruence
sums over multiples of d, root counts of x^2 + 1 mod d, and the
equidistribution main terms, all computable exactly at desk scale.

a_n sums a coefficient gamma_l over ordered pairs (l, m) of positive
coprime integers with l^2 + m^2 = n; coefficients live on perfect r-th
powers and never exceed 1 in magnitude. A_d(x) sums a_n over multiples of
d, and M_d(x) is its expected size given that solutions of v^2 = -1 spread
evenly over the rho(d) residue classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from math import gcd, isqrt, sqrt

from .arith import euler_phi, factorize, integer_kth_root

__all__ = [
    "GammaSpec",
    "GaussianRow",
    "GaussianTable",
    "CostCeilingError",
    "sequence_a",
    "rho",
    "congruence_sum_A",
    "congruence_sum_A_via_residues",
    "main_term_M",
    "discrepancy_table",
]

DEFAULT_MAX_X = 10**8
DEFAULT_COST_CEILING = 10**9


class CostCeilingError(RuntimeError):
    """Requested table is beyond the configured desk-scale budget."""


def is_rth_power(l: int, r: int) -> bool:
    return integer_kth_root(l, r) ** r == l


@dataclass(frozen=True)
class GammaSpec:
    """Coefficient family gamma_l: zero off perfect r-th powers, magnitude
    at most 1. Mode "all_ones" puts 1 on every r-th power; mode "table"
    reads explicit rational coefficients."""

    r: int = 1
    mode: str = "all_ones"
    table: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("power support r must be >= 1")
        if self.mode not in ("all_ones", "table"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "table":
            clean = {}
            for l, c in self.table.items():
                if l < 1:
                    raise ValueError(f"support point {l} must be positive")
                c = Fraction(c)
                if not is_rth_power(l, self.r):
                    raise ValueError(
                        f"coefficient at {l}: support must be a perfect {self.r}-th power"
                    )
                if abs(c) > 1:
                    raise ValueError(f"coefficient at {l} has magnitude {c} > 1")
                clean[l] = c
            object.__setattr__(self, "table", clean)
        elif self.table:
            raise ValueError("mode all_ones takes no table")

    def coefficient(self, l: int) -> int | Fraction:
        if self.mode == "all_ones":
            return 1 if is_rth_power(l, self.r) else 0
        return self.table.get(l, Fraction(0))

    @classmethod
    def from_file(cls, path: str, r: int = 1) -> "GammaSpec":
        """Parse whitespace-separated "l coefficient" lines; # comments ok."""
        table: dict[int, Fraction] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{line_no}: expected 'l coefficient'")
                try:
                    l = int(parts[0])
                    c = Fraction(parts[1])
                except (ValueError, ZeroDivisionError) as exc:
                    raise ValueError(f"{path}:{line_no}: {exc}")
                table[l] = c
        return cls(r=r, mode="table", table=table)


def sequence_a(
    x: int, gamma: GammaSpec, max_x: int = DEFAULT_MAX_X
) -> dict[int, int | Fraction]:
    """a_n for n <= x as a sparse map, by enumerating ordered coprime pairs
    (l, m) with l^2 + m^2 <= x and adding gamma_l at l^2 + m^2. Exact."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > max_x:
        raise ValueError(f"x = {x} exceeds the memory ceiling {max_x}")
    a: dict[int, int | Fraction] = {}
    l = 1
    while l * l < x:
        cl = gamma.coefficient(l)
        if cl:
            ll = l * l
            for m in range(1, isqrt(x - ll) + 1):
                if gcd(l, m) == 1:
                    n = ll + m * m
                    a[n] = a.get(n, 0) + cl
        l += 1
    return a


def _sqrt_minus_one_mod_p(p: int) -> int:
    """A root of v^2 = -1 mod p for p = 1 (mod 4), deterministically from
    the smallest quadratic non-residue."""
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ArithmeticError(f"no non-residue found; {p} is not an odd prime")


def _lift_root(v: int, p: int, a: int) -> int:
    """Lift a root of v^2 + 1 = 0 from mod p to mod p^a (odd p)."""
    mod = p
    for _ in range(a - 1):
        mod *= p
        correction = (v * v + 1) % mod
        v = (v - correction * pow(2 * v, -1, mod)) % mod
    return v


def rho(d: int) -> tuple[int, list[int]]:
    """Count and list the residues v in [0, d) with v^2 + 1 = 0 (mod d).

    Multiplicative in d: 2 roots per prime power p^a with p = 1 (mod 4),
    one for d | 2, none once 4 | d or a prime 3 (mod 4) divides d.
    rho(1) = 1 by the empty-modulus convention (the single residue 0).
    """
    if d < 1:
        raise ValueError("modulus must be a positive integer")
    if d == 1:
        return 1, [0]
    components: list[tuple[int, list[int]]] = []
    for p, a in factorize(d).factors:
        pa = p**a
        if p == 2:
            if a >= 2:
                return 0, []
            components.append((2, [1]))
        elif p % 4 == 3:
            return 0, []
        else:
            v = _lift_root(_sqrt_minus_one_mod_p(p), p, a)
            components.append((pa, sorted((v, pa - v))))
    roots = []
    for combo in iter_product(*(r for _, r in components)):
        v, mod = 0, 1
        for (pa, _), residue in zip(components, combo):
            # CRT merge of (v mod mod) and (residue mod pa)
            inc = (residue - v) * pow(mod, -1, pa) % pa
            v += mod * inc
            mod *= pa
        roots.append(v)
    roots.sort()
    for v in roots:
        if (v * v + 1) % d != 0:
            raise ArithmeticError(f"internal error: {v} is not a root mod {d}")
    return len(roots), roots


def congruence_sum_A(
    x: int,
    d: int,
    gamma: GammaSpec,
    seq: dict[int, int | Fraction] | None = None,
) -> int | Fraction:
    """A_d(x): sum of a_n over n <= x divisible by d, from the materialized
    sequence (built on demand when seq is not supplied)."""
    if x < 1 or d < 1:
        raise ValueError("x and d must be >= 1")
    if seq is None:
        seq = sequence_a(x, gamma)
    total: int | Fraction = 0
    for n in range(d, x + 1, d):
        if n in seq:
            total += seq[n]
    return total


def congruence_sum_A_via_residues(
    x: int, d: int, gamma: GammaSpec
) -> int | Fraction:
    """A_d(x) computed without materializing the sequence: for each l
    coprime to d, m walks the residue classes m = v*l (mod d) over the
    roots v of v^2 + 1 = 0. Must agree exactly with congruence_sum_A."""
    if x < 1 or d < 1:
        raise ValueError("x and d must be >= 1")
    count, roots = rho(d)
    if count == 0:
        return 0
    total: int | Fraction = 0
    l = 1
    while l * l < x:
        if gcd(l, d) == 1:
            cl = gamma.coefficient(l)
            if cl:
                ll = l * l
                m_max = isqrt(x - ll)
                for v in roots:
                    m = (v * l) % d
                    if m == 0:
                        m = d
                    while m <= m_max:
                        if gcd(l, m) == 1:
                            total += cl
                        m += d
        l += 1
    return total


def main_term_M(x: int, d: int, gamma: GammaSpec) -> float:
    """M_d(x) = (rho(d)/d) * sum over l < sqrt(x), gcd(l, d) = 1 of
    gamma_l * (phi(l)/l) * sqrt(x - l^2), in double precision."""
    if x < 1 or d < 1:
        raise ValueError("x and d must be >= 1")
    count, _ = rho(d)
    if count == 0:
        return 0.0
    total = 0.0
    l = 1
    while l * l < x:
        if gcd(l, d) == 1:
            cl = gamma.coefficient(l)
            if cl:
                phi = euler_phi(factorize(l))
                total += float(cl) * (phi / l) * sqrt(x - l * l)
        l += 1
    return count / d * total


@dataclass(frozen=True)
class GaussianRow:
    d: int
    A: int | Fraction
    rho: int
    M: float
    abs_err: float


@dataclass(frozen=True)
class GaussianTable:
    """Per-d rows of (A_d(x), rho(d), M_d(x), |A_d - M_d|) plus the total
    discrepancy; the d = 1 row is the unconditional sum."""

    x: int
    d_max: int
    rows: tuple[GaussianRow, ...]
    total_err: float

    def to_csv(self) -> str:
        lines = ["d,A_d,rho_d,M_d,abs_err"]
        for row in self.rows:
            a = row.A
            a_txt = str(a) if isinstance(a, int) else repr(float(a))
            lines.append(f"{row.d},{a_txt},{row.rho},{row.M!r},{row.abs_err!r}")
        return "\n".join(lines) + "\n"


def discrepancy_table(
    x: int,
    d_max: int,
    gamma: GammaSpec,
    cost_ceiling: int = DEFAULT_COST_CEILING,
) -> GaussianTable:
    """Full table of congruence sums against main terms for d <= d_max.

    Refuses politely when x * d_max exceeds the cost ceiling.
    """
    if x < 1 or d_max < 1:
        raise ValueError("x and d_max must be >= 1")
    cost = x * d_max
    if cost > cost_ceiling:
        raise CostCeilingError(
            f"estimated cost x*d_max = {cost} exceeds the ceiling {cost_ceiling}"
        )
    seq = sequence_a(x, gamma)
    rows = []
    total_err = 0.0
    for d in range(1, d_max + 1):
        a_d = congruence_sum_A(x, d, gamma, seq=seq)
        count, _ = rho(d)
        m_d = main_term_M(x, d, gamma)
        err = abs(float(a_d) - m_d)
        total_err += err
        if isinstance(a_d, Fraction) and a_d.denominator == 1:
            a_d = int(a_d)
        rows.append(GaussianRow(d, a_d, count, m_d, err))
    return GaussianTable(x, d_max, tuple(rows), total_err)
