"""Range verification and best-constant exploration.

Scans n in [1, n_max] and compares tau(n) against C * S(n), where S(n)
sums a divisor weight over the divisors d | n with d^k <= n. The scan is
segmented: tau comes from a per-prime exponent-extraction sieve and S from
harvesting multiples of each small d, so no n is ever factorized on its
own. Counters merge order-independently, which makes reports identical for
any worker count or segment size.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from math import isqrt

import numpy as np

from .arith import (
    DEFAULT_SEGMENT_SIZE,
    Factorization,
    divisors_from_factorization,
    factorize,
    integer_kth_root,
)

__all__ = [
    "CensusConfig",
    "CensusReport",
    "EqualityCase",
    "CheckpointError",
    "ScanInterrupted",
    "classify_equality_shape",
    "divisor_weight_sum",
    "verify_range",
    "equality_census",
    "best_constant_curve",
]

FLOAT_REL_TOL = 1e-9  # comparison tolerance on the non-integer-eta path

_INT64_SAFE = 1 << 62


class CheckpointError(RuntimeError):
    """Checkpoint file unreadable, corrupt, or from a different config."""


class ScanInterrupted(RuntimeError):
    """Scan stopped on request; completed segments are in the checkpoint."""


@dataclass(frozen=True)
class CensusConfig:
    """Parameters of a range scan.

    weight "tau_power" scores a divisor as tau(d)^eta; "landreau" as
    (2^omega(d) * tau(d))^k, ignoring eta. Integer eta runs on the exact
    integer path; any other eta on float64 with FLOAT_REL_TOL comparisons.
    """

    n_max: int
    k: int = 4
    eta: int | float | Fraction = 7
    weight: str = "tau_power"
    constant: Fraction = Fraction(8)
    squarefree_only: bool = False
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.segment_size < 1:
            raise ValueError("segment_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.weight not in ("tau_power", "landreau"):
            raise ValueError(f"unknown weight {self.weight!r}")
        eta = self.eta
        if isinstance(eta, float) and eta.is_integer():
            eta = int(eta)
        if isinstance(eta, Fraction) and eta.denominator == 1:
            eta = int(eta)
        object.__setattr__(self, "eta", eta)
        if not isinstance(eta, int) and float(eta) < 0:
            raise ValueError("eta must be nonnegative")
        if isinstance(eta, int) and eta < 0:
            raise ValueError("eta must be nonnegative")
        c = self.constant
        if not isinstance(c, Fraction):
            c = Fraction(c)
            object.__setattr__(self, "constant", c)
        if c <= 0:
            raise ValueError("constant must be positive")

    @property
    def exact(self) -> bool:
        """True when every comparison runs in exact integer arithmetic."""
        return self.weight == "landreau" or isinstance(self.eta, int)

    def echo(self) -> dict:
        """Config as emitted in reports; excludes workers, which never
        affect the result."""
        eta = self.eta
        if isinstance(eta, Fraction):
            eta = str(eta)
        return {
            "n_max": self.n_max,
            "k": self.k,
            "eta": eta,
            "weight": self.weight,
            "constant": str(self.constant),
            "squarefree_only": self.squarefree_only,
            "segment_size": self.segment_size,
        }

    def digest(self) -> str:
        payload = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class EqualityCase:
    n: int
    shape: str
    matches_three_prime_form: bool


@dataclass
class CensusReport:
    config: CensusConfig
    violations: int
    equalities: int
    max_ratio: Fraction | float
    argmax_n: int
    elapsed: float
    segments_processed: int
    equality_ns: list[int] | None = None

    def payload(self) -> dict:
        """Deterministic JSON-ready dict; elapsed time is deliberately
        excluded so identical scans serialize identically."""
        if isinstance(self.max_ratio, Fraction):
            ratio = {
                "num": self.max_ratio.numerator,
                "den": self.max_ratio.denominator,
                "float": float(self.max_ratio),
            }
        else:
            ratio = {"float": self.max_ratio}
        out = {
            "config": self.config.echo(),
            "range_inclusive": [1, self.config.n_max],
            "arithmetic": "exact" if self.config.exact else "float64",
            "violations": self.violations,
            "equalities": self.equalities,
            "max_ratio": ratio,
            "argmax_n": self.argmax_n,
            "segments_processed": self.segments_processed,
        }
        if not self.config.exact:
            out["float_rel_tol"] = FLOAT_REL_TOL
            out["note"] = (
                "float64 comparisons at the stated relative tolerance; "
                "exact claims require an integer eta"
            )
        if self.equality_ns is not None:
            out["equality_ns"] = self.equality_ns
        return out

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2) + "\n"


# ----------------------------------------------------------------------
# weights


def _weight_exact(d: int, cfg: CensusConfig) -> int:
    f = factorize(d)
    t = 1
    for _, a in f.factors:
        t *= a + 1
    if cfg.weight == "landreau":
        return (2 ** len(f.factors) * t) ** cfg.k
    return t**cfg.eta


def _weight_float(d: int, cfg: CensusConfig) -> float:
    f = factorize(d)
    t = 1
    for _, a in f.factors:
        t *= a + 1
    return float(t) ** float(cfg.eta)


def divisor_weight_sum(n: int, cfg: CensusConfig) -> int | float:
    """S(n) = sum of weight(d) over d | n with d^k <= n, by direct divisor
    enumeration. Exact integer on the exact path, float64 otherwise."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = factorize(n)
    small = [d for d in divisors_from_factorization(f) if d**cfg.k <= n]
    if cfg.exact:
        return sum(_weight_exact(d, cfg) for d in small)
    return float(sum(_weight_float(d, cfg) for d in small))


def _weight_table(cfg: CensusConfig) -> tuple[np.ndarray, bool]:
    """Per-d weights for d up to floor(n_max^(1/k)).

    Returns (table, int64_ok); int64_ok is False when the worst-case sums
    would not fit 64-bit, in which case the caller must take the pure
    Python path.
    """
    d_max = integer_kth_root(cfg.n_max, cfg.k)
    if cfg.exact:
        weights = [0] + [_weight_exact(d, cfg) for d in range(1, d_max + 1)]
        total = sum(weights)
        bound = max(
            cfg.constant.numerator * total,
            cfg.constant.denominator * 2 * isqrt(cfg.n_max) + 1,
        )
        if bound < _INT64_SAFE and max(weights) < _INT64_SAFE:
            return np.array(weights, dtype=np.int64), True
        return np.array(weights, dtype=object), False
    weights_f = [0.0] + [_weight_float(d, cfg) for d in range(1, d_max + 1)]
    return np.array(weights_f, dtype=np.float64), True


# ----------------------------------------------------------------------
# segment kernels

_prime_cache: dict[int, np.ndarray] = {}
_prime_cache_lock = threading.Lock()


def _scan_primes(limit: int) -> np.ndarray:
    with _prime_cache_lock:
        for cap, arr in _prime_cache.items():
            if cap >= limit:
                return arr[: np.searchsorted(arr, limit, side="right")]
        mask = np.ones(limit + 1, dtype=bool)
        mask[:2] = False
        for p in range(2, isqrt(limit) + 1):
            if mask[p]:
                mask[p * p :: p] = False
        arr = np.nonzero(mask)[0].astype(np.int64)
        _prime_cache.clear()
        _prime_cache[limit] = arr
        return arr


def _tau_segment(lo: int, hi: int, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """tau(n) and a squarefree flag for every n in [lo, hi], by extracting
    prime exponents for all multiples of each sieving prime at once."""
    length = hi - lo + 1
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    tau = np.ones(length, dtype=np.int64)
    sqfree = np.ones(length, dtype=bool)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p
        if start > hi:
            continue
        idx = np.arange(start - lo, length, p)
        m = rem[idx] // p
        e = np.ones(idx.size, dtype=np.int64)
        sub = np.nonzero(m % p == 0)[0]
        while sub.size:
            m[sub] //= p
            e[sub] += 1
            sub = sub[m[sub] % p == 0]
        rem[idx] = m
        tau[idx] *= e + 1
        sqfree[idx] &= e == 1
    big = rem > 1
    tau[big] *= 2
    return tau, sqfree


def _harvest_segment(lo: int, hi: int, cfg: CensusConfig, w: np.ndarray) -> np.ndarray:
    """S(n) for every n in [lo, hi]: each d with d^k <= hi contributes
    weight(d) to its multiples n >= d^k."""
    length = hi - lo + 1
    S = np.zeros(length, dtype=w.dtype if w.dtype != object else object)
    d = 1
    while d**cfg.k <= hi:
        first = max(lo, d**cfg.k)
        start = ((first + d - 1) // d) * d
        if start <= hi:
            S[start - lo :: d] += w[d]
        d += 1
    return S


@dataclass
class _SegmentResult:
    lo: int
    hi: int
    violations: int
    equalities: int
    max_num: int | float
    max_den: int
    argmax_n: int
    equality_ns: list[int] | None = None

    def to_record(self) -> dict:
        rec = {
            "lo": self.lo,
            "hi": self.hi,
            "violations": self.violations,
            "equalities": self.equalities,
            "max_num": self.max_num,
            "max_den": self.max_den,
            "argmax_n": self.argmax_n,
        }
        if self.equality_ns is not None:
            rec["equality_ns"] = self.equality_ns
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "_SegmentResult":
        return cls(
            lo=rec["lo"],
            hi=rec["hi"],
            violations=rec["violations"],
            equalities=rec["equalities"],
            max_num=rec["max_num"],
            max_den=rec["max_den"],
            argmax_n=rec["argmax_n"],
            equality_ns=rec.get("equality_ns"),
        )


def _ratio_greater(num_a, den_a, n_a: int, num_b, den_b, n_b: int) -> bool:
    """True when ratio a beats ratio b; ties go to the smaller n."""
    lhs = num_a * den_b
    rhs = num_b * den_a
    if lhs != rhs:
        return lhs > rhs
    return n_a < n_b


def _scan_segment(
    lo: int,
    hi: int,
    cfg: CensusConfig,
    w: np.ndarray,
    primes: np.ndarray,
    int64_ok: bool,
    collect: bool,
) -> _SegmentResult:
    if cfg.exact and not int64_ok:
        return _scan_segment_python(lo, hi, cfg, w, collect)
    tau, sqfree = _tau_segment(lo, hi, primes)
    S = _harvest_segment(lo, hi, cfg, w)
    cn, cd = cfg.constant.numerator, cfg.constant.denominator

    if cfg.exact:
        lhs = cd * tau
        rhs = cn * S
        viol_mask = lhs > rhs
        eq_mask = lhs == rhs
    else:
        lhs_f = tau.astype(np.float64)
        rhs_f = float(cfg.constant) * S
        tol = FLOAT_REL_TOL * np.maximum(rhs_f, 1.0)
        viol_mask = lhs_f > rhs_f + tol
        eq_mask = np.abs(lhs_f - rhs_f) <= tol

    if cfg.squarefree_only:
        viol_mask &= sqfree
        eq_mask &= sqfree

    violations = int(np.count_nonzero(viol_mask))
    equalities = int(np.count_nonzero(eq_mask))
    equality_ns = (
        [int(i) + lo for i in np.nonzero(eq_mask)[0]] if collect else None
    )

    ratio = tau / S
    if cfg.squarefree_only:
        ratio = np.where(sqfree, ratio, -np.inf)
    peak = float(ratio.max())
    if peak == float("-inf"):
        # nothing eligible in this segment; emit a ratio that loses to any
        # real one so the merge ignores it (n = 1 is always eligible, so
        # the merged report never ends up with the sentinel)
        return _SegmentResult(
            lo, hi, violations, equalities, 0, 1, -1, equality_ns
        )
    if cfg.exact:
        cand = np.nonzero(ratio >= peak * (1.0 - 1e-12))[0]
        best_num, best_den, best_n = 0, 1, -1
        for i in cand:
            i = int(i)
            num, den, n = int(tau[i]), int(S[i]), lo + i
            if best_n < 0 or _ratio_greater(num, den, n, best_num, best_den, best_n):
                best_num, best_den, best_n = num, den, n
        return _SegmentResult(
            lo, hi, violations, equalities, best_num, best_den, best_n, equality_ns
        )
    i = int(np.argmax(ratio))  # argmax returns the first (smallest n) peak
    return _SegmentResult(
        lo, hi, violations, equalities, float(ratio[i]), 1, lo + i, equality_ns
    )


def _scan_segment_python(
    lo: int, hi: int, cfg: CensusConfig, w: np.ndarray, collect: bool
) -> _SegmentResult:
    """Exact fallback for configurations whose weights overflow int64."""
    cn, cd = cfg.constant.numerator, cfg.constant.denominator
    violations = equalities = 0
    best_num, best_den, best_n = 0, 1, -1
    equality_ns: list[int] | None = [] if collect else None
    for n in range(lo, hi + 1):
        f = factorize(n)
        if cfg.squarefree_only and any(a > 1 for _, a in f.factors):
            continue
        t = 1
        for _, a in f.factors:
            t *= a + 1
        s = sum(
            int(w[d]) for d in divisors_from_factorization(f) if d**cfg.k <= n
        )
        lhs, rhs = cd * t, cn * s
        if lhs > rhs:
            violations += 1
        elif lhs == rhs:
            equalities += 1
            if equality_ns is not None:
                equality_ns.append(n)
        if best_n < 0 or _ratio_greater(t, s, n, best_num, best_den, best_n):
            best_num, best_den, best_n = t, s, n
    return _SegmentResult(
        lo, hi, violations, equalities, best_num, best_den, best_n, equality_ns
    )


# ----------------------------------------------------------------------
# checkpointing

_CHECKPOINT_MAGIC = "divbound-checkpoint"
_CHECKPOINT_VERSION = 1


class _Checkpoint:
    def __init__(self, path: str, cfg: CensusConfig, collect: bool):
        self.path = path
        self.cfg = cfg
        self.collect = collect
        self.lock = threading.Lock()
        self.done: dict[tuple[int, int], _SegmentResult] = {}
        self._fh = None
        self._valid_bytes = 0

    def load(self) -> None:
        if not os.path.exists(self.path):
            return
        try:
            with open(self.path, "rb") as fh:
                raw_bytes = fh.read()
        except OSError as exc:
            raise CheckpointError(f"cannot read checkpoint {self.path}: {exc}")
        raw = raw_bytes.decode("utf-8", errors="replace")
        lines = raw.split("\n")
        trailing_partial = not raw.endswith("\n") and bool(raw)
        body = [ln for ln in lines if ln]
        if not body:
            return
        try:
            header = json.loads(body[0])
        except json.JSONDecodeError:
            raise CheckpointError(f"corrupt checkpoint header in {self.path}")
        if (
            header.get("format") != _CHECKPOINT_MAGIC
            or header.get("version") != _CHECKPOINT_VERSION
        ):
            raise CheckpointError(f"unrecognized checkpoint format in {self.path}")
        if header.get("config_hash") != self.cfg.digest():
            raise CheckpointError(
                "checkpoint was written for a different configuration"
            )
        self._valid_bytes = len((body[0] + "\n").encode("utf-8"))
        for i, line in enumerate(body[1:]):
            try:
                rec = json.loads(line)
                res = _SegmentResult.from_record(rec)
            except (json.JSONDecodeError, KeyError, TypeError):
                if trailing_partial and i == len(body) - 2:
                    break  # interrupted mid-write; the record is simply redone
                raise CheckpointError(f"corrupt checkpoint record in {self.path}")
            if self.collect and res.equality_ns is None:
                raise CheckpointError(
                    "checkpoint lacks equality lists required by this run"
                )
            self.done[(res.lo, res.hi)] = res
            self._valid_bytes += len((line + "\n").encode("utf-8"))

    def open_for_append(self) -> None:
        self._fh = open(self.path, "a", encoding="utf-8")
        if self._fh.tell() > self._valid_bytes:
            # drop a half-written trailing record before appending
            self._fh.truncate(self._valid_bytes)
        if self._valid_bytes == 0:
            header = {
                "format": _CHECKPOINT_MAGIC,
                "version": _CHECKPOINT_VERSION,
                "config_hash": self.cfg.digest(),
            }
            self._fh.write(json.dumps(header, sort_keys=True) + "\n")
            self._flush()

    def record(self, res: _SegmentResult) -> None:
        with self.lock:
            self.done[(res.lo, res.hi)] = res
            if self._fh is not None:
                self._fh.write(json.dumps(res.to_record(), sort_keys=True) + "\n")
                self._flush()

    def _flush(self) -> None:
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


# ----------------------------------------------------------------------
# drivers


def _segments(cfg: CensusConfig) -> list[tuple[int, int]]:
    out = []
    lo = 1
    while lo <= cfg.n_max:
        hi = min(lo + cfg.segment_size - 1, cfg.n_max)
        out.append((lo, hi))
        lo = hi + 1
    return out


def verify_range(
    cfg: CensusConfig,
    checkpoint: str | None = None,
    collect_equalities: bool = False,
    progress=None,
    stop_event: threading.Event | None = None,
) -> CensusReport:
    """Scan [1, n_max] and report violations / equalities / max ratio of
    tau(n) against constant * S(n).

    Resumable: with a checkpoint path, completed segments are skipped on
    restart and the merged report is identical to an uninterrupted run.
    Raises ScanInterrupted after checkpointing when stop_event is set.
    """
    t0 = time.monotonic()
    w, int64_ok = _weight_table(cfg)
    primes = _scan_primes(max(isqrt(cfg.n_max), 2))
    segments = _segments(cfg)

    ckpt = None
    if checkpoint is not None:
        ckpt = _Checkpoint(checkpoint, cfg, collect_equalities)
        ckpt.load()
        ckpt.open_for_append()

    results: list[_SegmentResult] = []
    pending = []
    for lo, hi in segments:
        if ckpt is not None and (lo, hi) in ckpt.done:
            results.append(ckpt.done[(lo, hi)])
        else:
            pending.append((lo, hi))

    done_count = len(results)
    total = len(segments)
    interrupted = False

    def run_one(seg: tuple[int, int]) -> _SegmentResult:
        lo, hi = seg
        res = _scan_segment(lo, hi, cfg, w, primes, int64_ok, collect_equalities)
        if ckpt is not None:
            ckpt.record(res)
        return res

    try:
        if cfg.workers == 1:
            for seg in pending:
                if stop_event is not None and stop_event.is_set():
                    interrupted = True
                    break
                results.append(run_one(seg))
                done_count += 1
                if progress is not None:
                    progress(done_count, total)
        else:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = []
                for seg in pending:
                    if stop_event is not None and stop_event.is_set():
                        interrupted = True
                        break
                    futures.append(pool.submit(run_one, seg))
                for fut in futures:
                    results.append(fut.result())
                    done_count += 1
                    if progress is not None:
                        progress(done_count, total)
    finally:
        if ckpt is not None:
            ckpt.close()

    if interrupted:
        raise ScanInterrupted("scan interrupted; completed segments checkpointed")

    violations = sum(r.violations for r in results)
    equalities = sum(r.equalities for r in results)
    best = None
    for r in results:
        if best is None or _ratio_greater(
            r.max_num, r.max_den, r.argmax_n, best.max_num, best.max_den, best.argmax_n
        ):
            best = r
    if cfg.exact:
        max_ratio: Fraction | float = Fraction(int(best.max_num), int(best.max_den))
    else:
        max_ratio = float(best.max_num)

    equality_ns = None
    if collect_equalities:
        equality_ns = sorted(x for r in results for x in (r.equality_ns or []))

    return CensusReport(
        config=cfg,
        violations=violations,
        equalities=equalities,
        max_ratio=max_ratio,
        argmax_n=best.argmax_n,
        elapsed=time.monotonic() - t0,
        segments_processed=len(results),
        equality_ns=equality_ns,
    )


def classify_equality_shape(n: int) -> EqualityCase:
    """Factor an equality case and test the three-large-primes form:
    squarefree, exactly three primes, every prime above n^(1/4)."""
    f = factorize(n)
    shape = "*".join(
        f"p{i+1}" + (f"^{a}" if a > 1 else "") for i, (_, a) in enumerate(f.factors)
    )
    matches = (
        len(f.factors) == 3
        and all(a == 1 for _, a in f.factors)
        and min(f.primes) ** 4 > n
    )
    return EqualityCase(n, shape or "1", matches)


def equality_census(
    cfg: CensusConfig, checkpoint: str | None = None, progress=None
) -> list[EqualityCase]:
    """Every equality case tau(n) = constant * S(n) in range, classified
    by factorization shape. Any case that is not a product of three primes
    all above n^(1/4) deserves attention."""
    report = verify_range(
        cfg, checkpoint=checkpoint, collect_equalities=True, progress=progress
    )
    return [classify_equality_shape(n) for n in report.equality_ns or []]


def best_constant_curve(
    n_max: int,
    k: int = 4,
    eta_grid: list[int | float | Fraction] | None = None,
    squarefree_only: bool = False,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
) -> list[tuple[int | float | Fraction, Fraction | float, int]]:
    """Empirical best constant max_n tau(n)/S_eta(n) for each eta in the
    grid, ascending; nonincreasing in eta since S_eta is nondecreasing."""
    if not eta_grid:
        raise ValueError("eta_grid must be nonempty")
    base = CensusConfig(
        n_max=n_max,
        k=k,
        squarefree_only=squarefree_only,
        segment_size=segment_size,
        workers=workers,
    )
    out = []
    for eta in sorted(eta_grid, key=float):
        cfg = replace(base, eta=eta)
        report = verify_range(cfg)
        out.append((cfg.eta, report.max_ratio, report.argmax_n))
    return out
