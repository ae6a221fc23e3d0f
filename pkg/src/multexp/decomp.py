"""Turán–Kubilius weights, the small-prime presieve, and the L^1 criterion certificate."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .arcs import ArcSet, _check_compatible
from .arith.multfn import MultFnSpec
from .arith.sieve import FactorSieve
from .errors import DomainError
from .expsum.grid import ExpSumGrid, lp_norm
from .pretentious import PrimeInterval

REPORT_VERSION = "multexp.criterion/1"


# c1 / c2 weights ----------------------------------------------------------------------

@dataclass(frozen=True)
class TKWeights:
    """c1(n; I) = #{p in I : p | n} / H and c2 = 1 - c1, with H = sum_{p in I} 1/p."""

    interval: PrimeInterval
    primes: np.ndarray
    harmonic_sum: float

    def count(self, N: int, backend: str | None = None) -> np.ndarray:
        """#{p in I : p | n} for n = 0..N."""
        return _kernels.count_prime_divisors(int(N), self.primes, backend)

    def c1(self, N: int) -> np.ndarray:
        """c1(n) for n = 1..N (index 0 holds n = 1)."""
        return self.count(N)[1:] / self.harmonic_sum

    def c2(self, N: int) -> np.ndarray:
        return 1.0 - self.c1(N)

    def c1_at(self, n: int) -> float:
        n = int(n)
        return sum(1 for p in self.primes if n % int(p) == 0) / self.harmonic_sum

    def c1_exact(self, n: int) -> Fraction:
        """c1(n) in exact rational arithmetic."""
        H = sum(Fraction(1, int(p)) for p in self.primes)
        return Fraction(sum(1 for p in self.primes if int(n) % int(p) == 0)) / H

    def c2_exact(self, n: int) -> Fraction:
        return 1 - self.c1_exact(n)


def tk_weights(I, sieve: FactorSieve) -> TKWeights:
    I = PrimeInterval.of(I)
    if I.hi > sieve.limit:
        raise DomainError(f"interval end {I.hi:g} exceeds the sieve limit {sieve.limit}")
    p = sieve.primes_in(I.lo, I.hi)
    if p.size == 0:
        raise DomainError(f"no primes in [{I.lo:g}, {I.hi:g}]")
    return TKWeights(I, p, float(np.sum(1.0 / p)))


class TKCheck(tuple):
    __slots__ = ()

    def __new__(cls, lhs, rhs):
        return super().__new__(cls, (lhs, rhs, lhs / rhs))

    lhs = property(lambda s: s[0])
    rhs = property(lambda s: s[1])
    ratio = property(lambda s: s[2])


def tk_check(I, N: int, sieve: FactorSieve) -> TKCheck:
    """sum_{n <= N} c2(n)^2 against 4N / H.

    Primes of I above N never divide n <= N but still count in H. Sums are
    taken over integer counts, so lhs = sum (H - k)^2 / H^2 with k integer.
    """
    N = int(N)
    if not 1 <= N <= sieve.limit:
        raise DomainError(f"N={N} must lie in [1, {sieve.limit}]")
    w = tk_weights(I, sieve)
    k = w.count(N)[1:]
    hist = np.bincount(k)
    H = w.harmonic_sum
    vals = (1.0 - np.arange(hist.size) / H) ** 2
    lhs = float(np.dot(hist, vals))
    return TKCheck(lhs, 4.0 * N / H)


# presieve ---------------------------------------------------------------------------

def presieve(f: MultFnSpec, A: float, sieve: FactorSieve) -> tuple[MultFnSpec, MultFnSpec]:
    """(f_{>=A}, f^) with both equal to 1 at primes p <= A.

    f_{>=A} is the completely multiplicative function with f_{>=A}(p) = f(p) for
    p > A; f^ keeps f(p^k) itself for p > A.
    """
    A = float(A)
    if A < 2:
        raise DomainError(f"A must be >= 2, got {A}")
    q = sieve.prime_power_indices()
    q = q[q <= f.limit]
    p = sieve.spf[q]
    k = sieve.ex[q]
    big = p > A
    ge = np.zeros(f.limit + 1, dtype=np.complex128)
    ge[q] = np.where(big, f.pp_values[p] ** k, 1.0)
    hat = np.zeros(f.limit + 1, dtype=np.complex128)
    hat[q] = np.where(big, f.pp_values[q], 1.0)
    return (MultFnSpec(f.limit, ge, True, f"{f.name}>={A:g}"),
            MultFnSpec(f.limit, hat, f.completely_multiplicative, f"{f.name}^{A:g}"))


def presieve_gap(f: MultFnSpec, A: float, N: int, sieve: FactorSieve) -> float:
    """sum_{n <= N} |f^(n) - f_{>=A}(n)|^2."""
    ge, hat = presieve(f, A, sieve)
    return float(np.sum(np.abs(hat.values(sieve, N)[1:] - ge.values(sieve, N)[1:]) ** 2))


# criterion certificate ------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionInput:
    """S = S1 + S2 + S3 on one grid, with the arcs and the parameter Delta."""

    S1: ExpSumGrid
    S2: ExpSumGrid
    S3: ExpSumGrid
    Delta: float
    arcs: ArcSet
    N: int

    def __post_init__(self):
        shapes = {(g.N, g.M) for g in (self.S1, self.S2, self.S3)}
        if len(shapes) != 1:
            raise DomainError(f"S1, S2, S3 must share N and M, got {sorted(shapes)}")
        if self.S1.N != self.N:
            raise DomainError(f"grids have N={self.S1.N}, input says N={self.N}")
        if not self.Delta > 0:
            raise DomainError(f"Delta must be positive, got {self.Delta}")
        _check_compatible(self.S1, self.arcs)

    @property
    def S(self) -> ExpSumGrid:
        return self.S1 + self.S2 + self.S3


@dataclass(frozen=True)
class CriterionReport:
    l2: float
    delta1: float
    delta2: float
    delta3: float
    delta3_split: float
    minor_sup: float
    minor_sup_threshold: float
    minor_sup_error: float
    delta_sum: float
    K: float
    applicable: bool
    stated_lower_bound: float
    implied_lower_bound: float
    measured_l1: float
    measured_l1_error: float
    degenerate: bool = False

    @property
    def minor_sup_slack(self) -> float:
        return self.minor_sup_threshold - self.minor_sup

    @property
    def hypotheses(self) -> dict:
        return {
            "delta_sum_below_1": self.delta_sum < 1,
            "minor_sup": self.minor_sup <= self.minor_sup_threshold,
            "minor_sup_with_slack": self.minor_sup + self.minor_sup_error <= self.minor_sup_threshold,
        }

    @property
    def sound(self) -> bool:
        """The implied bound does not exceed the measured norm plus its error."""
        return self.implied_lower_bound <= self.measured_l1 + self.measured_l1_error

    def to_dict(self) -> dict:
        return {"version": REPORT_VERSION, **asdict(self), "minor_sup_slack": self.minor_sup_slack,
                "hypotheses": self.hypotheses, "sound": self.sound}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _chain_bound(dsum: float, d23: float, l2: float, Delta: float, N: int) -> tuple[float, float]:
    if dsum >= 1:
        return math.inf, 0.0
    K = 2.0 / (1.0 - dsum)
    x = max(1.0 - dsum - d23 / K, 0.0)
    return K, x * x * l2 * Delta / ((1.0 + K) * math.sqrt(N))


def criterion_certificate(inp: CriterionInput) -> CriterionReport:
    """Measure the hypotheses of the L^1 criterion and re-derive its lower bound.

    delta1 = ||(S1 + S2) 1_M|| / ||S||, delta2 = ||S2|| / ||S||, delta3 = ||S3|| / ||S||
    (L^2 norms, major-arc indicator applied with fractional cell weights). When
    delta1 + delta2 + delta3 < 1 and sup_m |S1| <= Delta^-1 N^(1/2) ||S||, the
    chain gives ||S||_1 >= (1 - d - K^-1 (delta2 + delta3))^2 ||S||_2 Delta / ((1 + K) N^(1/2))
    with d the delta sum and K = 2 / (1 - d).

    The chain bounds ||S3 1_M|| + ||S3 1_m|| by delta3 ||S||, which in general only
    holds up to a factor sqrt(2). ``stated_lower_bound`` uses delta3 as written;
    ``implied_lower_bound`` uses the measured split sum instead and is the one
    the chain actually proves.
    """
    S = inp.S
    M, N = S.M, S.N
    w = inp.arcs.cell_weights(M)
    l2 = math.sqrt(S.l2_sq())
    l1 = lp_norm(S, 1)
    if l2 == 0.0:
        return CriterionReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False, 0.0, 0.0,
                               l1.value, l1.error_bound, degenerate=True)

    def norm(v, weight=None):
        e = np.abs(v) ** 2
        return math.sqrt(float(np.mean(e if weight is None else weight * e)))

    d1 = norm(inp.S1.values + inp.S2.values, w) / l2
    d2 = norm(inp.S2.values) / l2
    d3 = norm(inp.S3.values) / l2
    d3_split = (norm(inp.S3.values, w) + norm(inp.S3.values, 1.0 - w)) / l2

    # grid points whose cells meet the minor arcs; every minor alpha is within 1/(2M) of one
    touching = w < 1.0
    a1 = np.abs(inp.S1.values)
    msup = float(np.max(np.where(inp.arcs.contains(S.alphas), -1.0, a1))) if M else 0.0
    msup = max(msup, 0.0)
    near = float(np.max(np.where(touching, a1, 0.0))) if touching.any() else 0.0
    lip = math.pi * N * inp.S1.sup_bound() / M
    msup_err = max(near - msup, 0.0) + lip
    threshold = math.sqrt(N) * l2 / inp.Delta

    dsum = d1 + d2 + d3
    K, stated = _chain_bound(dsum, d2 + d3, l2, inp.Delta, N)
    _, implied = _chain_bound(d1 + d2 + d3_split, d2 + d3_split, l2, inp.Delta, N)
    applicable = dsum < 1 and msup <= threshold
    if not applicable:
        stated = implied = 0.0
    return CriterionReport(l2, d1, d2, d3, d3_split, msup, threshold, msup_err, dsum, K, applicable,
                           stated, implied, l1.value, l1.error_bound)
