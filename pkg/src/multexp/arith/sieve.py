"""Smallest-prime-factor sieve."""

from __future__ import annotations

import os

import numpy as np

from .. import _kernels
from ..errors import DomainError, ResourceError

# spf, pp, ex, rest as int64 plus one complex value table built on top
BYTES_PER_ENTRY = 4 * 8 + 16
DEFAULT_MEMORY_BUDGET = 1 << 30


def memory_budget() -> int:
    raw = os.environ.get("MULTEXP_MEMORY_BUDGET")
    return int(raw) if raw else DEFAULT_MEMORY_BUDGET


def max_sieve_limit(budget: int | None = None) -> int:
    return (budget if budget is not None else memory_budget()) // BYTES_PER_ENTRY


def check_sieve_limit(n: int, budget: int | None = None) -> None:
    """Raise before allocating anything if a sieve up to n would not fit."""
    if n < 2:
        raise DomainError(f"sieve limit must be >= 2, got {n}")
    cap = max_sieve_limit(budget)
    if n > cap:
        raise ResourceError(
            f"sieve limit N={n} exceeds the memory budget cap of {cap} "
            f"({BYTES_PER_ENTRY} bytes per entry; set MULTEXP_MEMORY_BUDGET to raise it)"
        )


class FactorSieve:
    """spf table up to ``limit`` plus the prime-power split of every n.

    ``pp[n]`` is the full power of ``spf(n)`` dividing n, ``ex[n]`` its exponent
    and ``rest[n] = n / pp[n]``; these make whole-range multiplicative
    evaluation a single pass.
    """

    def __init__(self, limit: int, budget: int | None = None, backend: str | None = None):
        limit = int(limit)
        check_sieve_limit(limit, budget)
        self.limit = limit
        self.spf = _kernels.spf_table(limit, backend)
        self.pp, self.ex, self.rest = _kernels.prime_power_split(self.spf, backend)
        idx = np.arange(limit + 1)
        self.primes = idx[(self.spf == idx) & (idx >= 2)]
        for arr in (self.spf, self.pp, self.ex, self.rest, self.primes):
            arr.flags.writeable = False

    def __repr__(self):
        return f"FactorSieve(limit={self.limit})"

    def _check(self, n: int) -> int:
        n = int(n)
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside the sieve range [1, {self.limit}]")
        return n

    def smallest_factor(self, n: int) -> int:
        return int(self.spf[self._check(n)])

    def is_prime(self, n: int) -> bool:
        n = int(n)
        return 2 <= n <= self.limit and int(self.spf[n]) == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        n = self._check(n)
        out = []
        while n > 1:
            out.append((int(self.spf[n]), int(self.ex[n])))
            n = int(self.rest[n])
        return out

    def primes_in(self, lo: float, hi: float) -> np.ndarray:
        """Primes p with lo <= p <= hi."""
        if hi > self.limit:
            raise DomainError(f"interval end {hi} exceeds sieve limit {self.limit}")
        a = np.searchsorted(self.primes, lo, side="left")
        b = np.searchsorted(self.primes, hi, side="right")
        return self.primes[a:b]

    def prime_power_indices(self) -> np.ndarray:
        """All prime powers q = p^k <= limit, ascending."""
        idx = np.arange(self.limit + 1)
        return idx[(self.pp == idx) & (idx >= 2)]

    def big_omega(self, upto: int | None = None) -> np.ndarray:
        """Omega(n) (prime factors with multiplicity) for 0 <= n <= upto."""
        upto = self.limit if upto is None else upto
        out = self.ex[: upto + 1].copy()
        cur = self.rest[: upto + 1].copy()
        live = np.flatnonzero(cur > 1)
        while live.size:
            c = cur[live]
            out[live] += self.ex[c]
            cur[live] = self.rest[c]
            live = live[cur[live] > 1]
        out[:2] = 0
        return out


def build_factor_sieve(n: int, budget: int | None = None, backend: str | None = None) -> FactorSieve:
    return FactorSieve(n, budget=budget, backend=backend)
