"""1-bounded multiplicative functions stored by their prime-power values."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .. import _kernels
from ..errors import DomainError
from .sieve import FactorSieve

STANDARD_KINDS = ("one", "moebius", "liouville")
_BOUND_TOL = 1e-12


class MultFnSpec:
    """A multiplicative f with |f(p^k)| <= 1, given on prime powers up to ``limit``.

    ``pp_values[q]`` holds f(q) for every prime power q <= limit and
    ``pp_values[1] = 1``; other slots are unused (zero).
    """

    def __init__(self, limit: int, pp_values: np.ndarray, completely_multiplicative: bool,
                 name: str = "f", sieve: FactorSieve | None = None):
        pp_values = np.asarray(pp_values, dtype=np.complex128)
        if pp_values.shape != (limit + 1,):
            raise DomainError(f"pp_values must have length limit+1={limit + 1}")
        pp_values = pp_values.copy()
        pp_values[1] = 1.0
        if np.any(np.abs(pp_values) > 1 + _BOUND_TOL):
            bad = int(np.argmax(np.abs(pp_values)))
            raise DomainError(f"|f({bad})| = {abs(pp_values[bad]):.6g} exceeds 1")
        if not np.all(np.isfinite(pp_values)):
            raise DomainError("prime-power values must be finite")
        pp_values.flags.writeable = False
        self.limit = int(limit)
        self.pp_values = pp_values
        self.completely_multiplicative = bool(completely_multiplicative)
        self.name = name
        if sieve is not None and completely_multiplicative:
            self._check_complete(sieve)

    def __repr__(self):
        flag = ", completely" if self.completely_multiplicative else ""
        return f"MultFnSpec({self.name}, limit={self.limit}{flag})"

    def _check_complete(self, sieve: FactorSieve):
        q = sieve.prime_power_indices()
        q = q[q <= self.limit]
        p = sieve.spf[q]
        k = sieve.ex[q]
        expect = self.pp_values[p] ** k
        if not np.allclose(self.pp_values[q], expect, atol=1e-12, rtol=0):
            raise DomainError(f"{self.name}: flagged completely multiplicative but f(p^k) != f(p)^k")

    # constructors -----------------------------------------------------------

    @classmethod
    def from_rule(cls, sieve: FactorSieve, rule: Callable[[np.ndarray, np.ndarray], np.ndarray],
                  completely_multiplicative: bool, name: str = "f", limit: int | None = None):
        """Build from a vectorized ``rule(p, k) -> f(p^k)``."""
        limit = sieve.limit if limit is None else int(limit)
        if limit > sieve.limit:
            raise DomainError(f"limit {limit} exceeds sieve limit {sieve.limit}")
        q = sieve.prime_power_indices()
        q = q[q <= limit]
        vals = np.zeros(limit + 1, dtype=np.complex128)
        vals[q] = rule(sieve.spf[q], sieve.ex[q])
        return cls(limit, vals, completely_multiplicative, name)

    @classmethod
    def from_prime_values(cls, sieve: FactorSieve, prime_value: Callable[[np.ndarray], np.ndarray],
                          name: str = "f", limit: int | None = None):
        """Completely multiplicative extension of ``prime_value(p)``."""
        return cls.from_rule(sieve, lambda p, k: np.asarray(prime_value(p), dtype=np.complex128) ** k,
                             True, name, limit)

    # access -----------------------------------------------------------------

    def at_prime_power(self, p: int, k: int) -> complex:
        q = int(p) ** int(k)
        if q > self.limit:
            raise DomainError(f"{p}^{k} exceeds limit {self.limit}")
        return complex(self.pp_values[q])

    def at_primes(self, primes: np.ndarray) -> np.ndarray:
        return self.pp_values[np.asarray(primes)]

    def prime_power_values(self, sieve: FactorSieve) -> dict[tuple[int, int], complex]:
        q = sieve.prime_power_indices()
        q = q[q <= self.limit]
        return {(int(sieve.spf[x]), int(sieve.ex[x])): complex(self.pp_values[x]) for x in q}

    def values(self, sieve: FactorSieve, upto: int | None = None, backend: str | None = None) -> np.ndarray:
        """f(0..upto) as a complex array (index 0 is 0)."""
        upto = self.limit if upto is None else int(upto)
        if upto > self.limit or upto > sieve.limit:
            raise DomainError(f"upto={upto} exceeds limit {min(self.limit, sieve.limit)}")
        return _kernels.multiplicative_values(sieve.pp, sieve.rest, self.pp_values, upto, backend)

    def __mul__(self, other: "MultFnSpec") -> "MultFnSpec":
        if not isinstance(other, MultFnSpec):
            return NotImplemented
        limit = min(self.limit, other.limit)
        vals = self.pp_values[: limit + 1] * other.pp_values[: limit + 1]
        return MultFnSpec(limit, vals, self.completely_multiplicative and other.completely_multiplicative,
                          f"{self.name}*{other.name}")

    def restrict(self, limit: int) -> "MultFnSpec":
        return MultFnSpec(limit, self.pp_values[: limit + 1], self.completely_multiplicative, self.name)


def standard_fn(kind: str, sieve: FactorSieve, n: int | None = None) -> MultFnSpec:
    """The constant 1, the Moebius function or the Liouville function up to n."""
    if kind == "one":
        return MultFnSpec.from_rule(sieve, lambda p, k: np.ones(p.shape), True, "one", n)
    if kind == "moebius":
        return MultFnSpec.from_rule(sieve, lambda p, k: np.where(k == 1, -1.0, 0.0), False, "moebius", n)
    if kind == "liouville":
        return MultFnSpec.from_rule(sieve, lambda p, k: (-1.0) ** k, True, "liouville", n)
    raise DomainError(f"unknown standard function {kind!r}; expected one of {STANDARD_KINDS}")


def eval_mult_fn(f: MultFnSpec, sieve: FactorSieve, n: int) -> complex:
    n = int(n)
    if not 1 <= n <= f.limit:
        raise DomainError(f"n={n} outside [1, {f.limit}]")
    out = 1.0 + 0j
    for p, k in sieve.factorize(n):
        out *= f.pp_values[p**k]
    return complex(out)


class ArchimedeanTwist:
    """n -> n^(it)."""

    def __init__(self, t: float):
        self.t = float(t)

    def __repr__(self):
        return f"ArchimedeanTwist(t={self.t!r})"

    def __call__(self, n):
        n = np.asarray(n, dtype=np.float64)
        if np.any(n < 1):
            raise DomainError("n^(it) is only taken for n >= 1")
        return np.exp(1j * self.t * np.log(n))

    def as_multfn(self, sieve: FactorSieve, limit: int | None = None) -> MultFnSpec:
        t = self.t
        return MultFnSpec.from_rule(sieve, lambda p, k: np.exp(1j * t * k * np.log(p.astype(np.float64))),
                                    True, f"twist({t:g})", limit)
