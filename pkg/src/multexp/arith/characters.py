"""Dirichlet characters, Kronecker symbols, Gauss sums and the sums c_chi(n).

A character mod q is stored by integer exponents: ``chi(x) = e(exps[x] / L)``
with ``exps[x] = -1`` when gcd(x, q) > 1. Tables are built from the CRT
decomposition of the unit group: a primitive root for each odd p^k, and the
pair of generators -1, 5 for 2^k.
"""

from __future__ import annotations

import itertools
import math
import os
from functools import lru_cache

import numpy as np

from .._util import e_frac
from ..errors import DomainError, ResourceError

DEFAULT_CHARACTER_CAP = 10_000


def character_cap() -> int:
    raw = os.environ.get("MULTEXP_CHARACTER_CAP")
    return int(raw) if raw else DEFAULT_CHARACTER_CAP


# small exact arithmetic --------------------------------------------------------

def factor_small(n: int) -> list[tuple[int, int]]:
    n = int(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    out = int(n)
    for p, _ in factor_small(n):
        out = out // p * (p - 1)
    return out


def moebius(n: int) -> int:
    fac = factor_small(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def is_squarefree(n: int) -> bool:
    return all(k == 1 for _, k in factor_small(abs(n)))


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _primitive_root(p: int) -> int:
    """Smallest primitive root mod the odd prime p that also generates mod p^2."""
    fac = [r for r, _ in factor_small(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac) and pow(g, p - 1, p * p) != 1:
            return g
        g += 1


# the character table -----------------------------------------------------------

class DirichletCharacter:
    """A Dirichlet character mod ``modulus`` with exact integer exponents."""

    def __init__(self, modulus: int, exps: np.ndarray, root_order: int, conductor: int,
                 order: int, index: int | None = None, label: str | None = None):
        exps = np.asarray(exps, dtype=np.int64)
        if exps.shape != (modulus,):
            raise DomainError("exponent table must have one entry per residue")
        exps.flags.writeable = False
        self.modulus = int(modulus)
        self.exps = exps
        self.root_order = int(root_order)
        self.conductor = int(conductor)
        self.order = int(order)
        self.index = index
        self.label = label or (f"chi[{modulus}:{index}]" if index is not None else f"chi[{modulus}]")
        self._values = None

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_principal(self) -> bool:
        return self.order == 1

    @property
    def is_quadratic(self) -> bool:
        return self.order == 2

    @property
    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        return 1 if self.exps[self.modulus - 1] == 0 else -1

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = e_frac(np.maximum(self.exps, 0), np.int64(self.root_order)).astype(np.complex128)
            v[self.exps < 0] = 0.0
            v.flags.writeable = False
            self._values = v
        return self._values

    def __call__(self, n):
        n = np.asarray(n)
        out = self.values[np.mod(n, self.modulus)]
        return complex(out) if out.ndim == 0 else out

    def __repr__(self):
        return (f"DirichletCharacter({self.label}, conductor={self.conductor}, "
                f"order={self.order})")

    def same_table(self, other: "DirichletCharacter") -> bool:
        return self.modulus == other.modulus and np.allclose(self.values, other.values, atol=1e-12)

    def primitive(self) -> "DirichletCharacter":
        """The primitive character mod the conductor that induces this one."""
        if self.is_primitive:
            return self
        q0 = self.conductor
        prim = np.full(q0, -1, dtype=np.int64)
        units = np.flatnonzero(self.exps >= 0)
        prim[units % q0] = self.exps[units]
        return DirichletCharacter(q0, prim, self.root_order, q0, self.order,
                                  label=f"prim({self.label})")

    def induce(self, r: int) -> "DirichletCharacter":
        """The character mod r (a multiple of the modulus) induced by this one."""
        r = int(r)
        if r % self.modulus:
            raise DomainError(f"cannot induce mod {r} from modulus {self.modulus}")
        x = np.arange(r)
        ex = self.exps[x % self.modulus].copy()
        ex[np.gcd(x, r) != 1] = -1
        return DirichletCharacter(r, ex, self.root_order, self.conductor, self.order,
                                  label=f"ind{r}({self.label})")

    def conj(self) -> "DirichletCharacter":
        ex = np.where(self.exps >= 0, (-self.exps) % self.root_order, -1)
        return DirichletCharacter(self.modulus, ex, self.root_order, self.conductor, self.order,
                                  label=f"conj({self.label})")


def _unit_group(q: int):
    """Cyclic components of (Z/qZ)^*: list of (prime, modulus, order, log table over 0..q-1)."""
    x = np.arange(q, dtype=np.int64)
    comps = []
    for p, k in factor_small(q):
        m = p**k
        if p == 2:
            if k == 1:
                continue
            sign = np.where(x % 4 == 1, 0, np.where(x % 4 == 3, 1, -1))
            comps.append((2, m, 2, sign))
            if k >= 3:
                order = m // 4
                table = np.full(m, -1, dtype=np.int64)
                y = 1
                for j in range(order):
                    table[y] = j
                    table[m - y] = j
                    y = y * 5 % m
                comps.append((2, m, order, table[x % m]))
        else:
            g = _primitive_root(p)
            order = m // p * (p - 1)
            table = np.full(m, -1, dtype=np.int64)
            y = 1
            for j in range(order):
                table[y] = j
                y = y * g % m
            comps.append((p, m, order, table[x % m]))
    return comps


def _conductor_and_order(q: int, comps, tup) -> tuple[int, int]:
    cond = 1
    order = 1
    # 2-adic part needs both of its generators at once
    two = [(c, e) for c, e in zip(comps, tup) if c[0] == 2]
    if two:
        (sc, se) = two[0]
        j = 0
        o_sign = 1 if se == 0 else 2
        o_b = 1
        if len(two) == 2:
            bc, be = two[1]
            o_b = bc[2] // math.gcd(be, bc[2])
        if o_b > 1:
            j = _vp(o_b, 2) + 2
        elif o_sign > 1:
            j = 2
        cond *= 2**j
        order = math.lcm(order, o_sign, o_b)
    for c, ex in zip(comps, tup):
        p, m, o, _ = c
        if p == 2:
            continue
        oc = o // math.gcd(ex, o)
        if oc > 1:
            cond *= p ** (1 + _vp(oc, p))
        order = math.lcm(order, oc)
    return cond, order


@lru_cache(maxsize=256)
def _characters_cached(q: int) -> tuple[DirichletCharacter, ...]:
    if q == 1:
        return (DirichletCharacter(1, np.zeros(1, dtype=np.int64), 1, 1, 1, index=0),)
    comps = _unit_group(q)
    orders = [c[2] for c in comps]
    L = 1
    for o in orders:
        L = math.lcm(L, o)
    units = np.ones(q, dtype=bool)
    for c in comps:
        units &= c[3] >= 0
    if not comps:
        # q == 2: only the principal character
        ex = np.where(units, 0, -1)
        ex[np.gcd(np.arange(q), q) != 1] = -1
        return (DirichletCharacter(q, ex, 1, 1, 1, index=0),)
    units &= np.gcd(np.arange(q), q) == 1
    logs = [c[3] * (L // c[2]) for c in comps]
    out = []
    for idx, tup in enumerate(itertools.product(*[range(o) for o in orders])):
        ex = np.zeros(q, dtype=np.int64)
        for e_c, lg in zip(tup, logs):
            if e_c:
                ex += e_c * lg
        ex = np.where(units, ex % L, -1)
        cond, order = _conductor_and_order(q, comps, tup)
        out.append(DirichletCharacter(q, ex, L, cond, order, index=idx))
    return tuple(out)


def characters_mod(q: int, cap: int | None = None) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, indexed by their generator exponent tuples."""
    q = int(q)
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    cap = character_cap() if cap is None else cap
    if q > cap:
        raise ResourceError(f"modulus q={q} exceeds the character-modulus cap {cap}")
    return list(_characters_cached(q))


def primitive_characters(q: int, cap: int | None = None) -> list[DirichletCharacter]:
    return [c for c in characters_mod(q, cap) if c.is_primitive]


def principal_character(q: int) -> DirichletCharacter:
    return characters_mod(q)[0]


# Kronecker symbol ---------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """The Kronecker symbol (a/n) for integers a, n."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            sign = -sign
    # Jacobi symbol (a/n), n odd positive
    a %= n
    res = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return sign * res if n == 1 else 0


def fundamental_discriminant_error(d: int) -> str | None:
    """None when d is a fundamental discriminant, else the reason it is not."""
    d = int(d)
    if d == 0:
        return "d = 0 is not a fundamental discriminant"
    if d % 4 == 1:
        if not is_squarefree(d):
            return f"d = {d} is 1 mod 4 but not squarefree"
        return None
    if d % 4 == 0:
        m = d // 4
        if m % 4 not in (2, 3):
            return f"d = {d} = 4*{m} with {m} = {m % 4} mod 4 (need 2 or 3 mod 4)"
        if not is_squarefree(m):
            return f"d = {d} = 4*{m} with {m} not squarefree"
        return None
    hint = f" ({-d} is)" if (-d) % 4 in (0, 1) and fundamental_discriminant_error(-d) is None else ""
    return f"d = {d} is {d % 4} mod 4, so it is not a fundamental discriminant{hint}"


def is_fundamental_discriminant(d: int) -> bool:
    return fundamental_discriminant_error(d) is None


def fundamental_discriminants(bound: int, include_one: bool = True) -> list[int]:
    """Fundamental discriminants with |d| <= bound, ordered by (|d|, d)."""
    out = [d for a in range(1, bound + 1) for d in (-a, a) if is_fundamental_discriminant(d)]
    if not include_one:
        out = [d for d in out if d != 1]
    return out


@lru_cache(maxsize=512)
def kronecker_character(d: int) -> DirichletCharacter:
    """The primitive real character (d/.) of conductor |d|."""
    err = fundamental_discriminant_error(d)
    if err:
        raise DomainError(err)
    q = abs(d)
    vals = np.array([kronecker_symbol(d, x) for x in range(q)], dtype=np.int64) if q > 1 else np.ones(1, np.int64)
    ex = np.where(vals == 1, 0, np.where(vals == -1, 1, -1))
    order = 1 if d == 1 else 2
    return DirichletCharacter(q, ex, 2, q, order, label=f"kronecker({d})")


# Gauss sums and c_chi ------------------------------------------------------------

def gauss_sum(psi: DirichletCharacter) -> complex:
    """tau(psi) = sum_x psi(x) e(x/q) for primitive psi."""
    if not psi.is_primitive:
        raise DomainError(f"{psi.label} is not primitive (conductor {psi.conductor} < modulus {psi.modulus})")
    return _twisted_sum(psi, 1)


def _twisted_sum(chi: DirichletCharacter, n: int) -> complex:
    q, L = chi.modulus, chi.root_order
    x = np.flatnonzero(chi.exps >= 0)
    num = chi.exps[x] * q + (n * x % q) * L
    return complex(e_frac(num, np.int64(L * q)).sum())


@lru_cache(maxsize=64)
def _phi_mu_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    phi = np.arange(n + 1, dtype=np.int64)
    mu = np.ones(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
            mu[p::p] *= -1
            mu[p * p :: p * p] = 0
    mu[0] = 0
    return phi, mu


def c_chi(chi: DirichletCharacter, n: int, method: str = "direct") -> complex:
    """c_chi(n) = sum_{x mod q, (x,q)=1} chi(x) e(n x / q)."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return complex(c_chi_many(chi, np.array([n]), method)[0])


def c_chi_many(chi: DirichletCharacter, ns, method: str = "direct") -> np.ndarray:
    """c_chi(n) for an array of n >= 1.

    ``direct`` sums the definition; ``closed`` factors through the primitive
    character psi mod q inducing chi mod r: with g = (r, n) and r' = r/g it is
    conj(psi)(n/g) phi(r)/phi(r') mu(r'/q) psi(r'/q) tau(psi) when q | r', else 0.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(ns < 1):
        raise DomainError("n must be >= 1")
    if method == "direct":
        return c_chi_table(chi)[ns % chi.modulus]
    if method != "closed":
        raise DomainError(f"unknown method {method!r}")
    r = chi.modulus
    psi = chi.primitive()
    q = psi.modulus
    phi, mu = _phi_mu_tables(r)
    g = np.gcd(ns, r)
    rr = r // g
    ok = rr % q == 0
    k = np.where(ok, rr // q, 1)
    val = np.conj(psi.values[(ns // g) % q]) * (phi[r] / phi[rr]) * mu[k] * psi.values[k % q]
    return np.where(ok, val, 0.0) * gauss_sum(psi)


@lru_cache(maxsize=32)
def _additive_matrix(q: int) -> np.ndarray:
    m = np.arange(q, dtype=np.int64)
    mat = e_frac(np.outer(m, m) % q, np.int64(q))
    mat.flags.writeable = False
    return mat


def c_chi_table(chi: DirichletCharacter) -> np.ndarray:
    """c_chi(m) for m = 0..q-1 by direct summation (c_chi only depends on n mod q)."""
    return _additive_matrix(chi.modulus) @ chi.values
