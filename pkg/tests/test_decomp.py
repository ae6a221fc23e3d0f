import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multexp import (
    CriterionInput,
    DomainError,
    MultFnSpec,
    criterion_certificate,
    major_arcs,
    minor_sup,
    presieve,
    smooth_window,
    standard_fn,
    tk_check,
    tk_weights,
)
from multexp.arith.multfn import eval_mult_fn
from multexp.decomp import presieve_gap
from multexp.expsum import CoefficientVector, coefficient_vector, grid_transform


# Turán–Kubilius weights ------------------------------------------------------------------

def test_tk_weight_examples(sieve_small):
    w = tk_weights((2, 3), sieve_small)
    assert w.harmonic_sum == pytest.approx(5 / 6)
    assert w.c1_exact(6) == Fraction(12, 5)
    assert w.c1_at(6) == pytest.approx(12 / 5)
    assert w.c1_exact(35) == 0 and w.c2_exact(35) == 1
    c1 = w.c1(40)
    assert c1[5] == pytest.approx(12 / 5) and c1[34] == 0


@given(st.integers(2, 60), st.integers(0, 60), st.integers(1, 5000))
def test_partition_of_unity_exact(sieve_small, lo, width, n):
    I = (lo, lo + width)
    if sieve_small.primes_in(*I).size == 0:
        return
    w = tk_weights(I, sieve_small)
    assert w.c1_exact(n) + w.c2_exact(n) == 1
    assert w.c1(n)[n - 1] + w.c2(n)[n - 1] == pytest.approx(1.0, abs=1e-12)
    assert w.c1(n)[n - 1] == pytest.approx(float(w.c1_exact(n)), abs=1e-12)


def test_tk_weights_validation(sieve_small):
    with pytest.raises(DomainError):
        tk_weights((24, 28), sieve_small)
    with pytest.raises(DomainError):
        tk_weights((2, 10**7), sieve_small)


def brute_tk_lhs(lo, hi, N):
    primes = [p for p in range(2, int(hi) + 1) if p >= lo and all(p % d for d in range(2, int(p**0.5) + 1))]
    H = sum(Fraction(1, p) for p in primes)
    total = Fraction(0)
    for n in range(1, N + 1):
        k = 0
        for p in primes:
            if n % p == 0:
                k += 1
        total += (1 - k / H) ** 2
    return total


def test_tk_check_examples(sieve_small):
    r = tk_check((2, 100), 10**5, sieve_small)
    assert r.ratio <= 1
    assert r.rhs == pytest.approx(4 * 10**5 / tk_weights((2, 100), sieve_small).harmonic_sum)
    # no prime of I divides any n <= N: c2 = 1 identically
    r = tk_check((101, 103), 100, sieve_small)
    assert r.lhs == 100
    exact = brute_tk_lhs(2, 10, 10**4)
    assert tk_check((2, 10), 10**4, sieve_small).lhs == pytest.approx(float(exact), rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("I,N", [((2, 30), 10**4), ((5, 50), 3000), ((11, 13), 10**4)])
def test_tk_check_matches_bruteforce(sieve_small, I, N):
    exact = float(brute_tk_lhs(*I, N))
    assert tk_check(I, N, sieve_small).lhs == pytest.approx(exact, rel=1e-12)


def test_tk_check_validation(sieve_small):
    with pytest.raises(DomainError):
        tk_check((2, 100), 0, sieve_small)
    with pytest.raises(DomainError):
        tk_check((2, 100), 10**7, sieve_small)


# presieve ----------------------------------------------------------------------------------

def test_presieve_examples(sieve_small):
    lam = standard_fn("liouville", sieve_small)
    ge, hat = presieve(lam, 2, sieve_small)
    assert eval_mult_fn(ge, sieve_small, 4) == 1
    assert eval_mult_fn(ge, sieve_small, 15) == 1 == eval_mult_fn(lam, sieve_small, 15)
    mu = standard_fn("moebius", sieve_small)
    ge, hat = presieve(mu, 10, sieve_small)
    assert eval_mult_fn(ge, sieve_small, 13 * 13) == 1  # completely multiplicative: (-1)^2
    assert eval_mult_fn(hat, sieve_small, 13 * 13) == 0  # keeps mu(p^2) = 0
    assert eval_mult_fn(ge, sieve_small, 6) == 1 and eval_mult_fn(hat, sieve_small, 6) == 1
    with pytest.raises(DomainError):
        presieve(mu, 1, sieve_small)


@given(st.integers(0, 2**32 - 1), st.floats(2, 500))
def test_presieve_is_completely_multiplicative(sieve_small, seed, A):
    rng = np.random.default_rng(seed)
    mu = standard_fn("moebius", sieve_small)
    ge, _ = presieve(mu, A, sieve_small)
    assert ge.completely_multiplicative
    v = ge.values(sieve_small)
    m = rng.integers(1, 440, 10_000)
    n = rng.integers(1, 440, 10_000)
    assert np.array_equal(v[m * n], v[m] * v[n])


def test_presieve_gap_bound(sieve_big):
    N = 1 << 20
    mu = standard_fn("moebius", sieve_big, N)
    ratios = [presieve_gap(mu, A, N, sieve_big) * A / N for A in (10, 100, 1000)]
    assert max(ratios) <= 1.0


def test_presieve_gap_zero_for_completely_multiplicative(sieve_small):
    lam = standard_fn("liouville", sieve_small)
    assert presieve_gap(lam, 10, 10**5, sieve_small) == 0.0


# criterion certificate ------------------------------------------------------------------------

def _zero(N, M):
    return grid_transform(CoefficientVector(np.zeros(N)), M)


def test_certificate_all_major():
    N = 1 << 12
    n = np.arange(1, N + 1)
    S1 = grid_transform(CoefficientVector(np.exp(-1j * np.pi * n)))
    z = _zero(N, S1.M)
    # the Dirichlet tail leaves a sliver of energy on the minor arcs: the chain applies but is vacuous
    rep = criterion_certificate(CriterionInput(S1, z, z, 1.0, major_arcs(32, N), N))
    assert rep.delta2 == 0 and rep.delta3 == 0
    assert rep.delta1 == pytest.approx(1.0, abs=0.01)
    assert rep.implied_lower_bound < 1e-6 * rep.measured_l1
    # with the whole circle major, delta1 = 1 and the certificate is inapplicable
    arcs = major_arcs(128, N)
    assert arcs.saturated
    rep = criterion_certificate(CriterionInput(S1, z, z, 1.0, arcs, N))
    assert rep.delta1 == pytest.approx(1.0, abs=1e-12)
    assert not rep.applicable and rep.implied_lower_bound == 0.0 and rep.stated_lower_bound == 0.0


def test_certificate_degenerate():
    N = 256
    z = _zero(N, 8 * N)
    rep = criterion_certificate(CriterionInput(z, z, z, 1.0, major_arcs(2, N), N))
    assert rep.degenerate and rep.l2 == 0 and rep.implied_lower_bound == 0 and not rep.applicable


def test_certificate_validation():
    N = 256
    z = _zero(N, 8 * N)
    with pytest.raises(DomainError):
        CriterionInput(z, z, _zero(N, 16 * N), 1.0, major_arcs(2, N), N)
    with pytest.raises(DomainError):
        CriterionInput(z, z, z, 0.0, major_arcs(2, N), N)
    with pytest.raises(DomainError):
        CriterionInput(z, z, z, 1.0, major_arcs(2, N), N + 1)


def liouville_input(sieve, N, Q, interval, eps=None, Delta=None):
    lam = standard_fn("liouville", sieve, N)
    W = smooth_window(eps) if eps else None
    full = coefficient_vector(lam, sieve, N)
    win = coefficient_vector(lam, sieve, N, W)
    c1 = tk_weights(interval, sieve).c1(N)
    g1 = grid_transform(win.scaled(c1))
    g2 = grid_transform(win.scaled(1 - c1))
    g3 = grid_transform(CoefficientVector(full.a - win.a, bound=None))
    arcs = major_arcs(Q, N)
    if Delta is None:
        s, _ = minor_sup(g1, arcs)
        Delta = math.sqrt(N) * math.sqrt((g1 + g2 + g3).l2_sq()) / s
    return CriterionInput(g1, g2, g3, Delta, arcs, N)


def test_certificate_liouville_example(sieve_small):
    N = 1 << 16
    rep = criterion_certificate(liouville_input(sieve_small, N, 64, (2, 64)))
    assert rep.delta3 == 0
    assert rep.applicable
    assert 0 < rep.implied_lower_bound <= rep.measured_l1 + rep.measured_l1_error
    assert rep.stated_lower_bound >= rep.implied_lower_bound
    assert rep.sound
    d = json.loads(rep.to_json())
    assert d["version"] == "multexp.criterion/1" and d["hypotheses"]["delta_sum_below_1"]


def test_certificate_split_bound_relation(sieve_small):
    rep = criterion_certificate(liouville_input(sieve_small, 1 << 12, 8, (2, 8), eps=0.25))
    assert rep.delta3 <= rep.delta3_split <= math.sqrt(2) * rep.delta3 + 1e-12


@given(st.integers(8, 12), st.integers(0, 2**32 - 1), st.floats(1, 40), st.integers(2, 50), st.integers(1, 200),
       st.sampled_from([None, 0.25, 0.125]), st.floats(0.05, 1.0))
def test_certificate_soundness(sieve_small, logN, seed, Q, lo, width, eps, delta_scale):
    N = 1 << logN
    rng = np.random.default_rng(seed)
    signs = np.exp(2j * np.pi * rng.random(sieve_small.limit + 1))
    f = MultFnSpec.from_prime_values(sieve_small, lambda p: signs[p], "random", N)
    W = smooth_window(eps) if eps else None
    full = coefficient_vector(f, sieve_small, N)
    win = coefficient_vector(f, sieve_small, N, W)
    I = (lo, lo + width)
    if sieve_small.primes_in(*I).size == 0:
        return
    c1 = tk_weights(I, sieve_small).c1(N)
    g1 = grid_transform(win.scaled(c1))
    g2 = grid_transform(win.scaled(1 - c1))
    g3 = grid_transform(CoefficientVector(full.a - win.a, bound=None))
    arcs = major_arcs(Q, N)
    s, _ = minor_sup(g1, arcs)
    l2 = math.sqrt(full.l2_sq())
    Delta = delta_scale * (math.sqrt(N) * l2 / s if s > 0 else 1.0)
    rep = criterion_certificate(CriterionInput(g1, g2, g3, Delta, arcs, N))
    assert rep.implied_lower_bound <= rep.measured_l1 + rep.measured_l1_error
