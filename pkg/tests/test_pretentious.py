import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multexp import (
    ArchimedeanTwist,
    DomainError,
    MultFnSpec,
    PrimeInterval,
    ResourceError,
    best_character,
    characters_mod,
    distance_sq,
    kronecker_character,
    majorant_h,
    min_over_t,
    multiscale_consistency,
    quadratic_scan,
    standard_fn,
)
from multexp.arith.characters import fundamental_discriminants
from multexp.pretentious import (
    PretentiousReport,
    default_t_spacing,
    harmonic_sum,
    lipschitz_constant,
    multiscale_scales,
)


def char_fn(sieve, d, limit=None):
    chi = kronecker_character(d)
    return MultFnSpec.from_prime_values(sieve, lambda p: chi(p), f"kronecker({d})", limit)


def random_unimodular(sieve, seed, real=False):
    rng = np.random.default_rng(seed)
    table = np.exp(2j * np.pi * rng.random(sieve.limit + 1))
    if real:
        table = np.sign(table.real)
    return MultFnSpec.from_prime_values(sieve, lambda p: table[p], f"random{seed}")


# distances ----------------------------------------------------------------------------

def test_distance_examples(sieve_small):
    lam = standard_fn("liouville", sieve_small)
    one = standard_fn("one", sieve_small)
    assert distance_sq(lam, one, (2, 10), sieve_small) == pytest.approx(2 * (1 / 2 + 1 / 3 + 1 / 5 + 1 / 7), abs=1e-12)
    assert distance_sq(lam, one, (2, 10), sieve_small) == pytest.approx(2.352380952380952, abs=1e-12)
    f = random_unimodular(sieve_small, 1)
    assert distance_sq(f, f, (2, 10**5), sieve_small) == pytest.approx(0, abs=1e-12)


def test_distance_targets(sieve_small):
    f = char_fn(sieve_small, 5)
    chi = kronecker_character(5)
    I = (2, 5000)
    assert distance_sq(f, chi, I, sieve_small) == pytest.approx(distance_sq(f, f, I, sieve_small), abs=1e-12)
    # primes dividing the modulus contribute a full 1/p
    assert distance_sq(f, (chi, 0.0), I, sieve_small) == pytest.approx(1 / 5, abs=1e-12)
    assert distance_sq(f, f, I, sieve_small) == pytest.approx(1 / 5, abs=1e-12)
    assert distance_sq(f, (chi, 0.0), (7, 5000), sieve_small) == pytest.approx(0, abs=1e-12)


def test_prime_interval_validation():
    with pytest.raises(DomainError):
        PrimeInterval(10, 2)
    assert PrimeInterval.of((2, 10)) == PrimeInterval(2.0, 10.0)


@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.integers(2, 50_000), st.integers(0, 150_000))
def test_distance_bounds(sieve_small, s1, s2, lo, width):
    sv = sieve_small
    f, g = random_unimodular(sv, s1), random_unimodular(sv, s2)
    I = (lo, lo + width)
    d = distance_sq(f, g, I, sv)
    assert 0.0 <= d <= 2.0 * harmonic_sum(I, sv) + 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.integers(2, 1000))
def test_triangle_inequality(sieve_small, s1, s2, s3, lo):
    sv = sieve_small
    f, g, h = (random_unimodular(sv, s) for s in (s1, s2, s3))
    I = (lo, 150_000)
    D = lambda a, b: math.sqrt(distance_sq(a, b, I, sv))
    assert D(f, g) <= D(f, h) + D(h, g) + 1e-9


def test_quadratic_separation(sieve_big):
    ds = fundamental_discriminants(30, include_one=False)
    fns = {d: char_fn(sieve_big, d, 1 << 20) for d in ds}
    floor = min(distance_sq(fns[a], fns[b], (30, 1 << 20), sieve_big) for a in ds for b in ds if a != b)
    assert floor >= 1.0


# twist minimisation -----------------------------------------------------------------------

def test_min_over_t_recovers_twist(sieve_small):
    twist = ArchimedeanTwist(0.5).as_multfn(sieve_small)
    cases = [(characters_mod(1)[0], twist, (2, 10**5)),
             # p = 5 would add 1/5, so the interval starts above the conductor
             (kronecker_character(5), char_fn(sieve_small, 5) * twist, (7, 10**5))]
    for psi, f, I in cases:
        t, v = min_over_t(f, psi, 1.0, I, sieve_small)
        assert abs(t - 0.5) <= default_t_spacing(I)
        assert v < 1e-3


def test_min_over_t_at_zero_is_distance(sieve_small):
    lam = standard_fn("liouville", sieve_small)
    psi = kronecker_character(-4)
    I = (2, 10**5)
    t, v = min_over_t(lam, psi, 0.0, I, sieve_small)
    assert t == 0.0 and v == pytest.approx(distance_sq(lam, psi, I, sieve_small), abs=1e-12)


def test_min_over_t_dense_oracle(sieve_small):
    lam = standard_fn("liouville", sieve_small)
    psi = characters_mod(1)[0]
    I = (2, 10**5)
    t, v = min_over_t(lam, psi, 1.0, I, sieve_small)
    ts = np.arange(-1.0, 1.0 + 5e-5, 1e-4)
    p = sieve_small.primes_in(*I).astype(float)
    dense = [float(np.sum((1 + np.cos(tt * np.log(p))) / p)) for tt in ts]
    oracle = min(dense)
    assert v == pytest.approx(oracle, rel=1e-2)
    assert v <= oracle + 1e-9


@given(st.integers(0, 2**32 - 1), st.floats(0.5, 20))
def test_twist_grid_soundness(sieve_small, seed, T):
    sv = sieve_small
    f = random_unimodular(sv, seed)
    psi = kronecker_character(-3)
    I = (2, 20_000)
    h = default_t_spacing(I)
    _, coarse = min_over_t(f, psi, T, I, sv, h)
    _, fine = min_over_t(f, psi, T, I, sv, h / 10)
    assert fine <= coarse + 1e-6
    assert coarse - fine <= h * lipschitz_constant(I, sv)


def test_min_over_t_validation(sieve_small):
    f = standard_fn("one", sieve_small)
    psi = characters_mod(1)[0]
    with pytest.raises(DomainError):
        min_over_t(f, psi, -1, (2, 100), sieve_small)
    with pytest.raises(DomainError):
        min_over_t(f, psi, 1, (2, 100), sieve_small, t_grid_spacing=0)


# scans ------------------------------------------------------------------------------------------

def test_best_character_examples(sieve_small):
    # f(2) = 0 for kronecker(-4) adds 1/2 to every distance on an interval containing 2
    f = char_fn(sieve_small, -4)
    rep = best_character(f, 10, 1.0, (3, 10**5), sieve_small)
    assert rep.best.label == "chi[4:1]" or rep.best.conductor == 4
    assert abs(rep.best.t) < default_t_spacing((3, 10**5))
    assert rep.best.distance_sq < 1e-2
    rep = best_character(standard_fn("one", sieve_small), 10, 1.0, (2, 10**5), sieve_small)
    assert rep.best.conductor == 1 and abs(rep.best.t) < 1e-6


def test_best_character_finds_pretender(sieve_big):
    chi = kronecker_character(5)
    rng = np.random.default_rng(7)
    signs = np.sign(rng.standard_normal(sieve_big.limit + 1))
    f = MultFnSpec.from_prime_values(sieve_big, lambda p: np.where(p > 100, np.real(chi(p)), signs[p]), "pretend5",
                                     1 << 20)
    rep = best_character(f, 30, 0.0, (100, 1 << 20), sieve_big)
    assert rep.best.conductor == 5
    assert kronecker_character(5).same_table(characters_mod(5)[rep.best.index])


def test_quadratic_scan_examples(sieve_big):
    f12 = char_fn(sieve_big, 12, 1 << 20)
    rep = quadratic_scan(f12, 30, (2, 1 << 20), sieve_big)
    # chi_12 vanishes at 2 and 3, which adds 1/2 + 1/3 on any interval containing them
    assert rep.best.discriminant == 12 and rep.best.distance_sq == pytest.approx(5 / 6, abs=1e-12)
    rep = quadratic_scan(f12, 30, (5, 1 << 20), sieve_big)
    assert rep.best.discriminant == 12 and rep.best.distance_sq < 1e-2
    lam = standard_fn("liouville", sieve_big, 1 << 20)
    rep = quadratic_scan(lam, 30, (2, 1 << 20), sieve_big)
    assert min([rep.best.distance_sq] + [c.distance_sq for c in rep.runners_up]) >= 1.0
    rnd = random_unimodular(sieve_big, 11, real=True)
    rep = quadratic_scan(rnd, 30, (2, 1 << 20), sieve_big)
    assert rep.margin >= 0 and rep.n_candidates == len(fundamental_discriminants(30))


def test_quadratic_scan_nonprincipal(sieve_small):
    rep = quadratic_scan(standard_fn("one", sieve_small), 10, (2, 10**5), sieve_small, nonprincipal=True)
    assert rep.best.discriminant != 1
    rep = quadratic_scan(standard_fn("one", sieve_small), 10, (2, 10**5), sieve_small)
    assert rep.best.discriminant == 1


def test_scan_caps(sieve_small):
    f = standard_fn("one", sieve_small)
    with pytest.raises(ResourceError):
        quadratic_scan(f, 10**6, (2, 100), sieve_small)
    with pytest.raises(DomainError):
        best_character(f, 0, 0, (2, 100), sieve_small)


def test_report_determinism_and_roundtrip(sieve_small):
    f = random_unimodular(sieve_small, 5)
    a = best_character(f, 12, 2.0, (2, 10**4), sieve_small)
    b = best_character(f, 12, 2.0, (2, 10**4), sieve_small, workers=1)
    assert a.to_json() == b.to_json()
    back = PretentiousReport.from_json(a.to_json())
    assert back.to_json() == a.to_json()
    d = json.loads(a.to_json())
    assert d["version"] == "multexp.pretentious/1" and len(d["runners_up"]) == 5
    with pytest.raises(DomainError):
        PretentiousReport.from_json(json.dumps({**d, "version": "other/9"}))


def test_tie_breaking(sieve_small):
    # no primes in [24, 28], so every distance ties at 0 and the conductor decides
    f = standard_fn("one", sieve_small)
    rep = quadratic_scan(f, 12, (24, 28), sieve_small)
    ks = [rep.best] + list(rep.runners_up)
    assert all(c.distance_sq == 0 for c in ks)
    assert [c.conductor for c in ks] == sorted(c.conductor for c in ks)


# majorant -------------------------------------------------------------------------------------

def test_majorant_h():
    assert majorant_h(1.0) == 1.0
    assert majorant_h(0.0) == pytest.approx(4 / 9, abs=1e-15)
    x = np.linspace(-2, 2, 10**6)
    assert np.min(majorant_h(x) - np.abs(x)) >= 0


# multi-scale --------------------------------------------------------------------------------------

def test_multiscale_scales():
    s = multiscale_scales(0.6, 1 << 22)
    assert s[-1] == 1 << 22 and len(s) == 2
    assert s[0] == pytest.approx((1 << 22) ** 0.36)
    with pytest.raises(DomainError, match="eps >="):
        multiscale_scales(0.25, 1 << 22)
    with pytest.raises(DomainError):
        multiscale_scales(1.0, 1 << 22)


def test_multiscale_global_character(sieve_big):
    rep = multiscale_consistency(char_fn(sieve_big, -3), 0.6, 1 << 22, sieve_big)
    assert rep.consistent and set(rep.winners) == {-3}
    assert json.loads(rep.to_json())["consistent"] is True


def test_multiscale_switching_character(sieve_big):
    c5, c3 = kronecker_character(5), kronecker_character(-3)
    f = MultFnSpec.from_prime_values(sieve_big, lambda p: np.where(p > 1000, np.real(c5(p)), np.real(c3(p))), "mix")
    rep = multiscale_consistency(f, 0.6, 1 << 22, sieve_big)
    above = [r for r in rep.results if r.lo >= 1000]
    assert above and all(r.winner == 5 for r in above)
    assert rep.results[0].winner == 5
    assert rep.consistent == (len(set(rep.winners)) == 1)
    assert not rep.consistent


def test_multiscale_liouville_floor(sieve_big):
    lam = standard_fn("liouville", sieve_big)
    rep = multiscale_consistency(lam, 0.6, 1 << 22, sieve_big)
    # desk-scale intervals carry H = sum 1/p below 1, so the floor is relative to H
    for r in rep.results:
        assert r.distance_sq >= 0.8 * harmonic_sum((r.lo, r.hi), sieve_big)
