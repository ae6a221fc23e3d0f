import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from multexp import DomainError, standard_fn
from multexp.expsum import (
    ZERO_WINDOW,
    CoefficientVector,
    coefficient_vector,
    default_grid_size,
    grid_transform,
    load_coefficients,
    load_grid,
    lp_norm,
    mellin_eval,
    save_coefficients,
    save_grid,
    smooth_window,
    sobolev_norm,
)


def dirichlet_l1_oracle(N):
    """Adaptive quadrature of |sum_{n<=N} e(n a)| = |sin(pi N a) / sin(pi a)| between consecutive zeros."""
    f = lambda x: abs(math.sin(math.pi * N * x) / math.sin(math.pi * x)) if x > 0 else float(N)
    zeros = [k / N for k in range(N // 2 + 1)]
    half = sum(quad(f, a, b, epsabs=1e-13, epsrel=1e-12)[0] for a, b in zip(zeros[:-1], zeros[1:]))
    return 2.0 * half


# coefficient vectors and grids ----------------------------------------------------------

def test_coefficient_examples(sieve_small):
    assert np.array_equal(coefficient_vector(None, None, 4).a, np.ones(4))
    lam = standard_fn("liouville", sieve_small)
    assert np.array_equal(coefficient_vector(lam, sieve_small, 5).a.real, [1, -1, -1, 1, -1])
    a = coefficient_vector(None, None, 100, smooth_window(0.25)).a
    assert a[49] == 1.0
    # 0.1 lies below eps/2 = 1/8, outside the ramp; 0.2 lies inside it
    assert a[9] == 0.0
    assert 0.0 < a[19].real < 1.0


def test_coefficient_vector_validation():
    with pytest.raises(DomainError):
        CoefficientVector(np.array([2.0]))
    with pytest.raises(DomainError):
        CoefficientVector(np.array([]))
    with pytest.raises(DomainError):
        CoefficientVector(np.array([np.nan]))


def test_grid_examples():
    g = grid_transform(CoefficientVector(np.ones(4)), 32)
    assert g.values[0] == pytest.approx(4)
    assert abs(g.values[16]) < 1e-12
    g = grid_transform(CoefficientVector(np.ones(1)), 64)
    assert np.allclose(np.abs(g.values), 1.0)


def test_grid_size_rules():
    assert default_grid_size(1000) == 8192
    assert default_grid_size(1024) == 8192
    with pytest.raises(DomainError):
        grid_transform(CoefficientVector(np.ones(100)), 512)
    with pytest.raises(DomainError):
        grid_transform(CoefficientVector(np.ones(100)), 1000)


@given(st.integers(1, 1 << 12), st.integers(0, 2**32 - 1))
def test_grid_invariants(N, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, N)
    g = grid_transform(CoefficientVector(a))
    assert g.values[0] == pytest.approx(a.sum(), abs=1e-9 * N)
    # conjugate symmetry for real coefficients
    assert np.allclose(g.values[1:], np.conj(g.values[1:][::-1]), atol=1e-9 * N)
    assert g.l2_sq() == pytest.approx(np.sum(a**2), rel=1e-9)


@given(st.integers(1, 1 << 16), st.integers(0, 2**32 - 1))
def test_parseval(N, seed):
    rng = np.random.default_rng(seed)
    a = (rng.uniform(-1, 1, N) + 1j * rng.uniform(-1, 1, N)) / math.sqrt(2)
    g = grid_transform(CoefficientVector(a))
    exact = float(np.sum(np.abs(a) ** 2))
    assert abs(g.l2_sq() - exact) <= 1e-6 * exact


def test_grid_matches_direct_evaluation(rng):
    N = 50
    a = rng.uniform(-1, 1, N) + 1j * rng.uniform(-1, 1, N)
    a /= np.abs(a).max()
    g = grid_transform(CoefficientVector(a))
    j = rng.integers(0, g.M, 20)
    n = np.arange(1, N + 1)
    direct = np.exp(2j * np.pi * np.outer(j / g.M, n)) @ a
    assert np.allclose(g.values[j], direct, atol=1e-10)


def test_sup_bound_is_an_upper_bound(rng):
    a = np.sign(rng.standard_normal(300))
    g = grid_transform(CoefficientVector(a))
    fine = grid_transform(CoefficientVector(a), g.M * 64)
    assert np.max(np.abs(fine.values)) <= g.sup_bound()


def test_derivative_grid(rng):
    N = 40
    a = rng.uniform(-1, 1, N)
    g = grid_transform(CoefficientVector(a))
    d1 = g.derivative(1)
    n = np.arange(1, N + 1)
    x = 7 / g.M
    assert d1.values[7] == pytest.approx(np.sum(2j * np.pi * n * a * np.exp(2j * np.pi * n * x)))


# norms ------------------------------------------------------------------------------------

def test_lp_examples():
    for N in (1, 7, 100, 1024):
        est = lp_norm(grid_transform(CoefficientVector(np.ones(N))), 2)
        assert abs(est.value - math.sqrt(N)) <= max(est.error_bound, 1e-12 * math.sqrt(N))
    est = lp_norm(grid_transform(CoefficientVector(np.ones(2))), 1)
    assert abs(est.value - 4 / math.pi) <= est.error_bound
    assert est.error_bound < 1e-2


@pytest.mark.parametrize("N", [256, 1024, 4096])
def test_l1_dirichlet_oracle(N):
    est = lp_norm(grid_transform(CoefficientVector(np.ones(N))), 1)
    oracle = dirichlet_l1_oracle(N)
    assert abs(est.value - oracle) <= est.error_bound
    assert abs(est.value - oracle) <= 0.02 * oracle


def test_l1_without_coefficients_is_bounded():
    N = 512
    g = grid_transform(CoefficientVector(np.ones(N)))
    from multexp.expsum.grid import ExpSumGrid

    bare = ExpSumGrid(g.N, g.M, g.values, g.l1_coeff_sum)
    est = lp_norm(bare, 1)
    assert abs(est.value - dirichlet_l1_oracle(N)) <= est.error_bound


def test_lp_other_p_and_degenerate():
    g = grid_transform(CoefficientVector(np.ones(64)))
    e4 = lp_norm(g, 4)
    # ||D_N||_4^4 = number of solutions of n1 + n2 = n3 + n4 = sum_k r(k)^2
    r = np.convolve(np.ones(64), np.ones(64))
    exact = float(np.sum(r**2)) ** 0.25
    assert abs(e4.value - exact) <= e4.error_bound + 1e-9
    z = grid_transform(CoefficientVector(np.zeros(16)))
    assert lp_norm(z, 1) == (0.0, 0.0) and lp_norm(z, 2) == (0.0, 0.0) and lp_norm(z, 3) == (0.0, 0.0)
    with pytest.raises(DomainError):
        lp_norm(g, 0.5)


@given(st.integers(1, 1 << 12), st.integers(0, 2**32 - 1), st.sampled_from(["signs", "phases", "sparse"]))
def test_l1_error_bound_is_honest(N, seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "signs":
        a = np.sign(rng.standard_normal(N))
    elif kind == "phases":
        a = np.exp(2j * np.pi * rng.random(N))
    else:
        a = np.where(rng.random(N) < 0.05, 1.0, 0.0)
        a[-1] = 1.0
    coarse = grid_transform(CoefficientVector(a))
    fine = grid_transform(CoefficientVector(a), 2 * coarse.M)
    ec, ef = lp_norm(coarse, 1), lp_norm(fine, 1)
    assert abs(ec.value - ef.value) < ec.error_bound


@given(st.integers(1, 1 << 10), st.integers(0, 2**32 - 1), st.integers(0, 10**6))
def test_shift_covariance(N, seed, k):
    rng = np.random.default_rng(seed)
    a = np.exp(2j * np.pi * rng.random(N))
    g = grid_transform(CoefficientVector(a))
    k %= g.M
    n = np.arange(1, N + 1)
    h = grid_transform(CoefficientVector(a * np.exp(2j * np.pi * n * k / g.M)), g.M)
    assert np.allclose(np.abs(h.values), np.roll(np.abs(g.values), -k), atol=1e-9 * N)
    for p in (1, 2, 3):
        assert lp_norm(h, p).value == pytest.approx(lp_norm(g, p).value, rel=1e-9)


def test_l1_backends_agree(rng):
    a = np.sign(rng.standard_normal(3000))
    g = grid_transform(CoefficientVector(a))
    nb = lp_norm(g, 1, backend="numba")
    npy = lp_norm(g, 1, backend="numpy")
    assert nb.value == pytest.approx(npy.value, rel=1e-11)
    assert nb.error_bound == pytest.approx(npy.error_bound, rel=1e-9)


# windows -------------------------------------------------------------------------------------

def test_window_examples():
    W = smooth_window(0.25)
    assert W(0.5) == 1.0
    assert W(1 / 16) == 0.0
    x = np.linspace(0, 1, 100_001)
    for eps in (0.25, 0.125, 0.0625):
        Wx = smooth_window(eps)
        v = Wx(x)
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(v[(x < eps / 2) | (x > 1 - eps / 2)] == 0)
        assert np.all(v[(x >= eps) & (x <= 1 - eps)] == 1)


def test_window_derivative_scaling():
    x = np.linspace(0, 1, 100_001)
    scaled = []
    for eps in (0.25, 0.125, 0.0625):
        W = smooth_window(eps)
        d = W.derivatives(x)
        for j in range(1, 5):
            assert np.max(np.abs(d[j])) <= W.derivative_constants[j] * eps**-j * (1 + 1e-9)
        scaled.append(np.max(np.abs(d[1])) * eps)
    assert max(scaled) / min(scaled) <= 2.0


def test_window_derivative_matches_finite_difference():
    W = smooth_window(0.2)
    x = np.linspace(0.11, 0.19, 9)
    h = 1e-6
    fd = (W(x + h) - W(x - h)) / (2 * h)
    assert np.allclose(W(x, deriv=1), fd, rtol=1e-5, atol=1e-6)


def test_window_validation():
    with pytest.raises(DomainError):
        smooth_window(0.5)
    with pytest.raises(DomainError):
        smooth_window(0.1, "boxcar")


def test_dyadic_partition_of_unity():
    K = smooth_window(0.25, "dyadic_bump")
    n = np.arange(1, 10**6 + 1, dtype=np.float64)
    total = np.zeros_like(n)
    for k in range(0, 22):
        total += K(n / 2.0**k)
    assert np.max(np.abs(total - 1.0)) < 1e-9


def test_sobolev_examples():
    assert sobolev_norm(ZERO_WINDOW, 1, 2) == 1.0
    for eps in (0.25, 0.125):
        W = smooth_window(eps)
        assert sobolev_norm(W, 1, 2) >= 1
        assert sobolev_norm(W, 1, 2) <= sobolev_norm(W, 2, 2) ** 2


def test_sobolev_l1_of_w_matches_quadrature():
    W = smooth_window(0.25)
    direct = quad(lambda x: W(x), 0, 1, points=W.breakpoints(), limit=200)[0]
    assert sobolev_norm(W, 1, 0) == pytest.approx(1 + direct, rel=1e-10)


def test_mellin_examples():
    W = smooth_window(0.25)
    direct = quad(lambda x: W(x), 0, 1, points=W.breakpoints(), limit=200)[0]
    assert mellin_eval(W, 1).real == pytest.approx(direct, rel=1e-10)
    # symmetric smoothstep ramps: the mass equals the plateau mass 1 - 3 eps / 2 exactly
    assert mellin_eval(W, 1).real == pytest.approx(0.625, abs=1e-10)
    assert mellin_eval(ZERO_WINDOW, 1) == 0
    with pytest.raises(DomainError):
        mellin_eval(W, 2.5)


def test_mellin_matches_direct_integral():
    W = smooth_window(0.125)
    s = 1 + 4j
    re = quad(lambda x: W(x) * math.cos(4 * math.log(x)), 1 / 16, 1, limit=400)[0]
    im = quad(lambda x: W(x) * math.sin(4 * math.log(x)), 1 / 16, 1, limit=400)[0]
    assert mellin_eval(W, s) == pytest.approx(re + 1j * im, abs=1e-10)


# flat binary format -------------------------------------------------------------------------

def test_binary_roundtrip(tmp_path, rng):
    a = CoefficientVector(np.exp(2j * np.pi * rng.random(33)))
    save_coefficients(tmp_path / "a.bin", a)
    b = load_coefficients(tmp_path / "a.bin")
    assert np.array_equal(a.a, b.a)
    g = grid_transform(a)
    save_grid(tmp_path / "g.bin", g)
    h = load_grid(tmp_path / "g.bin")
    assert (h.N, h.M) == (g.N, g.M) and np.array_equal(h.values, g.values)
    with pytest.raises(DomainError):
        load_grid(tmp_path / "a.bin")
    (tmp_path / "bad.bin").write_bytes(b"\x00" * 7)
    with pytest.raises(DomainError):
        load_grid(tmp_path / "bad.bin")
