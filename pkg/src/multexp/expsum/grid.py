"""Coefficient vectors, FFT evaluation of S(alpha) on a uniform grid, and L^p norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .. import _kernels
from ..arith.multfn import ArchimedeanTwist, MultFnSpec
from ..arith.sieve import FactorSieve
from ..errors import DomainError
from .window import Window

OVERSAMPLE = 8
_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class CoefficientVector:
    """a(1..N), stored at a[0..N-1]."""

    a: np.ndarray
    bound: float | None = 1.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise DomainError("coefficient vector must be a non-empty 1-d array")
        if not np.all(np.isfinite(a)):
            raise DomainError("coefficients must be finite")
        if self.bound is not None and np.any(np.abs(a) > self.bound * (1 + 1e-9)):
            raise DomainError(f"coefficient modulus exceeds {self.bound}")
        a.flags.writeable = False
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return self.a.size

    def l1(self) -> float:
        return float(np.sum(np.abs(self.a)))

    def l2_sq(self) -> float:
        return float(np.sum(np.abs(self.a) ** 2))

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        if self.N != other.N:
            raise DomainError("length mismatch")
        return CoefficientVector(self.a + other.a, bound=None)

    def __sub__(self, other: "CoefficientVector") -> "CoefficientVector":
        if self.N != other.N:
            raise DomainError("length mismatch")
        return CoefficientVector(self.a - other.a, bound=None)

    def scaled(self, weights) -> "CoefficientVector":
        return CoefficientVector(self.a * np.asarray(weights), bound=None)


def coefficient_vector(f: MultFnSpec | None, sieve: FactorSieve | None, N: int,
                       window: Window | None = None,
                       twist: ArchimedeanTwist | None = None) -> CoefficientVector:
    """a(n) = f(n) W(n/N) n^(-it); absent factors are 1."""
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    n = np.arange(1, N + 1)
    if f is not None:
        if N > f.limit:
            raise DomainError(f"N={N} exceeds the function limit {f.limit}")
        a = f.values(sieve, N)[1:]
    else:
        a = np.ones(N, dtype=np.complex128)
    if window is not None:
        a = a * window(n / N)
    if twist is not None:
        a = a * np.conj(twist(n))
    return CoefficientVector(a)


def default_grid_size(N: int, oversample: int = OVERSAMPLE) -> int:
    return 1 << max(3, math.ceil(math.log2(max(1, oversample * N))))


class NormEstimate(NamedTuple):
    value: float
    error_bound: float


class ExpSumGrid:
    """S(j/M) = sum_{n<=N} a(n) e(n j / M) for j = 0..M-1."""

    def __init__(self, N: int, M: int, values: np.ndarray, l1_coeff_sum: float | None = None,
                 coeffs: np.ndarray | None = None):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (M,):
            raise DomainError("values must have length M")
        values.flags.writeable = False
        self.N = int(N)
        self.M = int(M)
        self.values = values
        self.l1_coeff_sum = math.inf if l1_coeff_sum is None else float(l1_coeff_sum)
        # a(1..N) when known; enables derivative grids for sharper error bounds
        self.coeffs = coeffs

    def __repr__(self):
        return f"ExpSumGrid(N={self.N}, M={self.M})"

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(self.M) / self.M

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def l2_sq(self) -> float:
        """(1/M) sum |S|^2; equals sum |a(n)|^2 exactly once M > N."""
        return float(np.mean(np.abs(self.values) ** 2))

    def sup_bound(self) -> float:
        """Rigorous bound for max |S| over the whole circle.

        Bernstein gives |S'| <= 2 pi N max|S|; every alpha is within 1/(2M) of a
        grid point, so max|S| <= G / (1 - pi N / M) with G the grid maximum.
        """
        g = float(np.max(np.abs(self.values))) if self.M else 0.0
        rho = math.pi * self.N / self.M
        bern = g / (1.0 - rho) if rho < 1 else math.inf
        return min(bern, self.l1_coeff_sum)

    def derivative_bound(self) -> float:
        return 2.0 * math.pi * self.N * self.sup_bound()

    def _combine(self, other: "ExpSumGrid", sign: int) -> "ExpSumGrid":
        if (self.N, self.M) != (other.N, other.M):
            raise DomainError("grids must share N and M")
        coeffs = None
        if self.coeffs is not None and other.coeffs is not None:
            coeffs = self.coeffs + sign * other.coeffs
        return ExpSumGrid(self.N, self.M, self.values + sign * other.values,
                          self.l1_coeff_sum + other.l1_coeff_sum, coeffs)

    def derivative(self, k: int) -> "ExpSumGrid":
        """S^(k)(j/M) = sum (2 pi i n)^k a(n) e(nj/M), from the stored coefficients."""
        if self.coeffs is None:
            raise DomainError("coefficients unknown for this grid")
        n = np.arange(1, self.N + 1)
        return grid_transform(CoefficientVector((2j * math.pi * n) ** k * self.coeffs, bound=None), self.M)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)


def grid_transform(a: CoefficientVector, M: int | None = None) -> ExpSumGrid:
    """Evaluate S at the M points j/M with one zero-padded FFT (M a power of two, M >= 8N)."""
    N = a.N
    if M is None:
        M = default_grid_size(N)
    M = int(M)
    if M < OVERSAMPLE * N:
        raise DomainError(f"grid size M={M} is below the 8N floor ({OVERSAMPLE * N}) for N={N}")
    if M & (M - 1):
        raise DomainError(f"grid size M={M} is not a power of two")
    x = np.zeros(M, dtype=np.complex128)
    x[1 : N + 1] = a.a
    values = np.fft.ifft(x) * M
    return ExpSumGrid(N, M, values, a.l1(), a.a)


HERMITE_SUBDIVISIONS = 8
TAYLOR_TERMS = 3


def _cell_max_d4(grid: ExpSumGrid) -> float:
    """Mean over cells of a bound for max |S^(4)| on the cell.

    Each point of a cell lies within h/2 of an endpoint x, where
    |S^(4)| <= sum_{k<K} (h/2)^k/k! |S^(4+k)(x)| + (h/2)^K/K! sup|S^(4+K)|,
    and sup|S^(4+K)| <= (2 pi N)^K sup|S^(4)| by Bernstein.
    """
    half = 0.5 / grid.M
    local = np.zeros(grid.M)
    for k in range(TAYLOR_TERMS):
        dk = grid.derivative(4 + k)
        local += half**k / math.factorial(k) * np.abs(dk.values)
        if k == 0:
            sup4 = dk.sup_bound()
    tail = (2.0 * math.pi * grid.N * half) ** TAYLOR_TERMS / math.factorial(TAYLOR_TERMS) * sup4
    return float(np.mean(np.maximum(local, np.roll(local, -1)))) + tail


def lp_norm(grid: ExpSumGrid, p: float, backend: str | None = None) -> NormEstimate:
    """(integral_0^1 |S|^p)^(1/p) with a rigorous quadrature error bound.

    p = 2 is exact on the grid (|S|^2 is a trigonometric polynomial of degree
    < M). For p = 1 with known coefficients, S is replaced on each cell by its
    cubic Hermite interpolant H (one extra FFT for S'). The Peano kernel of the
    interpolant is nonnegative, so the cell mean of |S - H| is at most
    h^4/720 max_cell |S^(4)|, with the cell maximum bounded by a short Taylor
    expansion from the endpoints (see _cell_max_d4). |H| is then integrated by
    exact chord integrals on sub-cells of width h/m, adding h^2/(8 m^2) max|H''|.
    Without coefficients the chord of S itself is used, with the global bound
    pi^2 N^2 max|S| / (2 M^2). Other p use the Riemann sum with the Lipschitz
    bound pi p N max|S|^p / M.
    """
    p = float(p)
    if p < 1:
        raise DomainError(f"p must be >= 1 (quasi-norms are out of scope), got {p}")
    absS = np.abs(grid.values)
    if not np.any(absS):
        return NormEstimate(0.0, 0.0)
    N, M = grid.N, grid.M
    sup = grid.sup_bound()
    rounding = 16 * _EPS * math.log2(M) * sup
    if p == 2.0:
        val = math.sqrt(float(np.mean(absS**2)))
        return NormEstimate(val, float(16 * _EPS * math.log2(M) * max(val, sup / math.sqrt(M))))
    if p == 1.0:
        if grid.coeffs is None:
            vals = grid.values
            val = float(np.mean(_kernels.segment_abs_integral(vals, np.roll(vals, -1))))
            return NormEstimate(val, float(math.pi**2 * N**2 * sup / (2.0 * M**2) + rounding))
        h = 1.0 / M
        m = HERMITE_SUBDIVISIONS
        val, curv = _kernels.hermite_abs_integral(grid.values, grid.derivative(1).values, m, backend)
        herm = h**4 / 720.0 * _cell_max_d4(grid)
        chord = (h / m) ** 2 / 8.0 * curv
        return NormEstimate(val, float(herm + chord + rounding))
    integral = float(np.mean(absS**p))
    err_int = math.pi * p * N * sup**p / M
    val = integral ** (1.0 / p)
    low = max(integral - err_int, 0.0) ** (1.0 / p)
    return NormEstimate(float(val), float(val - low))


# flat binary cache format: int64 N, int64 M (little endian), then re/im float64 pairs

def _write(path, N, M, z):
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(np.array([N, M], dtype="<i8").tobytes())
        inter = np.empty(2 * z.size, dtype="<f8")
        inter[0::2] = z.real
        inter[1::2] = z.imag
        fh.write(inter.tobytes())


def _read(path):
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise DomainError(f"{path}: truncated header")
    N, M = (int(v) for v in np.frombuffer(raw[:16], dtype="<i8"))
    body = np.frombuffer(raw[16:], dtype="<f8")
    if body.size % 2:
        raise DomainError(f"{path}: odd number of floats in body")
    return N, M, body[0::2] + 1j * body[1::2]


def save_coefficients(path, a: CoefficientVector) -> None:
    """Write a(1..N); the M slot of the header is 0."""
    _write(path, a.N, 0, a.a)


def load_coefficients(path, bound: float | None = None) -> CoefficientVector:
    N, M, z = _read(path)
    if M != 0 or z.size != N:
        raise DomainError(f"{path}: not a coefficient file (N={N}, M={M}, {z.size} values)")
    return CoefficientVector(z, bound=bound)


def save_grid(path, grid: ExpSumGrid) -> None:
    _write(path, grid.N, grid.M, grid.values)


def load_grid(path) -> ExpSumGrid:
    N, M, z = _read(path)
    if M == 0 or z.size != M:
        raise DomainError(f"{path}: not a grid file (N={N}, M={M}, {z.size} values)")
    return ExpSumGrid(N, M, z)
