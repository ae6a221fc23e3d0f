"""Smooth windows W_eps, their derivatives, modified Sobolev norms and Mellin transforms.

Both window kinds are built from the C-infinity smoothstep

    phi(t) = psi(t) / (psi(t) + psi(1 - t)),   psi(t) = exp(-1/t) for t > 0,

which is 0 for t <= 0, 1 for t >= 1. Derivatives up to order 4 are computed
exactly (to rounding) with truncated Taylor-series arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from ..errors import DomainError

MAX_DERIV = 4
WINDOW_KINDS = ("plateau", "dyadic_bump")


# truncated Taylor jets: arrays of shape (K + 1, npts), row k = f^(k)(x) / k!

def _jet_mul(a, b):
    K = a.shape[0] - 1
    out = np.zeros_like(a)
    for k in range(K + 1):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def _jet_exp(u):
    K = u.shape[0] - 1
    out = np.zeros_like(u)
    out[0] = np.exp(u[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(u[0])
        for j in range(1, k + 1):
            acc += j * u[j] * out[k - j]
        out[k] = acc / k
    return out


def _jet_recip(d):
    K = d.shape[0] - 1
    out = np.zeros_like(d)
    out[0] = 1.0 / d[0]
    for k in range(1, K + 1):
        acc = np.zeros_like(d[0])
        for j in range(1, k + 1):
            acc += d[j] * out[k - j]
        out[k] = -out[0] * acc
    return out


def _jet_compose(outer, inner):
    """Taylor jet of F(g(x)) from the jet of F at g(x) and the jet of g at x."""
    K = outer.shape[0] - 1
    delta = inner.copy()
    delta[0] = 0.0
    out = np.zeros_like(outer)
    out[0] = outer[0]
    power = np.zeros_like(inner)
    power[0] = 1.0
    for m in range(1, K + 1):
        power = _jet_mul(power, delta)
        out += outer[m] * power
    return out


def _smoothstep_half(t, K):
    """Jet of phi at points 0 < t <= 1/2, written as sigma(-v), v = 1/t - 1/(1-t)."""
    u = np.empty((K + 1, t.size))
    for k in range(K + 1):
        u[k] = -((-1.0) ** k / t ** (k + 1)) + 1.0 / (1.0 - t) ** (k + 1)
    E = _jet_exp(u)
    D = E.copy()
    D[0] = D[0] + 1.0
    return _jet_mul(E, _jet_recip(D))


def smoothstep_jet(t, K: int = MAX_DERIV) -> np.ndarray:
    """Taylor coefficients phi^(k)(t)/k!, k = 0..K, of the C-infinity smoothstep."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros((K + 1, t.size))
    out[0, t >= 1.0] = 1.0
    lo = (t > 1.0 / 700.0) & (t <= 0.5)
    hi = (t > 0.5) & (t < 1.0 - 1.0 / 700.0)
    near_one = (t >= 1.0 - 1.0 / 700.0) & (t < 1.0)
    out[0, near_one] = 1.0
    if lo.any():
        out[:, lo] = _smoothstep_half(t[lo], K)
    if hi.any():
        mirrored = _smoothstep_half(1.0 - t[hi], K)
        # phi(t) = 1 - phi(1 - t): the k-th Taylor coefficient picks up (-1)^(k+1)
        sign = np.array([(-1.0) ** (k + 1) for k in range(K + 1)])[:, None]
        out[:, hi] = sign * mirrored
        out[0, hi] = 1.0 - mirrored[0]
    return out


def _taylor_to_derivs(jet):
    fact = np.array([math.factorial(k) for k in range(jet.shape[0])], dtype=np.float64)[:, None]
    return jet * fact


@lru_cache(maxsize=1)
def smoothstep_derivative_maxima() -> tuple[float, ...]:
    """max_t |phi^(j)(t)| for j = 0..4, tabulated on a dense mesh."""
    t = np.linspace(0.0, 1.0, 200_001)
    d = _taylor_to_derivs(smoothstep_jet(t))
    return tuple(float(np.max(np.abs(row))) for row in d)


@dataclass(frozen=True)
class Window:
    """A smooth window. ``derivative_constants[j]`` = c_j with |W^(j)| <= c_j eps^(-j)."""

    eps: float
    kind: str
    support: tuple[float, float]
    derivative_constants: tuple[float, ...] = field(repr=False)

    def breakpoints(self) -> list[float]:
        if self.kind == "plateau":
            e = self.eps
            return [e / 2, e, 1 - e, 1 - e / 2]
        if self.kind == "dyadic_bump":
            return [0.5, 1.0, 2.0]
        return []

    def derivatives(self, x, upto: int = MAX_DERIV) -> np.ndarray:
        """Array of shape (upto + 1, len(x)) with W^(j)(x) in row j."""
        if not 0 <= upto <= MAX_DERIV:
            raise DomainError(f"derivative order must be in [0, {MAX_DERIV}]")
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self.kind == "zero":
            return np.zeros((upto + 1, x.size))
        if self.kind == "plateau":
            return self._plateau(x, upto)
        return self._dyadic(x, upto)

    def __call__(self, x, deriv: int = 0):
        out = self.derivatives(x, deriv)[deriv]
        return float(out[0]) if np.ndim(x) == 0 else out

    def _plateau(self, x, upto):
        e = self.eps
        h = e / 2
        out = np.zeros((upto + 1, x.size))
        mid = (x >= e) & (x <= 1 - e)
        out[0, mid] = 1.0
        left = (x > h) & (x < e)
        right = (x > 1 - e) & (x < 1 - h)
        if left.any():
            d = _taylor_to_derivs(smoothstep_jet((x[left] - h) / h, upto))
            out[:, left] = d * (1.0 / h) ** np.arange(upto + 1)[:, None]
        if right.any():
            d = _taylor_to_derivs(smoothstep_jet((1 - h - x[right]) / h, upto))
            out[:, right] = d * (-1.0 / h) ** np.arange(upto + 1)[:, None]
        return out

    def _dyadic(self, x, upto):
        out = np.zeros((upto + 1, x.size))
        live = (x > 0.5) & (x < 2.0)
        if not live.any():
            return out
        xs = x[live]
        inner = np.zeros((upto + 1, xs.size))
        inner[0] = np.log2(xs)
        for k in range(1, upto + 1):
            inner[k] = (-1.0) ** (k + 1) / (k * xs**k * math.log(2.0))
        up = inner.copy()
        up[0] = up[0] + 1.0
        jet = _jet_compose(smoothstep_jet(up[0], upto), up) - _jet_compose(smoothstep_jet(inner[0], upto), inner)
        out[:, live] = _taylor_to_derivs(jet)
        return out


def smooth_window(eps: float, kind: str = "plateau") -> Window:
    """Build W_eps.

    ``plateau``: supported in [eps/2, 1 - eps/2], equal to 1 on [eps, 1 - eps].
    ``dyadic_bump``: K(x) = phi(log2 x + 1) - phi(log2 x), supported in (1/2, 2),
    with sum_k K(n / 2^k) = 1 for every integer n >= 1 (eps only validated).
    """
    eps = float(eps)
    if not 0.0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    if kind not in WINDOW_KINDS:
        raise DomainError(f"unknown window kind {kind!r}; expected one of {WINDOW_KINDS}")
    if kind == "plateau":
        m = smoothstep_derivative_maxima()
        consts = tuple(m[j] * 2.0**j for j in range(MAX_DERIV + 1))
        return Window(eps, kind, (eps / 2, 1 - eps / 2), consts)
    consts = tuple(_dyadic_maxima())
    return Window(eps, kind, (0.5, 2.0), consts)


@lru_cache(maxsize=1)
def _dyadic_maxima():
    probe = Window(0.25, "dyadic_bump", (0.5, 2.0), ())
    d = probe.derivatives(np.linspace(0.5, 2.0, 200_001))
    return [float(np.max(np.abs(row))) for row in d]


ZERO_WINDOW = Window(0.25, "zero", (0.0, 0.0), (0.0,) * (MAX_DERIV + 1))


# quadrature ---------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panels(window: Window, panels_per_piece: int):
    bps = window.breakpoints()
    xs, ws = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        edges = np.linspace(a, b, panels_per_piece + 1)
        mids = (edges[:-1] + edges[1:]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        xs.append((mids[:, None] + half[:, None] * _GL_X[None, :]).ravel())
        ws.append((half[:, None] * _GL_W[None, :]).ravel())
    if not xs:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ws)


def sobolev_norm(window: Window, p: float, r: int, panels_per_piece: int = 256) -> float:
    """1 + sum_{j=0}^{r} (integral of |W^(j)|^p)^(1/p)."""
    if not 0 <= r <= MAX_DERIV:
        raise DomainError(f"r must be in [0, {MAX_DERIV}]")
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    x, w = _panels(window, panels_per_piece)
    if x.size == 0:
        return 1.0
    d = window.derivatives(x, r)
    total = 1.0
    for j in range(r + 1):
        total += float(np.sum(w * np.abs(d[j]) ** p)) ** (1.0 / p)
    return total


def mellin_eval(window: Window, s: complex) -> complex:
    """W~(s) = integral over (0, inf) of W(x) x^(s-1) dx, by adaptive quadrature."""
    s = complex(s)
    if not 0.0 < s.real < 2.0:
        raise DomainError(f"Re s must lie in (0, 2), got {s.real}")
    bps = window.breakpoints()
    if not bps:
        return 0j
    total = 0j
    for a, b in zip(bps[:-1], bps[1:]):
        val, _ = integrate.quad(lambda x: window(x) * x ** (s - 1), a, b,
                                complex_func=True, limit=400, epsabs=1e-13, epsrel=1e-11)
        total += val
    return total
