"""Hot integer/float loops, each with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and ``MULTEXP_NO_NUMBA`` is
unset (or ``0``). Every public function here takes an optional ``backend``
argument ("numba" or "numpy") so tests and the benchmark can pin one path.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    nb = None
    HAVE_NUMBA = False


def _flag_disabled() -> bool:
    return os.environ.get("MULTEXP_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


DEFAULT_BACKEND = "numba" if HAVE_NUMBA and not _flag_disabled() else "numpy"


def _pick(backend: str | None) -> str:
    b = backend or DEFAULT_BACKEND
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    if b == "numba" and not HAVE_NUMBA:
        return "numpy"
    return b


def _njit(fn):
    if HAVE_NUMBA:
        return nb.njit(cache=True, nogil=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# smallest prime factor table

@_njit
def _spf_nb(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    primes = np.empty(max(16, int(1.3 * n / max(1.0, math.log(max(n, 3)))) + 16), dtype=np.int64)
    npr = 0
    if n >= 1:
        spf[1] = 1
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[npr] = i
            npr += 1
        si = spf[i]
        for j in range(npr):
            p = primes[j]
            if p > si or p * i > n:
                break
            spf[p * i] = p
    return spf


def _spf_np(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    idx = np.flatnonzero(spf == 0)
    idx = idx[idx >= 2]
    spf[idx] = idx
    return spf


def spf_table(n: int, backend: str | None = None) -> np.ndarray:
    """Smallest prime factor of every 0 <= k <= n (spf[0] = 0, spf[1] = 1)."""
    if _pick(backend) == "numba":
        return _spf_nb(n)
    return _spf_np(n)


# ---------------------------------------------------------------------------
# split n = p^k * rest with p = spf(n)

@_njit
def _pp_split_nb(spf):
    n = spf.shape[0] - 1
    pp = np.ones(n + 1, dtype=np.int64)
    ex = np.zeros(n + 1, dtype=np.int64)
    rest = np.ones(n + 1, dtype=np.int64)
    for m in range(2, n + 1):
        p = spf[m]
        q = m // p
        if q > 1 and spf[q] == p:
            pp[m] = pp[q] * p
            ex[m] = ex[q] + 1
            rest[m] = rest[q]
        else:
            pp[m] = p
            ex[m] = 1
            rest[m] = q
    return pp, ex, rest


def _pp_split_np(spf):
    n = spf.shape[0] - 1
    idx = np.arange(n + 1, dtype=np.int64)
    p = spf.copy()
    p[:2] = 1
    pp = np.ones(n + 1, dtype=np.int64)
    ex = np.zeros(n + 1, dtype=np.int64)
    rest = idx.copy()
    rest[0] = 1
    active = np.flatnonzero(idx >= 2)
    while active.size:
        pa = p[active]
        div = rest[active] % pa == 0
        active = active[div]
        if not active.size:
            break
        rest[active] //= p[active]
        pp[active] *= p[active]
        ex[active] += 1
    return pp, ex, rest


def prime_power_split(spf: np.ndarray, backend: str | None = None):
    """Return (pp, ex, rest): n = pp[n] * rest[n], pp[n] = spf(n)^ex[n]."""
    if _pick(backend) == "numba":
        return _pp_split_nb(spf)
    return _pp_split_np(spf)


# ---------------------------------------------------------------------------
# multiplicative evaluation f(n) = f(pp[n]) * f(rest[n]) for all n <= N

@_njit
def _mult_eval_nb(pp, rest, ppv_re, ppv_im, upto):
    out_re = np.zeros(upto + 1)
    out_im = np.zeros(upto + 1)
    if upto >= 1:
        out_re[1] = 1.0
    for m in range(2, upto + 1):
        a = pp[m]
        r = rest[m]
        xr = ppv_re[a]
        xi = ppv_im[a]
        yr = out_re[r]
        yi = out_im[r]
        out_re[m] = xr * yr - xi * yi
        out_im[m] = xr * yi + xi * yr
    return out_re, out_im


def _mult_eval_np(pp, rest, ppv, upto):
    cur = rest[: upto + 1].copy()
    out = ppv[pp[: upto + 1]].astype(np.complex128)
    out[0] = 0.0
    if upto >= 1:
        out[1] = 1.0
    live = np.flatnonzero(cur > 1)
    while live.size:
        c = cur[live]
        out[live] *= ppv[pp[c]]
        cur[live] = rest[c]
        live = live[cur[live] > 1]
    return out


def multiplicative_values(pp, rest, ppv, upto: int, backend: str | None = None) -> np.ndarray:
    """f(0..upto) from prime-power values ppv (indexed by the prime power itself)."""
    if _pick(backend) == "numba":
        re, im = _mult_eval_nb(pp, rest, np.ascontiguousarray(ppv.real), np.ascontiguousarray(ppv.imag), upto)
        out = re + 1j * im
        out[0] = 0.0
        return out
    return _mult_eval_np(pp, rest, ppv, upto)


# ---------------------------------------------------------------------------
# number of distinct primes from a given list dividing each n <= N

@_njit
def _count_div_nb(n, primes):
    cnt = np.zeros(n + 1, dtype=np.int64)
    for j in range(primes.shape[0]):
        p = primes[j]
        for m in range(p, n + 1, p):
            cnt[m] += 1
    return cnt


def _count_div_np(n, primes):
    cnt = np.zeros(n + 1, dtype=np.int64)
    for p in primes:
        cnt[int(p) :: int(p)] += 1
    return cnt


def count_prime_divisors(n: int, primes: np.ndarray, backend: str | None = None) -> np.ndarray:
    """cnt[m] = #{p in primes : p | m} for 0 <= m <= n (cnt[0] is meaningless)."""
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    primes = primes[primes <= n]
    if _pick(backend) == "numba":
        return _count_div_nb(n, primes)
    return _count_div_np(n, primes)


# ---------------------------------------------------------------------------
# t -> sum_p Re(w_p p^{-it}) for a grid of t

@_njit
def _twisted_nb(ts, logp, wre, wim):
    out = np.zeros(ts.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        s = 0.0
        for j in range(logp.shape[0]):
            ph = t * logp[j]
            s += wre[j] * math.cos(ph) + wim[j] * math.sin(ph)
        out[i] = s
    return out


def _twisted_np(ts, logp, wre, wim, chunk=1 << 22):
    out = np.empty(ts.shape[0])
    step = max(1, chunk // max(1, logp.shape[0]))
    for s in range(0, ts.shape[0], step):
        ph = np.outer(ts[s : s + step], logp)
        out[s : s + step] = np.cos(ph) @ wre + np.sin(ph) @ wim
    return out


def twisted_prime_sums(ts, logp, w, backend: str | None = None) -> np.ndarray:
    """Re sum_j w_j exp(-i t log p_j) for every t in ts."""
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    logp = np.ascontiguousarray(logp, dtype=np.float64)
    wre = np.ascontiguousarray(np.real(w), dtype=np.float64)
    wim = np.ascontiguousarray(np.imag(w), dtype=np.float64)
    if _pick(backend) == "numba":
        return _twisted_nb(ts, logp, wre, wim)
    return _twisted_np(ts, logp, wre, wim)


# ---------------------------------------------------------------------------
# Farey sequence of order Q on [0, 1]

def farey_length(q_max: int) -> int:
    phi = np.arange(q_max + 1, dtype=np.int64)
    for p in range(2, q_max + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return int(1 + phi[1:].sum())


@_njit
def _farey_nb(q_max, length):
    num = np.empty(length, dtype=np.int64)
    den = np.empty(length, dtype=np.int64)
    a, b, c, d = 0, 1, 1, q_max
    num[0] = 0
    den[0] = 1
    i = 1
    while c <= q_max and i < length:
        num[i] = c
        den[i] = d
        i += 1
        k = (q_max + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return num[:i], den[:i]


def _farey_np(q_max):
    nums = [np.zeros(1, dtype=np.int64)]
    dens = [np.ones(1, dtype=np.int64)]
    for q in range(1, q_max + 1):
        a = np.arange(1, q + 1, dtype=np.int64)
        a = a[np.gcd(a, q) == 1]
        nums.append(a)
        dens.append(np.full(a.shape, q, dtype=np.int64))
    num = np.concatenate(nums)
    den = np.concatenate(dens)
    order = np.argsort(num / den, kind="stable")
    return num[order], den[order]


def farey(q_max: int, backend: str | None = None):
    """Reduced fractions a/q in [0, 1] with q <= q_max, ascending (0/1 first, 1/1 last)."""
    if _pick(backend) == "numba":
        return _farey_nb(q_max, farey_length(q_max))
    return _farey_np(q_max)


# ---------------------------------------------------------------------------
# integral of |H| for the cubic Hermite interpolant of (S, S') on a periodic grid

def segment_abs_integral(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Integral over s in [0, 1] of |u + (v - u) s| for complex arrays u, v (numpy only)."""
    b = v - u
    bb = np.abs(b) ** 2
    out = np.abs(u).astype(np.float64)
    live = bb > 1e-300
    if not live.any():
        return out
    uu, bl, bbl = u[live], b[live], bb[live]
    c = np.real(np.conj(uu) * bl) / bbl
    k2 = np.maximum(np.imag(np.conj(uu) * bl) ** 2 / bbl**2, 0.0)
    sb = np.sqrt(bbl)

    def F(w):
        r = np.sqrt(w * w + k2)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(k2 > 0, k2 * np.arcsinh(w / np.sqrt(np.where(k2 > 0, k2, 1.0))), 0.0)
        return 0.5 * (w * r + tail)

    out[live] = sb * (F(1.0 + c) - F(c))
    return out


@_njit
def _seg_abs_scalar(ur, ui, vr, vi):
    br = vr - ur
    bi = vi - ui
    bb = br * br + bi * bi
    if bb <= 1e-300:
        return math.sqrt(ur * ur + ui * ui)
    c = (ur * br + ui * bi) / bb
    cross = (ur * bi - ui * br) / bb
    k2 = cross * cross
    k = math.sqrt(k2)
    w1 = 1.0 + c
    f1 = w1 * math.sqrt(w1 * w1 + k2)
    f0 = c * math.sqrt(c * c + k2)
    if k > 0.0:
        f1 += k2 * math.asinh(w1 / k)
        f0 += k2 * math.asinh(c / k)
    return 0.5 * math.sqrt(bb) * (f1 - f0)


@_njit
def _hermite_nb(sr, si, dr, di, h, m):
    M = sr.shape[0]
    total = 0.0
    curv = 0.0
    for j in range(M):
        j1 = j + 1 if j + 1 < M else 0
        u0r, u0i, u1r, u1i = sr[j], si[j], sr[j1], si[j1]
        d0r, d0i, d1r, d1i = h * dr[j], h * di[j], h * dr[j1], h * di[j1]
        pr, pi = u0r, u0i
        for k in range(1, m + 1):
            s = k / m
            s2 = s * s
            s3 = s2 * s
            b00 = 2 * s3 - 3 * s2 + 1
            b10 = s3 - 2 * s2 + s
            b01 = -2 * s3 + 3 * s2
            b11 = s3 - s2
            qr = b00 * u0r + b10 * d0r + b01 * u1r + b11 * d1r
            qi = b00 * u0i + b10 * d0i + b01 * u1i + b11 * d1i
            total += _seg_abs_scalar(pr, pi, qr, qi)
            pr, pi = qr, qi
        a0r = -6 * u0r - 4 * d0r + 6 * u1r - 2 * d1r
        a0i = -6 * u0i - 4 * d0i + 6 * u1i - 2 * d1i
        a1r = 6 * u0r + 2 * d0r - 6 * u1r + 4 * d1r
        a1i = 6 * u0i + 2 * d0i - 6 * u1i + 4 * d1i
        curv += max(math.sqrt(a0r * a0r + a0i * a0i), math.sqrt(a1r * a1r + a1i * a1i))
    return total, curv


def _hermite_np(S, dS, h, m, chunk=1 << 18):
    s = np.linspace(0.0, 1.0, m + 1)[:, None]
    b00 = 2 * s**3 - 3 * s**2 + 1
    b10 = s**3 - 2 * s**2 + s
    b01 = -2 * s**3 + 3 * s**2
    b11 = s**3 - s**2
    M = S.size
    total = 0.0
    curv = 0.0
    for lo in range(0, M, chunk):
        hi = min(lo + chunk, M)
        j1 = np.arange(lo + 1, hi + 1) % M
        u0, u1 = S[lo:hi], S[j1]
        d0, d1 = h * dS[lo:hi], h * dS[j1]
        H = b00 * u0 + b10 * d0 + b01 * u1 + b11 * d1
        total += float(np.sum(segment_abs_integral(H[:-1], H[1:])))
        # H'' is linear on the cell, so its modulus peaks at an endpoint
        hss0 = -6 * u0 - 4 * d0 + 6 * u1 - 2 * d1
        hss1 = 6 * u0 + 2 * d0 - 6 * u1 + 4 * d1
        curv += float(np.sum(np.maximum(np.abs(hss0), np.abs(hss1))))
    return total, curv


def hermite_abs_integral(S, dS, m: int, backend: str | None = None) -> tuple[float, float]:
    """(integral of |H|, mean over cells of max|H''|) for the cubic Hermite interpolant H.

    Cells have width h = 1/M; each is cut into m pieces whose chords of H are
    integrated exactly.
    """
    S = np.ascontiguousarray(S, dtype=np.complex128)
    dS = np.ascontiguousarray(dS, dtype=np.complex128)
    M = S.size
    h = 1.0 / M
    if _pick(backend) == "numba":
        total, curv = _hermite_nb(S.real.copy(), S.imag.copy(), dS.real.copy(), dS.imag.copy(), h, m)
    else:
        total, curv = _hermite_np(S, dS, h, m)
    return total / (M * m), curv / (M * h * h)
