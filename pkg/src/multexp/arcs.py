"""Major arcs M_{Q,N}: construction, location of points, masked energies and minor-arc sups."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DomainError, ResolutionError
from .expsum.grid import ExpSumGrid

MIN_POINTS_PER_ARC = 16


@dataclass(frozen=True)
class ArcSet:
    """Merged union of the open arcs (a/q - Q/(qN), a/q + Q/(qN)), q <= Q, on R/Z.

    ``left``/``right`` are merged interval endpoints sorted by ``left``; the
    interval through 0 is stored with ``left < 0``. ``center_a``/``center_q``
    give the smallest-denominator fraction inside each merged interval and
    ``n_fractions`` how many arcs were merged into it.
    """

    Q: float
    N: int
    left: np.ndarray
    right: np.ndarray
    center_a: np.ndarray
    center_q: np.ndarray
    n_fractions: np.ndarray
    saturated: bool

    @property
    def total_measure(self) -> float:
        return 1.0 if self.saturated else float(np.sum(self.right - self.left))

    @property
    def narrowest(self) -> float:
        return float(np.min(self.right - self.left)) if self.left.size else 0.0

    def __len__(self):
        return int(self.left.size)

    def _pieces(self):
        """Intervals cut at 0 into [0, 1) pieces, sorted."""
        lo, hi = [], []
        for a, b in zip(self.left, self.right):
            if a < 0:
                lo += [a + 1.0, 0.0]
                hi += [1.0, b]
            elif b > 1:
                lo += [a, 0.0]
                hi += [1.0, b - 1.0]
            else:
                lo.append(a)
                hi.append(b)
        lo = np.array(lo)
        hi = np.array(hi)
        order = np.argsort(lo)
        return lo[order], hi[order]

    def contains(self, alpha) -> np.ndarray:
        """Membership of points (taken mod 1) in the open arcs."""
        x = np.mod(np.asarray(alpha, dtype=np.float64), 1.0)
        if self.saturated:
            return np.ones(x.shape, dtype=bool)
        lo, hi = self._pieces()
        k = np.searchsorted(lo, x, side="left") - 1
        kk = np.clip(k, 0, lo.size - 1)
        inside = (k >= 0) & (x > lo[kk]) & (x < hi[kk])
        # a point exactly at 0 lies inside the arc through 0 (cut into two pieces)
        at_zero = (x == 0.0) & np.any(self.left < 0)
        return inside | at_zero

    def covered_measure(self, x) -> np.ndarray:
        """Measure of M intersected with [0, x] for x in [0, 1]."""
        x = np.asarray(x, dtype=np.float64)
        if self.saturated:
            return x.copy()
        lo, hi = self._pieces()
        cum = np.concatenate([[0.0], np.cumsum(hi - lo)])
        k = np.searchsorted(lo, x, side="right")
        partial = np.where(k > 0, np.clip(x - lo[np.maximum(k - 1, 0)], 0.0,
                                          (hi - lo)[np.maximum(k - 1, 0)]), 0.0)
        return cum[np.maximum(k - 1, 0)] * (k > 0) + partial

    def cell_weights(self, M: int) -> np.ndarray:
        """Fraction of each grid cell [j/M - 1/2M, j/M + 1/2M) inside M_{Q,N}."""
        j = np.arange(M)
        a = (j - 0.5) / M
        b = (j + 0.5) / M
        cm = self.covered_measure
        w = np.empty(M)
        w[1:] = cm(b[1:]) - cm(a[1:])
        # cell around 0 straddles the cut
        w[0] = cm(np.array([b[0]]))[0] + (self.total_measure - cm(np.array([1.0 + a[0]]))[0])
        return np.clip(w * M, 0.0, 1.0)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["a", "q", "left", "right"])
            for a, q, lo, hi in zip(self.center_a, self.center_q, self.left, self.right):
                wr.writerow([int(a), int(q), repr(float(lo)), repr(float(hi))])


def major_arcs(Q: float, N: int, backend: str | None = None) -> ArcSet:
    """Merged major arcs for all reduced a/q with q <= Q, each of half-width Q/(qN)."""
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    qmax = int(math.floor(Q))
    num, den = _kernels.farey(qmax, backend)
    # 1/1 is the same point as 0/1
    num, den = num[:-1], den[:-1]
    centers = num / den
    half = Q / (den * N)
    lo = centers - half
    hi = centers + half
    # the arc at 0 is the only one reaching below 0; arcs near 1 reach past 1 and wrap onto it
    wrap = hi > 1.0
    if np.any(wrap):
        lo = np.concatenate([lo[~wrap], lo[wrap] - 1.0])
        hi = np.concatenate([hi[~wrap], hi[wrap] - 1.0])
        num = np.concatenate([num[~wrap], num[wrap] - den[wrap]])
        den = np.concatenate([den[~wrap], den[wrap]])
        order = np.argsort(lo, kind="stable")
        lo, hi, num, den = lo[order], hi[order], num[order], den[order]
    # single sweep merge (open intervals: touching endpoints stay separate)
    new = np.ones(lo.size, dtype=bool)
    run_hi = np.maximum.accumulate(hi)
    new[1:] = lo[1:] >= run_hi[:-1]
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], lo.size)
    m_lo = lo[starts]
    m_hi = np.maximum.reduceat(hi, starts)
    best = np.array([s + int(np.argmin(den[s:e])) for s, e in zip(starts, ends)], dtype=np.int64)
    c_a = np.mod(num[best], den[best])
    c_q = den[best]
    counts = ends - starts
    # merged intervals may also wrap: last one reaching the first one's start + 1
    if m_lo.size > 1 and m_hi[-1] >= m_lo[0] + 1.0:
        m_lo[0] = m_lo[-1] - 1.0
        m_hi[0] = max(m_hi[0], m_hi[-1] - 1.0)
        if c_q[-1] < c_q[0]:
            c_a[0], c_q[0] = c_a[-1], c_q[-1]
        counts[0] += counts[-1]
        m_lo, m_hi, c_a, c_q, counts = m_lo[:-1], m_hi[:-1], c_a[:-1], c_q[:-1], counts[:-1]
    saturated = bool(np.sum(m_hi - m_lo) >= 1.0)
    if saturated:
        m_lo, m_hi = np.array([0.0]), np.array([1.0])
        c_a, c_q, counts = np.array([0]), np.array([1]), np.array([int(np.sum(counts))])
    return ArcSet(float(Q), int(N), m_lo, m_hi, c_a, c_q, counts, saturated)


@dataclass(frozen=True)
class Location:
    major: bool
    a: int
    q: int

    @property
    def kind(self) -> str:
        return "major" if self.major else "minor"


def _convergent_below(alpha: Fraction, qbound: float) -> tuple[int, int]:
    """Last continued-fraction convergent a/q of alpha with q <= qbound."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    x = alpha
    while True:
        a = math.floor(x)
        p2, q2 = a * p1 + p0, a * q1 + q0
        if q2 > qbound:
            return p1, q1
        p0, q0, p1, q1 = p1, q1, p2, q2
        frac = x - a
        if frac == 0:
            return p1, q1
        x = 1 / frac


def locate(alpha: float, Q: float, N: int) -> Location:
    """Classify alpha as major (with its smallest-denominator arc center) or minor.

    A minor point comes with a Dirichlet witness a/q, q <= N/Q, |alpha - a/q| <= Q/(qN).
    """
    x = float(alpha) % 1.0
    qs = np.arange(1, int(math.floor(Q)) + 1)
    a = np.rint(qs * x)
    dist = np.abs(x - a / qs)
    hit = np.flatnonzero(dist < Q / (qs * N))
    if hit.size:
        q = int(qs[hit[0]])
        aa = int(a[hit[0]]) % q
        g = math.gcd(aa, q)
        return Location(True, aa // g, q // g)
    fx = Fraction(x)
    p, q = _convergent_below(fx, N / Q)
    return Location(False, p % q if q else 0, q)


def _check_compatible(grid: ExpSumGrid, arcs: ArcSet):
    if grid.N != arcs.N:
        raise DomainError(f"grid N={grid.N} and arc N={arcs.N} differ")
    if arcs.saturated or len(arcs) == 0:
        return
    pts = arcs.narrowest * grid.M
    if pts < MIN_POINTS_PER_ARC - 1e-9:
        raise ResolutionError(
            f"grid M={grid.M} puts {pts:.1f} points across the narrowest arc; need >= {MIN_POINTS_PER_ARC}"
        )


@dataclass(frozen=True)
class EnergySplit:
    major_energy: float
    minor_energy: float

    @property
    def total(self) -> float:
        return self.major_energy + self.minor_energy

    @property
    def major_fraction(self) -> float:
        return self.major_energy / self.total if self.total > 0 else 0.0


def energy_split(grid: ExpSumGrid, arcs: ArcSet) -> EnergySplit:
    """Riemann sums of |S|^2 inside and outside the arcs, endpoint cells weighted by overlap."""
    _check_compatible(grid, arcs)
    w = arcs.cell_weights(grid.M)
    e = np.abs(grid.values) ** 2
    maj = float(np.sum(w * e)) / grid.M
    mino = float(np.sum((1.0 - w) * e)) / grid.M
    return EnergySplit(maj, mino)


def minor_mask(grid: ExpSumGrid, arcs: ArcSet) -> np.ndarray:
    return ~arcs.contains(grid.alphas)


def minor_sup(grid: ExpSumGrid, arcs: ArcSet) -> tuple[float, float]:
    """max |S(j/M)| over grid points outside the arcs, and where it is attained."""
    _check_compatible(grid, arcs)
    mask = minor_mask(grid, arcs)
    if not mask.any():
        return 0.0, math.nan
    absS = np.where(mask, np.abs(grid.values), -1.0)
    j = int(np.argmax(absS))
    return float(absS[j]), j / grid.M
