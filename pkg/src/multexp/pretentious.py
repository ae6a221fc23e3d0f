"""Pretentious distance, minimization over twists and characters, and multi-scale scans.

The distance between 1-bounded multiplicative f and g over the primes of I is

    D(f, g; I)^2 = sum_{p in I} (1 - Re f(p) conj(g(p))) / p.

For g = psi(n) n^(it) this is H - Re sum_p f(p) conj(psi(p)) p^(-it) / p with
H = sum_{p in I} 1/p, so scanning t costs one cosine sum per grid point.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import _kernels
from ._util import pool_map
from .arith.characters import (
    DirichletCharacter,
    character_cap,
    fundamental_discriminants,
    kronecker_character,
    primitive_characters,
)
from .arith.multfn import MultFnSpec
from .arith.sieve import FactorSieve
from .errors import DomainError, ResourceError

REPORT_VERSION = "multexp.pretentious/1"
DEFAULT_RUNNERS_UP = 5
MIN_SCALE = 100.0


@dataclass(frozen=True)
class PrimeInterval:
    """Closed interval [lo, hi] of reals, 2 <= lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (2 <= self.lo <= self.hi) or not math.isfinite(self.hi):
            raise DomainError(f"prime interval needs 2 <= lo <= hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def of(cls, I) -> "PrimeInterval":
        return I if isinstance(I, PrimeInterval) else cls(float(I[0]), float(I[1]))


def _primes(I: PrimeInterval, sieve: FactorSieve) -> np.ndarray:
    if I.hi > sieve.limit:
        raise DomainError(f"interval end {I.hi:g} exceeds the sieve limit {sieve.limit}")
    return sieve.primes_in(I.lo, I.hi)


def _fvals(f: MultFnSpec, p: np.ndarray) -> np.ndarray:
    if p.size and p[-1] > f.limit:
        raise DomainError(f"interval reaches {int(p[-1])}, beyond the limit {f.limit} of {f.name}")
    return f.at_primes(p)


def _as_target(g):
    """Normalize g into (character or MultFnSpec, t)."""
    if isinstance(g, MultFnSpec):
        return g, 0.0
    if isinstance(g, DirichletCharacter):
        return g, 0.0
    if isinstance(g, tuple) and len(g) == 2:
        return g[0], float(g[1])
    raise DomainError("g must be a MultFnSpec, a DirichletCharacter or a (character, t) pair")


def _target_at_primes(g, p: np.ndarray) -> np.ndarray:
    base, t = _as_target(g)
    v = _fvals(base, p) if isinstance(base, MultFnSpec) else base(p).astype(np.complex128)
    if t:
        v = v * np.exp(1j * t * np.log(p.astype(np.float64)))
    return v


def harmonic_sum(I, sieve: FactorSieve) -> float:
    p = _primes(PrimeInterval.of(I), sieve)
    return float(np.sum(1.0 / p))


def distance_sq(f: MultFnSpec, g, I, sieve: FactorSieve) -> float:
    """D(f, g; I)^2 with g a MultFnSpec, a character, or a (character, t) pair."""
    I = PrimeInterval.of(I)
    p = _primes(I, sieve)
    if p.size == 0:
        return 0.0
    num = 1.0 - np.real(_fvals(f, p) * np.conj(_target_at_primes(g, p)))
    return float(max(np.sum(num / p), 0.0))


def default_t_spacing(I) -> float:
    """pi / log(hi): the phase p^(it) across I moves by O(spacing log hi)."""
    return math.pi / math.log(max(PrimeInterval.of(I).hi, 3.0))


def lipschitz_constant(I, sieve: FactorSieve) -> float:
    """sum_{p in I} log p / p, a bound for |d/dt D(f, psi n^(it); I)^2|."""
    p = _primes(PrimeInterval.of(I), sieve).astype(np.float64)
    return float(np.sum(np.log(p) / p))


class _TwistProfile:
    """t -> D(f, psi n^(it); I)^2 for fixed f, psi, I."""

    def __init__(self, f: MultFnSpec, psi: DirichletCharacter, I: PrimeInterval, sieve: FactorSieve,
                 backend: str | None = None):
        p = _primes(I, sieve)
        self.H = float(np.sum(1.0 / p))
        self.logp = np.log(p.astype(np.float64))
        self.w = _fvals(f, p) * np.conj(psi(p).astype(np.complex128)) / p
        self.backend = backend

    def __call__(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        if self.logp.size == 0:
            return np.zeros(ts.size)
        return np.maximum(self.H - _kernels.twisted_prime_sums(ts, self.logp, self.w, self.backend), 0.0)


def _local_minima(vals: np.ndarray, k: int) -> np.ndarray:
    n = vals.size
    if n <= 2:
        return np.argsort(vals, kind="stable")[:k]
    left = np.r_[np.inf, vals[:-1]]
    right = np.r_[vals[1:], np.inf]
    idx = np.flatnonzero((vals <= left) & (vals <= right))
    return idx[np.argsort(vals[idx], kind="stable")][:k]


def min_over_t(f: MultFnSpec, psi: DirichletCharacter, T: float, I, sieve: FactorSieve,
               t_grid_spacing: float | None = None, refine: int = 3,
               backend: str | None = None) -> tuple[float, float]:
    """min over |t| <= T of D(f, psi n^(it); I)^2, returned as (t*, value).

    A uniform grid of the given spacing is scanned, then the ``refine`` lowest
    grid local minima are polished by bounded Brent search within one grid
    step. The result never exceeds the grid minimum.
    """
    T = float(T)
    if T < 0:
        raise DomainError(f"T must be >= 0, got {T}")
    I = PrimeInterval.of(I)
    h = default_t_spacing(I) if t_grid_spacing is None else float(t_grid_spacing)
    if not h > 0:
        raise DomainError(f"t grid spacing must be positive, got {h}")
    prof = _TwistProfile(f, psi, I, sieve, backend)
    if T == 0:
        return 0.0, float(prof(0.0)[0])
    n = int(math.ceil(2 * T / h)) + 1
    ts = np.linspace(-T, T, n)
    vals = prof(ts)
    j = int(np.argmin(vals))
    best_t, best_v = float(ts[j]), float(vals[j])
    step = ts[1] - ts[0]
    for i in _local_minima(vals, refine):
        lo, hi = max(-T, ts[i] - step), min(T, ts[i] + step)
        res = optimize.minimize_scalar(lambda t: float(prof(t)[0]), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-10 * max(1.0, T)})
        v = float(res.fun)
        if v < best_v or (v == best_v and abs(res.x) < abs(best_t)):
            best_t, best_v = float(res.x), v
    return best_t, best_v


# reports --------------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    label: str
    conductor: int
    index: int
    t: float
    distance_sq: float
    discriminant: int | None = None

    def sort_key(self):
        return (self.distance_sq, self.conductor, abs(self.t), self.index)


@dataclass(frozen=True)
class PretentiousReport:
    best: Candidate
    runners_up: tuple[Candidate, ...]
    scan_domain: dict
    t_grid_spacing: float
    kind: str = "characters"
    n_candidates: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        """Gap between the winner and the first runner-up (inf when alone)."""
        return self.runners_up[0].distance_sq - self.best.distance_sq if self.runners_up else math.inf

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "kind": self.kind,
            "scan_domain": self.scan_domain,
            "t_grid_spacing": self.t_grid_spacing,
            "n_candidates": self.n_candidates,
            "best": asdict(self.best),
            "runners_up": [asdict(c) for c in self.runners_up],
            "margin": None if math.isinf(self.margin) else self.margin,
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PretentiousReport":
        d = json.loads(text)
        if d.get("version") != REPORT_VERSION:
            raise DomainError(f"unsupported report version {d.get('version')!r}")
        return cls(Candidate(**d["best"]), tuple(Candidate(**c) for c in d["runners_up"]),
                   d["scan_domain"], d["t_grid_spacing"], d["kind"], d["n_candidates"], d.get("extra", {}))


def _rank(cands: list[Candidate], keep: int) -> tuple[Candidate, tuple[Candidate, ...]]:
    if not cands:
        raise DomainError("nothing to scan: the candidate set is empty")
    ordered = sorted(cands, key=Candidate.sort_key)
    return ordered[0], tuple(ordered[1 : 1 + keep])


def _check_cap(Q: int):
    if Q > character_cap():
        raise ResourceError(f"Q={Q} exceeds the character cap {character_cap()} (MULTEXP_CHARACTER_CAP)")


def best_character(f: MultFnSpec, Q: int, T: float, I, sieve: FactorSieve, nonprincipal: bool = False,
                   t_grid_spacing: float | None = None, keep: int = DEFAULT_RUNNERS_UP,
                   workers: int | None = None) -> PretentiousReport:
    """Minimize over primitive characters of conductor q <= Q and |t| <= T."""
    Q = int(Q)
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    _check_cap(Q)
    I = PrimeInterval.of(I)
    h = default_t_spacing(I) if t_grid_spacing is None else float(t_grid_spacing)
    chars = [c for q in range(1, Q + 1) for c in primitive_characters(q)]
    if nonprincipal:
        chars = [c for c in chars if not c.is_principal]

    def one(chi):
        t, v = min_over_t(f, chi, T, I, sieve, h)
        return Candidate(chi.label, chi.conductor, int(chi.index or 0), t, v)

    best, rest = _rank(pool_map(one, chars, workers), keep)
    return PretentiousReport(best, rest, {"Q": Q, "T": float(T), "I": [I.lo, I.hi]}, h, "characters", len(chars))


def quadratic_scan(f: MultFnSpec, Q: int, I, sieve: FactorSieve, nonprincipal: bool = False,
                   keep: int = DEFAULT_RUNNERS_UP) -> PretentiousReport:
    """Scan the Kronecker characters (d/.) with |d| <= Q at t = 0."""
    Q = int(Q)
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    _check_cap(Q)
    I = PrimeInterval.of(I)
    p = _primes(I, sieve)
    fp = _fvals(f, p)
    inv = 1.0 / p
    cands = []
    for i, d in enumerate(fundamental_discriminants(Q, include_one=not nonprincipal)):
        chi = kronecker_character(d)
        v = float(max(np.sum((1.0 - np.real(fp) * np.real(chi(p))) * inv), 0.0))
        cands.append(Candidate(chi.label, chi.conductor, i, 0.0, v, d))
    best, rest = _rank(cands, keep)
    return PretentiousReport(best, rest, {"Q": Q, "T": 0.0, "I": [I.lo, I.hi]}, 0.0, "quadratic", len(cands))


def majorant_h(x):
    """h(x) = 1 + (x^2 - 1)/2 - (x^2 - 1)^2/18, which dominates |x| on [-2, 2]."""
    u = np.asarray(x, dtype=np.float64) ** 2 - 1.0
    out = 1.0 + u / 2.0 - u * u / 18.0
    return float(out) if out.ndim == 0 else out


# multi-scale gluing ------------------------------------------------------------------

@dataclass(frozen=True)
class ScaleResult:
    kind: str          # "scale" for [N_{i-1}, N_i], "bridge" for [N_i^eps, N_i^(1/eps)]
    lo: float
    hi: float
    winner: int
    distance_sq: float
    runner_up: int | None
    margin: float


@dataclass(frozen=True)
class MultiscaleReport:
    eps: float
    N_max: int
    Q: int
    scales: tuple[float, ...]
    results: tuple[ScaleResult, ...]

    @property
    def consistent(self) -> bool:
        return len({r.winner for r in self.results}) == 1

    @property
    def winners(self) -> list[int]:
        return [r.winner for r in self.results]

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "kind": "multiscale",
            "eps": self.eps,
            "N_max": self.N_max,
            "Q": self.Q,
            "scales": list(self.scales),
            "results": [{**asdict(r), "margin": None if math.isinf(r.margin) else r.margin}
                        for r in self.results],
            "consistent": self.consistent,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def multiscale_scales(eps: float, N_max: float, N_min: float = MIN_SCALE) -> list[float]:
    """N_k = N_max, N_{i-1} = N_i^(eps^2), kept while >= N_min; ascending."""
    eps = float(eps)
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    scales = [float(N_max)]
    while True:
        nxt = scales[-1] ** (eps * eps)
        if nxt < N_min or nxt >= scales[-1]:
            break
        scales.append(nxt)
    if len(scales) < 2:
        raise DomainError(
            f"only one scale fits: N_max^(eps^2) = {float(N_max) ** (eps * eps):.4g} < {N_min:g}; "
            f"raise eps (need eps >= {math.sqrt(math.log(N_min) / math.log(N_max)):.4f}) or N_max")
    return scales[::-1]


def multiscale_consistency(f: MultFnSpec, eps: float, N_max: int, sieve: FactorSieve, Q: int = 30,
                           N_min: float = MIN_SCALE, nonprincipal: bool = False) -> MultiscaleReport:
    """Quadratic scans on [N_{i-1}, N_i] and the bridges [N_i^eps, min(N_i^(1/eps), N_max)].

    The verdict is whether every interval picks the same discriminant.
    """
    N_max = int(N_max)
    if N_max > sieve.limit:
        raise DomainError(f"N_max={N_max} exceeds the sieve limit {sieve.limit}")
    scales = multiscale_scales(eps, N_max, N_min)
    intervals = [("scale", a, b) for a, b in zip(scales[:-1], scales[1:])]
    for s in scales:
        lo, hi = max(2.0, s**eps), min(s ** (1.0 / eps), float(N_max))
        if hi > lo:
            intervals.append(("bridge", lo, hi))
    results = []
    for kind, lo, hi in intervals:
        rep = quadratic_scan(f, Q, (lo, hi), sieve, nonprincipal=nonprincipal, keep=1)
        ru = rep.runners_up[0].discriminant if rep.runners_up else None
        results.append(ScaleResult(kind, lo, hi, int(rep.best.discriminant), rep.best.distance_sq, ru, rep.margin))
    return MultiscaleReport(float(eps), N_max, int(Q), tuple(scales), tuple(results))
