"""Experiment runners behind the CLI subcommands. Each returns a list of report rows."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .._util import pool_map
from ..arcs import energy_split, major_arcs, minor_sup
from ..arith.sieve import FactorSieve, build_factor_sieve, check_sieve_limit, memory_budget
from ..decomp import CriterionInput, criterion_certificate, presieve_gap, tk_check, tk_weights
from ..errors import DomainError, ResourceError
from ..expsum.grid import OVERSAMPLE, CoefficientVector, coefficient_vector, default_grid_size, grid_transform, lp_norm
from ..expsum.window import smooth_window
from ..pretentious import best_character, multiscale_consistency, quadratic_scan
from . import fnspec

COMMANDS = ("l1norm", "arcs-energy", "detect", "tk-check", "presieve-gap", "criterion", "multiscale", "minor-sup")
GRIDS_IN_FLIGHT = 4


@dataclass
class ExperimentConfig:
    command: str
    f: str = "one"
    N: int = 1 << 12
    Q: float | None = None
    T: float = 0.0
    eps: float | None = None
    A: float | None = None
    Delta: float | None = None
    oversample: int = OVERSAMPLE
    seed: int = 0
    Nmin: int | None = None
    Qmin: float | None = None
    interval: tuple[float, float] | None = None
    mode: str = "quadratic"
    p: tuple[float, ...] = (1.0, 2.0)
    out: str | None = None
    format: str = "csv"
    f_canonical: str = field(default="", init=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d["interval"] = list(self.interval) if self.interval else None
        d["p"] = list(self.p)
        return d


def _pow2_sweep(lo: float, hi: float) -> list[float]:
    out = []
    x = lo
    while x <= hi * (1 + 1e-12):
        out.append(x)
        x *= 2
    return out


def validate(cfg: ExperimentConfig) -> None:
    """Check every parameter against module preconditions; allocates nothing large."""
    if cfg.command not in COMMANDS:
        raise DomainError(f"unknown command {cfg.command!r}")
    if cfg.format not in ("csv", "jsonl"):
        raise DomainError(f"--format must be csv or jsonl, got {cfg.format!r}")
    if cfg.N < 1:
        raise DomainError(f"--N must be >= 1, got {cfg.N}")
    check_sieve_limit(max(cfg.N, int(cfg.interval[1]) if cfg.interval else 0))
    if cfg.oversample < OVERSAMPLE:
        raise DomainError(f"--oversample must be >= {OVERSAMPLE} (grid floor is {OVERSAMPLE}N), got {cfg.oversample}")
    if cfg.command in ("l1norm", "arcs-energy", "criterion", "minor-sup"):
        M = default_grid_size(cfg.N, cfg.oversample)
        need = GRIDS_IN_FLIGHT * 16 * M
        if need > memory_budget():
            raise ResourceError(f"grid of M={M} points needs ~{need} bytes, over the budget {memory_budget()} "
                                f"(MULTEXP_MEMORY_BUDGET)")
    if cfg.eps is not None and cfg.command != "multiscale" and not 0 < cfg.eps < 0.5:
        raise DomainError(f"--eps must lie in (0, 1/2), got {cfg.eps}")
    if cfg.Nmin is not None and not 1 <= cfg.Nmin <= cfg.N:
        raise DomainError(f"--Nmin must lie in [1, N], got {cfg.Nmin}")
    if cfg.command in ("arcs-energy", "detect", "criterion", "multiscale", "minor-sup"):
        if cfg.Q is None:
            raise DomainError(f"{cfg.command} needs --Q")
        if cfg.Q < 1:
            raise DomainError(f"--Q must be >= 1, got {cfg.Q}")
    if cfg.Qmin is not None and not (1 <= cfg.Qmin <= (cfg.Q or 0)):
        raise DomainError(f"--Qmin must lie in [1, Q], got {cfg.Qmin}")
    if cfg.T < 0:
        raise DomainError(f"--T must be >= 0, got {cfg.T}")
    if cfg.A is not None and cfg.A < 2:
        raise DomainError(f"--A must be >= 2, got {cfg.A}")
    if cfg.Delta is not None and not cfg.Delta > 0:
        raise DomainError(f"--Delta must be positive, got {cfg.Delta}")
    if cfg.interval is not None:
        lo, hi = cfg.interval
        if not 2 <= lo <= hi:
            raise DomainError(f"--interval needs 2 <= LO <= HI, got {lo}:{hi}")
    if cfg.mode not in ("quadratic", "characters", "quadratic-nonprincipal", "characters-nonprincipal"):
        raise DomainError(f"--mode must be quadratic or characters (optionally -nonprincipal), got {cfg.mode!r}")
    if any(p < 1 for p in cfg.p):
        raise DomainError(f"--p values must be >= 1, got {list(cfg.p)}")
    if cfg.command == "multiscale":
        if cfg.eps is None:
            raise DomainError("multiscale needs --eps")
        from ..pretentious import multiscale_scales
        multiscale_scales(cfg.eps, cfg.N)
    ast = fnspec.parse(cfg.f, cfg.seed)
    fnspec.validate(ast, cfg.f)
    cfg.f_canonical = ast.canonical()


# runners --------------------------------------------------------------------------

def _setup(cfg: ExperimentConfig, limit: int | None = None):
    limit = max(cfg.N, int(cfg.interval[1]) if cfg.interval else 0) if limit is None else limit
    sieve = build_factor_sieve(limit)
    f = fnspec.build(fnspec.parse(cfg.f, cfg.seed), sieve)
    return sieve, f


def _window(cfg):
    return smooth_window(cfg.eps) if cfg.eps is not None else None


def _grid(cfg, f, sieve, N, weights=None):
    a = coefficient_vector(f, sieve, N, _window(cfg))
    if weights is not None:
        a = a.scaled(weights)
    return a, grid_transform(a, default_grid_size(N, cfg.oversample))


def run_l1norm(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    Ns = [int(n) for n in _pow2_sweep(cfg.Nmin or cfg.N, cfg.N)]

    def point(N):
        _, g = _grid(cfg, f, sieve, N)
        rows = []
        for p in cfg.p:
            est = lp_norm(g, p)
            rows.append({"N": N, "M": g.M, "metric": f"L{p:g}", "value": est.value, "error_bound": est.error_bound})
        rows.append({"N": N, "M": g.M, "metric": "sup_bound", "value": g.sup_bound(), "error_bound": 0.0})
        return rows

    return [r for rows in pool_map(point, Ns) for r in rows]


def run_arcs_energy(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    a, g = _grid(cfg, f, sieve, cfg.N)
    total = a.l2_sq()
    rows = []
    for Q in _pow2_sweep(cfg.Qmin or cfg.Q, cfg.Q):
        arcs = major_arcs(Q, cfg.N)
        sp = energy_split(g, arcs)
        base = {"Q": Q, "N": cfg.N}
        rows += [
            {**base, "metric": "major_energy", "value": sp.major_energy},
            {**base, "metric": "minor_energy", "value": sp.minor_energy},
            {**base, "metric": "major_fraction", "value": sp.major_fraction},
            {**base, "metric": "arc_measure", "value": arcs.total_measure},
            {**base, "metric": "saturated", "value": arcs.saturated},
            {**base, "metric": "conservation_gap", "value": abs(sp.total - total)},
        ]
    return rows


def run_detect(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    I = cfg.interval or (cfg.A or 100.0, float(cfg.N))
    nonprincipal = cfg.mode.endswith("-nonprincipal")
    if cfg.mode.startswith("quadratic"):
        rep = quadratic_scan(f, int(cfg.Q), I, sieve, nonprincipal=nonprincipal)
    else:
        rep = best_character(f, int(cfg.Q), cfg.T, I, sieve, nonprincipal=nonprincipal)
    rows = []
    for rank, c in enumerate((rep.best, *rep.runners_up)):
        rows.append({"rank": rank, "label": c.label, "discriminant": c.discriminant, "conductor": c.conductor,
                     "index": c.index, "t": c.t, "distance_sq": c.distance_sq,
                     "I_lo": I[0], "I_hi": I[1], "t_grid_spacing": rep.t_grid_spacing})
    return rows


def run_tk_check(cfg: ExperimentConfig) -> list[dict]:
    I = cfg.interval or (2.0, 100.0)
    sieve = build_factor_sieve(max(cfg.N, int(I[1])))
    r = tk_check(I, cfg.N, sieve)
    base = {"N": cfg.N, "I_lo": I[0], "I_hi": I[1]}
    return [{**base, "metric": "lhs", "value": r.lhs}, {**base, "metric": "rhs", "value": r.rhs},
            {**base, "metric": "ratio", "value": r.ratio}]


def run_presieve_gap(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    A_max = cfg.A or 1000.0
    As = []
    x = 10.0
    while x <= A_max * (1 + 1e-12):
        As.append(x)
        x *= 10
    if not As:
        As = [A_max]
    rows = []
    for A in As:
        gap = presieve_gap(f, A, cfg.N, sieve)
        base = {"A": A, "N": cfg.N}
        rows += [{**base, "metric": "gap", "value": gap},
                 {**base, "metric": "gap_times_A_over_N", "value": gap * A / cfg.N}]
    return rows


def run_criterion(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    N = cfg.N
    M = default_grid_size(N, cfg.oversample)
    I = cfg.interval or (2.0, max(2.0, float(cfg.Q)))
    c1 = tk_weights(I, sieve).c1(N)
    full = coefficient_vector(f, sieve, N)
    win = coefficient_vector(f, sieve, N, _window(cfg)) if cfg.eps is not None else full
    g1 = grid_transform(win.scaled(c1), M)
    g2 = grid_transform(win.scaled(1.0 - c1), M)
    g3 = grid_transform(CoefficientVector(full.a - win.a, bound=None), M)
    arcs = major_arcs(cfg.Q, N)
    Delta = cfg.Delta
    if Delta is None:
        s, _ = minor_sup(g1, arcs)
        l2 = math.sqrt((g1 + g2 + g3).l2_sq())
        Delta = math.sqrt(N) * l2 / s if s > 0 else 1.0
    rep = criterion_certificate(CriterionInput(g1, g2, g3, Delta, arcs, N))
    base = {"N": N, "Q": cfg.Q, "Delta": Delta}
    rows = []
    for k, v in rep.to_dict().items():
        if k in ("version", "hypotheses"):
            continue
        rows.append({**base, "metric": k, "value": v})
    for k, v in rep.hypotheses.items():
        rows.append({**base, "metric": f"hypothesis_{k}", "value": v})
    return rows


def run_multiscale(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    rep = multiscale_consistency(f, cfg.eps, cfg.N, sieve, Q=int(cfg.Q))
    rows = [{"kind": r.kind, "lo": r.lo, "hi": r.hi, "winner": r.winner, "distance_sq": r.distance_sq,
             "runner_up": r.runner_up, "margin": r.margin} for r in rep.results]
    rows.append({"kind": "verdict", "lo": None, "hi": None, "winner": rep.winners[-1] if rep.consistent else None,
                 "distance_sq": None, "runner_up": None, "margin": None, "consistent": rep.consistent})
    return rows


def minor_sup_interval(Q: float, N: int) -> tuple[float, float]:
    """Default c1 interval for the minor-arc sweep: primes from Q up to Q^2 (capped at N)."""
    return (max(2.0, float(Q)), float(min(Q * Q, N)))


def run_minor_sup(cfg: ExperimentConfig) -> list[dict]:
    sieve, f = _setup(cfg)
    N = cfg.N
    a = coefficient_vector(f, sieve, N, _window(cfg))
    M = default_grid_size(N, cfg.oversample)
    rows = []
    for Q in _pow2_sweep(cfg.Qmin or cfg.Q, cfg.Q):
        I = cfg.interval or minor_sup_interval(Q, N)
        g = grid_transform(a.scaled(tk_weights(I, sieve).c1(N)), M)
        arcs = major_arcs(Q, N)
        s, where = minor_sup(g, arcs)
        base = {"Q": Q, "N": N, "I_lo": I[0], "I_hi": I[1]}
        rows += [{**base, "metric": "minor_sup", "value": s},
                 {**base, "metric": "minor_sup_sqrtQ_over_N", "value": s * math.sqrt(Q) / N},
                 {**base, "metric": "argmax_alpha", "value": where},
                 {**base, "metric": "minor_set_empty", "value": arcs.saturated}]
    return rows


RUNNERS = {
    "l1norm": run_l1norm,
    "arcs-energy": run_arcs_energy,
    "detect": run_detect,
    "tk-check": run_tk_check,
    "presieve-gap": run_presieve_gap,
    "criterion": run_criterion,
    "multiscale": run_multiscale,
    "minor-sup": run_minor_sup,
}


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    validate(cfg)
    return RUNNERS[cfg.command](cfg)
