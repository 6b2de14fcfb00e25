"""Density sums over zero sets, the polynomial objective for weighted density,
and the representation of a measure as a weighted pushforward.

The weight ``theta`` in the objective is pinned to its upper envelope
``C/(1 + x)`` so that objective values are reproducible.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .classes import StarPoly
from .entire import EntireFn, _ordered, _series, _simple_zeros
from .errors import (EmptyMeasure, SupportMismatch, ValidationError, WeightVanishesAtZero,
                     ZeroOutsideSupport)
from .measure import DiscreteMeasure, _fmt
from .series import DIVERGENT
from .weights import GridWeight, upper_baire

Weight = Union[GridWeight, Callable]

BRUTE = "BRUTE"
LOCAL = "LOCAL"
BRUTE_MAX_DEGREE = 3
CHUNK = 200_000


@dataclass(frozen=True)
class ThetaSpec:
    """Envelope ``c e^(-alpha x) <= theta(x) <= C/(1 + x)``; evaluation uses the upper one."""

    c: float
    C: float
    alpha: float

    def __post_init__(self):
        for k in ("c", "C", "alpha"):
            v = getattr(self, k)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"theta parameter {k} must be positive and finite, got {v!r}")
        if self.c > self.C:
            raise ValidationError(f"lower envelope exceeds the upper one at 0 (c={self.c!r} > C={self.C!r})")

    def __call__(self, x):
        return self.C / (1.0 + np.asarray(x, dtype=np.float64))


@dataclass
class DensitySumReport:
    partial_sums: list
    trend: str
    tail_estimate: Optional[float]
    notes: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0


def _eval_weight(w: Weight, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    return np.asarray(w(xs), dtype=np.float64) * np.ones_like(xs)


def _density_sum(B: EntireFn, w: Weight, trunc: Optional[int], label: str) -> DensitySumReport:
    _simple_zeros(B)
    R = B.radius_for_count(trunc)
    xs, la, _, _, _ = _ordered(B, R)
    wv = _eval_weight(w, xs)
    notes = {"weight": label, "zeros_used": int(xs.size), "truncation_radius": R}
    zero = np.nonzero(~(wv > 0))[0]
    if zero.size:
        with np.errstate(over="ignore", divide="ignore"):
            terms = np.where(wv > 0, np.exp(-np.log(np.where(wv > 0, wv, 1.0)) - la), np.inf)
        notes["vanishing_weight_at"] = [float(x) for x in xs[zero]]
        return DensitySumReport(np.cumsum(terms).tolist(), DIVERGENT, None, notes)
    tr = _series(B, -np.log(wv) - la, R)
    notes.update(tr.notes)
    notes["decay_exponent"] = tr.decay_exponent
    notes["density_exponent"] = tr.density_exponent
    return DensitySumReport(tr.partial_sums, tr.trend, tr.tail_estimate, notes)


def debranges_sum(B: EntireFn, w: Weight, trunc: Optional[int] = None) -> DensitySumReport:
    """Partial sums of ``sum 1/(w(lam) |B'(lam)|)`` in ascending ``|lam|``."""
    return _density_sum(B, w, trunc, "w")


def prop41_sum(B: EntireFn, h: GridWeight, trunc: Optional[int] = None) -> DensitySumReport:
    """Same sum with the regularized weight; every zero must lie in its support."""
    H = upper_baire(h)
    R = B.radius_for_count(trunc)
    xs = _ordered(B, R)[0]
    bad = xs[~(H(xs) > 0)]
    if bad.size:
        shown = ", ".join(f"{x:g}" for x in bad[:10])
        more = f" and {bad.size - 10} more" if bad.size > 10 else ""
        raise ZeroOutsideSupport(f"zeros outside the support of the regularized weight: {shown}{more}")
    return _density_sum(B, H, trunc, "upper_baire(h)")


def default_sigma(w: Weight) -> int:
    """``1`` if the weight is positive at the origin, else ``0``."""
    return int(float(_eval_weight(w, [0.0])[0]) > 0)


def _objective_rows(Z: np.ndarray, w: Weight, theta: ThetaSpec, sigma: int) -> np.ndarray:
    """Objective for each row of zero positions ``Z`` (shape ``(M, N)``)."""
    ax = np.abs(Z)
    first = np.sum(theta(ax) / ax, axis=1)
    wv = _eval_weight(w, Z.ravel()).reshape(Z.shape)
    ratio = np.abs(1 - Z[:, :, None] / Z[:, None, :])
    n = Z.shape[1]
    ratio[:, np.arange(n), np.arange(n)] = 1.0
    with np.errstate(divide="ignore"):
        log_dp = np.sum(np.log(ratio), axis=2) - np.log(ax)
        logs = -np.log(wv) - sigma * np.log(ax) - log_dp
    with np.errstate(over="ignore"):
        second = np.sum(np.exp(logs), axis=1)
    return first + second


def lemma41_objective(P: StarPoly, w: Weight, theta: ThetaSpec, sigma: int) -> float:
    """``sum theta(|lam|)/|lam| + sum 1/(w(lam) |lam|^sigma |P'(lam)|)``."""
    if sigma not in (0, 1):
        raise ValidationError(f"sigma must be 0 or 1, got {sigma!r}")
    wv = _eval_weight(w, P.zeros)
    if np.any(~(wv > 0)):
        x = float(P.zeros[np.nonzero(~(wv > 0))[0][0]])
        raise WeightVanishesAtZero(f"weight vanishes at the zero {x!r}")
    ax = np.abs(P.zeros)
    first = math.fsum((theta(ax) / ax).tolist())
    logs = -np.log(wv) - sigma * np.log(ax) - P.log_abs_derivative()
    with np.errstate(over="ignore"):
        second = math.fsum(np.exp(logs).tolist())
    return first + second


@dataclass
class MinimizeResult:
    value: float
    argmin: StarPoly
    strategy: str
    evaluated: int
    notes: dict = field(default_factory=dict)


def _candidate_grid(grid, w: Weight) -> np.ndarray:
    g = np.unique(np.asarray(grid, dtype=np.float64))
    g = g[g != 0]
    g = g[_eval_weight(w, g) > 0]
    return g


def _brute(N, g, w, theta, sigma):
    best, arg, count = math.inf, None, 0
    combos = itertools.combinations(range(g.size), N)
    while True:
        block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, CHUNK)), dtype=np.int64)
        if block.size == 0:
            break
        idx = block.reshape(-1, N)
        vals = _objective_rows(g[idx], w, theta, sigma)
        count += vals.size
        j = int(np.argmin(vals))  # first minimum is lexicographically smallest
        if vals[j] < best:
            best, arg = float(vals[j]), g[idx[j]]
    return best, arg, count


def _descend(start_idx, g, w, theta, sigma, max_sweeps=200):
    idx = np.array(sorted(start_idx), dtype=np.int64)
    val = float(_objective_rows(g[idx][None, :], w, theta, sigma)[0])
    count = 1
    for _ in range(max_sweeps):
        improved = False
        for k in range(idx.size):
            others = np.delete(idx, k)
            cand = np.setdiff1d(np.arange(g.size), others)
            rows = np.repeat(idx[None, :], cand.size, axis=0)
            rows[:, k] = cand
            rows.sort(axis=1)
            vals = _objective_rows(g[rows], w, theta, sigma)
            count += vals.size
            j = int(np.argmin(vals))
            if vals[j] < val * (1 - 1e-15):
                val, idx, improved = float(vals[j]), rows[j].copy(), True
        if not improved:
            break
    return val, idx, count


def lemma41_minimize(N: int, w: Weight, theta: ThetaSpec, sigma: int, strategy: str = LOCAL,
                     grid=None, starts: int = 10, seed: int = 0) -> MinimizeResult:
    """Minimize the objective over polynomials whose ``N`` zeros lie on ``grid``.

    BRUTE enumerates every ``N``-subset of the grid (``N <= 3``); LOCAL runs
    coordinate descent from ``starts`` seeded starting sets and keeps the
    best stationary point, ties broken by the lexicographic zero vector.
    """
    if N < 1:
        raise ValidationError("degree N must be at least 1")
    if sigma not in (0, 1):
        raise ValidationError(f"sigma must be 0 or 1, got {sigma!r}")
    if grid is None:
        grid = np.linspace(-10, 10, 401)
    g = _candidate_grid(grid, w)
    if g.size < N:
        raise ValidationError(f"grid has {g.size} admissible nonzero points, fewer than N={N}")
    strategy = strategy.upper()
    notes = {"grid_points": int(g.size), "grid_range": [float(g[0]), float(g[-1])], "sigma": sigma,
             "theta": f"{theta.C!r}/(1+x)"}
    if strategy == BRUTE:
        if N > BRUTE_MAX_DEGREE:
            raise ValidationError(f"BRUTE supports N <= {BRUTE_MAX_DEGREE}, got {N}")
        val, arg, count = _brute(N, g, w, theta, sigma)
        return MinimizeResult(val, StarPoly(arg), BRUTE, count, notes)
    if strategy != LOCAL:
        raise ValidationError(f"unknown strategy {strategy!r}")
    rng = np.random.default_rng(seed)
    near = np.argsort(np.abs(g), kind="stable")[:N]
    start_sets = [near] + [rng.choice(g.size, size=N, replace=False) for _ in range(max(starts - 1, 0))]
    results, count = [], 0
    start_values = []
    for s in start_sets:
        start_values.append(float(_objective_rows(g[np.sort(s)][None, :], w, theta, sigma)[0]))
        val, idx, c = _descend(s, g, w, theta, sigma)
        count += c
        results.append((val, tuple(g[idx].tolist())))
    val, zs = min(results)
    notes["starts"] = len(start_sets)
    notes["seed"] = seed
    notes["start_values"] = start_values
    return MinimizeResult(val, StarPoly(zs), LOCAL, count, notes)


def lemma41_growth(Ns: Sequence[int], w: Weight, theta: ThetaSpec, sigma: int, strategy: str = LOCAL,
                   grid=None, starts: int = 10, seed: int = 0) -> dict:
    """Minimum value against degree; unbounded growth is the density signal."""
    rows = []
    for N in Ns:
        r = lemma41_minimize(N, w, theta, sigma, strategy if N <= BRUTE_MAX_DEGREE else LOCAL, grid, starts, seed)
        rows.append({"N": int(N), "value": r.value, "strategy": r.strategy, "argmin": r.argmin.zeros.tolist()})
    vals = [r["value"] for r in rows]
    nondecreasing = all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
    return {"sequence": rows, "nondecreasing": nondecreasing}


@dataclass(frozen=True, eq=False)
class RepresentationPair:
    """Weight values at the atoms of ``nu`` and an exponent ``p >= 1``."""

    w: np.ndarray
    nu: DiscreteMeasure
    p: float

    def __post_init__(self):
        w = self.w
        if isinstance(w, GridWeight) or callable(w):
            w = _eval_weight(w, self.nu.xs)
        w = np.array(w, dtype=np.float64).ravel()
        if w.shape != self.nu.xs.shape:
            raise ValidationError("weight values must be aligned with the atoms of nu")
        if np.any(~np.isfinite(w)) or np.any(w < 0) or np.any(w > 1):
            raise ValidationError("weight values must lie in [0, 1]")
        if not (self.p >= 1 and math.isfinite(self.p)):
            raise ValidationError(f"exponent p must be >= 1, got {self.p!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", float(self.p))

    def expected_masses(self) -> np.ndarray:
        return self.nu.masses * self.w ** self.p


def build_measure(pair: RepresentationPair) -> DiscreteMeasure:
    m = pair.expected_masses()
    keep = m > 0
    if not np.any(keep):
        raise EmptyMeasure("weight vanishes on every atom of nu")
    return DiscreteMeasure(pair.nu.xs[keep], m[keep])


@dataclass
class RepresentationCheck:
    holds: bool
    witness: Optional[dict]
    inv_weight_norm: float
    atoms: int

    def __bool__(self):
        return self.holds


def verify_representation(mu: DiscreteMeasure, pair: RepresentationPair) -> RepresentationCheck:
    """Exact comparison, at serialization precision, of ``mu`` with ``w^p nu``."""
    pos = {float(x): i for i, x in enumerate(pair.nu.xs)}
    outside = [float(x) for x in mu.xs if float(x) not in pos]
    if outside:
        raise SupportMismatch(f"atoms of mu outside the support of nu: {outside[:10]}")
    idx = np.array([pos[float(x)] for x in mu.xs], dtype=np.int64)
    vanish = pair.w[idx] == 0
    if np.any(vanish):
        raise SupportMismatch(f"weight vanishes on atoms of mu: {mu.xs[vanish][:10].tolist()}")
    expected = pair.expected_masses()
    got = np.zeros_like(expected)
    got[idx] = mu.masses
    witness = None
    for i in range(expected.size):
        if _fmt(got[i]) != _fmt(expected[i]):
            witness = {"x": float(pair.nu.xs[i]), "mu_mass": float(got[i]), "expected": float(expected[i])}
            break
    # ||1/w||_p^p over the atoms of mu is the nu-mass carried there
    norm = math.fsum(pair.nu.masses[idx].tolist()) ** (1.0 / pair.p)
    return RepresentationCheck(witness is None, witness, norm, int(mu.xs.size))
