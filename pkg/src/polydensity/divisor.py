"""Balanced polynomial divisors and zero-perturbation budgets.

A divisor keeps the zeros of ``f`` inside ``(-N, N)`` and then extends the
selection on one side until the balance residual

    S(n, m) = a - sum_{selected} 1/lam

changes sign, which keeps ``f/P_N`` below ``e`` on the selected interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .entire import EntireFn
from .errors import (BudgetViolated, IndexOutOfRange, InsufficientZeros, InvariantViolation, MultipleZero,
                     ValidationError, ZeroAtOrigin)


@dataclass
class TwoSided:
    """Zeros split by sign, each side listed by magnitude with multiplicity repeated."""

    pos: np.ndarray
    neg: np.ndarray
    a: float

    @classmethod
    def from_entire(cls, f: EntireFn) -> "TwoSided":
        zs = f.zeros
        rep = np.repeat(zs.xs, zs.mults)
        pos = np.sort(rep[rep > 0])
        neg = np.sort(-rep[rep < 0])
        return cls(pos, neg, balance_constant(f))


def balance_constant(f: EntireFn) -> float:
    """Limit of ``sum 1/lam`` over growing windows, from the stored data.

    Genus 1 stores it directly (with the opposite sign convention for the
    exponential factor); genus 0 uses the stored reciprocal sum, which is
    exact for complete data and for symmetric tails.
    """
    if f.genus == 1:
        return -f.a
    zs = f.zeros
    order = zs.order
    return math.fsum(((zs.mults / zs.xs)[order]).tolist())


def partial_sums_S(zeros: TwoSided, n: int, m: int) -> float:
    """``a - sum_{k<=n} 1/lam_k + sum_{l<=m} 1/|lam_{-l}|`` with 1-based counts ``n, m``."""
    if n < 0 or m < 0 or n > zeros.pos.size or m > zeros.neg.size:
        raise IndexOutOfRange(f"n={n}, m={m} outside 0..{zeros.pos.size} x 0..{zeros.neg.size}")
    terms = [zeros.a] + (-1.0 / zeros.pos[:n]).tolist() + (1.0 / zeros.neg[:m]).tolist()
    return math.fsum(terms)


@dataclass
class BalancedDivisor:
    P: EntireFn
    p_N: int
    q_N: int
    S_value: float
    N: float
    case: str
    sweep: list = field(default_factory=list)
    interval: tuple = (0.0, 0.0)

    def to_dict(self) -> dict:
        return {"N": self.N, "p_N": self.p_N, "q_N": self.q_N, "S_value": self.S_value, "case": self.case,
                "interval": list(self.interval), "sweep": [list(s) for s in self.sweep],
                "zeros": [float(x) for x in np.repeat(self.P.zeros.xs, self.P.zeros.mults)],
                "m": int(self.P.m), "c": float(self.P.c)}


def _divisor_poly(f: EntireFn, sides: TwoSided, p: int, q: int) -> EntireFn:
    sel = np.concatenate([-sides.neg[:q][::-1], sides.pos[:p]])
    vals, counts = np.unique(sel, return_counts=True)
    return EntireFn.polynomial(vals, counts, m=f.m, c=f.c)


def _interval(sides: TwoSided, p: int, q: int) -> tuple:
    lo = -float(sides.neg[q - 1]) if q > 0 else 0.0
    hi = float(sides.pos[p - 1]) if p > 0 else 0.0
    return lo, hi


def divisor_from_indices(f: EntireFn, p: int, q: int, N: float = math.nan) -> BalancedDivisor:
    """Divisor with an explicit selection (used to exercise the detectors)."""
    sides = TwoSided.from_entire(f)
    S = partial_sums_S(sides, p, q)
    return BalancedDivisor(_divisor_poly(f, sides, p, q), p, q, S, N, "manual", [], _interval(sides, p, q))


def build_balanced_divisor(f: EntireFn, N: float) -> BalancedDivisor:
    """Select ``p_N`` positive and ``q_N`` negative zeros so that ``f/P_N <= e`` on their hull."""
    if not N > 0:
        raise ValidationError("N must be positive")
    zs = f.zeros
    if not zs.complete and N > zs.radius:
        raise InsufficientZeros(f"N={N:g} exceeds the coverage radius {zs.radius:g} of the stored zeros")
    sides = TwoSided.from_entire(f)
    n_plus = int(np.sum(sides.pos < N))
    n_minus = int(np.sum(sides.neg < N))
    one_sided = sides.neg.size == 0 or sides.pos.size == 0
    if one_sided and (zs.complete or zs.tail is None or not zs.both_sides):
        # zeros on a half-line: every factor is at most 1 on the hull, no balancing needed
        p, q = n_plus, n_minus
        return BalancedDivisor(_divisor_poly(f, sides, p, q), p, q, partial_sums_S(sides, p, q), N, "one_sided",
                               [], _interval(sides, p, q))
    S_N = partial_sums_S(sides, n_plus, n_minus)
    sweep = [("start", n_plus, n_minus, S_N)]
    if S_N == 0.0:
        p, q, case = n_plus, n_minus, "balanced"
    elif S_N > 0:
        r, phi = 0, S_N
        while True:
            if n_plus + r + 1 > sides.pos.size:
                raise InsufficientZeros(f"positive sweep exhausted {sides.pos.size} stored zeros with S={phi:.3e} > 0")
            nxt = partial_sums_S(sides, n_plus + r + 1, n_minus)
            sweep.append(("plus", r + 1, phi, nxt))
            if nxt <= 0 < phi:
                break
            r, phi = r + 1, nxt
        p, q, case = n_plus + r + 1, n_minus, "positive_sweep"
    else:
        r, phi = 0, S_N
        while True:
            if n_minus + r + 1 > sides.neg.size:
                raise InsufficientZeros(f"negative sweep exhausted {sides.neg.size} stored zeros with S={phi:.3e} < 0")
            nxt = partial_sums_S(sides, n_plus, n_minus + r + 1)
            sweep.append(("minus", r + 1, phi, nxt))
            if phi < 0 <= nxt:
                break
            r, phi = r + 1, nxt
        p, q, case = n_plus, n_minus + r + 1, "negative_sweep"
    if not zs.complete:
        hi = max(sides.pos[p - 1] if p else 0.0, sides.neg[q - 1] if q else 0.0)
        if hi >= zs.radius:
            raise InsufficientZeros("the selection reaches the coverage radius of the stored zeros")
    return BalancedDivisor(_divisor_poly(f, sides, p, q), p, q, partial_sums_S(sides, p, q), N, case, sweep,
                           _interval(sides, p, q))


def verify_divisor(d: BalancedDivisor, f: EntireFn, grid: int | Sequence[float] = 400, slack: float = 1e-9) -> dict:
    """Check ``|P_N| >= |f|/e`` on a grid and at every selected zero's derivative.

    ``slack`` is added to the log-margin on top of ``f``'s own truncation
    bound.  The reverse ratio ``|P_N/f|`` is reported but not asserted.
    Raises ``InvariantViolation`` with the first witness point.
    """
    lo, hi = d.interval
    pts = np.linspace(lo, hi, int(grid)) if np.isscalar(grid) else np.asarray(grid, dtype=np.float64)
    if pts.size and (pts.min() < lo - 1e-12 * max(1, abs(lo)) or pts.max() > hi + 1e-12 * max(1, abs(hi))):
        raise ValidationError("grid must lie inside the selected interval")
    lf, sf = f.log_abs_real(pts)
    lp, sp = d.P.log_abs_real(pts)
    eps = f.log_error(pts)
    live = np.isfinite(lf)
    margin = lp[live] - lf[live] + 1.0 + eps[live] + slack
    bad = np.nonzero(margin < 0)[0]
    ratio = np.exp(lp[live] - lf[live])
    report = {"grid_points": int(pts.size), "grid_zero_hits": int(np.sum(~live)),
              "min_ratio": float(ratio.min()) if ratio.size else None,
              "max_ratio": float(ratio.max()) if ratio.size else None, "p_N": d.p_N, "q_N": d.q_N}
    if bad.size:
        x = float(pts[live][bad[0]])
        raise InvariantViolation(f"|P_N(x)| < |f(x)|/e at x={x:.17g} (ratio {ratio[bad[0]]:.6g})",
                                 detail={"witness": x, **report})
    # derivative condition at the selected zeros, order = multiplicity in f
    dn = f.derivative_numbers()
    Pz = d.P.zeros
    worst = math.inf
    for lam, k in zip(Pz.xs, Pz.mults):
        j = int(np.nonzero(np.abs(dn.xs - lam) <= 1e-12 * max(1.0, abs(lam)))[0][0])
        mk = int(dn.mults[j])
        if mk == k:
            jj = int(np.nonzero(Pz.xs == lam)[0][0])
            lP = float(d.P.derivative_numbers().log_abs[jj])
        else:
            v = d.P.derivative(float(lam), mk)
            lP = math.log(abs(v)) if v != 0 else -math.inf
        m = lP - float(dn.log_abs[j]) + 1.0 + float(dn.log_err[j]) + slack
        worst = min(worst, m)
        if m < 0:
            raise InvariantViolation(f"derivative condition fails at the zero {lam:.17g}",
                                     detail={"witness": float(lam), **report})
    report["derivative_min_log_margin"] = worst
    report["passed"] = True
    return report


def divisor_convergence(f: EntireFn, Ns: Sequence[float], radius: float = 2.0, points: int = 64) -> dict:
    """``max_{|z|=radius} |P_N(z) - f(z)|`` for each ``N`` (the maximum over the disc sits on the circle)."""
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    fz = np.exp(f._log_eval(z))
    errs = []
    for N in Ns:
        P = build_balanced_divisor(f, N).P
        errs.append(float(np.max(np.abs(np.exp(P._log_eval(z)) - fz))))
    mono = all(b <= a for a, b in zip(errs[:-1], errs[1:]))
    return {"N": [float(n) for n in Ns], "max_error": errs, "monotone": mono}


# ---------------------------------------------------------------------------
# perturbation budgets

LADDER_RUNGS = 17
RING_POINTS = 17


@dataclass
class PerturbationPlan:
    zeros: np.ndarray
    rho: np.ndarray
    alpha: np.ndarray
    delta: np.ndarray
    C: float
    tail_term: float = 0.0

    def to_dict(self) -> dict:
        return {"zeros": self.zeros.tolist(), "rho": self.rho.tolist(), "alpha": self.alpha.tolist(),
                "delta": self.delta.tolist(), "C": self.C, "tail_term": self.tail_term}


def separation_radii(a: np.ndarray) -> np.ndarray:
    """``min(1, |a_k|, gap to the nearest different magnitude)``."""
    mags = np.abs(a)
    distinct = np.unique(mags)
    rho = np.minimum(1.0, mags)
    if distinct.size > 1:
        pos = np.searchsorted(distinct, mags)
        left = np.where(pos > 0, mags - distinct[np.maximum(pos - 1, 0)], np.inf)
        right = np.where(pos < distinct.size - 1, distinct[np.minimum(pos + 1, distinct.size - 1)] - mags, np.inf)
        rho = np.minimum(rho, np.minimum(left, right))
    return rho


def stability_radii(B: EntireFn) -> np.ndarray:
    """Largest rung ``2^-j`` (``j < 17``) on which ``|B_k(x)| >= |a_k B'(a_k)|/2`` at 17 sample points."""
    a = B.zeros.xs
    inv = 1.0 / a
    mult = B.zeros.mults
    out = np.zeros(a.size)
    base, _ = kernels.prod_log_real(a, inv, mult, skip=np.arange(a.size))
    for k in range(a.size):
        target = base[k] - math.log(2.0)
        for j in range(LADDER_RUNGS):
            r = 2.0 ** (-j)
            x = a[k] + r * np.linspace(-1.0, 1.0, RING_POINTS)
            la, _ = kernels.prod_log_real(x, inv, mult, skip=np.full(x.size, k))
            if np.all(la >= target):
                out[k] = r
                break
    return out


def perturbation_plan(B: EntireFn, alpha: Optional[Sequence[float]] = None) -> PerturbationPlan:
    """Budgets ``delta_k = min(alpha_k, rho_k / (4 (1 + a_k^2)))`` and the constant ``C``."""
    if B.m != 0:
        raise ZeroAtOrigin("B must not vanish at the origin")
    if np.any(B.zeros.mults > 1):
        raise MultipleZero("B must have simple zeros")
    a = B.zeros.xs
    rho = separation_radii(a)
    al = stability_radii(B) if alpha is None else np.asarray(alpha, dtype=np.float64)
    if al.shape != a.shape:
        raise ValidationError("alpha must have one entry per zero")
    delta = np.minimum(al, rho / (4 * (1 + a ** 2)))
    order = B.zeros.order
    s = math.fsum((1.0 / (1.0 + a[order] ** 2)).tolist())
    tail = 0.0
    zs = B.zeros
    if not zs.complete and zs.tail is not None:
        tail = zs.tail.power_sum(2.0, zs.radius, zs.counting(zs.radius))
    elif not zs.complete:
        tail = math.inf
    return PerturbationPlan(a.copy(), rho, al, delta, 8.0 * math.exp(s + tail), tail)


def perturb_and_compare(B: EntireFn, plan: PerturbationPlan, b: Sequence[float]) -> dict:
    """Build ``D`` from the perturbed zeros and check ``|B'(a_n)| <= C |D'(b_n)|``."""
    b = np.asarray(b, dtype=np.float64)
    a = plan.zeros
    if b.shape != a.shape:
        raise ValidationError("need one perturbed zero per zero of B")
    # rounding of a + delta itself is tolerated
    tol = plan.delta * (1 + 1e-12) + 4 * np.finfo(float).eps * np.abs(a)
    over = np.nonzero(np.abs(b - a) > tol)[0]
    if over.size:
        raise BudgetViolated(f"perturbation exceeds its budget at indices {over.tolist()}", over.tolist())
    order = np.argsort(b, kind="stable")
    if np.any(np.diff(b[order]) == 0):
        raise ValidationError("perturbed zeros must stay distinct")
    zs = B.zeros
    D = EntireFn.from_zeros(b[order], m=0, c=B.c, genus=B.genus, a=B.a, tail=zs.tail, complete=zs.complete,
                            radius=zs.radius if not zs.complete else None)
    dB = B.derivative_numbers()
    dD = D.derivative_numbers()
    # map D's sorted zeros back to the index of the zero they perturb
    lD = np.empty(a.size)
    lD[order] = dD.log_abs
    margin = math.log(plan.C) + lD - dB.log_abs
    bad = np.nonzero(margin < 0)[0]
    report = {"count": int(a.size), "min_log_margin": float(margin.min()) if margin.size else None,
              "max_ratio": float(np.exp(-margin).max()) if margin.size else None, "C": plan.C}
    if bad.size:
        raise InvariantViolation(f"|B'(a_n)| > C |D'(b_n)| at indices {bad.tolist()}", detail=report)
    report["passed"] = True
    return report
