"""Convergence trends of series indexed by a zero sequence.

A summand sequence ``a_k`` attached to points ``r_k`` (increasing
magnitudes) is modelled in its tail as ``a(r) ~ r^(-s)`` while the counting
function grows like ``n(r) ~ r^kappa``.  The series converges when
``s > kappa``.  Both exponents come from least-squares fits on the last part
of the data, so the verdict is a heuristic and is labelled as such.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

CONVERGENT = "CONVERGENT"
DIVERGENT = "DIVERGENT"
UNDECIDED = "UNDECIDED"

GAP_CONVERGENT = 0.3
GAP_DIVERGENT = 0.15
FIT_FRACTION = 0.5
MIN_POINTS = 6


@dataclass
class SeriesTrend:
    partial_sums: list
    trend: str
    tail_estimate: Optional[float]
    decay_exponent: Optional[float] = None
    density_exponent: Optional[float] = None
    notes: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0


def _slope(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1])


def _summands_grow(r, a, rungs: int = 3) -> bool:
    """Largest summand per distinct radius increases strictly over the last ``rungs`` radii
    and by more than a factor ``e`` overall; the terms then cannot tend to zero."""
    if r.size == 0:
        return False
    radii, inv = np.unique(r, return_inverse=True)
    top = np.full(radii.size, -np.inf)
    np.maximum.at(top, inv, a)
    if radii.size < rungs or not np.all(top > 0):
        return False
    tail = top[-rungs:]
    return bool(np.all(np.diff(tail) > 0) and tail[-1] > math.e * top[0])


def classify_series(radii, summands, *, counts=None, complete: bool = False,
                    extrapolate_to: Optional[float] = None) -> SeriesTrend:
    """Classify ``sum summands`` as convergent, divergent or undecided.

    Parameters
    ----------
    radii : array_like
        Magnitudes ``|lambda_k|`` in nondecreasing order.
    summands : array_like
        Nonnegative terms aligned with ``radii``.
    counts : array_like, optional
        Counting function at each radius (defaults to ``1..K``).
    complete : bool
        The index set is finite, so the sum is exact.
    extrapolate_to : float, optional
        Radius from which the tail is estimated (defaults to the last radius).
    """
    r = np.asarray(radii, dtype=np.float64)
    a = np.asarray(summands, dtype=np.float64)
    partial = np.cumsum(a).tolist() if a.size else [0.0]
    if complete:
        return SeriesTrend(partial, CONVERGENT, 0.0, notes={"reason": "finite index set"})
    if a.size and not np.all(np.isfinite(a)):
        return SeriesTrend(partial, DIVERGENT, None, notes={"reason": "infinite summand"})
    n = np.arange(1, r.size + 1, dtype=np.float64) if counts is None else np.asarray(counts, dtype=np.float64)
    k0 = int(r.size * (1 - FIT_FRACTION))
    rr, aa, nn = r[k0:], a[k0:], n[k0:]
    pos = (aa > 0) & (rr > 0)
    if np.sum(pos) < MIN_POINTS or np.ptp(np.log(rr[pos])) < 0.3:
        if a.size and np.all(a == 0):
            return SeriesTrend(partial, CONVERGENT, 0.0, notes={"reason": "all summands vanish"})
        if _summands_grow(r, a):
            return SeriesTrend(partial, DIVERGENT, None, notes={"reason": "summands grow"})
        return SeriesTrend(partial, UNDECIDED, None, notes={"reason": "too few points for a fit"})
    lr = np.log(rr[pos])
    slope, icpt = _slope(lr, np.log(aa[pos]))
    kappa, kicpt = _slope(lr, np.log(nn[pos]))
    kappa = max(kappa, 0.0)
    s = -slope
    gap = s - kappa
    notes = {"gap": gap, "fit_points": int(np.sum(pos))}
    if gap > GAP_CONVERGENT:
        R = float(rr[pos][-1]) if extrapolate_to is None else float(extrapolate_to)
        a_R = math.exp(icpt + slope * math.log(R))
        n_R = math.exp(kicpt + kappa * math.log(R))
        # integral of a(r) dn(r) over (R, inf) for the fitted power laws
        tail = a_R * n_R * kappa / gap if kappa > 0 else 0.0
        return SeriesTrend(partial, CONVERGENT, tail, s, kappa, notes)
    trend = DIVERGENT if gap < GAP_DIVERGENT else UNDECIDED
    return SeriesTrend(partial, trend, None, s, kappa, notes)


def ratio_trend(radii, values, margin: float = 0.3):
    """Whether ``values`` tend to zero along ``radii`` (fitted log-log slope).

    Returns ``(True | False | None, slope)``.
    """
    r = np.asarray(radii, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    k0 = int(r.size * (1 - FIT_FRACTION))
    rr, vv = r[k0:], v[k0:]
    pos = (vv > 0) & (rr > 0)
    if np.sum(pos) < MIN_POINTS:
        if r.size and np.all(v[k0:] == 0):
            return True, -math.inf
        return None, None
    slope, _ = _slope(np.log(rr[pos]), np.log(vv[pos]))
    if slope < -margin:
        return True, slope
    if slope > -GAP_DIVERGENT:
        return False, slope
    return None, slope
