"""Weights sampled on a grid and the grid-sense properties of their spaces.

Every verdict here is about the grid restriction: the one-step window
replaces the vanishing neighbourhoods of the continuum definitions.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NoVanishingSequence, ParseError, ValidationError


@dataclass(frozen=True, eq=False)
class GridWeight:
    """Weight values in ``[0, 1]`` on a strictly increasing grid."""

    xs: np.ndarray
    ws: np.ndarray
    resolution: Optional[float] = None

    def __post_init__(self):
        xs = np.array(self.xs, dtype=np.float64).ravel()
        ws = np.array(self.ws, dtype=np.float64).ravel()
        if xs.shape != ws.shape or xs.size == 0:
            raise ValidationError("xs and ws must be nonempty and of equal length")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ws))):
            raise ValidationError("grid and weight values must be finite")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError("grid must be strictly increasing")
        if np.any(ws < 0) or np.any(ws > 1):
            i = int(np.nonzero((ws < 0) | (ws > 1))[0][0])
            raise ValidationError(f"ws[{i}] = {ws[i]!r} is outside [0, 1]")
        gap = float(np.max(np.diff(xs))) if xs.size > 1 else 0.0
        res = gap if self.resolution is None else float(self.resolution)
        if xs.size > 1 and gap > res * (1 + 1e-12):
            raise ValidationError(f"grid spacing {gap:g} exceeds the declared resolution {res:g}")
        xs.setflags(write=False)
        ws.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ws", ws)
        object.__setattr__(self, "resolution", res)

    @classmethod
    def sample(cls, fn: Callable, lo: float, hi: float, n: int) -> "GridWeight":
        xs = np.linspace(lo, hi, int(n))
        return cls(xs, np.clip(np.asarray(fn(xs), dtype=np.float64), 0.0, 1.0))

    def __call__(self, x):
        """Linear interpolation on the grid, zero outside its range."""
        x = np.asarray(x, dtype=np.float64)
        v = np.interp(x, self.xs, self.ws)
        return np.where((x < self.xs[0]) | (x > self.xs[-1]), 0.0, v)

    def support(self) -> np.ndarray:
        return self.ws > 0

    def to_json(self) -> str:
        return json.dumps({"xs": self.xs.tolist(), "ws": self.ws.tolist(), "resolution": self.resolution}) + "\n"


def weight_from_json(text: str, source: str = "<string>") -> GridWeight:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict) or not isinstance(d.get("xs"), list) or not isinstance(d.get("ws"), list):
        raise ParseError(f"{source}: expected an object with arrays 'xs' and 'ws'")
    for key in ("xs", "ws"):
        for i, v in enumerate(d[key]):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{source}: {key}[{i}]: expected a number, got {v!r}")
    try:
        return GridWeight(d["xs"], d["ws"], d.get("resolution"))
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from exc


def load_weight(path) -> GridWeight:
    with open(path, encoding="utf-8") as fh:
        return weight_from_json(fh.read(), source=str(path))


def upper_baire(w: GridWeight) -> GridWeight:
    """Upper semicontinuous regularization: max over the one-step window."""
    ws = w.ws
    h = ws.copy()
    if ws.size > 1:
        h[1:] = np.maximum(h[1:], ws[:-1])
        h[:-1] = np.maximum(h[:-1], ws[1:])
    return GridWeight(w.xs, h, w.resolution)


@dataclass
class SpaceClass:
    normed: bool
    banach_c0w: bool
    banach_n0w: bool
    sense: str = "grid"
    details: dict = field(default_factory=dict)


def classify_space(w: GridWeight) -> SpaceClass:
    """Normed / Banach flags computed from ``h = upper_baire(w)`` on the grid."""
    h = upper_baire(w).ws
    xs = w.xs
    pos = h > 0
    if not np.any(pos):
        return SpaceClass(False, False, False, details={"covered": [float(xs[0]), float(xs[-1])], "support_points": 0})
    sx = xs[pos]
    j = np.clip(np.searchsorted(sx, xs), 1, max(sx.size - 1, 1)) if sx.size > 1 else np.zeros(xs.size, int)
    if sx.size > 1:
        dist = np.minimum(np.abs(xs - sx[j - 1]), np.abs(xs - sx[j]))
    else:
        dist = np.abs(xs - sx[0])
    normed = bool(np.all(dist <= w.resolution * (1 + 1e-12)))
    c0w = bool(np.all(pos))
    n0w = bool(np.min(h[pos]) > 0)
    return SpaceClass(normed, c0w and normed, n0w,
                      details={"covered": [float(xs[0]), float(xs[-1])], "support_points": int(np.sum(pos)),
                               "min_h_on_support": float(np.min(h[pos])), "max_gap_to_support": float(np.max(dist))})


def moment_boundedness(w: GridWeight, n_max: int) -> list:
    """``max_x |x|^n w(x)`` over the grid for ``n = 0..n_max``."""
    if n_max < 0:
        raise ValidationError("n_max must be nonnegative")
    ax = np.abs(w.xs)
    return [float(np.max(ax ** n * w.ws)) for n in range(n_max + 1)]


def check_theorem12_conditions(f_vals, w: GridWeight, m_max: int, eps: float, ladder: int = 20) -> dict:
    """Grid proxies for the continuity and the vanishing conditions on a sample of ``f``.

    ``f_vals`` is aligned with ``w.xs``; NaN marks a missing sample, which
    is an error wherever the regularized weight is positive.
    """
    f = np.asarray(f_vals, dtype=np.float64)
    if f.shape != w.xs.shape:
        raise ValidationError("f must be sampled on the weight grid")
    h = upper_baire(w).ws
    need = h > 0
    miss = need & ~np.isfinite(f)
    if np.any(miss):
        i = int(np.nonzero(miss)[0][0])
        raise ValidationError(f"f is missing at x={w.xs[i]!r} where the regularized weight is positive")
    moduli = []
    for m in range(1, m_max + 1):
        inset = h >= 1.0 / m
        both = inset[1:] & inset[:-1]
        if np.any(both):
            d = np.abs(np.diff(np.where(need, f, 0.0)))[both]
            moduli.append(float(np.max(d)))
        else:
            moduli.append(0.0)
    continuity = all(math.isfinite(v) for v in moduli)
    sups = []
    falls = False
    seen = False
    with np.errstate(invalid="ignore"):
        prod = np.where(need, h * np.abs(np.where(need, f, 0.0)), 0.0)
    levels = [2.0 ** (-k) for k in range(1, ladder + 1)]
    if np.any(need):
        # the finest level the grid can resolve sits just above the smallest positive h
        finest = float(np.min(h[need])) * (1 + 1e-9)
        live = [d for d in levels if np.any(need & (h < d))]
        if live and finest < live[-1]:
            levels = sorted(set(levels + [finest]), reverse=True)
    for delta in levels:
        sel = need & (h < delta)
        if not np.any(sel):
            # an empty level carries no evidence either way
            sups.append((delta, None))
            continue
        seen = True
        s = float(np.max(prod[sel]))
        sups.append((delta, s))
        if s < eps:
            falls = True
    # a weight bounded away from zero on the grid has nothing to control
    holds = falls or not seen
    return {"continuity_moduli": moduli, "continuity_holds": bool(continuity), "vanishing_sups": sups,
            "vanishing_holds": bool(holds), "eps": eps, "resolution": w.resolution, "sense": "grid",
            "min_positive_h": float(np.min(h[need])) if np.any(need) else None}


@dataclass
class Witness:
    xs: np.ndarray
    F: np.ndarray
    sequence: np.ndarray
    windows: list
    bounded_product: bool
    checks: list


def unbounded_witness(h: GridWeight, x0: float, min_points: int = 3) -> Witness:
    """Hat-function sum that is unbounded near ``x0`` while ``h F`` stays small.

    The sequence consists of grid points approaching ``x0`` on which ``h``
    reaches new lows; the bump at the ``k``-th point has height
    ``sqrt(1/h(previous point))``.
    """
    xs, hv = h.xs, h.ws
    pos = np.nonzero((hv > 0) & (xs != x0))[0]
    if pos.size == 0:
        raise NoVanishingSequence("weight has no positive grid values away from x0")
    order = pos[np.lexsort((xs[pos], -np.abs(xs[pos] - x0)))]
    seq = []
    low = math.inf
    for i in order:
        if hv[i] < low:
            seq.append(int(i))
            low = hv[i]
    if len(seq) < min_points or hv[seq[-1]] >= 0.5 * hv[seq[0]]:
        raise NoVanishingSequence(f"no grid sequence towards {x0!r} along which the weight decays")
    seq = np.array(seq)
    lam = 1.0 / hv[seq]
    F = np.zeros(xs.size)
    F[seq[1:]] = np.sqrt(lam[:-1])
    dist = np.abs(xs[seq] - x0)
    windows = [(float(d), float(np.max(F[np.abs(xs - x0) <= d]))) for d in dist[1:]]
    checks = []
    ok = True
    hF = hv * F
    for n in range(seq.size):
        sel = (hv > 0) & (hv < hv[seq[n]])
        top = float(np.max(hF[sel])) if np.any(sel) else 0.0
        bound = 1.0 / math.sqrt(lam[n])
        checks.append((n, top, bound))
        ok = ok and top <= bound * (1 + 1e-12)
    return Witness(xs, F, xs[seq], windows, ok, checks)
