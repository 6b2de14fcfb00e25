"""Membership predicates for normal and strictly normal polynomial families.

Polynomials are normalized as ``P(z) = prod (1 - z/lam)`` with simple,
nonzero real zeros, so ``P(0) = 1``.  The predicates are sufficient
conditions checked on one polynomial; ``family_diagnostic`` gives empirical
evidence for a whole sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ValidationError, WeightVanishes, ZeroAtOrigin
from .weights import GridWeight

Weight = Union[GridWeight, Callable]


@dataclass(frozen=True, eq=False)
class StarPoly:
    zeros: np.ndarray

    def __post_init__(self):
        zs = np.sort(np.array(self.zeros, dtype=np.float64).ravel())
        if not np.all(np.isfinite(zs)):
            raise ValidationError("zeros must be finite")
        if np.any(zs == 0):
            raise ZeroAtOrigin("zeros must be nonzero so that P(0) = 1")
        if np.any(np.diff(zs) == 0):
            i = int(np.nonzero(np.diff(zs) == 0)[0][0])
            raise ValidationError(f"zero {zs[i]!r} is repeated; zeros must be simple")
        zs.setflags(write=False)
        object.__setattr__(self, "zeros", zs)

    @property
    def degree(self) -> int:
        return int(self.zeros.size)

    def __call__(self, z):
        z = np.asarray(z)
        return np.prod(1 - z[..., None] / self.zeros, axis=-1)

    def log_abs_derivative(self) -> np.ndarray:
        """``log|P'(lam)|`` at every zero from the removed-factor product."""
        lam = self.zeros
        ratio = 1 - lam[:, None] / lam[None, :]
        np.fill_diagonal(ratio, 1.0)
        return np.sum(np.log(np.abs(ratio)), axis=1) - np.log(np.abs(lam))

    def derivative_at_zeros(self) -> np.ndarray:
        lam = self.zeros
        ratio = 1 - lam[:, None] / lam[None, :]
        np.fill_diagonal(ratio, 1.0)
        return -np.prod(ratio, axis=1) / lam

    def reflected(self) -> "StarPoly":
        return StarPoly(-self.zeros)


def lambda_functionals(P: StarPoly) -> tuple:
    """``(|sum 1/lam|, sum 1/lam^2)``."""
    inv = 1.0 / P.zeros
    return abs(math.fsum(inv.tolist())), math.fsum((inv * inv).tolist())


def _weight_at(mu: Weight, xs: np.ndarray) -> np.ndarray:
    vals = np.asarray(mu(xs), dtype=np.float64) * np.ones_like(xs)
    bad = ~(vals > 0)
    if np.any(bad):
        x = float(xs[np.nonzero(bad)[0][0]])
        where = ""
        if isinstance(mu, GridWeight):
            where = f" (grid covers [{mu.xs[0]:g}, {mu.xs[-1]:g}])"
        raise WeightVanishes(f"weight vanishes at the zero {x!r}{where}")
    return vals


def _exp_sum_ok(P: StarPoly, alpha: float, delta_alpha: float) -> bool:
    return math.fsum(np.exp(-alpha * np.abs(P.zeros)).tolist()) <= delta_alpha


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValidationError(f"{k} must be a positive finite number, got {v!r}")


def member_lemma32(P: StarPoly, alpha: float, beta: float, gamma: float, delta_alpha: float,
                   delta_beta: float) -> bool:
    _positive(alpha=alpha, beta=beta, gamma=gamma, delta_alpha=delta_alpha, delta_beta=delta_beta)
    if not _exp_sum_ok(P, alpha, delta_alpha):
        return False
    ax = np.abs(P.zeros)
    need = math.log(delta_beta) - beta * ax - (1 + gamma) * np.log(ax)
    return bool(np.all(P.log_abs_derivative() >= need - 1e-12))


def member_thm33(P: StarPoly, mu_weight: Weight, alpha: float, gamma: float, delta_alpha: float) -> bool:
    _positive(alpha=alpha, gamma=gamma, delta_alpha=delta_alpha)
    mu = _weight_at(mu_weight, P.zeros)
    if not _exp_sum_ok(P, alpha, delta_alpha):
        return False
    need = -np.log(mu) - (1 + gamma) * np.log(np.abs(P.zeros))
    return bool(np.all(P.log_abs_derivative() >= need - 1e-12))


def eq3410_sum(P: StarPoly, mu_weight: Weight, beta: float, gamma: float) -> float:
    _positive(beta=beta, gamma=gamma)
    if not beta > gamma:
        raise ValidationError(f"need beta > gamma, got beta={beta!r}, gamma={gamma!r}")
    mu = _weight_at(mu_weight, P.zeros)
    logs = -np.log(mu) - beta * np.log(np.abs(P.zeros)) - gamma * P.log_abs_derivative()
    with np.errstate(over="ignore"):
        return math.fsum(np.exp(logs).tolist())


def member_eq3410(P: StarPoly, mu_weight: Weight, beta: float, gamma: float, C: float) -> bool:
    _positive(C=C)
    return eq3410_sum(P, mu_weight, beta, gamma) <= C


def normality_bound_holds(P: StarPoly, zs, rel: float = 1e-12) -> bool:
    """``|P(z)| <= exp(l1 |z| + l2 |z|^2 / 2)`` at every sample."""
    zs = np.asarray(zs, dtype=np.complex128)
    l1, l2 = lambda_functionals(P)
    lhs = np.sum(np.log(np.abs(1 - zs[:, None] / P.zeros)), axis=1)
    r = np.abs(zs)
    rhs = l1 * r + 0.5 * l2 * r * r
    return bool(np.all(lhs <= rhs + rel * (1 + np.abs(rhs))))


def _tracks(seq: Sequence[StarPoly]) -> dict:
    """Zeros labelled ``+k`` / ``-k`` by rank of ``|lam|`` on each side."""
    out = {}
    for i, P in enumerate(seq):
        pos = P.zeros[P.zeros > 0]
        neg = P.zeros[P.zeros < 0][::-1]
        for k, v in enumerate(pos, 1):
            out.setdefault(f"+{k}", [None] * len(seq))[i] = float(v)
        for k, v in enumerate(neg, 1):
            out.setdefault(f"-{k}", [None] * len(seq))[i] = float(v)
    return dict(sorted(out.items(), key=lambda kv: (int(kv[0][1:]), kv[0][0] == "-")))


def family_diagnostic(seq: Sequence[StarPoly], compact_radius: float, points: int = 256) -> dict:
    """Empirical normality evidence for a polynomial sequence."""
    if not seq:
        raise ValidationError("family must be nonempty")
    l1s, l2s = zip(*(lambda_functionals(P) for P in seq))
    tracks = _tracks(seq)
    drift = {}
    for k, vals in tracks.items():
        v = [x for x in vals[len(vals) // 2:] if x is not None]
        drift[k] = float(max(v) - min(v)) if len(v) > 1 else 0.0
    circle = compact_radius * np.exp(2j * np.pi * np.arange(points) / points)
    # maximum modulus: the sup over the disk is attained on its boundary
    dists = [float(np.max(np.abs(seq[i + 1](circle) - seq[i](circle)))) for i in range(len(seq) - 1)]
    return {
        "size": len(seq),
        "degrees": [P.degree for P in seq],
        "l1": [float(v) for v in l1s],
        "l2": [float(v) for v in l2s],
        "sup_l1": float(max(l1s)),
        "sup_l2": float(max(l2s)),
        "zero_tracks": tracks,
        "track_drift": drift,
        "consecutive_distance": dists,
        "max_consecutive_distance": max(dists) if dists else 0.0,
        "compact_radius": compact_radius,
    }
