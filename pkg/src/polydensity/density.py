"""Density verdicts for polynomials in weighted spaces of a discrete measure.

All verdicts are grid-sense: a finite measure is always determinate, so the
signal is the contrast between a plateau of the extremal sequences on the
two tilted measures and their decay to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyMeasure, InvariantViolation
from .extremal import (RHO_FLOOR, NormParam, _solve, classify_limit, complex_extremal, ortho_basis,
                       rho_limit)
from .measure import DiscreteMeasure, TiltMode, tilt

DENSE = "DENSE"
NOT_DENSE = "NOT_DENSE"
UNDECIDED = "UNDECIDED"


@dataclass
class DensityReport:
    rho_alpha_seq: list
    rho_alpha2_seq: list
    verdict: str
    diagnostics: dict = field(default_factory=dict)


def _combine(v1: Optional[str], v2: Optional[str]) -> str:
    if v1 == "CONVERGED_TO_ZERO" or v2 == "CONVERGED_TO_ZERO":
        return DENSE
    if v1 == "PLATEAU" and v2 == "PLATEAU":
        return NOT_DENSE
    return UNDECIDED


def hamburger_verdict(mu: DiscreteMeasure, norm: NormParam, n_max: int, stall_tol: float,
                      floor: float = RHO_FLOOR) -> DensityReport:
    """Local criterion at the origin: both tilted extremal sequences must stay positive."""
    diag = {"norm": norm.label(), "n_max": n_max, "stall_tol": stall_tol, "floor": floor,
            "alpha": norm.tilt_alpha, "sense": "grid"}
    seqs, verdicts = {}, {}
    for mode in (TiltMode.ALPHA, TiltMode.ALPHA2):
        key = mode.value.lower()
        try:
            lim = rho_limit(mu, norm, mode, 0.0, n_max, stall_tol, floor=floor)
        except EmptyMeasure as exc:
            seqs[key], verdicts[key] = [], None
            diag[f"{key}_error"] = str(exc)
            continue
        seqs[key], verdicts[key] = lim.sequence, lim.verdict
        diag[f"{key}_verdict"] = lim.verdict
        diag[f"{key}_limit_estimate"] = lim.limit_estimate
        for k, v in lim.diagnostics.items():
            if k in ("relative_decrease", "converged_at", "atoms"):
                diag[f"{key}_{k}"] = v
    verdict = _combine(verdicts["alpha"], verdicts["alpha2"])
    return DensityReport(seqs["alpha"], seqs["alpha2"], verdict, diag)


def _kernel_sums_at_zero(nu: DiscreteMeasure, n_max: int) -> list:
    """Kernel ``K_n(0, 0)`` from the confluent Christoffel-Darboux formula.

    ``K_n(0,0) = sqrt(b_{n+1}) (p'_{n+1}(0) p_n(0) - p_{n+1}(0) p'_n(0))`` with
    orthonormal ``p_k``; this avoids summing squares, so it is an independent
    route to the same quantity.  Entries are ``None`` once the kernel is
    infinite (degree at least the atom count, origin not an atom).
    """
    top = min(n_max + 1, nu.n_atoms - 1)
    basis = ortho_basis(nu, top)
    sb = np.sqrt(basis.b)
    p = np.zeros(top + 1)
    dp = np.zeros(top + 1)
    p[0] = 1.0 / math.sqrt(basis.h[0])
    for k in range(top):
        prev = p[k - 1] if k > 0 else 0.0
        dprev = dp[k - 1] if k > 0 else 0.0
        pb = sb[k - 1] if k > 0 else 0.0
        p[k + 1] = ((0.0 - basis.a[k]) * p[k] - pb * prev) / sb[k]
        dp[k + 1] = (p[k] + (0.0 - basis.a[k]) * dp[k] - pb * dprev) / sb[k]
    sums = []
    for n in range(n_max + 1):
        if n + 1 <= top:
            sums.append(float(sb[n] * (dp[n + 1] * p[n] - p[n + 1] * dp[n])))
        elif n < nu.n_atoms:
            sums.append(float(np.sum(p[: n + 1] ** 2)))
        elif np.any(nu.xs == 0.0):
            sums.append(float(1.0 / nu.masses[nu.xs == 0.0][0]))
        else:
            sums.append(None)
    return sums


def riesz_p2(mu: DiscreteMeasure, n_max: int, stall_tol: float = 0.01, floor: float = RHO_FLOOR) -> DensityReport:
    """Kernel form of the criterion at the origin for the L2 norm."""
    diag = {"norm": "LP(2)", "n_max": n_max, "stall_tol": stall_tol, "floor": floor, "sense": "grid"}
    seqs, verdicts = {}, {}
    for mode in (TiltMode.ALPHA, TiltMode.ALPHA2):
        key = mode.value.lower()
        try:
            nu = tilt(mu, 2.0, mode)
        except EmptyMeasure as exc:
            seqs[key], verdicts[key] = [], None
            diag[f"{key}_error"] = str(exc)
            continue
        sums = _kernel_sums_at_zero(nu, n_max)
        seq = [0.0 if s is None else 1.0 / math.sqrt(s) for s in sums]
        verdict, est, d = classify_limit(seq, stall_tol, floor)
        seqs[key], verdicts[key] = seq, verdict
        diag[f"{key}_kernel_sums"] = sums
        diag[f"{key}_verdict"] = verdict
    return DensityReport(seqs["alpha"], seqs["alpha2"], _combine(verdicts["alpha"], verdicts["alpha2"]), diag)


def target_f1(x):
    return 1.0 / (1.0 + x * x)


def target_f2(x):
    return x / (1.0 + x * x)


def approximation_errors(mu: DiscreteMeasure, norm: NormParam, f_vals: np.ndarray, n_max: int) -> list:
    """Best approximation error of ``f`` by polynomials of degree ``n = 0..n_max``."""
    f_vals = np.asarray(f_vals, dtype=np.float64)
    top = min(n_max, mu.n_atoms - 1)
    basis = ortho_basis(mu, top)
    errs = []
    if norm.mode == "LP" and norm.p == 2.0:
        sw = np.sqrt(mu.masses)
        Q = basis.values * sw[:, None]
        r = f_vals * sw
        for k in range(top + 1):
            r = r - (Q[:, k] @ r) * Q[:, k]
            errs.append(float(np.linalg.norm(r)))
    else:
        for k in range(top + 1):
            # minimise ||Phi c - f t|| subject to t = 1
            Phi = np.hstack([basis.values[:, : k + 1], -f_vals[:, None]])
            A = np.zeros((1, k + 2))
            A[0, -1] = 1.0
            _, J, *_ = _solve(mu, norm, Phi, A, np.array([1.0]))
            errs.append(float(J))
    errs.extend([0.0] * (n_max - top))
    for k in range(1, len(errs)):
        errs[k] = min(errs[k], errs[k - 1])
    return errs


def prop22_crosscheck(mu: DiscreteMeasure, norm: NormParam, n_max: int, stall_tol: float = 0.01,
                      floor: float = RHO_FLOOR, verdict: Optional[DensityReport] = None) -> dict:
    """Approximation of ``1/(1+x^2)`` and ``x/(1+x^2)`` against the density verdict."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    verdict = verdict or hamburger_verdict(mu, norm, n_max, stall_tol, floor)
    out = {"verdict": verdict.verdict}
    classes = []
    for name, fn in (("f1", target_f1), ("f2", target_f2)):
        errs = approximation_errors(mu, norm, fn(mu.xs), n_max)
        # the absolute floor is relative to the size of the target itself
        scale = max(norm.norm_of_values(mu, fn(mu.xs)), 1e-300)
        cls, est, _ = classify_limit([e / scale for e in errs], stall_tol, floor)
        if norm.norm_of_values(mu, fn(mu.xs)) == 0.0:
            cls = "CONVERGED_TO_ZERO"
        out[f"{name}_errors"] = errs
        out[f"{name}_class"] = cls
        classes.append(cls)
    both_zero = all(c == "CONVERGED_TO_ZERO" for c in classes)
    some_plateau = any(c == "PLATEAU" for c in classes)
    decided = both_zero or some_plateau
    consistent = True
    if decided and verdict.verdict == DENSE:
        consistent = both_zero
    elif decided and verdict.verdict == NOT_DENSE:
        consistent = not both_zero
    out["decided"] = bool(decided and verdict.verdict != UNDECIDED)
    out["consistent"] = bool(consistent)
    if not consistent:
        raise InvariantViolation("approximation errors disagree with the density verdict", detail=out)
    return out


def prop31_diagnostic(mu: DiscreteMeasure, norm: NormParam, ys: Sequence[float], n: int,
                      verdict: Optional[str] = None) -> dict:
    """Growth of ``log M_n(mu, iy) / y`` along the imaginary axis."""
    if verdict is not None and verdict != NOT_DENSE:
        return {"applicable": False, "reason": f"verdict is {verdict}", "ys": list(ys), "ratios": []}
    ys = [float(y) for y in ys]
    ratios = []
    for y in ys:
        m = complex_extremal(mu, norm, complex(0.0, y), n)
        ratios.append(math.log(m) / y)
    mags = [abs(r) for r in ratios]
    half = len(mags) // 2
    tail_ok = all(b <= a * (1 + 1e-12) for a, b in zip(mags[half:], mags[half + 1:]))
    violation = not (tail_ok and mags[-1] < mags[0])
    return {"applicable": True, "ys": ys, "ratios": ratios, "violation": bool(violation)}
