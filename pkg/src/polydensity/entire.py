"""Entire functions of exponential type described by their real zeros.

A function is ``c z^m e^{a z} prod (1 - z/lam)^mult`` (genus 0, ``a = 0``) or
the same with convergence factors ``e^{z/lam}`` (genus 1).  Only finitely
many zeros are stored; the rest is described by a power-law bound on the
counting function, which turns every infinite quantity into a partial value
with an explicit tail bound.

Products are accumulated in log space with sign/argument tracking, so the
very large derivative numbers of lacunary zero sets stay representable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import (MultipleZero, ParseError, PoleAtZ, SharedZero, TailModelInvalid, TailModelMissing,
                     ValidationError, ZeroAtOrigin)
from .series import CONVERGENT, DIVERGENT, UNDECIDED, SeriesTrend, classify_series, ratio_trend

RELIABLE_EPS = 0.1
POLE_TOL = 1e-12
CAUCHY_POINTS = 64
CIRCLE_POINTS = 64


@dataclass(frozen=True)
class TailModel:
    """Counting-function bound ``n(r) <= coeff * r**exponent`` beyond the stored zeros.

    ``symmetric`` declares that the unknown zeros come in pairs ``+-lam`` so
    that first-order terms cancel in symmetric truncations.
    """

    exponent: float
    coeff: float
    symmetric: bool = False

    def __post_init__(self):
        if not (self.exponent >= 0 and math.isfinite(self.exponent)):
            raise TailModelInvalid(f"tail exponent must be finite and >= 0, got {self.exponent}")
        if not (self.coeff > 0 and math.isfinite(self.coeff)):
            raise TailModelInvalid(f"tail coefficient must be positive, got {self.coeff}")

    def power_sum(self, s: float, R: float, n_at_R: float) -> float:
        """Bound on ``sum_{|lam| > R} |lam|^-s`` given ``n(R) = n_at_R``."""
        if s <= self.exponent:
            return math.inf
        # integration by parts of r^-s dn(r) over (R, inf)
        val = s * self.coeff * R ** (self.exponent - s) / (s - self.exponent) - n_at_R * R ** (-s)
        return max(val, 0.0)


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Stored nonzero real zeros with multiplicities.

    ``radius`` is the coverage radius: every zero with ``|lam| <= radius``
    is stored.  ``complete`` means there are no zeros beyond the stored ones.
    """

    xs: np.ndarray
    mults: np.ndarray
    tail: Optional[TailModel] = None
    complete: bool = False
    radius: Optional[float] = None

    def __post_init__(self):
        xs = np.array(self.xs, dtype=np.float64).ravel()
        ms = np.array(self.mults if self.mults is not None else np.ones(xs.size), dtype=np.int64).ravel()
        if xs.shape != ms.shape:
            raise ValidationError("zeros and multiplicities must have the same length")
        if not np.all(np.isfinite(xs)):
            raise ValidationError("zeros must be finite")
        if np.any(xs == 0):
            raise ZeroAtOrigin("zero at the origin must be given through the order m, not the zero list")
        if np.any(ms < 1):
            raise ValidationError("multiplicities must be positive integers")
        if np.any(np.diff(xs) <= 0):
            i = int(np.nonzero(np.diff(xs) <= 0)[0][0])
            raise ValidationError(f"zeros {i} and {i + 1}: values must be strictly increasing")
        xs.setflags(write=False)
        ms.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "mults", ms)
        rad = self.radius
        if rad is None:
            rad = float(np.max(np.abs(xs))) if xs.size else 0.0
        object.__setattr__(self, "radius", float(rad))
        if self.tail is not None and not self.complete:
            self._validate_tail()

    def _validate_tail(self):
        t = self.tail
        order = self.order
        r = np.abs(self.xs)[order]
        n = np.cumsum(self.mults[order]).astype(np.float64)
        # the bound is only used beyond the coverage radius, where it must hold at n(radius)
        n_cov = float(np.sum(self.mults[np.abs(self.xs) <= self.radius]))
        if n_cov > t.coeff * self.radius ** t.exponent * (1 + 1e-9):
            raise TailModelInvalid(
                f"counting function {n_cov:.0f} at the coverage radius {self.radius:.6g} exceeds the declared "
                f"bound {t.coeff:.6g} * r^{t.exponent:.6g}")
        half = r.size // 2
        if r.size - half >= 6 and np.ptp(np.log(r[half:])) > 0.3:
            slope = float(np.polyfit(np.log(r[half:]), np.log(n[half:]), 1)[0])
            if slope > t.exponent + 0.25:
                raise TailModelInvalid(
                    f"empirical growth exponent {slope:.3f} of the stored zeros exceeds the declared {t.exponent:.3f}")

    @cached_property
    def order(self) -> np.ndarray:
        """Permutation sorting the zeros by ascending ``|lam|`` then value."""
        return np.lexsort((self.xs, np.abs(self.xs)))

    @property
    def count(self) -> int:
        return int(self.xs.size)

    def counting(self, r: float) -> int:
        return int(np.sum(self.mults[np.abs(self.xs) <= r]))

    @property
    def both_sides(self) -> bool:
        if self.tail is not None and self.tail.symmetric:
            return True
        return bool(np.any(self.xs > 0) and np.any(self.xs < 0))


@dataclass
class Bounded:
    """A computed value with an absolute error bound (``inf`` when unknown)."""

    value: complex
    bound: float
    log_abs: float = float("nan")
    notes: dict = field(default_factory=dict)


@dataclass
class DerivativeNumbers:
    xs: np.ndarray
    mults: np.ndarray
    log_abs: np.ndarray
    sign: np.ndarray
    log_err: np.ndarray

    @property
    def reliable(self) -> np.ndarray:
        return self.log_err < RELIABLE_EPS

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_abs)


@dataclass(frozen=True, eq=False)
class EntireFn:
    zeros: ZeroSequence
    m: int = 0
    c: float = 1.0
    genus: int = 0
    a: float = 0.0

    def __post_init__(self):
        if self.genus not in (0, 1):
            raise ValidationError(f"genus must be 0 or 1, got {self.genus}")
        if int(self.m) != self.m or self.m < 0:
            raise ValidationError(f"order at the origin must be a nonnegative integer, got {self.m}")
        if not (math.isfinite(self.c) and self.c != 0):
            raise ValidationError("constant c must be finite and nonzero")
        if self.genus == 0 and self.a != 0:
            raise ValidationError("genus 0 requires a = 0")
        t = self.zeros.tail
        if t is not None and not self.zeros.complete:
            if t.exponent >= 2:
                raise ValidationError("tail exponent must be < 2 so that sum 1/lam^2 converges")
            if self.genus == 0 and t.exponent >= 1 and not t.symmetric:
                raise ValidationError("genus 0 with tail exponent >= 1 needs a symmetric tail")

    # -- construction -------------------------------------------------
    @classmethod
    def from_zeros(cls, xs, mults=None, *, m=0, c=1.0, genus=0, a=0.0, tail=None, complete=False,
                   radius=None) -> "EntireFn":
        xs = np.asarray(xs, dtype=np.float64)
        mults = np.ones(xs.size, dtype=np.int64) if mults is None else np.asarray(mults, dtype=np.int64)
        order = np.argsort(xs, kind="stable")
        return cls(ZeroSequence(xs[order], mults[order], tail, complete, radius), int(m), float(c), int(genus),
                   float(a))

    @classmethod
    def polynomial(cls, xs, mults=None, *, m=0, c=1.0) -> "EntireFn":
        """``c z^m prod (1 - z/lam)^mult``; the zero list is complete."""
        return cls.from_zeros(xs, mults, m=m, c=c, complete=True)

    # -- truncation ----------------------------------------------------
    def radius_for_count(self, count: Optional[int]) -> Optional[float]:
        """Radius keeping the first ``count`` zeros in ``|lam|`` order."""
        if count is None or count >= self.zeros.count:
            return None
        if count < 0:
            raise ValidationError("trunc must be nonnegative")
        r = np.abs(self.zeros.xs)[self.zeros.order]
        lo = r[count - 1] if count > 0 else 0.0
        return float(0.5 * (lo + r[count]))

    def _included(self, R):
        zs = self.zeros
        if R is None:
            return np.ones(zs.count, dtype=bool)
        if R > zs.radius and zs.tail is None and not zs.complete:
            raise TailModelMissing(
                f"R={R:g} exceeds the stored zeros (coverage {zs.radius:g}) and no tail model is present")
        return np.abs(zs.xs) < R

    @cached_property
    def _cache(self) -> dict:
        return {}

    def _tail_sums(self, R):
        """``(S1, S2, M1, M2, r_min, known)`` for zeros outside the truncation."""
        key = ("tail", R)
        if key in self._cache:
            return self._cache[key]
        zs = self.zeros
        inc = self._included(R)
        ex = ~inc
        xs_ex, m_ex = zs.xs[ex], zs.mults[ex]
        S1 = math.fsum((m_ex / xs_ex).tolist())
        S2 = math.fsum((m_ex / xs_ex ** 2).tolist())
        r_min = float(np.min(np.abs(xs_ex))) if xs_ex.size else math.inf
        known = True
        M1 = M2 = 0.0
        if not zs.complete:
            if zs.tail is None:
                known = False
            else:
                n_cov = zs.counting(zs.radius)
                M1 = 0.0 if zs.tail.symmetric else zs.tail.power_sum(1.0, zs.radius, n_cov)
                M2 = zs.tail.power_sum(2.0, zs.radius, n_cov)
                r_min = min(r_min, zs.radius)
        out = (S1, S2, M1, M2, r_min, known)
        self._cache[key] = out
        return out

    def log_error(self, z, R=None) -> np.ndarray:
        """Bound on ``|log f(z) - log f_R(z)|`` (``inf`` outside ``|z| <= r_min/2``)."""
        S1, S2, M1, M2, r_min, known = self._tail_sums(R)
        az = np.abs(np.asarray(z))
        if not known:
            return np.where(az == 0, 0.0, np.inf)
        if r_min == math.inf:
            return np.zeros_like(az, dtype=np.float64)
        u = az / r_min
        with np.errstate(invalid="ignore", over="ignore"):
            quad = az ** 2 * (S2 + M2) / (2 * np.maximum(1 - u, 1e-300))
            eps = quad if self.genus == 1 else az * (abs(S1) + M1) + quad
        return np.where(u <= 0.5, eps, np.inf)

    # -- evaluation ----------------------------------------------------
    def _log_eval(self, z, R=None):
        """Complex ``log f_R(z)`` for an array of points (real part may be -inf)."""
        zs = self.zeros
        inc = self._included(R)
        xs, ms = zs.xs[inc], zs.mults[inc]
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        la, arg = kernels.prod_log_complex(z, 1.0 / xs, ms)
        logv = la + 1j * arg
        logv = logv + math.log(abs(self.c)) + (1j * math.pi if self.c < 0 else 0.0)
        if self.m:
            with np.errstate(divide="ignore"):
                logv = logv + self.m * np.log(z)
        if self.genus == 1:
            lin = self.a + math.fsum((ms / xs).tolist())
            logv = logv + lin * z
        return logv

    def eval(self, z, R: Optional[float] = None) -> Bounded:
        """Value of the (truncated) product at ``z`` with a bound on the truncation error."""
        z = complex(z)
        if R is not None and not abs(z) < R / 2:
            raise ValidationError(f"need |z| < R/2, got |z|={abs(z):g}, R={R:g}")
        lg = self._log_eval([z], R)[0]
        eps = float(self.log_error(z, R))
        if lg.real == -math.inf:
            return Bounded(0j, 0.0 if math.isfinite(eps) else math.inf, -math.inf, {"log_error": eps})
        with np.errstate(over="ignore"):
            val = complex(np.exp(lg))
        if z.imag == 0.0:
            # real zeros and real coefficients: the phase is a multiple of pi
            val = complex(math.copysign(abs(val), math.cos(lg.imag)), 0.0)
        bound = abs(val) * math.expm1(eps) if math.isfinite(eps) else math.inf
        return Bounded(val, bound, float(lg.real), {"log_error": eps})

    def __call__(self, z, R=None):
        return self.eval(z, R).value

    def log_abs_real(self, t, R=None):
        """``log|f_R(t)|`` and sign at real points (fast real kernel)."""
        zs = self.zeros
        inc = self._included(R)
        xs, ms = zs.xs[inc], zs.mults[inc]
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        la, sg = kernels.prod_log_real(t, 1.0 / xs, ms)
        la = la + math.log(abs(self.c))
        sg = sg * np.sign(self.c)
        if self.m:
            with np.errstate(divide="ignore"):
                la = la + self.m * np.log(np.abs(t))
            sg = sg * np.where(t < 0, (-1.0) ** self.m, 1.0) * (t != 0)
        if self.genus == 1:
            la = la + (self.a + math.fsum((ms / xs).tolist())) * t
        return la, sg

    # -- derivative numbers -------------------------------------------
    def derivative_numbers(self, R: Optional[float] = None) -> DerivativeNumbers:
        """``f^(mult)(lam)`` at every included zero, via removed-factor products."""
        key = ("deriv", R)
        if key in self._cache:
            return self._cache[key]
        zs = self.zeros
        inc = self._included(R)
        xs, ms = zs.xs[inc], zs.mults[inc]
        idx = np.arange(xs.size)
        la, sg = kernels.removed_factor_log(idx, xs, ms)
        ax = np.abs(xs)
        mf = ms.astype(np.float64)
        lgam = np.array([math.lgamma(k + 1) for k in ms])
        la = la + lgam - mf * np.log(ax) + math.log(abs(self.c)) + self.m * np.log(ax)
        if self.genus == 1:
            la = la + xs * (self.a + math.fsum((ms / xs).tolist()))
        own = np.where((xs > 0) & (ms % 2 == 1), -1.0, 1.0)  # (-1/lam)^mult
        origin = np.where((xs < 0) & (self.m % 2 == 1), -1.0, 1.0)
        sg = sg * own * origin * np.sign(self.c)
        err = self.log_error(xs, R)
        out = DerivativeNumbers(xs, ms, la, sg, err)
        self._cache[key] = out
        return out

    def _zero_index(self, lam, R=None):
        dn = self.derivative_numbers(R)
        hits = np.nonzero(np.abs(dn.xs - lam) <= 1e-12 * max(1.0, abs(lam)))[0]
        if hits.size == 0:
            raise ValidationError(f"{lam!r} is not a stored zero")
        return dn, int(hits[0])

    def derivative_order_mk(self, lam: float, R: Optional[float] = None) -> Bounded:
        """``f^(m_k)(lam)`` where ``m_k`` is the multiplicity of ``lam``."""
        dn, j = self._zero_index(lam, R)
        with np.errstate(over="ignore"):
            v = float(dn.sign[j] * math.exp(dn.log_abs[j])) if dn.log_abs[j] < 709 else dn.sign[j] * math.inf
        e = float(dn.log_err[j])
        bound = abs(v) * math.expm1(e) if math.isfinite(e) else math.inf
        return Bounded(v, bound, float(dn.log_abs[j]), {"mult": int(dn.mults[j]), "log_error": e})

    def derivative_at_zero(self, lam: float, R: Optional[float] = None) -> Bounded:
        dn, j = self._zero_index(lam, R)
        if dn.mults[j] != 1:
            raise MultipleZero(f"zero {lam!r} has multiplicity {dn.mults[j]}; use derivative_order_mk")
        return self.derivative_order_mk(lam, R)

    def taylor(self, z0: float, order: int, R: Optional[float] = None) -> np.ndarray:
        """Taylor coefficients ``f^(k)(z0)/k!`` for ``k = 0..order`` at a real point.

        Independent of the removed-factor route: the log-derivative series
        of every factor is expanded in power sums of ``1/(lam - z0)``.
        """
        zs = self.zeros
        inc = self._included(R)
        xs, ms = zs.xs[inc], zs.mults[inc].astype(np.float64)
        z0 = float(z0)
        hit = np.abs(xs - z0) <= 1e-12 * max(1.0, abs(z0))
        r = int(np.sum(ms[hit]))
        logc = math.log(abs(self.c))
        sgn = np.sign(self.c)
        for lam, k in zip(xs[hit], ms[hit]):
            logc -= k * math.log(abs(lam))
            sgn *= (-np.sign(lam)) ** int(k)
        other = ~hit
        if np.any(other):
            la, sg = kernels.prod_log_real([z0], 1.0 / xs[other], ms[other].astype(np.int64))
            logc += float(la[0])
            sgn *= float(sg[0])
        g = np.zeros(order + 1)
        d = xs[other] - z0
        for j in range(1, order + 1):
            g[j] = -math.fsum((ms[other] / (j * d ** j)).tolist())
        if self.m:
            if z0 == 0.0:
                r += self.m
            else:
                logc += self.m * math.log(abs(z0))
                sgn *= np.sign(z0) ** self.m
                for j in range(1, order + 1):
                    g[j] += self.m * (-1) ** (j + 1) / (j * z0 ** j)
        if self.genus == 1:
            lin = self.a + math.fsum((zs.mults[inc] / xs).tolist())
            logc += lin * z0
            if order >= 1:
                g[1] += lin
        E = np.zeros(order + 1)
        E[0] = 1.0
        for n in range(1, order + 1):
            E[n] = sum(j * g[j] * E[n - j] for j in range(1, n + 1)) / n
        out = np.zeros(order + 1)
        if r <= order:
            out[r:] = sgn * math.exp(logc) * E[: order + 1 - r]
        return out

    def derivative(self, z0: float, order: int, R: Optional[float] = None) -> float:
        return float(self.taylor(z0, order, R)[order] * math.factorial(order))

    # -- transformations -----------------------------------------------
    def with_zeros(self, xs, mults, **kw) -> "EntireFn":
        zs = self.zeros
        params = dict(m=self.m, c=self.c, genus=self.genus, a=self.a, tail=zs.tail, complete=zs.complete,
                      radius=kw.pop("radius", None))
        params.update(kw)
        if params["radius"] is None and not params["complete"]:
            params["radius"] = zs.radius
        return EntireFn.from_zeros(xs, mults, **params)

    def reflected(self) -> "EntireFn":
        """``f(-z)``."""
        zs = self.zeros
        c = self.c * (-1) ** self.m
        return self.with_zeros(-zs.xs[::-1], zs.mults[::-1], c=c, a=-self.a)

    def to_json(self) -> str:
        zs = self.zeros
        d = {"m": int(self.m), "c": float(self.c), "genus": int(self.genus), "a": float(self.a),
             "zeros": [{"x": float(x), "mult": int(k)} for x, k in zip(zs.xs, zs.mults)]}
        if zs.tail is not None:
            d["tail"] = {"model": "power", "exponent": zs.tail.exponent, "coeff": zs.tail.coeff,
                         "symmetric": bool(zs.tail.symmetric)}
        else:
            d["tail"] = {"model": "none"}
        if zs.complete:
            d["complete"] = True
        if not zs.complete:
            d["radius"] = zs.radius
        return json.dumps(d, indent=1, sort_keys=True) + "\n"


def _num(v, where, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}: expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ParseError(f"{where}: expected an integer, got {v!r}")
    return int(v) if integer else float(v)


def entire_from_json(text: str, source: str = "<string>") -> EntireFn:
    """Parse a zero-set file.

    Besides the documented fields, ``"complete": true`` marks a finite zero
    set and ``"radius"`` overrides the coverage radius.
    """
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise ParseError(f"{source}: top level must be an object")
    if "zeros" not in d or not isinstance(d["zeros"], list):
        raise ParseError(f"{source}: field 'zeros' must be an array")
    xs, ms = [], []
    for i, z in enumerate(d["zeros"]):
        if not isinstance(z, dict) or "x" not in z:
            raise ParseError(f"{source}: zeros[{i}]: expected an object with field 'x'")
        xs.append(_num(z["x"], f"{source}: zeros[{i}].x"))
        ms.append(_num(z.get("mult", 1), f"{source}: zeros[{i}].mult", integer=True))
    tail = None
    t = d.get("tail")
    if t is not None:
        if not isinstance(t, dict) or t.get("model", "none") not in ("none", "power"):
            raise ParseError(f"{source}: tail.model must be 'none' or 'power'")
        if t.get("model") == "power":
            for key in ("exponent", "coeff"):
                if key not in t:
                    raise ParseError(f"{source}: tail: missing field '{key}'")
            tail = TailModel(_num(t["exponent"], f"{source}: tail.exponent"), _num(t["coeff"], f"{source}: tail.coeff"),
                             bool(t.get("symmetric", False)))
    try:
        return EntireFn.from_zeros(
            xs, ms, m=_num(d.get("m", 0), f"{source}: m", integer=True), c=_num(d.get("c", 1.0), f"{source}: c"),
            genus=_num(d.get("genus", 0), f"{source}: genus", integer=True), a=_num(d.get("a", 0.0), f"{source}: a"),
            tail=tail, complete=bool(d.get("complete", False)),
            radius=None if d.get("radius") is None else _num(d["radius"], f"{source}: radius"))
    except ValidationError as exc:
        raise type(exc)(f"{source}: {exc}") from exc


def load_entire(path) -> EntireFn:
    with open(path, encoding="utf-8") as fh:
        return entire_from_json(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# quantities built from the derivative numbers


def _simple_zeros(f: EntireFn):
    if np.any(f.zeros.mults > 1):
        lam = f.zeros.xs[np.nonzero(f.zeros.mults > 1)[0][0]]
        raise MultipleZero(f"zero {lam!r} is not simple")
    if f.m > 1:
        raise MultipleZero("zero at the origin is not simple")


def _ordered(f: EntireFn, R=None):
    """Derivative numbers sorted by ascending ``|lam|``, plus counts."""
    dn = f.derivative_numbers(R)
    order = np.lexsort((dn.xs, np.abs(dn.xs)))
    xs = dn.xs[order]
    counts = np.cumsum(dn.mults[order]) + f.m
    return xs, dn.log_abs[order], dn.sign[order], dn.log_err[order], counts


def _series(f: EntireFn, log_terms, R=None) -> SeriesTrend:
    """Trend of ``sum exp(log_terms)`` over the zeros (ascending ``|lam|``)."""
    xs, la, sg, err, counts = _ordered(f, R)
    ok = err < RELIABLE_EPS
    with np.errstate(over="ignore", under="ignore"):
        terms = np.exp(log_terms)
    complete = f.zeros.complete and R is None
    if complete:
        return classify_series(np.abs(xs), terms, counts=counts, complete=True)
    tr = classify_series(np.abs(xs[ok]), terms[ok], counts=counts[ok], extrapolate_to=f.zeros.radius)
    tr.partial_sums = np.cumsum(terms).tolist()
    tr.notes["reliable_points"] = int(np.sum(ok))
    return tr


def estimate_df(f: EntireFn, q_range: Sequence[int] = (-3, 6), R=None) -> tuple:
    """Least ``q`` for which ``sum 1/(|f'(lam)| |lam|^(q+1))`` converges (heuristic).

    Returns ``(d, per_q)``; ``d`` is ``None`` when no ``q`` in range is
    conclusively convergent, and ``per_q[q]`` holds the trend of each sum.
    A result equal to ``q_range[0]`` means the floor of the range was hit.
    """
    _simple_zeros(f)
    xs, la, *_ = _ordered(f, R)
    lo, hi = int(q_range[0]), int(q_range[1])
    per_q = {}
    d = None
    for q in range(lo, hi + 1):
        tr = _series(f, -la - (q + 1) * np.log(np.abs(xs)), R)
        per_q[q] = tr
        if d is None and tr.trend == CONVERGENT:
            d = q
    if d is not None:
        # a convergent q above a non-convergent one is only trusted if all larger q agree
        if any(per_q[q].trend != CONVERGENT for q in range(d, hi + 1)):
            d = None
    return d, per_q


def _check_pole(f: EntireFn, z: complex):
    xs = f.zeros.xs
    if xs.size:
        near = np.abs(z - xs) <= POLE_TOL * np.maximum(1.0, np.abs(xs))
        if np.any(near):
            raise PoleAtZ(f"z={z!r} is within {POLE_TOL:g} of the zero {xs[np.nonzero(near)[0][0]]!r}")
    if f.m and abs(z) <= POLE_TOL:
        raise PoleAtZ("z is at the zero at the origin")


def _fprime0(f: EntireFn, R=None) -> float:
    # f(z) = c z g(z) with g(0) = 1 for either genus
    return float(f.c)


def _pf_terms(f: EntireFn, p: int, z: complex, R=None):
    """Terms ``z^p / (lam^p f'(lam) (z - lam))`` in ascending ``|lam|`` order."""
    xs, la, sg, err, counts = _ordered(f, R)
    with np.errstate(over="ignore", under="ignore"):
        inv_fp = sg * np.exp(-la)
    return xs, (z / xs) ** p * inv_fp / (z - xs), err, counts, la


def _csum(values) -> complex:
    v = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))


def _pf_tail(f: EntireFn, xs, terms, err, counts, R=None) -> tuple:
    if f.zeros.complete and R is None:
        return 0.0, CONVERGENT
    ok = err < RELIABLE_EPS
    tr = classify_series(np.abs(xs[ok]), np.abs(terms[ok]), counts=counts[ok], extrapolate_to=f.zeros.radius)
    if tr.trend != CONVERGENT:
        return math.inf, tr.trend
    return float(tr.tail_estimate), tr.trend


def delta_fp(f: EntireFn, p: int, z, trunc: Optional[int] = None) -> Bounded:
    """Partial value of ``1/f(z) - chi/(f'(0) z) - sum z^p/(lam^p f'(lam)(z-lam))``."""
    if p < 0:
        raise ValidationError("p must be >= 0")
    _simple_zeros(f)
    z = complex(z)
    _check_pole(f, z)
    R = f.radius_for_count(trunc)
    ev = f.eval(z, None) if R is None else _eval_any(f, z, R)
    inv_f = 1.0 / ev.value if ev.value != 0 else complex(math.inf)
    xs, terms, err, counts, _ = _pf_terms(f, p, z, R)
    chi = 1.0 / (_fprime0(f, R) * z) if f.m == 1 else 0.0
    val = inv_f - chi - _csum(terms)
    e = float(ev.notes["log_error"])
    b_f = abs(inv_f) * math.expm1(e) if math.isfinite(e) else math.inf
    b_s, trend = _pf_tail(f, xs, terms, err, counts, R)
    rnd = 64 * np.finfo(float).eps * (abs(inv_f) + abs(chi) + float(np.sum(np.abs(terms))))
    return Bounded(val, b_f + b_s + rnd, notes={"series_trend": trend, "R": R})


def _eval_any(f: EntireFn, z: complex, R) -> Bounded:
    """Like ``eval`` but reports an infinite bound instead of rejecting large ``|z|``."""
    lg = f._log_eval([z], R)[0]
    eps = float(f.log_error(z, R))
    with np.errstate(over="ignore"):
        val = complex(np.exp(lg)) if lg.real > -math.inf else 0j
    bound = abs(val) * math.expm1(eps) if math.isfinite(eps) else math.inf
    return Bounded(val, bound, float(lg.real), {"log_error": eps})


def taylor_of_reciprocal(f: EntireFn, p: int, R=None, points: int = CAUCHY_POINTS) -> tuple:
    """Taylor coefficients at 0 of ``1/f(z) - chi/(f'(0) z)`` for orders ``0..p-1``.

    Computed by the trapezoidal rule on a circle inside the first zero,
    which handles the removable singularity at the origin; the change
    against half as many nodes is returned as a conditioning estimate.
    """
    if p <= 0:
        return np.zeros(0), 0.0
    zs = f.zeros
    inc = f._included(R)
    rmin = float(np.min(np.abs(zs.xs[inc]))) if np.any(inc) else 1.0
    rho = 0.5 * rmin

    def coeffs(N):
        w = rho * np.exp(2j * np.pi * np.arange(N) / N)
        lg = f._log_eval(w, R)
        g = np.exp(-lg)
        if f.m == 1:
            g = g - 1.0 / (_fprime0(f, R) * w)
        return np.array([np.mean(g * w ** (-k)) for k in range(p)])

    full = coeffs(points)
    half = coeffs(points // 2)
    cond = float(np.max(np.abs(full - half)))
    # real zero data gives real coefficients; the imaginary parts are rounding
    return full.real, cond


def m_fp(f: EntireFn, p: int, z, trunc: Optional[int] = None) -> Bounded:
    """Partial value of the meromorphic reconstruction of ``1/f`` from its zeros."""
    if p < 0:
        raise ValidationError("p must be >= 0")
    _simple_zeros(f)
    z = complex(z)
    _check_pole(f, z)
    R = f.radius_for_count(trunc)
    t, cond = taylor_of_reciprocal(f, p, R)
    xs, terms, err, counts, _ = _pf_terms(f, p, z, R)
    chi = 1.0 / (_fprime0(f, R) * z) if f.m == 1 else 0.0
    poly = complex(sum(t[k] * z ** k for k in range(p)))
    val = chi + poly + _csum(terms)
    b_s, trend = _pf_tail(f, xs, terms, err, counts, R)
    # the derivative numbers come from the truncated product, so the sum
    # reproduces 1/f_R; add the distance from 1/f_R to 1/f
    eps = float(f.log_error(z, R))
    b_f = abs(val) * math.expm1(eps) if math.isfinite(eps) else math.inf
    return Bounded(val, b_s + b_f + cond * sum(abs(z) ** k for k in range(p)),
                   notes={"taylor": [float(v) for v in t], "taylor_conditioning": cond, "series_trend": trend})


def check_hamburger_identity(f: EntireFn, z_list, trunc: Optional[int] = None, n_max: int = 4) -> dict:
    """Partial-fraction identity for ``1/f`` at each ``z`` and the moment-type sums.

    Raises ``InvariantViolation`` naming the worst point if the residual
    exceeds its bound anywhere.
    """
    from .errors import InvariantViolation

    _simple_zeros(f)
    R = f.radius_for_count(trunc)
    rows = []
    worst = None
    for z in z_list:
        d = delta_fp(f, 0, z, trunc)
        excess = abs(d.value) - d.bound
        rows.append({"z": [complex(z).real, complex(z).imag], "residual": abs(d.value), "bound": d.bound})
        if worst is None or excess > worst[0]:
            worst = (excess, complex(z), abs(d.value), d.bound)
    if worst is not None and worst[0] > 0:
        raise InvariantViolation(
            f"partial-fraction identity fails at z={worst[1]!r}: residual {worst[2]:.3e} > bound {worst[3]:.3e}",
            detail={"rows": rows})
    xs, la, *_ = _ordered(f, R)
    moments = {}
    for n in range(n_max + 1):
        tr = _series(f, n * np.log(np.abs(xs)) - la, R)
        moments[n] = {"partial_sums_last": tr.total, "trend": tr.trend}
    return {"points": rows, "moment_sums": moments, "holds": True}


# ---------------------------------------------------------------------------
# class predicates


def _tri(values):
    vals = list(values)
    if any(v is False for v in vals):
        return False
    if all(v is True for v in vals):
        return True
    return None


def _type_condition(f: EntireFn) -> tuple:
    """Exponential type when the zeros reach both infinities, minimal type otherwise."""
    zs = f.zeros
    spans_line = (not zs.complete) and zs.tail is not None and zs.both_sides
    if zs.complete:
        lin = f.a + math.fsum((zs.mults / zs.xs).tolist()) if f.genus == 1 else 0.0
        minimal = abs(lin) <= 1e-12 * max(1.0, float(np.sum(zs.mults / np.abs(zs.xs))) if zs.count else 1.0)
        return minimal, {"zeros_span_line": False, "finite_zero_set": True, "minimal_type": minimal}
    try:
        est, trend = exp_type_estimate(f)
    except TailModelMissing as exc:
        return None, {"zeros_span_line": spans_line, "error": str(exc)}
    ev = {"zeros_span_line": spans_line, "type_estimate": est, "type_trend": trend}
    if spans_line:
        return (True if trend["verdict"] in ("FINITE", "MINIMAL") else None), ev
    if trend["verdict"] == "MINIMAL":
        return True, ev
    if trend["verdict"] == "FINITE" and est > 0.5:
        return False, ev
    return None, ev


def class_predicate_krein(f: EntireFn) -> tuple:
    """Tri-state membership test: real simple zeros, the growth condition and the weighted reciprocal sum."""
    ev = {}
    simple = bool(np.all(f.zeros.mults == 1) and f.m <= 1)
    ev["real_simple_zeros"] = simple
    if not simple:
        return False, ev
    typ, tev = _type_condition(f)
    ev["growth"] = tev
    xs, la, *_ = _ordered(f)
    tr = _series(f, -la - np.log1p(xs ** 2))
    ev["reciprocal_sum"] = {"partial_sum": tr.total, "trend": tr.trend,
                            "tail_estimate": tr.tail_estimate, **tr.notes}
    sum_ok = {CONVERGENT: True, DIVERGENT: False}.get(tr.trend)
    return _tri([typ, sum_ok]), ev


def class_predicate_hamburger(f: EntireFn, n_max: int = 4) -> tuple:
    """Tri-state membership test with ``|lam|^n / |f'(lam)| -> 0`` for ``n <= n_max``."""
    ev = {}
    simple = bool(np.all(f.zeros.mults == 1) and f.m <= 1)
    ev["real_simple_zeros"] = simple
    if not simple:
        return False, ev
    typ, tev = _type_condition(f)
    ev["growth"] = tev
    xs, la, sg, err, counts = _ordered(f)
    checks = []
    per_n = {}
    if f.zeros.complete:
        checks = [True]
        per_n = {n: {"tends_to_zero": True, "reason": "finite zero set"} for n in range(n_max + 1)}
    else:
        ok = err < RELIABLE_EPS
        for n in range(n_max + 1):
            with np.errstate(over="ignore", under="ignore"):
                vals = np.exp(n * np.log(np.abs(xs[ok])) - la[ok])
            res, slope = ratio_trend(np.abs(xs[ok]), vals)
            per_n[n] = {"tends_to_zero": res, "slope": slope}
            checks.append(res)
    ev["decay"] = per_n
    return _tri([typ] + checks), ev


# ---------------------------------------------------------------------------
# growth quantities


def delta_f_R(f: EntireFn, R: float) -> float:
    """``sum 1/lam`` over stored zeros in ``(-R, R)``, with multiplicity."""
    if not R > 0:
        raise ValidationError("R must be positive")
    zs = f.zeros
    sel = np.abs(zs.xs) < R
    order = zs.order
    sel_o = sel[order]
    vals = (zs.mults / zs.xs)[order][sel_o]
    return math.fsum(vals.tolist())


def _trapezoid_levels(g, R, nodes):
    """Midpoint sums of ``g`` on ``[-R, R]`` with ``nodes`` and ``nodes/2`` cells."""
    out = []
    for n in (nodes, nodes // 2):
        h = 2 * R / n
        t = -R + h * (np.arange(n) + 0.5)
        out.append(float(np.sum(g(t)) * h))
    return out


def log_integral(f: EntireFn, R: float, nodes: int = 4000) -> dict:
    """Quadrature of ``log+|f(t)|/(1+t^2)`` and ``|log|f(t)||/(1+t^2)`` over ``[-R, R]``.

    Midpoint rule with a Richardson step against half as many cells; the
    trend is read from the increments over ``R/8, R/4, R/2, R``.
    """
    if not R > 0 or nodes < 8:
        raise ValidationError("need R > 0 and nodes >= 8")
    xs = f.zeros.xs

    def logabs(t):
        t = np.asarray(t, dtype=np.float64)
        if xs.size:
            # nudge nodes that land on a zero
            j = np.clip(np.searchsorted(xs, t), 1, max(xs.size - 1, 1)) if xs.size > 1 else np.zeros(t.size, int)
            near = np.minimum(np.abs(t - xs[np.clip(j - 1, 0, xs.size - 1)]), np.abs(t - xs[np.clip(j, 0, xs.size - 1)]))
            t = np.where(near < 1e-9 * np.maximum(1, np.abs(t)), t + 1e-7 * np.maximum(1, np.abs(t)), t)
        if f.m:
            t = np.where(np.abs(t) < 1e-12, 1e-7, t)
        la, _ = f.log_abs_real(t, None)
        return la

    out = {}
    for name, fn in (("I_plus", lambda t: np.maximum(logabs(t), 0.0) / (1 + t * t)),
                     ("I_abs", lambda t: np.abs(logabs(t)) / (1 + t * t))):
        levels = []
        for k in (3, 2, 1, 0):
            Rk = R / 2 ** k
            nk = max(8, nodes // 2 ** k)
            fine, coarse = _trapezoid_levels(fn, Rk, nk)
            # the midpoint rule error is O(h^2)
            levels.append(((4 * fine - coarse) / 3, abs(fine - coarse) / 3))
        vals = [v for v, _ in levels]
        inc = np.diff(vals)
        scale = max(abs(vals[-1]), 1e-300)
        if np.all(np.abs(inc) <= 1e-12 * max(scale, 1.0)):
            trend = CONVERGENT
        else:
            ratios = [abs(b) / abs(a) if a != 0 else math.inf for a, b in zip(inc[:-1], inc[1:])]
            if all(r < 0.8 for r in ratios):
                trend = CONVERGENT
            elif ratios[-1] > 0.9:
                trend = DIVERGENT
            else:
                trend = UNDECIDED
        out[name] = vals[-1]
        out[f"{name}_error"] = levels[-1][1]
        out[f"{name}_levels"] = vals
        out[f"{name}_trend"] = trend
    out["R"] = R
    out["nodes"] = nodes
    return out


def _default_radii(f: EntireFn):
    zs = f.zeros
    if zs.complete:
        base = float(np.max(np.abs(zs.xs))) if zs.count else 1.0
        return [base * s for s in (2, 5, 10, 20, 50, 100)]
    top = zs.radius / 10
    lo = max(1.0, 2 * float(np.min(np.abs(zs.xs))) if zs.count else 1.0)
    lo = min(lo, top / 32)
    return list(np.geomspace(lo, top, 6))


def exp_type_estimate(f: EntireFn, radii: Optional[Sequence[float]] = None) -> tuple:
    """``max_{|z|=r} log|f(z)| / r`` on a circle sample for each radius, with a trend label.

    The trend verdict is ``MINIMAL`` when the ratios decrease towards zero,
    ``FINITE`` when they settle at a positive level and ``GROWING`` when they
    keep increasing like a positive power of ``r``.
    """
    radii = [float(r) for r in (radii if radii is not None else _default_radii(f))]
    if any(b <= a for a, b in zip(radii[:-1], radii[1:])) or radii[0] <= 0:
        raise ValidationError("radii must be positive and increasing")
    zs = f.zeros
    if not zs.complete and zs.tail is None and radii[-1] > zs.radius / 2:
        raise TailModelMissing(f"radius {radii[-1]:g} is beyond the stored zeros and no tail model is present")
    theta = 2 * np.pi * (np.arange(CIRCLE_POINTS) + 0.5) / CIRCLE_POINTS
    ratios, errs = [], []
    for r in radii:
        w = r * np.exp(1j * theta)
        lg = f._log_eval(w, None).real
        k = int(np.argmax(lg))
        ratios.append(float(lg[k] / r))
        errs.append(float(f.log_error(w[k], None)) / r)
    est = ratios[-1]
    pos = [v for v in ratios if v > 0]
    if len(pos) == len(ratios) and len(ratios) >= 3:
        slope = float(np.polyfit(np.log(radii), np.log(ratios), 1)[0])
        tail_slope = float(np.polyfit(np.log(radii[-3:]), np.log(ratios[-3:]), 1)[0])
    else:
        slope = tail_slope = float("nan")
    if ratios[-1] <= 0.25 * max(ratios) and all(b <= a * (1 + 1e-9) for a, b in zip(ratios[-3:], ratios[-2:])):
        verdict = "MINIMAL"
    elif math.isfinite(tail_slope) and tail_slope > 0.3:
        verdict = "GROWING"
    elif math.isfinite(tail_slope) and abs(tail_slope) <= 0.3:
        verdict = "FINITE"
    elif math.isfinite(tail_slope) and tail_slope < -0.3:
        verdict = "MINIMAL"
    else:
        verdict = "UNDECIDED"
    return est, {"radii": radii, "ratios": ratios, "ratio_error_bounds": errs, "log_log_slope": slope,
                 "tail_slope": tail_slope, "verdict": verdict}


# ---------------------------------------------------------------------------
# polynomial multiplication and division


def _poly_zeros(Q) -> np.ndarray:
    """Zeros of ``Q`` given as a zero list or as ascending coefficients via ``poly=``."""
    return np.asarray(Q, dtype=np.float64).ravel()


def multiply_by_polynomial(f: EntireFn, zeros, scale: float = 1.0) -> EntireFn:
    """``f(z) * scale * prod (1 - z/mu)`` for simple nonzero real ``mu`` not among the zeros of ``f``."""
    mu = _poly_zeros(zeros)
    if np.any(mu == 0):
        raise ValidationError("polynomial zeros must be nonzero (use the order at the origin)")
    if np.unique(mu).size != mu.size:
        raise ValidationError("polynomial zeros must be simple")
    zs = f.zeros
    for v in mu:
        if np.any(np.abs(zs.xs - v) <= POLE_TOL * max(1.0, abs(v))):
            raise SharedZero(f"{v!r} is already a zero of f")
        if not zs.complete and abs(v) > zs.radius:
            raise ValidationError(f"{v!r} lies beyond the coverage radius of the stored zeros")
    xs = np.concatenate([zs.xs, mu])
    ms = np.concatenate([zs.mults, np.ones(mu.size, dtype=np.int64)])
    a = f.a
    if f.genus == 1:
        # keep e^{az} * prod e^{z/lam} unchanged: the product is by plain factors
        a = f.a - math.fsum((1.0 / mu).tolist())
    tail = zs.tail
    if tail is not None and not zs.complete:
        # n(r) grows by deg Q everywhere beyond the coverage radius
        tail = TailModel(tail.exponent, tail.coeff + mu.size / zs.radius ** tail.exponent, tail.symmetric)
    return f.with_zeros(xs, ms, c=f.c * scale, a=a, tail=tail)


def divide_by_polynomial(f: EntireFn, zeros) -> EntireFn:
    """``f(z) / prod (1 - z/mu)`` for simple zeros ``mu`` of ``f``."""
    mu = _poly_zeros(zeros)
    zs = f.zeros
    keep = np.ones(zs.count, dtype=bool)
    ms = zs.mults.copy()
    for v in mu:
        hit = np.nonzero(np.abs(zs.xs - v) <= POLE_TOL * max(1.0, abs(v)))[0]
        if hit.size == 0:
            raise ValidationError(f"{v!r} is not a zero of f")
        ms[hit[0]] -= 1
        if ms[hit[0]] == 0:
            keep[hit[0]] = False
    a = f.a + math.fsum((1.0 / mu).tolist()) if f.genus == 1 else f.a
    return f.with_zeros(zs.xs[keep], ms[keep], a=a)
