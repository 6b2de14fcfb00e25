"""Christoffel-type extremal quantities for discrete measures.

``rho_n`` is the smallest norm of a real polynomial of degree at most ``n``
normalised by ``|p(z)| = 1``; ``M_n`` is the largest value ``|p(z)|`` over the
unit ball (complex coefficients).  For the L2 norm both come from the
reproducing kernel of the orthonormal polynomials; other norms use damped
iteratively reweighted least squares (IRLS) or Lawson reweighting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linprog, minimize_scalar

from .errors import DegreeExceedsSupport, InvariantViolation, NonConvergence
from .measure import DiscreteMeasure, TiltMode, tilt

RHO_FLOOR = 1e-9
IRLS_TOL = 1e-12
IRLS_MAXIT = 500
IRLS_FLOOR = 1e-14
THETA_GRID = 64
LAWSON_GAP = 1e-9
NONCONV_RESIDUAL = 1e-6
# real-coefficient sup problems are finished by an exact LP after this many
# Lawson steps
LAWSON_REAL_MAXIT = 10
# complex sup problems are finished by a conic solve; Lawson then only
# supplies the lower-bound certificate
LAWSON_COMPLEX_MAXIT = 50


@dataclass(frozen=True)
class NormParam:
    """Either ``LP(p)`` with ``p >= 1`` or a weighted sup norm over the atoms.

    In SUPW mode ``weights`` are the values of the weight on the atoms; when
    omitted the atom masses are used.
    """

    mode: str = "LP"
    p: float = 2.0
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in ("LP", "SUPW"):
            raise ValueError(f"unknown norm mode {self.mode!r}")
        if self.mode == "LP" and not self.p >= 1:
            raise ValueError(f"LP exponent must be >= 1, got {self.p}")

    @property
    def tilt_alpha(self) -> float:
        return self.p if self.mode == "LP" else 1.0

    def label(self) -> str:
        return f"LP({self.p:g})" if self.mode == "LP" else "SUPW"

    def atom_weights(self, mu: DiscreteMeasure) -> np.ndarray:
        if self.weights is None:
            return mu.masses
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != mu.xs.shape:
            raise ValueError("SUPW weights must align with the atoms")
        return w

    def norm_of_values(self, mu, vals) -> float:
        a = np.abs(vals)
        if self.mode == "LP":
            return float(np.sum(mu.masses * a ** self.p) ** (1.0 / self.p))
        return float(np.max(self.atom_weights(mu) * a))

    @classmethod
    def parse(cls, text) -> "NormParam":
        s = str(text).strip().lower()
        if s in ("sup", "supw", "*"):
            return cls("SUPW")
        return cls("LP", float(s))


def LP(p: float) -> NormParam:
    return NormParam("LP", float(p))


SUPW = NormParam("SUPW")


@dataclass(frozen=True)
class PolyReal:
    """Real polynomial, coefficients in ascending degree."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        if c:
            scale = max(abs(v) for v in c)
            while c and (c[-1] == 0.0 or abs(c[-1]) <= 1e-13 * scale):
                c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float))
        return npoly.polyval(x, self.coeffs)


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal polynomials of a discrete measure.

    ``a`` and ``b`` are the monic recurrence coefficients
    ``pi_{k+1} = (x - a_k) pi_k - b_k pi_{k-1}``, ``h`` the squared norms.
    ``values[i, k]`` is the k-th orthonormal polynomial at atom ``i``.
    """

    a: np.ndarray
    b: np.ndarray
    h: np.ndarray
    values: np.ndarray
    residual: float

    @property
    def degree(self) -> int:
        return self.a.size - 1

    def orthonormal(self, z, n: Optional[int] = None) -> np.ndarray:
        """Orthonormal polynomial values at points ``z``; shape ``(len(z), n+1)``."""
        n = self.degree if n is None else n
        z = np.atleast_1d(np.asarray(z))
        dtype = np.complex128 if np.iscomplexobj(z) else np.float64
        out = np.empty((z.size, n + 1), dtype=dtype)
        sb = np.sqrt(self.b)
        out[:, 0] = 1.0 / math.sqrt(self.h[0])
        if n >= 1:
            out[:, 1] = (z - self.a[0]) * out[:, 0] / sb[0]
        for k in range(1, n):
            out[:, k + 1] = ((z - self.a[k]) * out[:, k] - sb[k - 1] * out[:, k - 1]) / sb[k]
        return out

    def monomial(self, coeffs) -> PolyReal:
        """Convert orthonormal-basis coefficients to monomial form."""
        sb = np.sqrt(self.b)
        x = Polynomial([0.0, 1.0])
        polys = [Polynomial([1.0 / math.sqrt(self.h[0])])]
        for k in range(len(coeffs) - 1):
            nxt = (x - self.a[k]) * polys[k]
            if k > 0:
                nxt = nxt - sb[k - 1] * polys[k - 1]
            polys.append(nxt / sb[k])
        total = Polynomial([0.0])
        for c, pk in zip(coeffs, polys):
            total = total + float(np.real(c)) * pk
        return PolyReal(tuple(total.coef))


def ortho_basis(mu: DiscreteMeasure, n: int) -> OrthoBasis:
    """Discrete Stieltjes (Lanczos) procedure with full reorthogonalization."""
    N = mu.n_atoms
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n >= N:
        raise DegreeExceedsSupport(f"degree {n} needs more than {N} atoms")
    x = mu.xs
    sw = np.sqrt(mu.masses)
    Q = np.zeros((N, n + 1))
    Q[:, 0] = sw / np.linalg.norm(sw)
    a = np.zeros(n + 1)
    beta = np.zeros(n + 1)
    for k in range(n + 1):
        v = x * Q[:, k]
        a[k] = Q[:, k] @ v
        if k == n:
            break
        v = v - a[k] * Q[:, k]
        if k > 0:
            v = v - beta[k] * Q[:, k - 1]
        # Gram-Schmidt applied twice keeps Q orthonormal to working precision
        for _ in range(2):
            v = v - Q[:, : k + 1] @ (Q[:, : k + 1].T @ v)
        beta[k + 1] = np.linalg.norm(v)
        if beta[k + 1] == 0.0:
            raise DegreeExceedsSupport(f"Krylov space exhausted at degree {k + 1}")
        Q[:, k + 1] = v / beta[k + 1]
    b = beta[1:] ** 2
    s0 = float(np.sum(mu.masses))
    with np.errstate(over="ignore"):
        # squared monic norms may exceed the float range for wide supports
        h = s0 * np.concatenate([[1.0], np.cumprod(b)])
    resid = float(np.max(np.abs(Q.T @ Q - np.eye(n + 1))))
    return OrthoBasis(a=a, b=b, h=h, values=Q / sw[:, None], residual=resid)


@dataclass
class ExtremalResult:
    """Outcome of an extremal computation.

    ``value`` is ``None`` exactly when ``unbounded`` is set (an M-quantity
    whose companion rho vanished).
    """

    value: Optional[float]
    minimizer: Optional[PolyReal]
    iters: int
    residual: float
    sandwich: Optional[tuple] = None
    unbounded: bool = False
    complex_value: Optional[float] = None
    method: str = ""
    extra: dict = field(default_factory=dict)


def _is_atom(mu, z):
    if isinstance(z, complex) and z.imag != 0.0:
        return None
    zr = float(np.real(z))
    d = np.abs(mu.xs - zr)
    j = int(np.argmin(d))
    return j if d[j] <= 1e-14 * max(1.0, abs(zr)) else None


def _support_exceeded(mu, norm, z, n):
    """Exact answer when the degree reaches the number of atoms."""
    xs = mu.xs
    j = _is_atom(mu, z)
    if j is None:
        q = np.poly(xs)[::-1]
        qz = npoly.polyval(z, q)
        scale = abs(qz) if np.iscomplexobj(qz) else float(qz)
        return 0.0, PolyReal(tuple(q / scale))
    others = np.delete(xs, j)
    q = np.poly(others)[::-1] if others.size else np.array([1.0])
    q = q / npoly.polyval(xs[j], q)
    if norm.mode == "LP":
        val = float(mu.masses[j] ** (1.0 / norm.p))
    else:
        val = float(norm.atom_weights(mu)[j])
    return val, PolyReal(tuple(q))


def _nullspace(A, rhs):
    """Particular solution of ``A c = rhs`` and a basis of the null space of ``A``."""
    cp, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-13 * s[0])) if s.size else 0
    return cp, vh[rank:].conj().T


def _nullspace_solve(Phi, u, A, rhs, ns=None):
    """Minimise ``sum u |Phi c|^2`` subject to ``A c = rhs``."""
    cp, Z = _nullspace(A, rhs) if ns is None else ns
    if Z.shape[1] == 0:
        return cp
    sq = np.sqrt(u)[:, None]
    M = sq * (Phi @ Z)
    y, *_ = np.linalg.lstsq(M, -(sq[:, 0] * (Phi @ cp)), rcond=None)
    return cp + Z @ y


def _irls(Phi, masses, A, rhs, p, tol=None, maxit=IRLS_MAXIT, floor=IRLS_FLOOR, u0=None):
    """Damped IRLS for ``min (sum m |Phi c|^p)^(1/p)`` with linear constraint.

    Stops when the relative objective change drops below ``tol`` or after
    ``maxit`` iterations; a stop at ``maxit`` with a change above
    ``NONCONV_RESIDUAL`` raises ``NonConvergence``.  Returns coefficients,
    objective, iterations, final relative change and the last weights.
    """
    tol = IRLS_TOL if tol is None else tol

    def obj(c):
        return float(np.sum(masses * np.abs(Phi @ c) ** p) ** (1.0 / p))

    ns = _nullspace(A, rhs)
    c = _nullspace_solve(Phi, masses if u0 is None else u0, A, rhs, ns)
    J = obj(c)
    # for p > 2 the plain fixed point overshoots; a 1/(p-1) step is the
    # Newton-consistent update
    relax = 1.0 / (p - 1.0) if p > 2 else 1.0
    rel = math.inf
    u = masses
    for it in range(1, maxit + 1):
        r = np.abs(Phi @ c)
        u = masses * np.maximum(r, floor) ** (p - 2.0)
        c_new = c + relax * (_nullspace_solve(Phi, u, A, rhs, ns) - c)
        J_new = obj(c_new)
        step = 1.0
        while J_new > J and step > 1e-6:
            step *= 0.5
            c_try = c + step * (c_new - c)
            J_try = obj(c_try)
            if J_try <= J:
                c_new, J_new = c_try, J_try
        if J_new > J:
            return c, J, it, 0.0, u
        rel = (J - J_new) / max(J, 1e-300)
        c, J = c_new, J_new
        if rel < tol or J == 0.0:
            return c, J, it, rel, u
    if rel > NONCONV_RESIDUAL:
        raise NonConvergence(f"IRLS relative change {rel:.3e} after {maxit} iterations", best=(c, J), residual=rel)
    return c, J, maxit, rel, u


def _lawson(Phi, w, A, rhs, tol=IRLS_TOL, maxit=IRLS_MAXIT, v0=None):
    """Lawson reweighting for ``min max_i w_i |Phi c|_i`` with linear constraint.

    Returns coefficients, the attained max, the lower bound certified by the
    final weights, iterations and the relative gap between the two.
    """
    v = np.full(w.size, 1.0 / w.size) if v0 is None else 0.5 * v0 + 0.5 / w.size
    best_c, best_up, low = None, math.inf, 0.0
    gap = math.inf
    ns = _nullspace(A, rhs)
    for it in range(1, maxit + 1):
        c = _nullspace_solve(Phi, v * w ** 2, A, rhs, ns)
        e = w * np.abs(Phi @ c)
        up = float(np.max(e))
        low = max(low, float(math.sqrt(np.sum(v * e ** 2))))
        if up < best_up:
            best_c, best_up = c, up
        if up == 0.0:
            return c, 0.0, 0.0, it, 0.0, v
        gap = (best_up - low) / best_up
        if gap < tol:
            break
        v = v * e / up
        total = float(np.sum(v))
        if not (math.isfinite(total) and total > 0):
            break
        v = v / total
    return best_c, best_up, low, it, gap, v


def _minimax_lp(Phi, w, A, rhs):
    """Exact discrete minimax by linear programming (real coefficients)."""
    N, d = Phi.shape
    W = w[:, None] * Phi
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    ones = np.ones((N, 1))
    A_ub = np.vstack([np.hstack([W, -ones]), np.hstack([-W, -ones])])
    A_eq = np.hstack([A, np.zeros((A.shape[0], 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(2 * N), A_eq=A_eq, b_eq=rhs,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0:
        raise NonConvergence(f"minimax LP failed: {res.message}")
    c = res.x[:d]
    return c, float(np.max(w * np.abs(Phi @ c)))


def _l1_lp(Phi, m, A, rhs):
    """Exact weighted L1 minimisation by linear programming (real coefficients)."""
    N, d = Phi.shape
    cost = np.concatenate([np.zeros(d), m])
    eye = np.eye(N)
    A_ub = np.vstack([np.hstack([Phi, -eye]), np.hstack([-Phi, -eye])])
    A_eq = np.hstack([A, np.zeros((A.shape[0], N))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(2 * N), A_eq=A_eq, b_eq=rhs,
                  bounds=[(None, None)] * d + [(0, None)] * N, method="highs")
    if res.status != 0:
        raise NonConvergence(f"L1 LP failed: {res.message}")
    return res.x[:d]


def _conic(Phi, weights, A, rhs, p):
    """Solve the constrained norm minimisation directly as a conic program.

    ``p = inf`` is the weighted sup norm with ``weights`` the weight values;
    otherwise ``weights`` are masses.  Complex ``Phi`` or ``A`` give a
    complex coefficient vector.
    """
    import cvxpy as cp

    cplx = np.iscomplexobj(Phi) or np.iscomplexobj(A)
    c = cp.Variable(Phi.shape[1], complex=cplx)
    r = cp.abs(Phi @ c)
    if math.isinf(p):
        obj = cp.max(cp.multiply(weights, r))
    elif p == 1:
        obj = cp.sum(cp.multiply(weights, r))
    else:
        obj = cp.pnorm(cp.multiply(weights ** (1.0 / p), r), p)
    prob = cp.Problem(cp.Minimize(obj), [A @ c == rhs])
    try:
        prob.solve(solver="CLARABEL")
    except cp.error.SolverError as exc:
        raise NonConvergence(f"conic solver failed: {exc}") from exc
    if c.value is None:
        raise NonConvergence(f"conic solver returned status {prob.status}")
    x = np.asarray(c.value)
    # restore the constraint exactly along its minimum-norm direction
    x = x + np.linalg.lstsq(A, rhs - A @ x, rcond=None)[0]
    return x


def _solve(mu, norm, Phi, A, rhs, warm=None):
    """Dispatch a constrained minimisation to IRLS or Lawson.

    Returns coefficients, value, iterations, residual and the final weights
    (usable as ``warm`` for a nearby problem).
    """
    real = not (np.iscomplexobj(Phi) or np.iscomplexobj(A))
    if norm.mode == "LP" and norm.p == 1.0 and real:
        c = _l1_lp(Phi, mu.masses, A, rhs)
        return c, norm.norm_of_values(mu, Phi @ c), 1, 0.0, mu.masses
    if norm.mode == "LP" and norm.p == 1.0:
        # IRLS is sublinear at p = 1 and stalls on flat stretches
        c = _conic(Phi, mu.masses, A, rhs, 1.0)
        return c, norm.norm_of_values(mu, Phi @ c), 1, 0.0, mu.masses
    if norm.mode == "LP":
        try:
            return _irls(Phi, mu.masses, A, rhs, norm.p, u0=warm)
        except NonConvergence as exc:
            c0, J0 = exc.best
        c = _conic(Phi, mu.masses, A, rhs, norm.p)
        J = norm.norm_of_values(mu, Phi @ c)
        if J0 < J:
            c, J = c0, J0
        return c, J, IRLS_MAXIT, 0.0, mu.masses
    w = norm.atom_weights(mu)
    c, up, low, it, gap, v = _lawson(Phi, w, A, rhs, v0=warm,
                                     maxit=LAWSON_REAL_MAXIT if real else LAWSON_COMPLEX_MAXIT)
    if gap <= LAWSON_GAP:
        return c, up, it, gap, v
    if not real:
        c2 = _conic(Phi, w, A, rhs, math.inf)
        up2 = float(np.max(w * np.abs(Phi @ c2)))
        if up2 < low * (1 - 1e-7):
            raise NonConvergence("conic minimax value below the Lawson lower bound", best=(c, up), residual=gap)
        if up2 < up:
            c, up = c2, up2
        return c, up, it, (up - low) / up, v
    # Lawson converges linearly; finish with the exact LP and keep Lawson's
    # lower bound as an independent certificate
    c2, up2 = _minimax_lp(Phi, w, A, rhs)
    if up2 < low * (1 - 1e-9):
        raise NonConvergence("minimax LP value below the Lawson lower bound", best=(c, up), residual=gap)
    if up2 < up:
        c, up = c2, up2
    return c, up, it, 0.0, v


def _real_coeff_complex_z(mu, norm, Phi, v):
    """Real coefficients with ``|p(z)| = 1`` at non-real ``z``: search the phase."""
    A = np.vstack([v.real, v.imag])
    state = {"u": None}

    def value(theta):
        rhs = np.array([math.cos(theta), math.sin(theta)])
        # warm start from the weights of the previous phase
        c, J, it, r, u = _solve(mu, norm, Phi, A, rhs, warm=state["u"])
        state["u"] = u
        return c, J, it, r

    thetas = np.pi * np.arange(THETA_GRID) / THETA_GRID
    vals = [value(t)[1] for t in thetas]
    k = int(np.argmin(vals))
    h = np.pi / THETA_GRID
    res = minimize_scalar(lambda t: value(t)[1], bounds=(thetas[k] - h, thetas[k] + h),
                          method="bounded", options={"xatol": 1e-10})
    t_best = float(res.x) if res.fun < vals[k] else float(thetas[k])
    c, J, it, r = value(t_best)
    return c, J, it, r, t_best


def rho_n(mu: DiscreteMeasure, norm: NormParam, z, n: int, basis: Optional[OrthoBasis] = None) -> ExtremalResult:
    """Smallest norm of a real polynomial of degree ``<= n`` with ``|p(z)| = 1``."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    z = complex(z) if np.iscomplexobj(z) or isinstance(z, complex) else float(z)
    if isinstance(z, complex) and z.imag == 0.0:
        z = z.real
    if n >= mu.n_atoms:
        val, poly = _support_exceeded(mu, norm, z, n)
        return ExtremalResult(val, poly, 0, 0.0, method="support")
    basis = basis if basis is not None and basis.degree >= n else ortho_basis(mu, n)
    v = basis.orthonormal(np.array([z]), n)[0]
    Phi = basis.values[:, : n + 1]
    if norm.mode == "LP" and norm.p == 2.0:
        if isinstance(z, float):
            k = float(np.sum(v ** 2))
            coeffs = v / k
            return ExtremalResult(1.0 / math.sqrt(k), basis.monomial(coeffs), 0, basis.residual,
                                  method="kernel", extra={"ortho_coeffs": coeffs})
        A = np.vstack([v.real, v.imag])
        lam, vec = np.linalg.eigh(A @ A.T)
        bdir = vec[:, -1]
        coeffs = np.linalg.lstsq(A, bdir, rcond=None)[0]
        return ExtremalResult(1.0 / math.sqrt(lam[-1]), basis.monomial(coeffs), 0, basis.residual,
                              method="kernel-phase", extra={"ortho_coeffs": coeffs})
    if isinstance(z, float) or np.max(np.abs(v.imag)) <= 1e-14 * np.max(np.abs(v)):
        A = np.real(v)[None, :]
        c, J, it, r, _ = _solve(mu, norm, Phi, A, np.array([1.0]))
        return ExtremalResult(J, basis.monomial(c), it, r, method="irls" if norm.mode == "LP" else "lawson",
                              extra={"ortho_coeffs": c})
    c, J, it, r, th = _real_coeff_complex_z(mu, norm, Phi, v)
    return ExtremalResult(J, basis.monomial(c), it, r, method="phase-search", extra={"ortho_coeffs": c, "theta": th})


def complex_extremal(mu: DiscreteMeasure, norm: NormParam, z, n: int, basis: Optional[OrthoBasis] = None) -> float:
    """``1 / min ||p||`` over complex-coefficient ``p`` with ``p(z) = 1``."""
    if n >= mu.n_atoms:
        val, _ = _support_exceeded(mu, norm, z, n)
        return math.inf if val == 0.0 else 1.0 / val
    basis = basis if basis is not None and basis.degree >= n else ortho_basis(mu, n)
    v = basis.orthonormal(np.array([complex(z)]), n)[0]
    if norm.mode == "LP" and norm.p == 2.0:
        return float(math.sqrt(np.sum(np.abs(v) ** 2)))
    Phi = basis.values[:, : n + 1].astype(np.complex128)
    A = v[None, :]
    _, J, _, _, _ = _solve(mu, norm, Phi, A, np.array([1.0 + 0j]))
    return 1.0 / J


def M_n(mu: DiscreteMeasure, norm: NormParam, z, n: int, floor: float = RHO_FLOOR,
        basis: Optional[OrthoBasis] = None) -> ExtremalResult:
    """Largest ``|p(z)|`` over the unit ball, with the sandwich ``(1/rho, 2/rho)``."""
    r = rho_n(mu, norm, z, n, basis=basis)
    if r.value < floor:
        return ExtremalResult(None, r.minimizer, r.iters, r.residual, unbounded=True, method=r.method,
                              extra={"rho": r.value})
    lower, upper = 1.0 / r.value, 2.0 / r.value
    cval = complex_extremal(mu, norm, z, n, basis=basis)
    if norm.mode == "LP" and norm.p == 2.0:
        value = cval
    else:
        value = lower
    out = ExtremalResult(value, r.minimizer, r.iters, r.residual, sandwich=(lower, upper),
                         complex_value=cval, method=r.method, extra={"rho": r.value})
    unit = norm.norm_of_values(mu, np.ones(mu.n_atoms))
    if value * unit < 1.0 - 1e-9:
        raise InvariantViolation(f"M below the constant-polynomial bound: {value} < {1.0 / unit}")
    return out


def sandwich_holds(res: ExtremalResult, rel: float = 1e-6) -> bool:
    """Whether the independent complex value lies in ``[1/rho, 2/rho]``."""
    if res.unbounded or res.sandwich is None or res.complex_value is None:
        return res.unbounded
    lo, hi = res.sandwich
    c = res.complex_value
    return lo * (1 - rel) <= c <= hi * (1 + rel)


@dataclass
class RhoLimit:
    sequence: list
    limit_estimate: float
    verdict: str
    diagnostics: dict


def rho_sequence(mu: DiscreteMeasure, norm: NormParam, z, n_max: int) -> list:
    """``rho_0 .. rho_{n_max}``; one orthonormal basis is shared across degrees."""
    N = mu.n_atoms
    top = min(n_max, N - 1)
    basis = ortho_basis(mu, top)
    seq = []
    if norm.mode == "LP" and norm.p == 2.0 and not isinstance(z, complex):
        v = basis.orthonormal(np.array([float(z)]), top)[0]
        seq = list(1.0 / np.sqrt(np.cumsum(v ** 2)))
    else:
        seq = [rho_n(mu, norm, z, n, basis=basis).value for n in range(top + 1)]
    for n in range(top + 1, n_max + 1):
        seq.append(_support_exceeded(mu, norm, z, n)[0])
    return [float(s) for s in seq]


def classify_limit(seq: Sequence[float], stall_tol: float, floor: float = RHO_FLOOR) -> tuple:
    """Verdict for a nonincreasing sequence of extremal values."""
    n_max = len(seq) - 1
    last = seq[-1]
    diag = {"floor": floor, "stall_tol": stall_tol}
    if last < floor:
        hit = next(i for i, s in enumerate(seq) if s < floor)
        diag["converged_at"] = hit
        return "CONVERGED_TO_ZERO", 0.0, diag
    w = max(1, math.ceil(n_max / 4))
    start = seq[max(0, n_max - w)]
    dec = (start - last) / start if start > 0 else 0.0
    diag["window"] = w
    diag["relative_decrease"] = dec
    if n_max >= 1 and dec < stall_tol:
        return "PLATEAU", float(last), diag
    return "UNDECIDED", float(last), diag


def rho_limit(mu: DiscreteMeasure, norm: NormParam, mode: TiltMode | str, z, n_max: int,
              stall_tol: float, floor: float = RHO_FLOOR, alpha: Optional[float] = None) -> RhoLimit:
    """Extremal sequence on a tilted measure and its limit verdict."""
    alpha = norm.tilt_alpha if alpha is None else alpha
    nu = tilt(mu, alpha, mode)
    if norm.mode == "SUPW" and norm.weights is not None:
        raise ValueError("rho_limit in SUPW mode uses the tilted masses as weights")
    seq = rho_sequence(nu, norm, z, n_max)
    slack = 1e-9 if norm.mode == "LP" and norm.p == 2.0 else 1e-6
    for k in range(len(seq) - 1):
        if seq[k + 1] > seq[k] * (1 + slack) + 1e-300:
            raise InvariantViolation(f"rho sequence increases at n={k + 1}: {seq[k]} -> {seq[k + 1]}",
                                     detail={"n": k + 1})
    verdict, est, diag = classify_limit(seq, stall_tol, floor)
    diag["atoms"] = nu.n_atoms
    diag["tilt"] = TiltMode(mode).value
    diag["alpha"] = alpha
    return RhoLimit(seq, est, verdict, diag)


def check_monotone_y(mu: DiscreteMeasure, norm: NormParam, a: float, ys: Sequence[float], n: int) -> dict:
    """``M_n(mu, a+iy)`` is even in ``y`` and nondecreasing for ``y >= 0``."""
    ys = [float(y) for y in ys]
    if any(y < 0 for y in ys) or any(y2 <= y1 for y1, y2 in zip(ys, ys[1:])):
        raise ValueError("ys must be nonnegative and increasing")

    def mval(z):
        r = M_n(mu, norm, z, n)
        return math.inf if r.unbounded else r.value

    plus = [mval(complex(a, y)) for y in ys]
    minus = [mval(complex(a, -y)) for y in ys]
    for y, vp, vm in zip(ys, plus, minus):
        if not math.isclose(vp, vm, rel_tol=1e-12, abs_tol=0.0) and not (math.isinf(vp) and math.isinf(vm)):
            raise InvariantViolation(f"M_n not even in y at y={y}: {vp} vs {vm}", detail={"y": y})
    for (y1, v1), (y2, v2) in zip(zip(ys, plus), zip(ys[1:], plus[1:])):
        if v2 < v1 * (1 - 1e-12):
            raise InvariantViolation(f"M_n decreases between y={y1} and y={y2}: {v1} -> {v2}",
                                     detail={"pair": (y1, y2)})
    return {"ys": ys, "values": plus, "even": True, "nondecreasing": True}


def check_tilt_inequalities(mu: DiscreteMeasure, norm: NormParam, z, n: int, slack: float = 1e-9) -> dict:
    """Degree-shift inequalities between the two tilted measures."""
    if z == 0:
        raise ValueError("z must be nonzero")
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha = norm.tilt_alpha
    mu1 = tilt(mu, alpha, TiltMode.ALPHA)
    mu2 = tilt(mu, alpha, TiltMode.ALPHA2)
    az = abs(z)
    r2 = rho_n(mu2, norm, z, n - 1).value
    r1 = rho_n(mu1, norm, z, n).value
    ok_rho = r2 >= az * r1 * (1 - slack) - 1e-300
    m1 = M_n(mu1, norm, z, n)
    m2 = M_n(mu2, norm, z, n - 1)
    if m1.unbounded:
        ok_m = True
    elif m2.unbounded:
        ok_m = False
    else:
        ok_m = m1.value >= az * m2.value * (1 - slack)
    report = {"rho_alpha2_prev": r2, "abs_z_rho_alpha": az * r1,
              "M_alpha": None if m1.unbounded else m1.value,
              "abs_z_M_alpha2_prev": None if m2.unbounded else az * m2.value,
              "rho_ok": bool(ok_rho), "M_ok": bool(ok_m)}
    if not (ok_rho and ok_m):
        raise InvariantViolation("tilt inequality violated", detail=report)
    return report
