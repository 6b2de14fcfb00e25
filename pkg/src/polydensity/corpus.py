"""Reference inputs used by the tests, the acceptance suite and the CLI."""
from __future__ import annotations

import math

import numpy as np

from .entire import EntireFn, TailModel
from .measure import DiscreteMeasure, from_quadrature, gaussian_density, lognormal_density


def sinc(pairs: int = 10_000) -> EntireFn:
    """``sin(pi z)/(pi z)``: zeros at the nonzero integers up to ``pairs``."""
    k = np.arange(1, pairs + 1, dtype=np.float64)
    xs = np.concatenate([-k[::-1], k])
    return EntireFn.from_zeros(xs, tail=TailModel(1.0, 2.0, symmetric=True), radius=float(pairs))


def cos_type(pairs: int = 10_000) -> EntireFn:
    """``cos(pi z)``: zeros at the half-integers."""
    k = np.arange(1, pairs + 1, dtype=np.float64) - 0.5
    xs = np.concatenate([-k[::-1], k])
    # n(r) = 2r + 1 at the stored zeros, so the coefficient sits just above 2
    return EntireFn.from_zeros(xs, tail=TailModel(1.0, 2.01, symmetric=True), radius=float(pairs))


def lacunary(kmax: int = 30) -> EntireFn:
    """Zeros ``+-2^k`` for ``k = 1..kmax`` (genus 0, minimal type)."""
    k = 2.0 ** np.arange(1, kmax + 1)
    xs = np.concatenate([-k[::-1], k])
    # n(r) = 2 log2(r) <= 11 r^0.1 for all r >= 1
    return EntireFn.from_zeros(xs, tail=TailModel(0.1, 11.0, symmetric=True), radius=float(k[-1]))


def asymmetric(L: int = 100) -> EntireFn:
    """Finite genus-1 product with zeros ``1..L`` and ``-2, -4, .., -2L``.

    The exponential coefficient cancels the convergence factors, so the
    function is the polynomial ``prod (1 - z/lam)``.
    """
    pos = np.arange(1, L + 1, dtype=np.float64)
    neg = -2.0 * np.arange(1, L + 1, dtype=np.float64)
    xs = np.concatenate([neg[::-1], pos])
    a = -math.fsum((1.0 / xs).tolist())
    return EntireFn.from_zeros(xs, genus=1, a=a, complete=True)


def integer_zeros(n: int = 50) -> EntireFn:
    """Polynomial with simple zeros at ``+-1..+-n``."""
    k = np.arange(1, n + 1, dtype=np.float64)
    return EntireFn.polynomial(np.concatenate([-k[::-1], k]))


ENTIRE = {"sinc": sinc, "cos_type": cos_type, "lacunary": lacunary, "asymmetric": asymmetric,
          "integer": integer_zeros}


def lognormal_measure(nodes: int = 400) -> DiscreteMeasure:
    """Log-normal density discretized on geometric nodes over ``[e^-20, e^20]``."""
    return from_quadrature(lognormal_density, (math.exp(-20), math.exp(20)), nodes, spacing="log")


def hermite_measure(nodes: int = 200) -> DiscreteMeasure:
    """``e^{-x^2}`` discretized on ``[-6, 6]``."""
    return from_quadrature(gaussian_density, (-6.0, 6.0), nodes)


def random_measures(count: int, seed: int = 0, atoms=(3, 12)) -> list:
    """Random finite measures with log-uniform masses."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(atoms[0], atoms[1] + 1))
        xs = np.sort(rng.choice(np.arange(-40, 41), size=n, replace=False) / 4.0)
        ms = np.exp(rng.uniform(-3, 1, size=n))
        out.append(DiscreteMeasure(xs, ms))
    return out


MEASURES = {"lognormal": lognormal_measure, "hermite": hermite_measure}
