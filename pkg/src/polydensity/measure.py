"""Finitely supported positive measures, moments and tilts."""
from __future__ import annotations

import enum
import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptyMeasure, ParseError, ValidationError


class TiltMode(enum.Enum):
    PLAIN = "PLAIN"
    ALPHA = "ALPHA"
    ALPHA2 = "ALPHA2"


@dataclass(frozen=True)
class Atom:
    x: float
    mass: float


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Positive measure with finitely many atoms.

    Parameters
    ----------
    xs : ndarray
        Strictly increasing atom positions.
    masses : ndarray
        Positive masses aligned with ``xs``.
    """

    xs: np.ndarray
    masses: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        xs = np.array(self.xs, dtype=np.float64).ravel()
        ms = np.array(self.masses, dtype=np.float64).ravel()
        if xs.shape != ms.shape:
            raise ValidationError("xs and masses must have the same length")
        if xs.size == 0:
            raise EmptyMeasure("measure has no atoms")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ms))):
            raise ValidationError("atom positions and masses must be finite")
        bad = np.nonzero(ms <= 0)[0]
        if bad.size:
            raise ValidationError(f"atom {bad[0]}: mass must be positive, got {ms[bad[0]]!r}")
        if np.any(np.diff(xs) <= 0):
            i = int(np.nonzero(np.diff(xs) <= 0)[0][0])
            raise ValidationError(f"atoms {i} and {i + 1}: positions must be strictly increasing")
        xs.setflags(write=False)
        ms.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "masses", ms)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom | tuple]) -> "DiscreteMeasure":
        """Build from atoms in any order; positions are sorted then validated."""
        pairs = [(a.x, a.mass) if isinstance(a, Atom) else (float(a[0]), float(a[1])) for a in atoms]
        pairs.sort(key=lambda t: t[0])
        if not pairs:
            raise EmptyMeasure("measure has no atoms")
        xs, ms = zip(*pairs)
        return cls(np.array(xs), np.array(ms))

    @property
    def atoms(self) -> tuple:
        return tuple(Atom(float(x), float(m)) for x, m in zip(self.xs, self.masses))

    @property
    def n_atoms(self) -> int:
        return int(self.xs.size)

    @property
    def total_mass(self) -> float:
        return self.moments(0)[0]

    def _order(self):
        return np.lexsort((self.xs, np.abs(self.xs)))

    def _extend(self, key, n_max, absolute):
        with self._lock:
            seq = self._cache.setdefault(key, [])
            if len(seq) > n_max:
                return list(seq[: n_max + 1])
            order = self._order()
            xs = self.xs[order]
            ms = self.masses[order]
            base = np.abs(xs) if absolute else xs
            for k in range(len(seq), n_max + 1):
                seq.append(math.fsum((ms * base ** k).tolist()))
            return list(seq[: n_max + 1])

    def moments(self, n_max: int) -> list:
        """Signed power moments ``s_0..s_{n_max}``."""
        if n_max < 0:
            raise ValueError("n_max must be nonnegative")
        return self._extend("signed", n_max, absolute=False)

    def abs_moments(self, n_max: int) -> list:
        """Absolute moments ``sum m_i |x_i|^k``."""
        if n_max < 0:
            raise ValueError("n_max must be nonnegative")
        return self._extend("absolute", n_max, absolute=True)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.xs.copy(), self.masses * factor)

    def reflected(self) -> "DiscreteMeasure":
        return DiscreteMeasure(-self.xs[::-1], self.masses[::-1].copy())

    def union(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        return DiscreteMeasure.from_atoms(self.atoms + other.atoms)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.masses, other.masses)

    __hash__ = None


def moments(mu: DiscreteMeasure, n_max: int) -> list:
    return mu.moments(n_max)


def tilt(mu: DiscreteMeasure, alpha: float, mode: TiltMode | str) -> DiscreteMeasure:
    """Tilted measures ``mu / (1+|x|)^alpha`` and ``|x|^alpha mu / (1+|x|)^alpha``."""
    mode = TiltMode(mode)
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if mode is TiltMode.PLAIN:
        return mu
    ax = np.abs(mu.xs)
    scale = (1.0 + ax) ** (-alpha)
    if mode is TiltMode.ALPHA2:
        scale = scale * ax ** alpha
    m = mu.masses * scale
    keep = m > 0
    if not np.any(keep):
        raise EmptyMeasure("ALPHA2 tilt leaves no atoms (all mass sits at the origin)")
    return DiscreteMeasure(mu.xs[keep], m[keep])


def from_quadrature(
    density: Callable[[np.ndarray], np.ndarray],
    interval: Sequence[float],
    nodes: int,
    spacing: str = "linear",
) -> DiscreteMeasure:
    """Composite midpoint discretization of ``density`` on ``[a, b]``.

    With ``spacing="log"`` the midpoint rule is applied in ``t = log x`` so
    that atoms are geometrically spaced (requires ``a > 0``).
    """
    a, b = float(interval[0]), float(interval[1])
    if nodes < 2:
        raise ValueError("nodes must be >= 2")
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if spacing == "linear":
        h = (b - a) / nodes
        xs = a + h * (np.arange(nodes) + 0.5)
        ms = np.asarray(density(xs), dtype=np.float64) * h
    elif spacing == "log":
        if a <= 0:
            raise ValueError("log spacing needs a > 0")
        ta, tb = math.log(a), math.log(b)
        h = (tb - ta) / nodes
        ts = ta + h * (np.arange(nodes) + 0.5)
        xs = np.exp(ts)
        ms = np.asarray(density(xs), dtype=np.float64) * xs * h
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    if np.any(ms < 0) or not np.all(np.isfinite(ms)):
        raise ValidationError("density must be finite and nonnegative on the nodes")
    keep = ms > 0
    if not np.any(keep):
        raise EmptyMeasure("all node masses are zero")
    return DiscreteMeasure(xs[keep], ms[keep])


def gaussian_density(x):
    return np.exp(-np.asarray(x) ** 2)


def lognormal_density(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-0.5 * np.log(x[pos]) ** 2) / (x[pos] * math.sqrt(2 * math.pi))
    return out


DENSITIES = {"gaussian": gaussian_density, "lognormal": lognormal_density}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def measure_to_json(mu: DiscreteMeasure) -> str:
    rows = ",\n".join(f'    {{"x": {_fmt(x)}, "mass": {_fmt(m)}}}' for x, m in zip(mu.xs, mu.masses))
    return '{\n  "atoms": [\n' + rows + "\n  ]\n}\n"


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}: expected a number, got {v!r}")
    return float(v)


def measure_from_json(text: str, source: str = "<string>") -> DiscreteMeasure:
    """Parse the ``{"atoms": [{"x": .., "mass": ..}]}`` format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "atoms" not in data:
        raise ParseError(f"{source}: top level must be an object with field 'atoms'")
    atoms = data["atoms"]
    if not isinstance(atoms, list):
        raise ParseError(f"{source}: field 'atoms' must be an array")
    pairs = []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict):
            raise ParseError(f"{source}: atoms[{i}]: expected an object")
        for key in ("x", "mass"):
            if key not in a:
                raise ParseError(f"{source}: atoms[{i}]: missing field '{key}'")
        pairs.append((_number(a["x"], f"{source}: atoms[{i}].x"), _number(a["mass"], f"{source}: atoms[{i}].mass")))
    try:
        return DiscreteMeasure.from_atoms(pairs)
    except (ValidationError, EmptyMeasure) as exc:
        raise type(exc)(f"{source}: {exc}") from exc


def load_measure(path) -> DiscreteMeasure:
    with open(path, encoding="utf-8") as fh:
        return measure_from_json(fh.read(), source=str(path))


def save_measure(mu: DiscreteMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(measure_to_json(mu))
