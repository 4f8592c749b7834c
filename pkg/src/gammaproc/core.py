"""Shared types, parameter validation, time grids and reproducible random streams.

Conventions used throughout the package:

* ``Ga(alpha, beta)`` is the gamma law with *shape* ``alpha`` and *rate*
  ``beta`` (mean ``alpha/beta``, variance ``alpha/beta**2``).
* Temporal dependence is exponential: ``corr(X_s, X_t) = exp(-lam*|s-t|)``.
  The unit-lag autocorrelation is ``rho = exp(-lam)``; the correlation over a
  gap ``d`` is computed as ``rho**d`` everywhere (identical to
  ``exp(-lam*d)``, but exact under the CLI's rho/lambda equivalence).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterError",
    "NumericalError",
    "UnsupportedKindError",
    "GammaParams",
    "Dependence",
    "TimeGrid",
    "make_uniform_grid",
    "SamplePath",
    "Ensemble",
    "ProcessKind",
    "RandomSource",
    "derive_stream",
]


class ParameterError(ValueError):
    """A parameter is outside its documented domain."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its advertised accuracy."""


class UnsupportedKindError(ParameterError):
    """The requested operation has no implementation for this process kind."""


def _require_finite_positive(name, value):
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return v


@dataclass(frozen=True)
class GammaParams:
    """Marginal gamma parameters, shape/rate convention.

    Parameters
    ----------
    alpha : float
        Shape, > 0.
    beta : float
        Rate, > 0.  Mean is ``alpha/beta``, variance ``alpha/beta**2``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _require_finite_positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _require_finite_positive("beta", self.beta))

    @property
    def mean(self):
        return self.alpha / self.beta

    @property
    def var(self):
        return self.alpha / self.beta**2


@dataclass(frozen=True)
class Dependence:
    """Exponential autocorrelation ``exp(-lam*|s-t|)``.

    ``lam`` is the canonical stored parameter; ``rho = exp(-lam)`` (the
    autocorrelation at unit lag) is derived once at construction.  Use
    :meth:`from_rho` to construct from ``rho`` instead; in that case the given
    ``rho`` is stored exactly and ``lam = -log(rho)`` is the derived one, so
    ``from_rho(math.exp(-L))`` and ``Dependence(L)`` drive identical
    simulations (all samplers consume ``rho``).
    """

    lam: float
    rho: float = field(init=False)

    def __post_init__(self):
        lam = _require_finite_positive("lam", self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "rho", math.exp(-lam))

    @classmethod
    def from_rho(cls, rho):
        r = float(rho)
        if not (0.0 < r < 1.0) or not math.isfinite(r):
            raise ParameterError(f"rho must lie strictly in (0, 1), got {rho!r}")
        dep = cls(-math.log(r))
        object.__setattr__(dep, "rho", r)
        return dep

    def gap_corr(self, delta):
        """Correlation over a time gap ``delta`` (scalar or array), ``rho**delta``."""
        return self.rho ** np.asarray(delta, dtype=float) if np.ndim(delta) else self.rho ** float(delta)


@dataclass(frozen=True)
class TimeGrid:
    """A finite, strictly increasing set of observation times."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ParameterError("grid must be a non-empty 1-D array of times")
        if not np.all(np.isfinite(t)):
            raise ParameterError("grid times must all be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise ParameterError("grid times must be strictly increasing")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @property
    def n(self):
        return int(self.times.size)

    @property
    def gaps(self):
        """Consecutive time differences, length ``n - 1``."""
        return np.diff(self.times)

    def __len__(self):
        return self.n


def make_uniform_grid(t0, dt, n):
    """Uniform grid ``t0 + k*dt`` for ``k = 0..n-1``.

    >>> make_uniform_grid(2.5, 0.5, 4).times.tolist()
    [2.5, 3.0, 3.5, 4.0]
    """
    if not math.isfinite(float(t0)):
        raise ParameterError(f"t0 must be finite, got {t0!r}")
    dt = _require_finite_positive("dt", dt)
    n = int(n)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return TimeGrid(float(t0) + dt * np.arange(n))


class ProcessKind(enum.Enum):
    """The six stationary gamma constructions distinguished by this package."""

    AR1 = "ar1"
    THINNED = "thinned"
    RANDOM_MEASURE = "rm"
    CHANGE_POINT = "changepoint"
    SQUARED_OU = "cir"
    CONTINUOUSLY_THINNED = "cthin"

    @property
    def cli_name(self):
        return self.value

    @classmethod
    def parse(cls, name):
        for kind in cls:
            if kind.value == name:
                return kind
        raise ParameterError(
            f"unknown process {name!r}; expected one of "
            + ", ".join(k.value for k in cls)
        )


@dataclass(frozen=True)
class SamplePath:
    """One realization observed on a grid."""

    grid: TimeGrid
    values: np.ndarray
    kind: ProcessKind

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ParameterError(
                f"values shape {v.shape} does not match grid length {self.grid.n}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Ensemble:
    """Independent paths on one grid.

    ``values[m, k]`` is path ``m`` at grid time ``k``.  Path ``m`` is a pure
    function of ``(master_seed, m)``: it is simulated from the stream
    ``derive_stream(master_seed, m)`` regardless of how many other paths exist
    or how work is scheduled across threads.
    """

    grid: TimeGrid
    kind: ProcessKind
    values: np.ndarray
    master_seed: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.grid.n:
            raise ParameterError(
                f"values must have shape (n_paths, {self.grid.n}), got {v.shape}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_paths(self):
        return int(self.values.shape[0])

    def path(self, m):
        return SamplePath(self.grid, self.values[m], self.kind)

    def __iter__(self):
        return (self.path(m) for m in range(self.n_paths))


_U64 = (1 << 64) - 1


class RandomSource:
    """A deterministic random stream identified by ``(master_seed, stream_index)``.

    Backed by the counter-based Philox generator with the two identifiers as
    its 64-bit key words, so equal identifiers give the identical word
    sequence on every platform and under any thread schedule, and distinct
    identifiers give statistically independent streams.
    """

    __slots__ = ("master_seed", "stream_index", "gen")

    def __init__(self, master_seed, stream_index=0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        key = np.array(
            [self.master_seed & _U64, self.stream_index & _U64], dtype=np.uint64
        )
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def words(self, n):
        """The next ``n`` raw 64-bit words of the stream."""
        return self.gen.integers(0, 1 << 64, size=int(n), dtype=np.uint64)

    def __repr__(self):
        return f"RandomSource(master_seed={self.master_seed}, stream_index={self.stream_index})"


def derive_stream(master_seed, stream_index):
    """Stream ``stream_index`` of the family keyed by ``master_seed``."""
    return RandomSource(master_seed, stream_index)
