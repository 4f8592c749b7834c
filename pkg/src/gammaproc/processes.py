"""Path construction for the six stationary Ga(alpha, beta) processes.

Every sampler here produces the same marginal law Ga(alpha, beta) and the same
autocorrelation rho**|s-t| (rho = exp(-lam)); the constructions differ in
their joint laws beyond second order, which is the whole point of the package.

Reproducibility contract
------------------------
Each path operation consumes draws from its ``RandomSource`` in a fixed,
documented order, so a path is a deterministic function of the stream.
``simulate_ensemble`` gives path ``m`` the stream ``derive_stream(master_seed,
m)``; the result is therefore independent of thread count and of how many
paths are simulated.

The ``*_sample`` batch helpers at the bottom draw i.i.d. copies of small
marginal/pair/triplet configurations from a *single* stream with vectorized
stage-by-stage draws.  They exist because statistical verification needs
10^5 - 10^6 independent replicates, for which per-path stream setup dominates
runtime; each helper documents why its construction has exactly the law of the
corresponding path operation restricted to those times.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    Dependence,
    Ensemble,
    GammaParams,
    NumericalError,
    ParameterError,
    ProcessKind,
    RandomSource,
    SamplePath,
    TimeGrid,
    UnsupportedKindError,
    derive_stream,
)
from .samplers import cir_transition_draw, gamma_draw

__all__ = [
    "TentPartition",
    "tent_partition",
    "ar1_path",
    "thinned_path",
    "random_measure_path",
    "changepoint_path",
    "CirMethod",
    "cir_path",
    "CthinConfig",
    "cthin_path",
    "simulate_ensemble",
    "walker_sample",
    "marginal_sample",
    "pair_sample",
    "triplet_sample",
]

# Blocks whose pair correlation falls below this are dropped by the
# random-measure *path* sampler (their Ga(shape < 1e-18, beta) cell draws are
# exactly 0.0 in double precision with overwhelming probability).  The
# tent_partition operation itself keeps every block.
_BAND_CUTOFF = 1e-18


def _band_masses(times, rho, d):
    """Masses m(i, i+d) of the tent partition along diagonal offset d.

    With A(i, j) = rho**(t_j - t_i) (the overlap area of the unit-area tent
    sets at t_i and t_j), inclusion-exclusion over the nested neighbours gives

        m(i, j) = A(i, j) - A(i-1, j) - A(i, j+1) + A(i-1, j+1),

    where out-of-range terms are dropped.
    """
    n = len(times)
    a_d = rho ** (times[d:] - times[: n - d])
    m = a_d.copy()
    if d + 1 <= n - 1:
        a_d1 = rho ** (times[d + 1 :] - times[: n - d - 1])
        m[1:] -= a_d1  # A(i-1, j), i = 1..n-1-d
        m[: n - d - 1] -= a_d1  # A(i, j+1), i = 0..n-2-d
    if d + 2 <= n - 1:
        a_d2 = rho ** (times[d + 2 :] - times[: n - d - 2])
        m[1 : n - d - 1] += a_d2  # A(i-1, j+1), i = 1..n-2-d
    return m


@dataclass(frozen=True)
class TentPartition:
    """Complete partition masses for a grid: ``masses[i, j]`` for i <= j, else 0.

    Row sums over the blocks containing k are exactly 1 (each X_{t_k} is
    Ga(alpha, beta)); the blocks containing both k and l sum to
    rho**(t_l - t_k) (the pair overlap), which fixes the autocorrelation.
    """

    grid: TimeGrid
    dep: Dependence
    masses: np.ndarray

    def row_sum(self, k):
        """Total mass of blocks whose interval [i, j] contains k."""
        return float(np.sum(self.masses[: k + 1, k:]))

    def pair_sum(self, k, l):
        """Total mass of blocks containing both k and l (k <= l)."""
        if k > l:
            k, l = l, k
        return float(np.sum(self.masses[: k + 1, l:]))


def tent_partition(grid: TimeGrid, dep: Dependence) -> TentPartition:
    """The exact tent-set partition of the grid (all n(n+1)/2 blocks).

    Interior blocks factor as
    m(i, j) = rho**(t_j - t_i) (1 - rho**(t_i - t_{i-1})) (1 - rho**(t_{j+1} - t_j)),
    so all masses are nonnegative; tiny negative rounding residues from the
    inclusion-exclusion are clamped to zero.
    """
    times = grid.times
    n = grid.n
    masses = np.zeros((n, n))
    for d in range(n):
        m = _band_masses(times, dep.rho, d)
        lo = float(np.min(m)) if m.size else 0.0
        if lo < -1e-9:
            raise NumericalError(
                f"tent partition produced mass {lo} < 0 on diagonal {d}"
            )
        idx = np.arange(n - d)
        masses[idx, idx + d] = np.maximum(m, 0.0)
    out = masses
    out.setflags(write=False)
    return TentPartition(grid=grid, dep=dep, masses=out)


def _require_positive_int(name, value):
    v = int(value)
    if v < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    return v


# -- the six path samplers -------------------------------------------------


def ar1_path(rng: RandomSource, grid: TimeGrid, params: GammaParams, dep: Dependence) -> SamplePath:
    """Gamma AR(1): X_{t_k} = rho_k X_{t_{k-1}} + zeta_k.

    The innovation for a gap with correlation rho_k is the gamma-Poisson-gamma
    ladder of ``walker_innovation_draw`` (mixing L ~ Ga(alpha, 1), count
    N ~ Po(((1-rho_k)/rho_k) L), value ~ Ga(N, beta/rho_k)); here the three
    stages are drawn vectorized over steps (stream order: X_0, all L, all N,
    all values), then the recursion runs sequentially so that each step is
    literally fl(rho_k * x + zeta_k).
    """
    n = grid.n
    x = gamma_draw(rng, params.alpha, params.beta)
    values = np.empty(n)
    values[0] = x
    if n > 1:
        rho_g = dep.rho ** grid.gaps
        mixing = rng.gen.gamma(params.alpha, 1.0, size=n - 1)
        counts = rng.gen.poisson((1.0 - rho_g) / rho_g * mixing)
        zeta = rng.gen.gamma(counts, rho_g / params.beta)
        for k in range(1, n):
            x = rho_g[k - 1] * x + zeta[k - 1]
            values[k] = x
    return SamplePath(grid, values, ProcessKind.AR1)


def thinned_path(rng: RandomSource, grid: TimeGrid, params: GammaParams, dep: Dependence) -> SamplePath:
    """Thinned recursion: X_{t_k} = B_k X_{t_{k-1}} + zeta_k.

    B_k ~ Be(alpha rho_k, alpha (1 - rho_k)) thins the previous value
    (beta-gamma decomposition: B X ~ Ga(alpha rho_k, beta) when
    X ~ Ga(alpha, beta)) and zeta_k ~ Ga(alpha (1 - rho_k), beta) replaces the
    removed mass.  Stream order: X_0, the numerator gammas of all B_k, the
    denominator gammas, all zeta_k.
    """
    n = grid.n
    x = gamma_draw(rng, params.alpha, params.beta)
    values = np.empty(n)
    values[0] = x
    if n > 1:
        rho_g = dep.rho ** grid.gaps
        g1 = rng.gen.gamma(params.alpha * rho_g, 1.0)
        g2 = rng.gen.gamma(params.alpha * (1.0 - rho_g), 1.0)
        b = g1 / (g1 + g2)
        zeta = rng.gen.gamma(params.alpha * (1.0 - rho_g), 1.0 / params.beta)
        for k in range(1, n):
            x = b[k - 1] * x + zeta[k - 1]
            values[k] = x
    return SamplePath(grid, values, ProcessKind.THINNED)


def random_measure_path(rng: RandomSource, grid: TimeGrid, params: GammaParams, dep: Dependence) -> SamplePath:
    """Exact grid observation of the random-measure process.

    One independent cell variable zeta(i, j) ~ Ga(alpha m(i, j), beta) per
    partition block, X_{t_k} = sum of the cells whose interval contains k.
    Blocks with pair correlation below 1e-18 are dropped (their draws are 0.0
    in double precision); this keeps the cost O(n * horizon) instead of
    O(n^2).  Stream order: one vectorized gamma draw per diagonal d = 0, 1, ...
    """
    times = grid.times
    n = grid.n
    values = np.zeros(n)
    k = np.arange(n)
    for d in range(n):
        a_d = dep.rho ** (times[d:] - times[: n - d])
        if not np.any(a_d >= _BAND_CUTOFF):
            break
        m = np.maximum(_band_masses(times, dep.rho, d), 0.0)
        zeta = rng.gen.gamma(params.alpha * m, 1.0 / params.beta)
        csum = np.concatenate(([0.0], np.cumsum(zeta)))
        hi = np.minimum(k, n - 1 - d) + 1
        lo = np.maximum(0, k - d)
        values += csum[hi] - csum[np.maximum(lo, 0)]
    return SamplePath(grid, values, ProcessKind.RANDOM_MEASURE)


def changepoint_path(rng: RandomSource, grid: TimeGrid, params: GammaParams, dep: Dependence) -> SamplePath:
    """Markov change-point process: piecewise constant, renewed by a Poisson clock.

    Over a gap with correlation rho_k the value is kept with probability
    rho_k (no clock event) and otherwise replaced by a fresh Ga(alpha, beta)
    variate (the value after the last event in the gap, which is independent
    of everything earlier).  Stream order: X_0, all keep-uniforms, all fresh
    values (fresh values are drawn unconditionally to keep the stream layout
    branch-free).
    """
    n = grid.n
    x0 = gamma_draw(rng, params.alpha, params.beta)
    if n == 1:
        return SamplePath(grid, np.array([x0]), ProcessKind.CHANGE_POINT)
    rho_g = dep.rho ** grid.gaps
    keep = rng.gen.random(n - 1) < rho_g
    fresh = rng.gen.gamma(params.alpha, 1.0 / params.beta, size=n - 1)
    pool = np.concatenate(([x0], fresh))
    idx = np.concatenate(([0], np.cumsum(~keep)))
    return SamplePath(grid, pool[idx], ProcessKind.CHANGE_POINT)


class CirMethod(enum.Enum):
    """Sampling scheme for the squared Ornstein-Uhlenbeck (CIR-type) diffusion."""

    EXACT = "exact"
    EULER = "euler"
    SQUARED_OU = "squared-ou"

    @classmethod
    def parse(cls, name):
        for m in cls:
            if m.value == name:
                return m
        raise ParameterError(
            f"unknown cir method {name!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


def cir_path(
    rng: RandomSource,
    grid: TimeGrid,
    params: GammaParams,
    dep: Dependence,
    method: CirMethod = CirMethod.EXACT,
    substeps: int = 16,
) -> SamplePath:
    """Squared OU / CIR-type diffusion dX = -lam (X - alpha/beta) dt + sqrt(2 lam X / beta) dW.

    method=EXACT samples the transition kernel exactly (Poisson mixture of
    gammas) gap by gap.  method=EULER uses ``substeps`` full-truncation Euler
    steps per gap (the diffusion coefficient reads max(X, 0); the state may
    make small negative excursions).  method=SQUARED_OU requires 2*alpha to be
    an integer J and evolves J independent OU coordinates exactly, returning
    sum Z_j^2 / (2 beta); no substeps are needed because the OU update is
    exact over any gap.
    """
    n = grid.n
    a, b = params.alpha, params.beta
    values = np.empty(n)
    if method is CirMethod.EXACT:
        x = gamma_draw(rng, a, b)
        values[0] = x
        for k in range(1, n):
            x = cir_transition_draw(rng, params, dep, x, grid.times[k] - grid.times[k - 1])
            values[k] = x
        return SamplePath(grid, values, ProcessKind.SQUARED_OU)
    if method is CirMethod.EULER:
        m = _require_positive_int("substeps", substeps)
        x = gamma_draw(rng, a, b)
        values[0] = x
        mean = a / b
        sig2 = 2.0 * dep.lam / b
        if n > 1:
            z = rng.gen.standard_normal((n - 1) * m)
            pos = 0
            for k in range(1, n):
                h = (grid.times[k] - grid.times[k - 1]) / m
                sqh = math.sqrt(h)
                for j in range(m):
                    x = x - dep.lam * (x - mean) * h + math.sqrt(sig2 * max(x, 0.0)) * sqh * z[pos]
                    pos += 1
                values[k] = x
        return SamplePath(grid, values, ProcessKind.SQUARED_OU)
    if method is CirMethod.SQUARED_OU:
        j = round(2.0 * a)
        if abs(2.0 * a - j) > 1e-9 or j < 1:
            raise ParameterError(
                f"the squared-OU construction requires 2*alpha to be a positive integer, got alpha={a}"
            )
        z = rng.gen.standard_normal(j)
        values[0] = np.sum(z * z) / (2.0 * b)
        if n > 1:
            noise = rng.gen.standard_normal((n - 1, j))
            half = dep.rho ** (grid.gaps / 2.0)
            for k in range(1, n):
                ak = half[k - 1]
                z = ak * z + math.sqrt(1.0 - ak * ak) * noise[k - 1]
                values[k] = np.sum(z * z) / (2.0 * b)
        return SamplePath(grid, values, ProcessKind.SQUARED_OU)
    raise ParameterError(f"unknown cir method {method!r}")


@dataclass(frozen=True)
class CthinConfig:
    """Lattice resolution for the continuously-thinned process (steps per unit time)."""

    steps_per_unit: int = 256

    def __post_init__(self):
        object.__setattr__(
            self, "steps_per_unit", _require_positive_int("steps_per_unit", self.steps_per_unit)
        )


def _cthin_lattice_indices(grid: TimeGrid, eps):
    rel = grid.times - grid.times[0]
    idx = np.rint(rel / eps).astype(np.int64)
    if not np.all(np.abs(rel - idx * eps) <= 1e-9 * np.maximum(1.0, np.abs(rel))):
        raise ParameterError(
            "grid times must lie on the continuously-thinned lattice "
            f"(multiples of 1/{round(1.0 / eps)} from the first time)"
        )
    return idx


def _affine_scan_blocks(a, z, x0, out=None):
    """Sequential-in-law evaluation of x_k = a_k x_{k-1} + z_k, vectorized in blocks.

    Within a block, x_k = P_k (x_prev + sum_{i<=k} z_i / P_i) with
    P = cumprod(a); since every a_i lies in [0, 1] the ratios P_k / P_i never
    exceed 1, and a block falls back to the plain loop only when its prefix
    product underflows (a near-zero thinning factor landed inside it).
    """
    n = a.size
    if out is None:
        out = np.empty(n)
    x = x0
    for s in range(0, n, 1024):
        e = min(s + 1024, n)
        ab = a[s:e]
        p = np.cumprod(ab)
        if p[-1] > 1e-280:
            c = np.cumsum(z[s:e] / p)
            out[s:e] = p * (x + c)
            x = out[e - 1]
        else:
            for i in range(s, e):
                x = a[i] * x + z[i]
                out[i] = x
    return out


def cthin_path(
    rng: RandomSource,
    grid: TimeGrid,
    params: GammaParams,
    dep: Dependence,
    config: CthinConfig = CthinConfig(),
) -> SamplePath:
    """Continuously-thinned process on its eps-lattice, recorded at the grid times.

    With eps = 1/steps_per_unit, q = rho**eps and p = 1 - q, each lattice step
    applies an independent thinning b ~ Be(alpha p, alpha q) and top-up
    zeta ~ Ga(alpha p, beta):

        X_{k eps} = (1 - b_k) X_{(k-1) eps} + zeta_k.

    Every lattice point is exactly Ga(alpha, beta) ((1-b) X ~ Ga(alpha q, beta)
    by the beta-gamma decomposition) and the lattice autocorrelation is exactly
    q per step; the discretization only approximates the limiting process in
    its higher-order joint laws.  Grid times must be lattice-aligned.  Stream
    order: X_0, then per simulation chunk the two beta-stage gamma vectors
    followed by the top-up gamma vector.
    """
    eps = 1.0 / config.steps_per_unit
    idx = _cthin_lattice_indices(grid, eps)
    n_steps = int(idx[-1])
    a, b = params.alpha, params.beta
    q = dep.rho**eps
    p = 1.0 - q
    x = gamma_draw(rng, a, b)
    values = np.empty(grid.n)
    pos = 0
    if idx[0] == 0:
        values[0] = x
        pos = 1
    chunk = 1 << 18
    done = 0
    buf = np.empty(min(chunk, max(n_steps, 1)))
    while done < n_steps:
        k = min(chunk, n_steps - done)
        g1 = rng.gen.gamma(a * p, 1.0, size=k)
        g2 = rng.gen.gamma(a * q, 1.0, size=k)
        s = g1 + g2
        thin = np.where(s > 0.0, g1 / np.where(s > 0.0, s, 1.0), p)
        zeta = rng.gen.gamma(a * p, 1.0 / b, size=k)
        out = _affine_scan_blocks(1.0 - thin, zeta, x, out=buf[:k])
        while pos < grid.n and idx[pos] <= done + k:
            values[pos] = out[idx[pos] - done - 1]
            pos += 1
        x = out[-1]
        done += k
    return SamplePath(grid, values, ProcessKind.CONTINUOUSLY_THINNED)


# -- ensembles ---------------------------------------------------------------


def _path_for_kind(kind, rng, grid, params, dep, method, substeps, cthin):
    if kind is ProcessKind.AR1:
        return ar1_path(rng, grid, params, dep)
    if kind is ProcessKind.THINNED:
        return thinned_path(rng, grid, params, dep)
    if kind is ProcessKind.RANDOM_MEASURE:
        return random_measure_path(rng, grid, params, dep)
    if kind is ProcessKind.CHANGE_POINT:
        return changepoint_path(rng, grid, params, dep)
    if kind is ProcessKind.SQUARED_OU:
        return cir_path(rng, grid, params, dep, method=method, substeps=substeps)
    if kind is ProcessKind.CONTINUOUSLY_THINNED:
        return cthin_path(rng, grid, params, dep, config=cthin)
    raise UnsupportedKindError(f"cannot simulate kind {kind!r}")


def simulate_ensemble(
    kind: ProcessKind,
    grid: TimeGrid,
    params: GammaParams,
    dep: Dependence,
    n_paths: int,
    master_seed: int,
    method: CirMethod = CirMethod.EXACT,
    substeps: int = 16,
    cthin: CthinConfig = CthinConfig(),
    threads: int = 1,
) -> Ensemble:
    """Simulate ``n_paths`` independent paths; path m uses stream (master_seed, m).

    The per-path streams make the output independent of ``threads`` (worker
    threads only partition the index range) and of ``n_paths`` itself: a
    longer run extends a shorter one path for path.
    """
    n_paths = _require_positive_int("n_paths", n_paths)
    threads = _require_positive_int("threads", threads)
    values = np.empty((n_paths, grid.n))

    def run(m):
        rng = derive_stream(master_seed, m)
        values[m] = _path_for_kind(kind, rng, grid, params, dep, method, substeps, cthin).values

    if threads == 1:
        for m in range(n_paths):
            run(m)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_paths)))
    return Ensemble(grid=grid, kind=kind, values=values, master_seed=int(master_seed))


# -- vectorized i.i.d. batch samplers (verification workhorses) ---------------


def walker_sample(n, params: GammaParams, rho_step, master_seed):
    """n i.i.d. AR(1) innovations at per-step rho (vectorized ladder stages)."""
    rho = float(rho_step)
    if not (0.0 < rho < 1.0):
        raise ParameterError(f"rho_step must lie strictly in (0, 1), got {rho_step!r}")
    g = derive_stream(master_seed, 0).gen
    n = _require_positive_int("n", n)
    mixing = g.gamma(params.alpha, 1.0, size=n)
    counts = g.poisson((1.0 - rho) / rho * mixing)
    return g.gamma(counts, rho / params.beta)


def _rm_triplet_shapes(params, rho_g):
    """Partition shapes for the three-point uniform grid [0, d, 2d]."""
    r = rho_g
    return {
        (0, 0): 1.0 - r,
        (1, 1): (1.0 - r) ** 2,
        (2, 2): 1.0 - r,
        (0, 1): r - r * r,
        (1, 2): r - r * r,
        (0, 2): r * r,
    }


def marginal_sample(
    kind: ProcessKind,
    n,
    params: GammaParams,
    dep: Dependence,
    master_seed,
    gap=1.0,
    method: CirMethod = CirMethod.EXACT,
    cthin: CthinConfig = CthinConfig(),
    cthin_units=0.25,
    euler_burn=12.0,
    substeps=16,
):
    """n i.i.d. copies of X at a fixed time, after the kind's own update mechanism.

    Each lane runs the same recursion as the corresponding path operation
    (two update steps over gaps of length ``gap`` for the discrete recursions;
    for the continuously-thinned process ``cthin_units`` time units of lattice
    steps; for Euler a burn-in of ``euler_burn`` autocorrelation times), so a
    lane value has exactly the law of a path value at that time.
    """
    n = _require_positive_int("n", n)
    g = derive_stream(master_seed, 0).gen
    a, b = params.alpha, params.beta
    rho_g = dep.rho ** float(gap)
    if kind is ProcessKind.AR1:
        x = g.gamma(a, 1.0 / b, size=n)
        for _ in range(2):
            mixing = g.gamma(a, 1.0, size=n)
            counts = g.poisson((1.0 - rho_g) / rho_g * mixing)
            x = rho_g * x + g.gamma(counts, rho_g / b)
        return x
    if kind is ProcessKind.THINNED:
        x = g.gamma(a, 1.0 / b, size=n)
        for _ in range(2):
            g1 = g.gamma(a * rho_g, 1.0, size=n)
            g2 = g.gamma(a * (1.0 - rho_g), 1.0, size=n)
            x = g1 / (g1 + g2) * x + g.gamma(a * (1.0 - rho_g), 1.0 / b, size=n)
        return x
    if kind is ProcessKind.RANDOM_MEASURE:
        shapes = _rm_triplet_shapes(params, rho_g)
        x = np.zeros(n)
        for block in [(2, 2), (1, 2), (0, 2)]:  # blocks containing the last time
            x += g.gamma(a * shapes[block], 1.0 / b, size=n)
        return x
    if kind is ProcessKind.CHANGE_POINT:
        x = g.gamma(a, 1.0 / b, size=n)
        for _ in range(2):
            keep = g.random(n) < rho_g
            fresh = g.gamma(a, 1.0 / b, size=n)
            x = np.where(keep, x, fresh)
        return x
    if kind is ProcessKind.SQUARED_OU:
        if method is CirMethod.EXACT:
            x = g.gamma(a, 1.0 / b, size=n)
            c = b / (1.0 - rho_g)
            for _ in range(2):
                k = g.poisson(c * x * rho_g)
                x = g.gamma(a + k, 1.0 / c, size=n)
            return x
        if method is CirMethod.SQUARED_OU:
            j = round(2.0 * a)
            if abs(2.0 * a - j) > 1e-9 or j < 1:
                raise ParameterError(
                    f"the squared-OU construction requires 2*alpha to be a positive integer, got alpha={a}"
                )
            z = g.standard_normal((n, j))
            half = dep.rho ** (float(gap) / 2.0)
            for _ in range(2):
                z = half * z + math.sqrt(1.0 - half * half) * g.standard_normal((n, j))
            return np.sum(z * z, axis=1) / (2.0 * b)
        if method is CirMethod.EULER:
            m = _require_positive_int("substeps", substeps)
            h = float(gap) / m
            n_steps = int(math.ceil(float(euler_burn) / dep.lam / h))
            x = g.gamma(a, 1.0 / b, size=n)
            mean = a / b
            sig = math.sqrt(2.0 * dep.lam / b)
            sqh = math.sqrt(h)
            for _ in range(n_steps):
                x = x - dep.lam * (x - mean) * h + sig * np.sqrt(
                    np.maximum(x, 0.0)
                ) * sqh * g.standard_normal(n)
            return x
        raise ParameterError(f"unknown cir method {method!r}")
    if kind is ProcessKind.CONTINUOUSLY_THINNED:
        eps = 1.0 / cthin.steps_per_unit
        n_steps = int(round(float(cthin_units) * cthin.steps_per_unit))
        q = dep.rho**eps
        p = 1.0 - q
        x = g.gamma(a, 1.0 / b, size=n)
        for _ in range(n_steps):
            g1 = g.gamma(a * p, 1.0, size=n)
            g2 = g.gamma(a * q, 1.0, size=n)
            s = g1 + g2
            thin = np.where(s > 0.0, g1 / np.where(s > 0.0, s, 1.0), p)
            x = (1.0 - thin) * x + g.gamma(a * p, 1.0 / b, size=n)
        return x
    raise UnsupportedKindError(f"cannot sample marginals for kind {kind!r}")


def pair_sample(kind: ProcessKind, n, params: GammaParams, dep: Dependence, master_seed, gap=1.0):
    """n i.i.d. copies of the consecutive pair (X_0, X_gap); exact-law constructions.

    AR1/Thinned/ChangePoint apply one recursion step to a stationary start;
    the random-measure pair is assembled from its 3-block two-point partition
    (shared block Ga(alpha rho_g, beta) plus two private Ga(alpha (1-rho_g),
    beta) blocks); SquaredOU applies one exact transition draw.
    """
    n = _require_positive_int("n", n)
    g = derive_stream(master_seed, 0).gen
    a, b = params.alpha, params.beta
    rho_g = dep.rho ** float(gap)
    if kind is ProcessKind.AR1:
        x0 = g.gamma(a, 1.0 / b, size=n)
        mixing = g.gamma(a, 1.0, size=n)
        counts = g.poisson((1.0 - rho_g) / rho_g * mixing)
        x1 = rho_g * x0 + g.gamma(counts, rho_g / b)
        return x0, x1
    if kind is ProcessKind.THINNED:
        x0 = g.gamma(a, 1.0 / b, size=n)
        g1 = g.gamma(a * rho_g, 1.0, size=n)
        g2 = g.gamma(a * (1.0 - rho_g), 1.0, size=n)
        x1 = g1 / (g1 + g2) * x0 + g.gamma(a * (1.0 - rho_g), 1.0 / b, size=n)
        return x0, x1
    if kind is ProcessKind.RANDOM_MEASURE:
        shared = g.gamma(a * rho_g, 1.0 / b, size=n)
        own0 = g.gamma(a * (1.0 - rho_g), 1.0 / b, size=n)
        own1 = g.gamma(a * (1.0 - rho_g), 1.0 / b, size=n)
        return shared + own0, shared + own1
    if kind is ProcessKind.CHANGE_POINT:
        x0 = g.gamma(a, 1.0 / b, size=n)
        keep = g.random(n) < rho_g
        fresh = g.gamma(a, 1.0 / b, size=n)
        return x0, np.where(keep, x0, fresh)
    if kind is ProcessKind.SQUARED_OU:
        x0 = g.gamma(a, 1.0 / b, size=n)
        c = b / (1.0 - rho_g)
        k = g.poisson(c * x0 * rho_g)
        x1 = g.gamma(a + k, 1.0 / c, size=n)
        return x0, x1
    raise UnsupportedKindError(
        f"no closed-form pair comparison (and no pair sampler) for kind {kind!r}"
    )


def triplet_sample(kind: ProcessKind, n, params: GammaParams, dep: Dependence, master_seed, gap=1.0):
    """n i.i.d. copies of (X_0, X_gap, X_2gap) for the thinned/random-measure pair.

    These two kinds share all pair laws; their joint laws first differ at
    three points, which is what this sampler exists to expose.
    """
    n = _require_positive_int("n", n)
    g = derive_stream(master_seed, 0).gen
    a, b = params.alpha, params.beta
    rho_g = dep.rho ** float(gap)
    if kind is ProcessKind.THINNED:
        x0 = g.gamma(a, 1.0 / b, size=n)
        out = np.empty((3, n))
        out[0] = x0
        x = x0
        for step in (1, 2):
            g1 = g.gamma(a * rho_g, 1.0, size=n)
            g2 = g.gamma(a * (1.0 - rho_g), 1.0, size=n)
            x = g1 / (g1 + g2) * x + g.gamma(a * (1.0 - rho_g), 1.0 / b, size=n)
            out[step] = x
        return out
    if kind is ProcessKind.RANDOM_MEASURE:
        shapes = _rm_triplet_shapes(params, rho_g)
        cells = {
            block: g.gamma(a * shape, 1.0 / b, size=n) for block, shape in shapes.items()
        }
        out = np.empty((3, n))
        out[0] = cells[(0, 0)] + cells[(0, 1)] + cells[(0, 2)]
        out[1] = cells[(1, 1)] + cells[(0, 1)] + cells[(1, 2)] + cells[(0, 2)]
        out[2] = cells[(2, 2)] + cells[(1, 2)] + cells[(0, 2)]
        return out
    raise UnsupportedKindError(
        f"triplet comparison is defined for the thinned/random-measure pair, not {kind!r}"
    )
