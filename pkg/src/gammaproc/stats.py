"""Statistical verification: moment/ACF/KS checks, empirical chf comparisons,
generator finite differences, reversibility counts, and tail tables.

All pass/fail style quantities are reported as z-scores (deviation divided by
a Monte Carlo standard error) or as KS statistics with the asymptotic 1%
critical value 1.628/sqrt(n); callers decide thresholds (the suite convention
is 4 standard errors per comparison).

Estimators that need i.i.d. replicates consume ensembles column-wise: one
observation per path.  Long-path estimators (the ACF) use batch means to get
standard errors that survive serial dependence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .analytic import generator_apply, levy_tail, pair_chf, TestFunction
from .core import (
    Dependence,
    Ensemble,
    GammaParams,
    ParameterError,
    ProcessKind,
    SamplePath,
    derive_stream,
)

__all__ = [
    "MomentReport",
    "empirical_moments",
    "AcfReport",
    "empirical_acf",
    "KsReport",
    "ks_statistic",
    "ChfEstimate",
    "empirical_chf",
    "ChfComparison",
    "chf_gof",
    "TripletReport",
    "triplet_discrimination",
    "ReversibilityReport",
    "reversibility_check",
    "GeneratorCheck",
    "generator_check",
    "TailTable",
    "tail_check",
    "default_omega_axis",
    "default_omega_pairs",
]


# -- moments ------------------------------------------------------------------


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    se_mean: float
    variance: float
    se_variance: float

    def z_scores(self, params: GammaParams):
        """(z_mean, z_variance) against the Ga(alpha, beta) targets."""
        return (
            abs(self.mean - params.mean) / self.se_mean,
            abs(self.variance - params.var) / self.se_variance,
        )


def empirical_moments(values) -> MomentReport:
    """Sample mean and variance with asymptotic standard errors.

    se(mean) = s/sqrt(n); se(variance) uses the asymptotic variance
    (m4 - m2^2)/n of the sample variance, with central moments m2, m4.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ParameterError("empirical_moments needs a 1-D sample of size >= 2")
    n = x.size
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d * d))
    m4 = float(np.mean(d**4))
    var = m2 * n / (n - 1)
    se_var = np.sqrt(max(m4 - m2 * m2, 0.0) / n)
    return MomentReport(
        n=n,
        mean=mean,
        se_mean=float(np.sqrt(m2 / (n - 1))),
        variance=float(var),
        se_variance=float(se_var),
    )


# -- autocorrelation ----------------------------------------------------------


@dataclass(frozen=True)
class AcfReport:
    lags: np.ndarray
    estimates: np.ndarray
    standard_errors: np.ndarray
    target: np.ndarray
    batch_len: int
    n: int

    @property
    def max_z(self):
        return float(np.max(np.abs(self.estimates - self.target) / self.standard_errors))


def empirical_acf(path: SamplePath, dep: Dependence, max_lag, batch_len=None) -> AcfReport:
    """Stationary ACF estimate at lags 1..max_lag with batch-means standard errors.

    The estimate at lag k is the mean of y_t = (x_t - m)(x_{t+k} - m)/v over t
    (m, v the global sample mean/variance); its standard error is the batch-
    means error of that mean.  The default batch length is 50 autocorrelation
    times, i.e. ceil(50 / (lam * dt)) steps, so neighbouring batches are
    effectively independent.  Targets are the geometric column rho_1^k with
    rho_1 = rho**dt (built by cumulative products, so target[k] = target[k-1] *
    rho_1 exactly).
    """
    max_lag = int(max_lag)
    if max_lag < 1:
        raise ParameterError("max_lag must be >= 1")
    x = path.values
    n = x.size
    if n < 10 * max_lag:
        raise ParameterError(
            f"path of length {n} is too short for max_lag={max_lag} (need >= {10 * max_lag})"
        )
    gaps = path.grid.gaps
    dt = float(gaps[0])
    if np.any(np.abs(gaps - dt) > 1e-9 * max(dt, 1.0)):
        raise ParameterError("empirical_acf requires a uniform grid")
    if batch_len is None:
        batch_len = int(np.ceil(50.0 / (dep.lam * dt)))
    batch_len = max(int(batch_len), 1)
    m = float(np.mean(x))
    d = x - m
    v = float(np.mean(d * d))
    if v <= 0.0:
        raise ParameterError("path has zero variance; ACF undefined")
    lags = np.arange(1, max_lag + 1)
    est = np.empty(max_lag)
    se = np.empty(max_lag)
    for i, k in enumerate(lags):
        y = d[: n - k] * d[k:] / v
        nb = y.size // batch_len
        if nb < 2:
            raise ParameterError(
                f"path too short for batch-means standard errors (batch_len={batch_len})"
            )
        bm = np.mean(y[: nb * batch_len].reshape(nb, batch_len), axis=1)
        est[i] = float(np.mean(y))
        se[i] = float(np.std(bm, ddof=1) / np.sqrt(nb))
    rho_1 = dep.gap_corr(dt)
    target = np.cumprod(np.full(max_lag, rho_1))
    return AcfReport(
        lags=lags, estimates=est, standard_errors=se, target=target,
        batch_len=int(batch_len), n=n,
    )


# -- Kolmogorov-Smirnov against the gamma marginal ----------------------------


@dataclass(frozen=True)
class KsReport:
    n: int
    statistic: float
    critical_1pct: float

    @property
    def passed(self):
        return self.statistic < self.critical_1pct


def ks_statistic(values, params: GammaParams) -> KsReport:
    """Sup-distance between the empirical cdf and the Ga(alpha, beta) cdf.

    The 1% critical value is the asymptotic 1.628/sqrt(n).
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n < 100:
        raise ParameterError(f"ks_statistic needs at least 100 values, got {n}")
    # the target law lives on [0, inf); anything below has cdf 0
    cdf = special.gammainc(params.alpha, params.beta * np.maximum(x, 0.0))
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return KsReport(n=n, statistic=float(max(d_plus, d_minus)),
                    critical_1pct=float(1.628 / np.sqrt(n)))


# -- empirical characteristic functions ---------------------------------------


@dataclass(frozen=True)
class ChfEstimate:
    """(1/N) sum exp(i <omega, X>) per omega row, with componentwise standard errors."""

    omegas: np.ndarray
    estimate: np.ndarray
    se_re: np.ndarray
    se_im: np.ndarray
    n: int


def _as_omega_matrix(omegas, d=None):
    w = np.asarray(omegas, dtype=float)
    if w.ndim == 1:
        w = w[:, None] if d in (None, 1) else w[None, :]
    if w.ndim != 2:
        raise ParameterError("omegas must be a vector or a matrix of row vectors")
    return w


_CHF_BLOCK = 1 << 17


def empirical_chf(samples, omegas) -> ChfEstimate:
    """Empirical joint chf of an (N, d) sample at each row of ``omegas`` (M, d).

    Standard errors are the standard deviations of cos/sin summands over
    sqrt(N), hence bounded by 1/sqrt(N).  Accumulation is blocked (pairwise
    sums within a block, exact compensated combination of the block totals),
    so million-replicate estimates neither blow memory nor lose digits.  The
    estimator is exactly conjugate-symmetric: evaluating at -omega conjugates
    the estimate bit for bit.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 2:
        raise ParameterError("samples must be an (N, d) array with N >= 2")
    w = _as_omega_matrix(omegas, d=x.shape[1])
    if w.shape[1] != x.shape[1]:
        raise ParameterError(
            f"omega dimension {w.shape[1]} does not match sample dimension {x.shape[1]}"
        )
    n, m = x.shape[0], w.shape[0]
    wt = w.T
    sums = [[[] for _ in range(m)] for _ in range(4)]  # re, im, re^2, im^2
    for s in range(0, n, _CHF_BLOCK):
        phase = x[s : s + _CHF_BLOCK] @ wt
        re = np.cos(phase)
        im = np.sin(phase)
        for acc, block in zip(sums, (re, im, re * re, im * im)):
            col = np.sum(block, axis=0)
            for j in range(m):
                acc[j].append(col[j])
    tot = np.array([[math.fsum(acc_j) for acc_j in acc] for acc in sums])
    mean_re, mean_im = tot[0] / n, tot[1] / n
    var_re = np.maximum(tot[2] - n * mean_re**2, 0.0) / (n - 1)
    var_im = np.maximum(tot[3] - n * mean_im**2, 0.0) / (n - 1)
    return ChfEstimate(
        omegas=w,
        estimate=mean_re + 1j * mean_im,
        se_re=np.sqrt(var_re / n),
        se_im=np.sqrt(var_im / n),
        n=n,
    )


def default_omega_axis(beta):
    """The default per-coordinate frequency grid {+-0.25, +-0.5, +-1, +-2}/beta."""
    base = np.array([0.25, 0.5, 1.0, 2.0])
    return np.concatenate((base, -base)) / beta


def default_omega_pairs(beta):
    """All 64 (s, t) pairs from the default axis."""
    ax = default_omega_axis(beta)
    s, t = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack((s.ravel(), t.ravel()))


@dataclass(frozen=True)
class ChfComparison:
    omegas: np.ndarray
    empirical: np.ndarray
    se_re: np.ndarray
    se_im: np.ndarray
    analytic: np.ndarray
    z_scores: np.ndarray
    n: int

    @property
    def max_z(self):
        return float(np.max(self.z_scores))

    @property
    def argmax_omega(self):
        return self.omegas[int(np.argmax(self.z_scores))]


def _z_scores(est: ChfEstimate, analytic):
    diff = est.estimate - analytic
    z_re = np.abs(diff.real) / est.se_re
    z_im = np.abs(diff.imag) / est.se_im
    return np.maximum(z_re, z_im)


def chf_gof(ensemble: Ensemble, params: GammaParams, dep: Dependence,
            omegas=None, lag=1) -> ChfComparison:
    """Empirical pair chf of (X_{t_0}, X_{t_lag}) across paths vs the closed form.

    One pair per path keeps the replicates i.i.d., so the componentwise
    standard errors are honest.  The analytic side is ``pair_chf`` at the
    pair correlation rho**(t_lag - t_0).
    """
    lag = int(lag)
    if lag < 1 or lag >= ensemble.grid.n:
        raise ParameterError(f"lag must be in [1, {ensemble.grid.n - 1}], got {lag}")
    gaps = ensemble.grid.gaps
    if np.any(np.abs(gaps - gaps[0]) > 1e-9 * max(float(gaps[0]), 1.0)):
        raise ParameterError("chf_gof requires a uniform grid")
    if omegas is None:
        omegas = default_omega_pairs(params.beta)
    w = _as_omega_matrix(omegas)
    if w.shape[1] != 2:
        raise ParameterError("chf_gof omegas must be (s, t) pairs")
    span = float(ensemble.grid.times[lag] - ensemble.grid.times[0])
    dep_pair = Dependence.from_rho(dep.gap_corr(span))
    samples = ensemble.values[:, [0, lag]]
    est = empirical_chf(samples, w)
    analytic = np.array(
        [pair_chf(ensemble.kind, s, t, params, dep_pair) for s, t in w]
    )
    z = _z_scores(est, analytic)
    return ChfComparison(
        omegas=w, empirical=est.estimate, se_re=est.se_re, se_im=est.se_im,
        analytic=analytic, z_scores=z, n=est.n,
    )


@dataclass(frozen=True)
class TripletReport:
    omegas: np.ndarray
    z_scores: np.ndarray
    estimate_a: np.ndarray
    estimate_b: np.ndarray
    n_a: int
    n_b: int

    @property
    def max_z(self):
        return float(np.max(self.z_scores))

    @property
    def argmax_omega(self):
        return self.omegas[int(np.argmax(self.z_scores))]


def triplet_discrimination(ensemble_a: Ensemble, ensemble_b: Ensemble, omegas) -> TripletReport:
    """Two-sample comparison of trivariate chfs over consecutive triplets.

    z at each omega-triple is the larger of |Re diff| and |Im diff| divided by
    the pooled standard error sqrt(se_a^2 + se_b^2); the statistic is exactly
    symmetric in the two ensembles.
    """
    ga, gb = ensemble_a.grid, ensemble_b.grid
    if ga.n < 3 or gb.n < 3:
        raise ParameterError("triplet_discrimination needs grids with at least 3 points")
    if ga.n != gb.n or not np.array_equal(ga.times, gb.times):
        raise ParameterError("ensembles must share the same grid")
    w = _as_omega_matrix(omegas)
    if w.shape[1] != 3:
        raise ParameterError("triplet omegas must be (w1, w2, w3) rows")
    est_a = empirical_chf(ensemble_a.values[:, :3], w)
    est_b = empirical_chf(ensemble_b.values[:, :3], w)
    diff = est_a.estimate - est_b.estimate
    se_re = np.sqrt(est_a.se_re**2 + est_b.se_re**2)
    se_im = np.sqrt(est_a.se_im**2 + est_b.se_im**2)
    z = np.maximum(np.abs(diff.real) / se_re, np.abs(diff.imag) / se_im)
    return TripletReport(
        omegas=w, z_scores=z, estimate_a=est_a.estimate, estimate_b=est_b.estimate,
        n_a=est_a.n, n_b=est_b.n,
    )


# -- pathwise time-reversal asymmetry ------------------------------------------


@dataclass(frozen=True)
class ReversibilityReport:
    n_steps: int
    forward_violations: int
    backward_violations: int

    @property
    def backward_violation_rate(self):
        return self.backward_violations / self.n_steps


def reversibility_check(path: SamplePath, dep: Dependence) -> ReversibilityReport:
    """Count violations of X_{t_k} >= rho_k X_{t_{k-1}} forward and backward in time.

    The per-gap factor is computed as rho ** gap, the same expression the path
    samplers use, so the forward check reproduces exactly the floating-point
    products the recursion formed.  The AR(1) construction adds a nonnegative
    innovation to that product, hence never violates forward; its time
    reversal has no such constraint.
    """
    x = path.values
    if x.size < 2:
        raise ParameterError("need at least 2 observations")
    rho_g = dep.rho ** path.grid.gaps
    fwd = int(np.count_nonzero(x[1:] < rho_g * x[:-1]))
    bwd = int(np.count_nonzero(x[:-1] < rho_g * x[1:]))
    return ReversibilityReport(n_steps=x.size - 1, forward_violations=fwd,
                               backward_violations=bwd)


# -- infinitesimal generators --------------------------------------------------


@dataclass(frozen=True)
class GeneratorCheck:
    kind: ProcessKind
    phi: TestFunction
    x0: float
    epsilon: float
    n_mc: int
    fd_estimate: float
    se: float
    analytic: float

    @property
    def z(self):
        return abs(self.fd_estimate - self.analytic) / self.se


def generator_check(
    kind: ProcessKind,
    phi: TestFunction,
    x0,
    params: GammaParams,
    dep: Dependence,
    epsilon=None,
    n_mc=1_000_000,
    master_seed=0,
) -> GeneratorCheck:
    """Finite-difference generator estimate (E[phi(X_eps) | X_0 = x0] - phi(x0))/eps.

    Every replicate starts exactly at x0 and makes one conditional step of
    length eps: the exact Poisson-gamma transition for the squared OU kind,
    one thinning/top-up lattice step for the continuously-thinned kind.  The
    default eps = 1e-3/lam keeps the O(eps) finite-difference bias far below
    the Monte Carlo standard error at n_mc ~ 1e6.
    """
    x0 = float(x0)
    if x0 < 0.0:
        raise ParameterError(f"x0 must be nonnegative, got {x0}")
    n_mc = int(n_mc)
    if n_mc < 2:
        raise ParameterError("n_mc must be at least 2")
    if epsilon is None:
        epsilon = 1e-3 / dep.lam
    eps = float(epsilon)
    if eps <= 0.0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    g = derive_stream(master_seed, 0).gen
    a, b = params.alpha, params.beta
    if kind not in (ProcessKind.SQUARED_OU, ProcessKind.CONTINUOUSLY_THINNED):
        raise ParameterError(
            f"generator_check supports the squared-OU and continuously-thinned kinds, not {kind!r}"
        )
    phi_x0 = float(phi.phi(x0))
    sum_blocks, sq_blocks = [], []
    done = 0
    while done < n_mc:
        nb = min(n_mc - done, _CHF_BLOCK)
        if kind is ProcessKind.SQUARED_OU:
            rho_d = dep.rho**eps
            c = b / (1.0 - rho_d)
            k = g.poisson(c * x0 * rho_d, size=nb)
            y = g.gamma(a + k, 1.0 / c, size=nb)
        else:
            q = dep.rho**eps
            p = 1.0 - q
            g1 = g.gamma(a * p, 1.0, size=nb)
            g2 = g.gamma(a * q, 1.0, size=nb)
            s = g1 + g2
            thin = np.where(s > 0.0, g1 / np.where(s > 0.0, s, 1.0), p)
            y = (1.0 - thin) * x0 + g.gamma(a * p, 1.0 / b, size=nb)
        d = (phi.phi(y) - phi_x0) / eps
        sum_blocks.append(np.sum(d))
        sq_blocks.append(np.sum(d * d))
        done += nb
    fd = math.fsum(sum_blocks) / n_mc
    var = max(math.fsum(sq_blocks) - n_mc * fd * fd, 0.0) / (n_mc - 1)
    se = float(np.sqrt(var / n_mc))
    analytic = generator_apply(kind, phi, x0, params, dep)
    return GeneratorCheck(
        kind=kind, phi=phi, x0=x0, epsilon=eps, n_mc=n_mc,
        fd_estimate=fd, se=se, analytic=analytic,
    )


# -- tail table ----------------------------------------------------------------


@dataclass(frozen=True)
class TailTable:
    """Tail comparison rows: survival P[X > u], Levy tail, and its exponential approximant.

    The three trailing columns are -log(value)/(beta u); all approach 1 as
    beta u grows.  ``tail_ok`` records whether |column - 1| is non-increasing
    along the grid, assessed only where u >= 5/beta (below that the
    approximation is out of regime and nothing is asserted).
    """

    u: np.ndarray
    survival: np.ndarray
    levy_exact: np.ndarray
    approximant: np.ndarray
    nl_survival: np.ndarray
    nl_levy: np.ndarray
    nl_approximant: np.ndarray
    tail_ok: bool


def tail_check(params: GammaParams, u_grid) -> TailTable:
    from .analytic import gamma_survival

    u = np.asarray(u_grid, dtype=float)
    if u.ndim != 1 or u.size < 1 or np.any(u <= 0.0) or np.any(np.diff(u) <= 0.0):
        raise ParameterError("u_grid must be strictly increasing and positive")
    surv = np.array([gamma_survival(v, params) for v in u])
    tails = [levy_tail(v, params) for v in u]
    exact = np.array([t.exact for t in tails])
    approx = np.array([t.approximant for t in tails])
    bu = params.beta * u
    with np.errstate(divide="ignore"):
        nl_surv = -np.log(surv) / bu
        nl_levy = -np.log(exact) / bu
        nl_approx = -np.log(approx) / bu
    ok = True
    in_regime = u >= 5.0 / params.beta
    for col in (nl_surv, nl_levy, nl_approx):
        gap = np.abs(col[in_regime] - 1.0)
        if gap.size >= 2 and np.any(np.diff(gap) > 1e-12):
            ok = False
    return TailTable(
        u=u, survival=surv, levy_exact=exact, approximant=approx,
        nl_survival=nl_surv, nl_levy=nl_levy, nl_approximant=nl_approx,
        tail_ok=bool(ok),
    )
